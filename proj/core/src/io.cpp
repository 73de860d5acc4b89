#include "bbm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace bbm::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto name : header) {
        if (!first) body_ += ',';
        body_ += name;
        first = false;
    }
    body_ += '\n';
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body_ += ',';
        body_ += header[i];
    }
    body_ += '\n';
}

CsvWriter& CsvWriter::row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) body_ += ',';
        body_ += format_double(v);
        first = false;
    }
    body_ += '\n';
    return *this;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
    return *this;
}

std::string CsvWriter::str() const {
    if (comment_.empty()) return body_;
    return "# " + comment_ + "\n" + body_;
}

std::vector<double> CsvTable::column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] != name) continue;
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.at(j));
        return out;
    }
    throw std::out_of_range("no CSV column named " + std::string(name));
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_number(const std::string& cell) {
    if (cell == "inf") return INFINITY;
    if (cell == "-inf") return -INFINITY;
    if (cell == "nan") return NAN;
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto result = std::from_chars(cell.data(), end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw std::invalid_argument("not a number in CSV: '" + cell + "'");
    return value;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cells = split(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw std::invalid_argument("CSV row width does not match header");
        std::vector<double> values;
        values.reserve(cells.size());
        for (const auto& c : cells) values.push_back(parse_number(c));
        table.rows.push_back(std::move(values));
    }
    if (!have_header) throw std::invalid_argument("CSV has no header");
    return table;
}

}  // namespace bbm::io
