#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace bbm::io {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Writes content to path through a temporary sibling file and a rename, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Comma-separated text with LF line endings and a header row.
class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<std::string_view> header);
    explicit CsvWriter(const std::vector<std::string>& header);

    /// Optional "# key=value" line emitted before the header.
    void set_comment(std::string comment) { comment_ = std::move(comment); }

    CsvWriter& row(std::initializer_list<double> values);
    CsvWriter& row(const std::vector<std::string>& cells);

    std::string str() const;

private:
    std::string comment_;
    std::string body_;
};

/// Parses a numeric CSV with a header row. Lines starting with '#' are skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(std::string_view name) const;
};

CsvTable parse_csv(const std::string& text);

}  // namespace bbm::io
