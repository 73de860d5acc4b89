#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "bbm/io.hpp"

namespace bbm::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
    if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_')) return false;
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return true;
}

std::string where(int line) { return "config line " + std::to_string(line) + ": "; }

// Strips a trailing comment, honouring quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

// Splits a value into items; returns {item, quoted} pairs.
std::vector<std::pair<std::string, bool>> split_items(const std::string& text, int line) {
    std::vector<std::pair<std::string, bool>> items;
    std::string current;
    bool quoted = false, was_quoted = false;
    auto flush = [&] {
        const std::string t = was_quoted ? current : trim(current);
        if (t.empty() && !was_quoted) throw ConfigError(where(line) + "empty list item");
        items.emplace_back(t, was_quoted);
        current.clear();
        was_quoted = false;
    };
    for (char c : text) {
        if (c == '"') {
            if (!quoted && !trim(current).empty()) throw ConfigError(where(line) + "stray quote");
            if (!quoted) current.clear();
            quoted = !quoted;
            was_quoted = true;
            continue;
        }
        if (c == ',' && !quoted) {
            flush();
            continue;
        }
        if (was_quoted && !quoted) {
            if (!std::isspace(static_cast<unsigned char>(c))) throw ConfigError(where(line) + "text after quoted string");
            continue;
        }
        current += c;
    }
    if (quoted) throw ConfigError(where(line) + "unterminated string");
    flush();
    return items;
}

}  // namespace

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

Config Config::parse(const std::string& text) {
    Config config;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        line = trim(strip_comment(line));
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where(line_no) + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where(line_no) + "invalid key '" + key + "'");
        if (config.entries_.count(key)) throw ConfigError(where(line_no) + "duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError(where(line_no) + "missing value for '" + key + "'");
        Entry entry;
        entry.line = line_no;
        if (value.front() == '[') {
            if (value.back() != ']') throw ConfigError(where(line_no) + "unterminated list for '" + key + "'");
            entry.list = true;
            const std::string inner = trim(value.substr(1, value.size() - 2));
            if (!inner.empty())
                for (auto& [item, q] : split_items(inner, line_no)) {
                    entry.items.push_back(item);
                    entry.quoted.push_back(q);
                }
        } else {
            auto items = split_items(value, line_no);
            if (items.size() != 1) throw ConfigError(where(line_no) + "lists need brackets for '" + key + "'");
            entry.items.push_back(items[0].first);
            entry.quoted.push_back(items[0].second);
        }
        config.entries_[key] = std::move(entry);
        if (end == text.size()) break;
    }
    return config;
}

Config Config::load(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError("cannot read config '" + path + "': " + e.what());
    }
    return parse(text);
}

const Config::Entry& Config::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

double Config::to_number(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
    return value;
}

double Config::number(const std::string& key, std::optional<double> fallback) const {
    if (!has(key) && fallback) return *fallback;
    const Entry& e = entry(key);
    if (e.list || e.quoted[0]) throw ConfigError("key '" + key + "' must be a number");
    return to_number(key, e.items[0]);
}

std::int64_t Config::integer(const std::string& key, std::optional<std::int64_t> fallback) const {
    if (!has(key) && fallback) return *fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("key '" + key + "' must be an integer");
    return static_cast<std::int64_t>(v);
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
    const Entry& e = entry(key);
    if (e.list || e.quoted[0]) throw ConfigError("key '" + key + "' must be a non-negative integer");
    std::uint64_t value = 0;
    const std::string& text = e.items[0];
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "': '" + text + "' is not a non-negative integer");
    return value;
}

bool Config::boolean(const std::string& key, std::optional<bool> fallback) const {
    if (!has(key) && fallback) return *fallback;
    const Entry& e = entry(key);
    if (!e.list && !e.quoted[0]) {
        if (e.items[0] == "true") return true;
        if (e.items[0] == "false") return false;
    }
    throw ConfigError("key '" + key + "' must be true or false");
}

std::string Config::string(const std::string& key, std::optional<std::string> fallback) const {
    if (!has(key) && fallback) return *fallback;
    const Entry& e = entry(key);
    if (e.list) throw ConfigError("key '" + key + "' must be a string");
    return e.items[0];
}

std::vector<double> Config::numbers(const std::string& key, std::optional<std::vector<double>> fallback) const {
    if (!has(key) && fallback) return *fallback;
    const Entry& e = entry(key);
    std::vector<double> out;
    for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (e.quoted[i]) throw ConfigError("key '" + key + "' must hold numbers");
        out.push_back(to_number(key, e.items[i]));
    }
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    Entry e;
    e.items = {value};
    e.quoted = {false};
    entries_[key] = std::move(e);
}

void Config::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, e] : entries_)
        if (!allowed.count(key))
            throw ConfigError(where(e.line) + "unknown key '" + key + "'");
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [key, e] : entries_) {
        auto item = [&](std::size_t i) -> std::string {
            if (e.quoted[i]) return "\"" + e.items[i] + "\"";
            const auto& t = e.items[i];
            // Integers such as seeds keep every digit; other numbers go
            // through double so that 1, 1.0 and 1e0 agree.
            std::uint64_t n = 0;
            const auto [iptr, iec] = std::from_chars(t.data(), t.data() + t.size(), n);
            if (iec == std::errc() && iptr == t.data() + t.size()) return std::to_string(n);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(v)) return io::format_double(v);
            return t;
        };
        out += key + "=";
        if (e.list) {
            out += "[";
            for (std::size_t i = 0; i < e.items.size(); ++i) out += (i ? "," : "") + item(i);
            out += "]";
        } else {
            out += item(0);
        }
        out += "\n";
    }
    return out;
}

std::string Config::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

}  // namespace bbm::cli
