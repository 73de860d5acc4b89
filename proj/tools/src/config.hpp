#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbm::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key = value file. Grammar, one entry per line:
///
///   key   = [A-Za-z_][A-Za-z0-9_.]*
///   value = number | true | false | "quoted string" | bare-word
///         | '[' value (',' value)* ']' | '[' ']'
///
/// '#' starts a comment outside quotes. Duplicate keys are errors.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) const;
    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const;
    /// A scalar is read as a one-element list.
    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) const;

    /// Sets or replaces a scalar entry.
    void set(const std::string& key, const std::string& value);

    /// Throws ConfigError naming the first key not in allowed.
    void require_known(const std::set<std::string>& allowed) const;

    /// Canonical "key=value" lines in key order; numbers are normalized so
    /// that 1, 1.0 and 1e0 agree.
    std::string canonical() const;

    /// 16 hex digits of FNV-1a over canonical().
    std::string digest() const;

private:
    struct Entry {
        std::vector<std::string> items;
        std::vector<bool> quoted;
        bool list = false;
        int line = 0;
    };

    const Entry& entry(const std::string& key) const;
    static double to_number(const std::string& key, const std::string& text);

    std::map<std::string, Entry> entries_;
};

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(const std::string& data);

}  // namespace bbm::cli
