#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ifk/common.hpp"

namespace ifk::cli {

struct ConfigError : Error {
    using Error::Error;
};

// Flat key = value text with [section] headers (or dotted keys) for one
// level of nesting; '#' starts a comment. JSON objects with at most one
// level of nested objects are accepted too.
class Config {
public:
    struct Value {
        std::string text;
        int line = 0;  // 0 when the value did not come from a text file
    };

    static Config parse(const std::string& text, const std::string& source = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& text) { values_[key] = Value{text, 0}; }
    const std::map<std::string, Value>& values() const { return values_; }
    const std::string& source() const { return source_; }

    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;
    long long integer(const std::string& key, long long fallback) const;
    std::uint64_t u64(const std::string& key) const;
    std::vector<double> nums(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> strs(const std::string& key, const std::vector<std::string>& fallback) const;

    void require(const std::string& key) const;
    // throws on the first key outside allowed, citing its line
    void reject_unknown(const std::set<std::string>& allowed) const;

    // sorted key=value lines, keys in skip left out
    std::string canonical(const std::set<std::string>& skip = {}) const;
    std::uint64_t hash(const std::set<std::string>& skip = {}) const;

    // "file:line: " or "file: " prefix for messages about key
    std::string where(const std::string& key) const;

private:
    std::map<std::string, Value> values_;
    std::string source_;
};

// Number with the symbolic forms beta_c, p_sd and a/b fractions.
double parse_number(const std::string& text);
std::string hex64(std::uint64_t h);

}  // namespace ifk::cli
