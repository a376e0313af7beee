#include "ifk/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ifk/fk_model.hpp"

namespace ifk::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    if (v.is_array()) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].is_array() || v[i].is_object()) throw ConfigError("nested value not allowed in list '" + key + "'");
            out += (i ? "," : "") + json_scalar(v[i], key);
        }
        return out;
    }
    throw ConfigError("unsupported value for '" + key + "'");
}

void parse_json(const std::string& text, const std::string& source, std::map<std::string, Config::Value>& out) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(source + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source + ": top-level JSON value must be an object");
    for (auto& [k, v] : j.items()) {
        if (v.is_object()) {
            for (auto& [k2, v2] : v.items()) {
                if (v2.is_object()) throw ConfigError(source + ": key '" + k + "." + k2 + "' nests deeper than one level");
                out[k + "." + k2] = Config::Value{json_scalar(v2, k + "." + k2), 0};
            }
        } else {
            out[k] = Config::Value{json_scalar(v, k), 0};
        }
    }
}

}  // namespace

double parse_number(const std::string& raw) {
    std::string s = trim(raw);
    if (s == "beta_c") return beta_critical();
    if (s == "p_sd") return FKParams::self_dual(2);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        double den = parse_number(s.substr(slash + 1));
        if (den == 0) throw ConfigError("division by zero in '" + s + "'");
        return parse_number(s.substr(0, slash)) / den;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Config Config::parse(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.source_ = source;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        parse_json(text, source, cfg.values_);
        return cfg;
    }
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section)) fail("bad section name '" + section + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto dot = key.find('.');
        if (dot != std::string::npos) {
            if (!section.empty()) fail("dotted key '" + key + "' inside section [" + section + "]");
            if (!valid_key(key.substr(0, dot)) || !valid_key(key.substr(dot + 1))) fail("bad key '" + key + "'");
        } else {
            if (!valid_key(key)) fail("bad key '" + key + "'");
            if (!section.empty()) key = section + "." + key;
        }
        if (cfg.values_.count(key)) fail("duplicate key '" + key + "'");
        cfg.values_[key] = Value{value, lineno};
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

std::string Config::where(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end() && it->second.line > 0) return source_ + ":" + std::to_string(it->second.line) + ": ";
    return source_ + ": ";
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.text;
}

double Config::num(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return parse_number(it->second.text);
    } catch (const ConfigError& e) {
        throw ConfigError(where(key) + "key '" + key + "': " + e.what());
    }
}

long long Config::integer(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second.text;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(where(key) + "key '" + key + "': not an integer: '" + s + "'");
    return v;
}

std::uint64_t Config::u64(const std::string& key) const {
    require(key);
    const std::string& s = values_.at(key).text;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(where(key) + "key '" + key + "': not a non-negative integer: '" + s + "'");
    return v;
}

std::vector<double> Config::nums(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    try {
        for (auto& item : split_list(it->second.text)) out.push_back(parse_number(item));
    } catch (const ConfigError& e) {
        throw ConfigError(where(key) + "key '" + key + "': " + e.what());
    }
    return out;
}

std::vector<std::string> Config::strs(const std::string& key, const std::vector<std::string>& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : split_list(it->second.text);
}

void Config::require(const std::string& key) const {
    if (!has(key)) throw ConfigError(source_ + ": missing required field '" + key + "'");
}

void Config::reject_unknown(const std::set<std::string>& allowed) const {
    for (auto& [k, v] : values_)
        if (!allowed.count(k)) throw ConfigError(where(k) + "unknown key '" + k + "'");
}

std::string Config::canonical(const std::set<std::string>& skip) const {
    std::string out;
    for (auto& [k, v] : values_)
        if (!skip.count(k)) out += k + "=" + v.text + "\n";
    return out;
}

std::uint64_t Config::hash(const std::set<std::string>& skip) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical(skip)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace ifk::cli
