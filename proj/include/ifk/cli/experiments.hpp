#pragma once

#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifk/cli/config.hpp"

namespace ifk::cli {

struct Column {
    std::string name;
    std::string doc;
};

struct KeySpec {
    std::string key;
    std::string fallback;
    std::string doc;
};

// value must lie in [lo, hi]; info rows never fail
struct Threshold {
    std::string name;
    double value = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool info = false;
    bool pass() const;
};

struct Outcome {
    std::vector<std::vector<std::string>> rows;
    nlohmann::json estimates = nlohmann::json::object();
    std::vector<Threshold> thresholds;
    bool pass() const;

    void below(const std::string& name, double value, double hi) { thresholds.push_back({name, value, -inf(), hi}); }
    void above(const std::string& name, double value, double lo) { thresholds.push_back({name, value, lo, inf()}); }
    void within(const std::string& name, double value, double lo, double hi) { thresholds.push_back({name, value, lo, hi}); }
    void note(const std::string& name, double value) { thresholds.push_back({name, value, -inf(), inf(), true}); }

private:
    static double inf() { return std::numeric_limits<double>::infinity(); }
};

struct RunContext {
    const Config& cfg;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct Experiment {
    std::string name;
    std::string tag;
    std::string description;
    std::vector<KeySpec> keys;
    std::vector<Column> columns;
    std::function<Outcome(const RunContext&)> run;
};

// sorted by name
const std::vector<Experiment>& registry();
const Experiment* find_experiment(const std::string& name);
// keys every config may carry
const std::set<std::string>& common_keys();

// CSV cell text; doubles keep 17 significant digits
std::string cell(double x);
std::string cell(long long x);
inline std::string cell(int x) { return cell(static_cast<long long>(x)); }
inline std::string cell(std::size_t x) { return cell(static_cast<long long>(x)); }
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(const char* s) { return s; }

}  // namespace ifk::cli
