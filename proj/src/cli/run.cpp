#include "ifk/cli/run.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef IFK_GIT_DESCRIBE
#define IFK_GIT_DESCRIBE "unknown"
#endif

namespace ifk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kUnhashed = {"threads", "out"};

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

std::string utc_stamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path fresh_directory(const fs::path& parent) {
    std::string stamp = utc_stamp();
    fs::path dir = parent / stamp;
    for (int k = 2; fs::exists(dir); ++k) dir = parent / (stamp + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
}

}  // namespace

std::string git_describe() { return IFK_GIT_DESCRIBE; }

std::string csv_text(const Experiment& e, const Outcome& o) {
    std::string out;
    for (std::size_t i = 0; i < e.columns.size(); ++i) out += (i ? "," : "") + e.columns[i].name;
    out += "\n";
    for (const auto& row : o.rows) {
        if (row.size() != e.columns.size())
            throw Error("internal: row width " + std::to_string(row.size()) + " does not match the " + e.name +
                        " schema");
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(row[i]);
        out += "\n";
    }
    return out;
}

json summary_json(const Experiment& e, const Config& cfg, std::uint64_t seed, const Outcome& o) {
    json config = json::object();
    for (const auto& [k, v] : cfg.values())
        if (!kUnhashed.count(k)) config[k] = v.text;
    json th = json::array();
    for (const auto& t : o.thresholds)
        th.push_back({{"name", t.name},
                      {"value", std::isfinite(t.value) ? json(t.value) : json(nullptr)},
                      {"lo", std::isfinite(t.lo) ? json(t.lo) : json(nullptr)},
                      {"hi", std::isfinite(t.hi) ? json(t.hi) : json(nullptr)},
                      {"info", t.info},
                      {"pass", t.pass()}});
    json cols = json::array();
    for (const auto& c : e.columns) cols.push_back(c.name);
    return {{"experiment", e.name},  {"tag", e.tag},         {"seed", seed},
            {"config_hash", hex64(cfg.hash(kUnhashed))}, {"config", config},
            {"git_describe", git_describe()}, {"columns", cols}, {"rows", o.rows.size()},
            {"estimates", o.estimates}, {"thresholds", th}, {"pass", o.pass()}};
}

RunReport run_config(const Config& cfg_in, const RunOptions& opt, std::ostream& log) {
    Config cfg = cfg_in;
    if (opt.seed) cfg.set("seed", std::to_string(*opt.seed));
    cfg.require("experiment");
    cfg.require("seed");
    const Experiment* e = find_experiment(cfg.str("experiment", ""));
    if (!e) throw ConfigError(cfg.where("experiment") + "unknown experiment '" + cfg.str("experiment", "") + "'");
    std::set<std::string> allowed = common_keys();
    for (const auto& k : e->keys) allowed.insert(k.key);
    cfg.reject_unknown(allowed);
    std::uint64_t seed = cfg.u64("seed");

    int threads = int(std::max(1u, std::thread::hardware_concurrency()));
    if (cfg.has("threads")) threads = int(cfg.integer("threads", threads));
    if (opt.threads) threads = *opt.threads;
    if (threads < 1) throw ConfigError(cfg.where("threads") + "threads must be positive");
    std::string out = opt.out ? *opt.out : cfg.str("out", "results");

    RunContext ctx{cfg, seed, threads};
    Outcome o = e->run(ctx);

    RunReport rep;
    fs::path dir = fresh_directory(fs::path(out) / e->name);
    rep.directory = dir.string();
    rep.csv_path = (dir / "results.csv").string();
    rep.json_path = (dir / "summary.json").string();
    write_file(rep.csv_path, csv_text(*e, o));
    write_file(rep.json_path, summary_json(*e, cfg, seed, o).dump(2) + "\n");
    rep.pass = o.pass();

    for (const auto& t : o.thresholds) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", t.value);
        log << (t.info ? "info" : t.pass() ? "pass" : "FAIL") << "  " << t.name << " = " << buf;
        if (!t.info) {
            if (std::isfinite(t.lo)) log << "  lo " << t.lo;
            if (std::isfinite(t.hi)) log << "  hi " << t.hi;
        }
        log << "\n";
    }
    log << e->name << ": " << (rep.pass ? "ok" : "threshold failed") << ", results in " << rep.directory << "\n";
    return rep;
}

int run_main(const RunOptions& opt, std::ostream& log, std::ostream& err) {
    try {
        Config cfg = Config::load(opt.config_path);
        return run_config(cfg, opt, log).pass ? kOk : kThresholdFailed;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kError;
}

std::string list_text() {
    std::size_t w = 0, wt = 0;
    for (const auto& e : registry()) {
        w = std::max(w, e.name.size());
        wt = std::max(wt, e.tag.size() + 2);
    }
    std::ostringstream os;
    for (const auto& e : registry()) {
        std::string tag = "[" + e.tag + "]";
        os << e.name << std::string(w - e.name.size() + 2, ' ') << tag << std::string(wt - tag.size() + 2, ' ')
           << e.description << "\n";
    }
    return os.str();
}

json schema_json(const Experiment& e) {
    json cols = json::array();
    for (const auto& c : e.columns) cols.push_back({{"name", c.name}, {"description", c.doc}});
    json keys = json::array();
    for (const auto& k : e.keys) keys.push_back({{"key", k.key}, {"default", k.fallback}, {"description", k.doc}});
    return {{"experiment", e.name}, {"tag", e.tag}, {"description", e.description}, {"columns", cols},
            {"keys", keys}};
}

std::string schema_markdown() {
    std::ostringstream os;
    os << "## Result files\n\n"
       << "Each run writes `results.csv` and `summary.json` to `<out>/<experiment>/<UTC timestamp>/`.\n"
       << "The summary holds the seed, the config hash, the binary version, estimates and thresholds.\n";
    for (const auto& e : registry()) {
        os << "\n### " << e.name << "\n\n" << e.description << ".\n\n| column | meaning |\n|---|---|\n";
        for (const auto& c : e.columns) os << "| `" << c.name << "` | " << c.doc << " |\n";
    }
    return os.str();
}

}  // namespace ifk::cli
