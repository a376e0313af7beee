#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ifk/cli/run.hpp"

using namespace ifk::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("ifk_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kSmallRsw =
    "experiment = rsw\n"
    "seed = 3\n"
    "ns = 4\n"
    "samples = 50\n"
    "control_n = 4\n"
    "control_samples = 20\n"
    "annulus_ns = 4\n"
    "annulus_samples = 20\n";

}  // namespace

TEST(Config, ParsesTextWithSectionsAndComments) {
    auto c = Config::parse("experiment = rsw  # trailing\nseed = 5\n[domain]\nwidth = 4\n", "t.cfg");
    EXPECT_EQ(c.str("experiment", ""), "rsw");
    EXPECT_EQ(c.u64("seed"), 5u);
    EXPECT_EQ(c.integer("domain.width", 0), 4);
}

TEST(Config, SymbolicNumbersAndLists) {
    auto c = Config::parse("p = p_sd\nb = beta_c\nd = 1/16, 1/32\n");
    EXPECT_NEAR(c.num("p", 0), std::sqrt(2.0) / (1 + std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(c.num("b", 0), ifk::beta_critical(), 1e-15);
    EXPECT_EQ(c.nums("d", {}), (std::vector<double>{1.0 / 16, 1.0 / 32}));
    EXPECT_THROW(parse_number("abc"), ConfigError);
}

TEST(Config, AcceptsJson) {
    auto c = Config::parse(R"({"experiment": "kw_duality", "seed": 9, "domain": {"width": 3}, "ns": [8, 16]})");
    EXPECT_EQ(c.str("experiment", ""), "kw_duality");
    EXPECT_EQ(c.integer("domain.width", 0), 3);
    EXPECT_EQ(c.nums("ns", {}), (std::vector<double>{8, 16}));
}

TEST(Config, DuplicateKeyRejected) {
    EXPECT_THROW(Config::parse("seed = 1\nseed = 2\n"), ConfigError);
}

TEST(Config, UnknownKeyCitesLine) {
    auto c = Config::parse("experiment = rsw\nseed = 1\nbogus = 3\n", "x.cfg");
    try {
        c.reject_unknown({"experiment", "seed"});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("x.cfg:3"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    }
}

TEST(Config, HashIgnoresThreadsAndOut) {
    auto a = Config::parse("experiment = rsw\nseed = 1\nthreads = 4\n");
    auto b = Config::parse("seed = 1\nexperiment = rsw\nout = x\n");
    EXPECT_EQ(a.hash({"threads", "out"}), b.hash({"threads", "out"}));
    EXPECT_NE(a.hash({"threads", "out"}), Config::parse("experiment = rsw\nseed = 2\n").hash({"threads", "out"}));
}

TEST(Run, MissingSeedNamesTheField) {
    fs::path d = scratch("noseed");
    std::ofstream(d / "c.cfg") << "experiment = kw_duality\n";
    std::ostringstream log, err;
    RunOptions opt;
    opt.config_path = (d / "c.cfg").string();
    opt.out = (d / "out").string();
    EXPECT_EQ(run_main(opt, log, err), kError);
    EXPECT_NE(err.str().find("seed"), std::string::npos) << err.str();
}

TEST(Run, UnknownExperimentRejected) {
    fs::path d = scratch("unknown");
    std::ofstream(d / "c.cfg") << "experiment = nope\nseed = 1\n";
    std::ostringstream log, err;
    RunOptions opt;
    opt.config_path = (d / "c.cfg").string();
    EXPECT_EQ(run_main(opt, log, err), kError);
    EXPECT_NE(err.str().find("nope"), std::string::npos);
}

TEST(Run, WritesCsvAndSummary) {
    fs::path d = scratch("kw");
    auto cfg = Config::parse("experiment = kw_duality\nseed = 1\n", "kw.cfg");
    RunOptions opt;
    opt.out = (d / "out").string();
    std::ostringstream log;
    auto rep = run_config(cfg, opt, log);
    EXPECT_TRUE(rep.pass) << log.str();
    ASSERT_TRUE(fs::exists(rep.csv_path));
    auto summary = nlohmann::json::parse(slurp(rep.json_path));
    EXPECT_EQ(summary["experiment"], "kw_duality");
    EXPECT_EQ(summary["seed"], 1);
    EXPECT_EQ(summary["config_hash"].get<std::string>().size(), 16u);
    EXPECT_TRUE(summary.contains("git_describe"));
    EXPECT_EQ(fs::path(rep.directory).parent_path().filename(), "kw_duality");
}

TEST(Run, SameSeedGivesIdenticalCsv) {
    fs::path d = scratch("repeat");
    auto cfg = Config::parse(kSmallRsw, "rsw.cfg");
    RunOptions opt;
    opt.out = (d / "out").string();
    std::ostringstream log;
    auto a = run_config(cfg, opt, log);
    opt.threads = 3;
    auto b = run_config(cfg, opt, log);
    ASSERT_NE(a.directory, b.directory);
    EXPECT_EQ(slurp(a.csv_path), slurp(b.csv_path));
    auto ja = nlohmann::json::parse(slurp(a.json_path)), jb = nlohmann::json::parse(slurp(b.json_path));
    EXPECT_EQ(ja, jb);
}

TEST(Run, SeedOverrideChangesHash) {
    fs::path d = scratch("override");
    auto cfg = Config::parse(kSmallRsw, "rsw.cfg");
    RunOptions opt;
    opt.out = (d / "out").string();
    std::ostringstream log;
    auto a = run_config(cfg, opt, log);
    opt.seed = 99;
    auto b = run_config(cfg, opt, log);
    auto ja = nlohmann::json::parse(slurp(a.json_path)), jb = nlohmann::json::parse(slurp(b.json_path));
    EXPECT_EQ(jb["seed"], 99);
    EXPECT_NE(ja["config_hash"], jb["config_hash"]);
}

TEST(Registry, ListedSortedAndTagged) {
    const auto& reg = registry();
    EXPECT_GE(reg.size(), 10u);
    for (std::size_t i = 1; i < reg.size(); ++i) EXPECT_LT(reg[i - 1].name, reg[i].name);
    std::istringstream lines(list_text());
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        EXPECT_NE(line.find('['), std::string::npos);
        ++n;
    }
    EXPECT_EQ(n, reg.size());
}

TEST(Registry, EveryExperimentHasAShippedConfig) {
    for (const auto& e : registry()) {
        fs::path base = fs::path(IFK_SOURCE_DIR) / "configs" / e.name;
        fs::path cfg = base;
        cfg += ".cfg";
        fs::path js = base;
        js += ".json";
        ASSERT_TRUE(fs::exists(cfg) || fs::exists(js)) << e.name;
        auto c = Config::load(fs::exists(cfg) ? cfg.string() : js.string());
        EXPECT_EQ(c.str("experiment", ""), e.name);
        std::set<std::string> allowed = common_keys();
        for (const auto& k : e.keys) allowed.insert(k.key);
        EXPECT_NO_THROW(c.reject_unknown(allowed)) << e.name;
    }
}

TEST(Schema, ColumnsMatchCsvHeader) {
    const Experiment* e = find_experiment("kw_duality");
    ASSERT_NE(e, nullptr);
    auto cfg = Config::parse("experiment = kw_duality\nseed = 1\n");
    RunContext ctx{cfg, 1, 1};
    auto o = e->run(ctx);
    std::string csv = csv_text(*e, o);
    std::string header = csv.substr(0, csv.find('\n'));
    std::string want;
    auto schema = schema_json(*e);
    for (const auto& c : schema["columns"]) want += (want.empty() ? "" : ",") + c["name"].get<std::string>();
    EXPECT_EQ(header, want);
}

TEST(Schema, ShippedFilesMatchRegistry) {
    fs::path dir = fs::path(IFK_SOURCE_DIR) / "schemas";
    ASSERT_TRUE(fs::exists(dir / "columns.md"));
    EXPECT_EQ(slurp(dir / "columns.md"), schema_markdown());
    for (const auto& e : registry())
        EXPECT_EQ(nlohmann::json::parse(slurp(dir / (e.name + ".json"))), schema_json(e)) << e.name;
}

TEST(Csv, RowWidthChecked) {
    const Experiment* e = find_experiment("rsw");
    Outcome o;
    o.rows.push_back({"1"});
    EXPECT_THROW(csv_text(*e, o), ifk::Error);
}

TEST(Csv, CellFormatting) {
    EXPECT_EQ(cell(0.1), "0.10000000000000001");
    EXPECT_EQ(cell(std::nan("")), "nan");
    EXPECT_EQ(cell(3), "3");
}
