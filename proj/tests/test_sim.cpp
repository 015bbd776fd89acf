#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cobalt/sim.hpp"
#include "fixtures.hpp"

using namespace cobalt;

namespace {

namespace fs = std::filesystem;

SimConfig quick(const std::string& policy) {
    SimConfig c;
    c.dataset = COBALT_SAMPLE_DATASET;
    c.player = "Amsterdam";
    c.policy = policy;
    c.rounds = 40;
    c.window = 20;
    return c;
}

std::string rounds_csv(const RunResult& r) {
    std::ostringstream out;
    write_rounds_csv(out, r.records, r.labels);
    return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("fixed policy logs a constant reward") {
    SimConfig c = quick("fixed:1;2;3;4");
    auto r = run(c);
    auto rows = parse_csv(rounds_csv(r));
    REQUIRE(rows.size() == 41);
    CHECK(rows[0][3] == "observed_reward");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][3] == rows[1][3]);
        CHECK(rows[i][2] == "Atlanta;Frankfurt;Shanghai;Tokyo");
        CHECK(rows[i][4].empty());  // no prediction for baselines
    }
}

TEST_CASE("round logs are reproducible") {
    SimConfig c = quick("cobalt");
    CHECK(rounds_csv(run(c)) == rounds_csv(run(c)));
    SimConfig other = c;
    other.seed_agent = 99;
    CHECK(rounds_csv(run(c)) != rounds_csv(run(other)));
}

TEST_CASE("random never beats an optimal least-latency choice") {
    SyntheticOptions so;
    so.nodes = 10;
    so.delta = 2;
    so.gamma = 9;
    so.player = 0;
    so.seed = 8;
    so.clusters = 1;
    so.cluster_radius = 30.0;
    Dataset ds = generate_synthetic(so);

    // Confirm optimality by enumerating every action.
    NetworkSpec spec = make_network(ds, 0, 4, 12, ds.hash);
    const Action ll = least_latency_action(spec);
    const double ll_reward = player_reward(spec, ll);
    std::mt19937_64 rng(0);
    auto all = generate_candidates(ll, eligible_targets(spec), 4,
                                   {CandidateMode::exhaustive, 0}, rng);
    REQUIRE(all.size() == 126);
    for (const Action& a : all) REQUIRE(player_reward(spec, a) <= ll_reward);

    SimConfig c;
    c.hash = "uniform";
    c.rounds = 150;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        c.seed_agent = seed;
        c.policy = "random";
        const double random_mean = *run(c, ds).summary.mean_reward;
        c.policy = "least-latency";
        const double ll_mean = *run(c, ds).summary.mean_reward;
        CHECK(random_mean <= ll_mean);
        CHECK(ll_mean == doctest::Approx(ll_reward));
    }
}

TEST_CASE("summary means come from the logged window") {
    SimConfig c = quick("cobalt");
    auto r = run(c);
    auto rows = parse_csv(rounds_csv(r));
    double sum = 0.0, loss = 0.0;
    std::size_t losses = 0;
    for (std::size_t i = rows.size() - c.window; i < rows.size(); ++i) {
        sum += std::stod(rows[i][3]);
        if (!rows[i][5].empty()) {
            loss += std::stod(rows[i][5]);
            ++losses;
        }
    }
    CHECK(*r.summary.mean_reward == doctest::Approx(sum / c.window).epsilon(1e-12));
    if (losses) CHECK(*r.summary.mean_loss == doctest::Approx(loss / losses).epsilon(1e-12));
    CHECK(r.summary.window == 20);
    CHECK(r.summary.player == "Amsterdam");
}

TEST_CASE("run directory") {
    SimConfig c = quick("cobalt");
    auto r = run(c);
    const std::string before = rounds_csv(r);
    fs::path dir = fs::temp_directory_path() / "cobalt_run_test";
    fs::remove_all(dir);
    write_run(r, dir, true);
    for (const char* f : {"config.json", "rounds.csv", "summary.csv", "coords_initial.csv",
                          "coords_final.csv", "reward_curve.svg"})
        CHECK(fs::exists(dir / f));
    CHECK(slurp(dir / "rounds.csv") == before);
    CHECK(slurp(dir / "reward_curve.svg").rfind("<svg", 0) == 0);
    CHECK(slurp(dir / "coords_initial.csv") != slurp(dir / "coords_final.csv"));

    // The written config reproduces the run.
    SimConfig again = load_config(dir / "config.json");
    CHECK(rounds_csv(run(again)) == before);
    fs::remove_all(dir);

    auto baseline = run(quick("random"));
    fs::path bdir = fs::temp_directory_path() / "cobalt_run_baseline";
    write_run(baseline, bdir, false);
    CHECK_FALSE(fs::exists(bdir / "coords_final.csv"));
    CHECK_FALSE(fs::exists(bdir / "reward_curve.svg"));
    fs::remove_all(bdir);
}

TEST_CASE("config handling") {
    SimConfig c;
    apply_config_json(c, nlohmann::json::parse(R"({"rounds": 12, "policy": "random",
                                                   "oracle_topology": "exact"})"));
    CHECK(c.rounds == 12);
    CHECK(c.policy == "random");
    CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"round": 3})")), ConfigError);
    CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"rounds": "x"})")),
                    ConfigError);

    SimConfig d;
    apply_config_json(d, config_to_json(c));
    CHECK(config_to_json(d) == config_to_json(c));

    SimConfig bad;
    bad.epsilon = 1.5;
    CHECK_THROWS_AS(agent_options(bad), ConfigError);
    bad = SimConfig{};
    bad.link_mode = "sideways";
    CHECK_THROWS_AS(reward_options(bad), ConfigError);
    bad = SimConfig{};
    bad.oracle_topology = "random:2";
    CHECK_THROWS_AS(agent_options(bad), ConfigError);
    bad = SimConfig{};
    CHECK_THROWS_AS(run(bad), ConfigError);

    fs::path dir = fs::temp_directory_path() / "cobalt_cfg_test";
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << R"({"dataset": "net.json"})";
    CHECK(load_config(dir / "cfg.json").dataset == (dir / "net.json").string());
    fs::remove_all(dir);
}

TEST_CASE("policy comparison") {
    std::vector<SimConfig> configs;
    for (const char* p : {"cobalt", "random", "least-latency", "most-hash-power"})
        configs.push_back(quick(p));
    auto rows = compare(configs);
    REQUIRE(rows.size() == 4);
    CHECK(rows[2].policy == "least-latency");
    std::ostringstream table;
    print_comparison(table, rows);
    CHECK(table.str().find("most-hash-power") != std::string::npos);

    std::vector<SimConfig> twins{quick("cobalt"), quick("cobalt")};
    auto same = compare(twins);
    CHECK(same[0].mean_reward == same[1].mean_reward);
    CHECK(same[0].mean_loss == same[1].mean_loss);

    std::vector<SimConfig> mixed{quick("cobalt"), quick("random")};
    mixed[1].player = "Tokyo";
    CHECK_THROWS_AS(compare(mixed), ConfigError);
}
