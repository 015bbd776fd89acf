// Command-line front end: run one experiment, compare policies, or write a
// synthetic dataset.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cobalt/dataset.hpp"
#include "cobalt/sim.hpp"

namespace {

struct Overrides {
    std::optional<std::string> dataset, policy, player, oracle_topology, hash, link_mode, self_hash,
        comparison, candidates, explore;
    std::optional<std::size_t> rounds, delta, gamma, dim, window;
    std::optional<double> epsilon, beta, eta, spread, hash_rate, threshold, sentinel;
    std::optional<bool> enforce_gamma;
    std::optional<std::uint64_t> seed_env, seed_agent, seed_oracle;
    bool warm_start = false;
    bool no_gamma = false;

    void add_to(CLI::App& app, bool with_policy) {
        app.add_option("--dataset", dataset, "Dataset JSON (overrides the config)");
        if (with_policy)
            app.add_option("--policy", policy,
                           "cobalt | random | least-latency | most-hash-power | fixed:<i;j;..>");
        app.add_option("--player", player, "Player node label or index");
        app.add_option("--rounds", rounds, "Number of rounds T");
        app.add_option("--delta", delta, "Player connections");
        app.add_option("--gamma", gamma, "Incoming connection cap");
        app.add_option("--epsilon", epsilon, "Exploration probability");
        app.add_option("--beta", beta, "Reward scale");
        app.add_option("--dim", dim, "Coordinate dimension");
        app.add_option("--eta", eta, "Coordinate step size");
        app.add_option("--spread", spread, "Spread of the initial coordinates");
        app.add_option("--hash-rate,--hash_rate", hash_rate, "Rate of exponential hash draws");
        app.add_option("--sentinel", sentinel,
                       "Disconnected estimates predict -sentinel * beta");
        app.add_option("--enforce-gamma,--enforce_gamma", enforce_gamma,
                       "Enforce the incoming cap (true | false)");
        app.add_option("--threshold", threshold, "Hash fraction for the percentile latency");
        app.add_option("--hash", hash, "real | uniform | exponential");
        app.add_option("--oracle-topology,--oracle_topology", oracle_topology, "random | random:<density> | exact");
        app.add_option("--link-mode,--link_mode", link_mode, "bidirectional | outgoing");
        app.add_option("--self-hash,--self_hash", self_hash, "include | exclude");
        app.add_option("--comparison", comparison, "strict | non-strict");
        app.add_option("--candidates", candidates, "single-swap | exhaustive | random:<m>");
        app.add_option("--explore", explore, "swap | resample");
        app.add_option("--window", window, "Trailing summary window");
        app.add_option("--seed-env,--seed_env", seed_env, "Environment seed");
        app.add_option("--seed-agent,--seed_agent", seed_agent, "Agent seed");
        app.add_option("--seed-oracle,--seed_oracle", seed_oracle, "Oracle seed");
        app.add_flag("--warm-start,--warm_start", warm_start, "Fit the player's coordinate to its pings first");
        app.add_flag("--no-gamma", no_gamma, "Do not enforce the incoming cap");
    }

    void apply(cobalt::SimConfig& c) const {
        auto set = [](auto& field, const auto& value) {
            if (value) field = *value;
        };
        set(c.dataset, dataset);
        set(c.policy, policy);
        set(c.player, player);
        set(c.oracle_topology, oracle_topology);
        set(c.hash, hash);
        set(c.link_mode, link_mode);
        set(c.self_hash, self_hash);
        set(c.comparison, comparison);
        set(c.candidates, candidates);
        set(c.explore, explore);
        set(c.rounds, rounds);
        set(c.delta, delta);
        set(c.gamma, gamma);
        set(c.dim, dim);
        set(c.window, window);
        set(c.epsilon, epsilon);
        set(c.beta, beta);
        set(c.eta, eta);
        set(c.spread, spread);
        set(c.hash_rate, hash_rate);
        set(c.sentinel, sentinel);
        set(c.enforce_gamma, enforce_gamma);
        set(c.threshold, threshold);
        set(c.seed_env, seed_env);
        set(c.seed_agent, seed_agent);
        set(c.seed_oracle, seed_oracle);
        if (warm_start) c.warm_start = true;
        if (no_gamma) c.enforce_gamma = false;
    }
};

cobalt::SimConfig resolve(const std::string& config_path, const Overrides& overrides) {
    cobalt::SimConfig config =
        config_path.empty() ? cobalt::SimConfig{} : cobalt::load_config(config_path);
    overrides.apply(config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-player PoW topology game simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "run";
    bool svg = false;
    Overrides run_overrides;
    auto* run_cmd = app.add_subcommand("run", "Play T rounds with one policy");
    run_cmd->add_option("--config", config_path, "Config JSON")->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_flag("--svg", svg, "Also write reward_curve.svg");
    run_overrides.add_to(*run_cmd, true);

    std::string policies = "cobalt,random,least-latency,most-hash-power";
    std::optional<std::string> compare_out;
    Overrides compare_overrides;
    auto* compare_cmd = app.add_subcommand("compare", "Run several policies on one network");
    compare_cmd->add_option("--config", config_path, "Config JSON")->check(CLI::ExistingFile);
    compare_cmd->add_option("--policies", policies, "Comma-separated policy list");
    compare_cmd->add_option("--out", compare_out, "Write comparison.csv here");
    compare_overrides.add_to(*compare_cmd, false);

    cobalt::SyntheticOptions synth;
    std::string synth_out;
    auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dataset");
    gen_cmd->add_option("--nodes", synth.nodes, "Node count");
    gen_cmd->add_option("--dim", synth.dimension, "Dimension of the latent plane");
    gen_cmd->add_option("--spread", synth.spread, "Side length of the latent box (ms)");
    gen_cmd->add_option("--links", synth.delta, "Links opened by every node");
    gen_cmd->add_option("--gamma", synth.gamma, "Incoming cap during generation");
    gen_cmd->add_option("--seed", synth.seed, "Generator seed");
    gen_cmd->add_option("--clusters", synth.clusters, "Gaussian clusters instead of a uniform box");
    gen_cmd->add_option("--cluster-radius,--cluster_radius", synth.cluster_radius,
                        "Standard deviation around each cluster centre");
    gen_cmd->add_option("--out", synth_out, "Output JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const cobalt::SimConfig config = resolve(config_path, run_overrides);
            const cobalt::RunResult result = cobalt::run(config);
            cobalt::write_run(result, out_dir, svg);
            std::vector<cobalt::Summary> rows{result.summary};
            cobalt::print_comparison(std::cout, rows);
            for (const auto& r : result.records) {
                if (!r.error.empty()) std::cerr << "round " << r.t << ": " << r.error << '\n';
            }
        } else if (*compare_cmd) {
            const cobalt::SimConfig base = resolve(config_path, compare_overrides);
            std::vector<cobalt::SimConfig> configs;
            std::stringstream list(policies);
            std::string policy;
            while (std::getline(list, policy, ',')) {
                cobalt::SimConfig c = base;
                c.policy = policy;
                configs.push_back(c);
            }
            const auto rows = cobalt::compare(configs);
            cobalt::print_comparison(std::cout, rows);
            if (compare_out) {
                std::filesystem::create_directories(*compare_out);
                std::ofstream out(std::filesystem::path(*compare_out) / "comparison.csv");
                cobalt::write_summary_csv(out, rows);
            }
        } else if (*gen_cmd) {
            cobalt::save_dataset(synth_out, cobalt::generate_synthetic(synth));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
