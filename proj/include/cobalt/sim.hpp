#pragma once

// Experiment runner: resolves a configuration into an environment and an
// agent, plays T rounds and writes the round log, summary and coordinate
// dumps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobalt/agent.hpp"
#include "cobalt/coordinates.hpp"
#include "cobalt/dataset.hpp"
#include "cobalt/network.hpp"

namespace cobalt {

struct SimConfig {
    std::string dataset;
    std::string player = "0";
    std::string policy = "cobalt";
    std::size_t rounds = 300;
    std::size_t delta = 4;
    std::size_t gamma = 12;
    bool enforce_gamma = true;
    double epsilon = 0.1;
    double beta = 1.0;
    std::size_t dim = 5;
    double eta = 1e4;
    double spread = 100.0;
    std::string hash = "real";  // real | uniform | exponential
    double hash_rate = 1.0;
    std::string oracle_topology = "random";  // random | random:<density> | exact
    std::string link_mode = "bidirectional";  // bidirectional | outgoing
    std::string self_hash = "include";  // include | exclude
    std::string comparison = "strict";  // strict | non-strict
    double threshold = 0.9;
    std::string candidates = "single-swap";  // single-swap | exhaustive | random:<m>
    std::string explore = "swap";  // swap | resample
    bool warm_start = false;
    double sentinel = 10.0;
    std::uint64_t seed_env = 1;
    std::uint64_t seed_agent = 2;
    std::uint64_t seed_oracle = 3;
    std::size_t window = 100;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown keys are rejected.
void apply_config_json(SimConfig& config, const nlohmann::json& doc);
SimConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const SimConfig& config);

RewardOptions reward_options(const SimConfig& config);
AgentOptions agent_options(const SimConfig& config);

struct Summary {
    std::string policy;
    std::string player;
    std::size_t rounds = 0;
    std::size_t window = 0;
    std::optional<double> mean_reward;
    std::optional<double> mean_player_percentile;
    std::optional<double> mean_network_percentile;
    std::optional<double> mean_loss;
};

// Means over the last `window` rounds, skipping empty cells.
Summary summarize(std::span<const RoundRecord> records, std::size_t window);

struct RunResult {
    SimConfig config;
    std::vector<std::string> labels;
    std::vector<RoundRecord> records;
    Summary summary;
    std::optional<CoordinateModel> initial_model;
    std::optional<CoordinateModel> final_model;
};

RunResult run(const SimConfig& config, const Dataset& dataset);
RunResult run(const SimConfig& config);

inline constexpr const char* kRoundsHeader =
    "t,explore,action,observed_reward,predicted_reward,loss,player_Av,network_Abar";

void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> records,
                      std::span<const std::string> labels);
void write_summary_csv(std::ostream& out, std::span<const Summary> rows);

// Observed vs predicted reward per round.
std::string render_reward_svg(std::span<const RoundRecord> records);

// config.json, rounds.csv, summary.csv, coords_initial.csv, coords_final.csv
// and optionally reward_curve.svg under `dir`.
void write_run(const RunResult& result, const std::filesystem::path& dir, bool svg);

// One summary per config. All configs must share dataset and player.
std::vector<Summary> compare(std::span<const SimConfig> configs);

void print_comparison(std::ostream& out, std::span<const Summary> rows);

}  // namespace cobalt
