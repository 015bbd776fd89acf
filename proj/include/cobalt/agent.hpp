#pragma once

// Per-round decision loop: epsilon-greedy play over the coordinate oracle,
// plus the baseline policies it is compared against.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cobalt/coordinates.hpp"
#include "cobalt/network.hpp"

namespace cobalt {

enum class PolicyKind { cobalt, random, least_latency, most_hash_power, fixed };

struct Policy {
    PolicyKind kind = PolicyKind::cobalt;
    Action fixed_action;  // used by PolicyKind::fixed
};

// Accepts "cobalt", "random", "least-latency", "most-hash-power" and
// "fixed:<i>;<j>;..." (node indices).
Policy parse_policy(const std::string& text);
std::string to_string(const Policy& policy);

enum class ExploreMode { swap, resample };

// The true environment. Rewards are memoized per action since the network
// is static.
class Environment {
public:
    Environment(NetworkSpec spec, RewardOptions options);

    const NetworkSpec& spec() const { return spec_; }
    const RewardOptions& options() const { return options_; }

    const RewardBreakdown& evaluate(const Action& action);

private:
    NetworkSpec spec_;
    RewardOptions options_;
    std::map<Action, RewardBreakdown> cache_;
};

struct RoundRecord {
    std::size_t t = 0;
    bool explore = false;
    Action action;
    std::optional<double> observed_reward;
    std::optional<double> predicted_reward;
    std::optional<double> loss;
    std::optional<double> player_percentile;
    std::optional<double> mean_percentile;
    std::string error;
};

struct AgentOptions {
    Policy policy;
    double epsilon = 0.1;
    CandidateOptions candidates;
    ExploreMode explore = ExploreMode::swap;
    std::uint64_t seed = 0;
    OracleInit oracle;
    bool warm_start = false;
    double sentinel_multiplier = 10.0;
};

Action random_action(const NetworkSpec& spec, std::mt19937_64& rng, bool enforce_gamma = true);
Action least_latency_action(const NetworkSpec& spec, bool enforce_gamma = true);
Action most_hash_action(const NetworkSpec& spec, bool enforce_gamma = true);

class Agent {
public:
    Agent(const Environment& env, AgentOptions options);

    RoundRecord step(Environment& env, std::size_t t);

    const Action& current_action() const { return current_; }
    const AgentOptions& options() const { return options_; }

    // Present only for the cobalt policy.
    const std::optional<CoordinateModel>& model() const { return model_; }
    std::optional<CoordinateModel>& model() { return model_; }

    // The action best_action would pick right now (cobalt only).
    Action greedy_action(const Environment& env);

private:
    Action choose(const Environment& env, bool& explore);
    OracleOptions oracle_options(const Environment& env) const;

    AgentOptions options_;
    std::mt19937_64 rng_;
    std::vector<NodeId> targets_;
    Action current_;
    bool started_ = false;
    std::optional<CoordinateModel> model_;
};

}  // namespace cobalt
