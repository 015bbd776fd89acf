#include "cobalt/agent.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cobalt {

Policy parse_policy(const std::string& text) {
    if (text == "cobalt") return {PolicyKind::cobalt, {}};
    if (text == "random") return {PolicyKind::random, {}};
    if (text == "least-latency") return {PolicyKind::least_latency, {}};
    if (text == "most-hash-power") return {PolicyKind::most_hash_power, {}};
    if (text.rfind("fixed:", 0) == 0) {
        std::vector<NodeId> nodes;
        std::stringstream in(text.substr(6));
        std::string item;
        while (std::getline(in, item, ';')) {
            if (item.empty() || !std::all_of(item.begin(), item.end(), ::isdigit))
                throw std::invalid_argument("bad node index '" + item + "' in policy " + text);
            nodes.push_back(static_cast<NodeId>(std::stoull(item)));
        }
        return {PolicyKind::fixed, Action(std::move(nodes))};
    }
    throw std::invalid_argument("unknown policy '" + text + "'");
}

std::string to_string(const Policy& policy) {
    switch (policy.kind) {
        case PolicyKind::cobalt: return "cobalt";
        case PolicyKind::random: return "random";
        case PolicyKind::least_latency: return "least-latency";
        case PolicyKind::most_hash_power: return "most-hash-power";
        case PolicyKind::fixed: {
            std::string out = "fixed:";
            for (std::size_t i = 0; i < policy.fixed_action.size(); ++i) {
                if (i) out += ';';
                out += std::to_string(policy.fixed_action.neighbors()[i]);
            }
            return out;
        }
    }
    return "unknown";
}

Environment::Environment(NetworkSpec spec, RewardOptions options)
    : spec_(std::move(spec)), options_(options) {
    validate_spec(spec_);
}

const RewardBreakdown& Environment::evaluate(const Action& action) {
    if (auto it = cache_.find(action); it != cache_.end()) return it->second;
    return cache_.emplace(action, evaluate_reward(spec_, action, options_)).first->second;
}

Action random_action(const NetworkSpec& spec, std::mt19937_64& rng, bool enforce_gamma) {
    return sample_action(eligible_targets(spec, enforce_gamma), spec.delta, rng);
}

namespace {

template <typename Less>
Action first_delta(const NetworkSpec& spec, bool enforce_gamma, Less less) {
    auto targets = eligible_targets(spec, enforce_gamma);
    if (targets.size() < spec.delta)
        throw ConstraintViolation("only " + std::to_string(targets.size()) +
                                  " eligible targets for " + std::to_string(spec.delta) +
                                  " connections");
    std::stable_sort(targets.begin(), targets.end(), less);
    targets.resize(spec.delta);
    return Action(std::move(targets));
}

}  // namespace

Action least_latency_action(const NetworkSpec& spec, bool enforce_gamma) {
    return first_delta(spec, enforce_gamma, [&](NodeId a, NodeId b) {
        return spec.latency(spec.player, a) < spec.latency(spec.player, b);
    });
}

Action most_hash_action(const NetworkSpec& spec, bool enforce_gamma) {
    return first_delta(spec, enforce_gamma,
                       [&](NodeId a, NodeId b) { return spec.hash[a] > spec.hash[b]; });
}

Agent::Agent(const Environment& env, AgentOptions options)
    : options_(std::move(options)), rng_(options_.seed) {
    const NetworkSpec& spec = env.spec();
    const bool gamma = env.options().enforce_gamma;
    targets_ = eligible_targets(spec, gamma);
    switch (options_.policy.kind) {
        case PolicyKind::cobalt:
        case PolicyKind::random:
            current_ = random_action(spec, rng_, gamma);
            break;
        case PolicyKind::least_latency:
            current_ = least_latency_action(spec, gamma);
            break;
        case PolicyKind::most_hash_power:
            current_ = most_hash_action(spec, gamma);
            break;
        case PolicyKind::fixed: {
            current_ = options_.policy.fixed_action;
            const auto violations = validate_action(spec, current_, gamma);
            if (!violations.empty())
                throw ConstraintViolation("fixed action violates " +
                                          std::string(to_string(violations.front())));
            break;
        }
    }
    if (options_.policy.kind == PolicyKind::cobalt) {
        model_ = init_model(spec.size(), spec.player, spec.delta, options_.oracle, spec.fixed_edges);
        if (options_.warm_start) warm_start_player(*model_, spec.latency.row(spec.player));
    }
}

OracleOptions Agent::oracle_options(const Environment& env) const {
    const RewardOptions& r = env.options();
    return {r.link_mode, r.percentile, r.beta, options_.sentinel_multiplier};
}

Action Agent::choose(const Environment& env, bool& explore) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    explore = unit(rng_) < options_.epsilon;
    const auto candidates = generate_candidates(current_, targets_, env.spec().delta,
                                                options_.candidates, rng_);
    if (!explore) return best_action(*model_, candidates, env.spec().hash, oracle_options(env));
    if (options_.explore == ExploreMode::resample)
        return random_action(env.spec(), rng_, env.options().enforce_gamma);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng_)];
}

Action Agent::greedy_action(const Environment& env) {
    if (!model_) throw std::logic_error("greedy action requires the cobalt policy");
    auto rng = rng_;
    const auto candidates =
        generate_candidates(current_, targets_, env.spec().delta, options_.candidates, rng);
    return best_action(*model_, candidates, env.spec().hash, oracle_options(env));
}

RoundRecord Agent::step(Environment& env, std::size_t t) {
    RoundRecord record;
    record.t = t;
    // The opening action was drawn at construction; baselines keep theirs.
    if (options_.policy.kind == PolicyKind::cobalt && started_)
        record.action = choose(env, record.explore);
    else
        record.action = current_;
    current_ = record.action;
    started_ = true;

    try {
        const RewardBreakdown& truth = env.evaluate(record.action);
        record.observed_reward = truth.reward;
        record.player_percentile = truth.player_percentile;
        record.mean_percentile = truth.mean_percentile;
    } catch (const NetworkError& e) {
        record.error = e.what();
    }

    if (model_) {
        const auto opts = oracle_options(env);
        if (record.observed_reward) {
            const UpdateResult u =
                update_model(*model_, record.action, *record.observed_reward, env.spec().hash, opts);
            record.predicted_reward = u.predicted;
            record.loss = u.loss;
        } else {
            record.predicted_reward = estimate_reward(*model_, record.action, env.spec().hash, opts).value;
        }
    }
    return record;
}

}  // namespace cobalt
