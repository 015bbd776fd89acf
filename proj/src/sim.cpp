#include "cobalt/sim.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <fmt/format.h>

#include "cobalt/format.hpp"

namespace cobalt {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& doc, const char* key, T& field) {
    if (doc.contains(key)) field = doc.at(key).get<T>();
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string optional_number(const std::optional<double>& x) {
    return x ? format_number(*x) : std::string();
}

std::optional<double> window_mean(std::span<const RoundRecord> records,
                                  std::optional<double> RoundRecord::*field) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const RoundRecord& r : records) {
        if (const auto& x = r.*field) {
            sum += *x;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace

void apply_config_json(SimConfig& c, const json& doc) {
    static const std::vector<std::string> known = {
        "dataset",   "player",     "policy",    "rounds",      "delta",     "gamma",
        "enforce_gamma", "epsilon", "beta",     "dim",         "eta",       "spread",
        "hash",      "hash_rate",  "oracle_topology", "link_mode", "self_hash", "comparison",
        "threshold", "candidates", "explore",   "warm_start",  "sentinel",  "seed_env",
        "seed_agent", "seed_oracle", "window"};
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
    }
    try {
        read_field(doc, "dataset", c.dataset);
        if (doc.contains("player")) {
            const json& p = doc.at("player");
            c.player = p.is_number_integer() ? std::to_string(p.get<long long>()) : p.get<std::string>();
        }
        read_field(doc, "policy", c.policy);
        read_field(doc, "rounds", c.rounds);
        read_field(doc, "delta", c.delta);
        read_field(doc, "gamma", c.gamma);
        read_field(doc, "enforce_gamma", c.enforce_gamma);
        read_field(doc, "epsilon", c.epsilon);
        read_field(doc, "beta", c.beta);
        read_field(doc, "dim", c.dim);
        read_field(doc, "eta", c.eta);
        read_field(doc, "spread", c.spread);
        read_field(doc, "hash", c.hash);
        read_field(doc, "hash_rate", c.hash_rate);
        read_field(doc, "oracle_topology", c.oracle_topology);
        read_field(doc, "link_mode", c.link_mode);
        read_field(doc, "self_hash", c.self_hash);
        read_field(doc, "comparison", c.comparison);
        read_field(doc, "threshold", c.threshold);
        read_field(doc, "candidates", c.candidates);
        read_field(doc, "explore", c.explore);
        read_field(doc, "warm_start", c.warm_start);
        read_field(doc, "sentinel", c.sentinel);
        read_field(doc, "seed_env", c.seed_env);
        read_field(doc, "seed_agent", c.seed_agent);
        read_field(doc, "seed_oracle", c.seed_oracle);
        read_field(doc, "window", c.window);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    SimConfig config;
    try {
        apply_config_json(config, json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    // Relative dataset paths are relative to the config file.
    if (!config.dataset.empty() && std::filesystem::path(config.dataset).is_relative())
        config.dataset = (path.parent_path() / config.dataset).lexically_normal().string();
    return config;
}

json config_to_json(const SimConfig& c) {
    return {{"dataset", c.dataset},
            {"player", c.player},
            {"policy", c.policy},
            {"rounds", c.rounds},
            {"delta", c.delta},
            {"gamma", c.gamma},
            {"enforce_gamma", c.enforce_gamma},
            {"epsilon", c.epsilon},
            {"beta", c.beta},
            {"dim", c.dim},
            {"eta", c.eta},
            {"spread", c.spread},
            {"hash", c.hash},
            {"hash_rate", c.hash_rate},
            {"oracle_topology", c.oracle_topology},
            {"link_mode", c.link_mode},
            {"self_hash", c.self_hash},
            {"comparison", c.comparison},
            {"threshold", c.threshold},
            {"candidates", c.candidates},
            {"explore", c.explore},
            {"warm_start", c.warm_start},
            {"sentinel", c.sentinel},
            {"seed_env", c.seed_env},
            {"seed_agent", c.seed_agent},
            {"seed_oracle", c.seed_oracle},
            {"window", c.window}};
}

RewardOptions reward_options(const SimConfig& c) {
    RewardOptions r;
    if (c.link_mode == "bidirectional") r.link_mode = LinkMode::bidirectional;
    else if (c.link_mode == "outgoing") r.link_mode = LinkMode::outgoing_only;
    else throw ConfigError("unknown link_mode '" + c.link_mode + "'");
    if (c.self_hash == "include") r.percentile.self_hash = SelfHash::include;
    else if (c.self_hash == "exclude") r.percentile.self_hash = SelfHash::exclude;
    else throw ConfigError("unknown self_hash '" + c.self_hash + "'");
    if (c.comparison == "strict") r.percentile.comparison = Comparison::strict;
    else if (c.comparison == "non-strict") r.percentile.comparison = Comparison::non_strict;
    else throw ConfigError("unknown comparison '" + c.comparison + "'");
    if (!(c.threshold > 0.0 && c.threshold <= 1.0)) throw ConfigError("threshold must be in (0, 1]");
    if (!(c.beta > 0.0)) throw ConfigError("beta must be positive");
    r.percentile.threshold = c.threshold;
    r.enforce_gamma = c.enforce_gamma;
    r.beta = c.beta;
    return r;
}

AgentOptions agent_options(const SimConfig& c) {
    AgentOptions a;
    try {
        a.policy = parse_policy(c.policy);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");
    a.epsilon = c.epsilon;
    a.seed = c.seed_agent;
    a.warm_start = c.warm_start;
    a.sentinel_multiplier = c.sentinel;

    if (c.candidates == "single-swap") {
        a.candidates.mode = CandidateMode::single_swap;
    } else if (c.candidates == "exhaustive") {
        a.candidates.mode = CandidateMode::exhaustive;
    } else if (c.candidates.rfind("random:", 0) == 0) {
        a.candidates.mode = CandidateMode::random_subsample;
        a.candidates.sample_size = std::stoul(c.candidates.substr(7));
    } else {
        throw ConfigError("unknown candidates mode '" + c.candidates + "'");
    }
    if (c.explore == "swap") a.explore = ExploreMode::swap;
    else if (c.explore == "resample") a.explore = ExploreMode::resample;
    else throw ConfigError("unknown explore mode '" + c.explore + "'");

    a.oracle.dimension = c.dim;
    a.oracle.seed = c.seed_oracle;
    a.oracle.eta = c.eta;
    a.oracle.spread = c.spread;
    if (c.oracle_topology == "exact") {
        a.oracle.topology = OracleTopology::exact;
    } else if (c.oracle_topology == "random") {
        a.oracle.topology = OracleTopology::random;
    } else if (c.oracle_topology.rfind("random:", 0) == 0) {
        a.oracle.topology = OracleTopology::random;
        a.oracle.density = std::stod(c.oracle_topology.substr(7));
        if (!(a.oracle.density > 0.0 && a.oracle.density <= 1.0))
            throw ConfigError("oracle topology density must be in (0, 1]");
    } else {
        throw ConfigError("unknown oracle_topology '" + c.oracle_topology + "'");
    }
    return a;
}

Summary summarize(std::span<const RoundRecord> records, std::size_t window) {
    Summary s;
    s.rounds = records.size();
    s.window = std::min(window, records.size());
    const auto tail = records.subspan(records.size() - s.window);
    s.mean_reward = window_mean(tail, &RoundRecord::observed_reward);
    s.mean_player_percentile = window_mean(tail, &RoundRecord::player_percentile);
    s.mean_network_percentile = window_mean(tail, &RoundRecord::mean_percentile);
    s.mean_loss = window_mean(tail, &RoundRecord::loss);
    return s;
}

RunResult run(const SimConfig& config, const Dataset& dataset) {
    const RewardOptions ropts = reward_options(config);
    const AgentOptions aopts = agent_options(config);
    const NodeId player = resolve_node(dataset, config.player);
    auto hash = resolve_hash(dataset, parse_hash_mode(config.hash), config.seed_env,
                             config.hash_rate);

    Environment env(make_network(dataset, player, config.delta, config.gamma, std::move(hash)),
                    ropts);
    Agent agent(env, aopts);

    RunResult result;
    result.config = config;
    result.labels = dataset.labels;
    result.initial_model = agent.model();
    result.records.reserve(config.rounds);
    for (std::size_t t = 0; t < config.rounds; ++t) result.records.push_back(agent.step(env, t));
    result.final_model = agent.model();
    result.summary = summarize(result.records, config.window);
    result.summary.policy = config.policy;
    result.summary.player = dataset.labels[player];
    return result;
}

RunResult run(const SimConfig& config) {
    if (config.dataset.empty()) throw ConfigError("no dataset given");
    return run(config, load_dataset(config.dataset));
}

void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> records,
                      std::span<const std::string> labels) {
    out << kRoundsHeader << '\n';
    for (const RoundRecord& r : records) {
        std::vector<std::string> names;
        for (NodeId v : r.action.neighbors())
            names.push_back(v < labels.size() ? labels[v] : std::to_string(v));
        std::sort(names.begin(), names.end());
        std::string action;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) action += ';';
            action += names[i];
        }
        out << r.t << ',' << (r.explore ? 1 : 0) << ',' << csv_field(action) << ','
            << optional_number(r.observed_reward) << ',' << optional_number(r.predicted_reward)
            << ',' << optional_number(r.loss) << ',' << optional_number(r.player_percentile) << ','
            << optional_number(r.mean_percentile) << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const Summary> rows) {
    out << "policy,player,rounds,window,mean_reward,mean_player_Av,mean_network_Abar,mean_loss\n";
    for (const Summary& s : rows) {
        out << csv_field(s.policy) << ',' << csv_field(s.player) << ',' << s.rounds << ','
            << s.window << ',' << optional_number(s.mean_reward) << ','
            << optional_number(s.mean_player_percentile) << ','
            << optional_number(s.mean_network_percentile) << ',' << optional_number(s.mean_loss)
            << '\n';
    }
}

std::string render_reward_svg(std::span<const RoundRecord> records) {
    constexpr double width = 800, height = 400, margin = 50;
    double lo = kInfinity, hi = -kInfinity;
    for (const RoundRecord& r : records) {
        for (const auto& x : {r.observed_reward, r.predicted_reward}) {
            if (x) {
                lo = std::min(lo, *x);
                hi = std::max(hi, *x);
            }
        }
    }
    if (!(lo <= hi)) lo = -1.0, hi = 0.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double span_t = std::max<double>(1.0, static_cast<double>(records.size()) - 1.0);
    auto px = [&](std::size_t t) { return margin + (width - 2 * margin) * static_cast<double>(t) / span_t; };
    auto py = [&](double y) { return height - margin - (height - 2 * margin) * (y - lo) / (hi - lo); };
    auto polyline = [&](std::optional<double> RoundRecord::*field, const char* color) {
        std::string points;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (const auto& y = records[i].*field)
                points += fmt::format("{:.2f},{:.2f} ", px(i), py(*y));
        }
        return fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)",
                           color, points);
    };

    std::string svg = fmt::format(
        R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)"
        "\n",
        width, height, width, height);
    svg += fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)" "\n", width, height);
    svg += fmt::format(
        R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><line x1="{0}" y1="{3}" x2="{0}" y2="{1}" stroke="black"/>)"
        "\n",
        margin, height - margin, width - margin, margin);
    svg += fmt::format(R"(<text x="{}" y="{}" font-size="12">{:.4g}</text>)" "\n", 2.0, margin, hi);
    svg += fmt::format(R"(<text x="{}" y="{}" font-size="12">{:.4g}</text>)" "\n", 2.0, height - margin, lo);
    svg += fmt::format(R"(<text x="{}" y="{}" font-size="12">round</text>)" "\n", width / 2, height - 15);
    svg += polyline(&RoundRecord::observed_reward, "steelblue") + "\n";
    svg += polyline(&RoundRecord::predicted_reward, "darkorange") + "\n";
    svg += fmt::format(R"(<text x="{}" y="20" font-size="12" fill="steelblue">observed</text>)" "\n", margin);
    svg += fmt::format(R"(<text x="{}" y="20" font-size="12" fill="darkorange">predicted</text>)" "\n", margin + 80);
    svg += "</svg>\n";
    return svg;
}

void write_run(const RunResult& result, const std::filesystem::path& dir, bool svg) {
    std::filesystem::create_directories(dir);
    write_file(dir / "config.json", config_to_json(result.config).dump(2) + "\n");
    {
        std::ostringstream out;
        write_rounds_csv(out, result.records, result.labels);
        write_file(dir / "rounds.csv", out.str());
    }
    {
        std::ostringstream out;
        write_summary_csv(out, std::span(&result.summary, 1));
        write_file(dir / "summary.csv", out.str());
    }
    if (result.initial_model) {
        std::ostringstream out;
        write_coordinates_csv(out, *result.initial_model, result.labels);
        write_file(dir / "coords_initial.csv", out.str());
    }
    if (result.final_model) {
        std::ostringstream out;
        write_coordinates_csv(out, *result.final_model, result.labels);
        write_file(dir / "coords_final.csv", out.str());
    }
    if (svg) write_file(dir / "reward_curve.svg", render_reward_svg(result.records));
}

std::vector<Summary> compare(std::span<const SimConfig> configs) {
    if (configs.size() < 2) throw ConfigError("compare needs at least two configs");
    for (const SimConfig& c : configs) {
        if (c.dataset != configs.front().dataset || c.player != configs.front().player)
            throw ConfigError("compared configs must share dataset and player");
    }
    const Dataset dataset = load_dataset(configs.front().dataset);
    std::vector<Summary> rows;
    for (const SimConfig& c : configs) rows.push_back(run(c, dataset).summary);
    return rows;
}

void print_comparison(std::ostream& out, std::span<const Summary> rows) {
    auto cell = [](const std::optional<double>& x) {
        return x ? fmt::format("{:.6g}", *x) : std::string("-");
    };
    out << fmt::format("{:<18} {:>14} {:>14} {:>14}\n", "policy", "A_v", "reward", "loss");
    for (const Summary& s : rows) {
        out << fmt::format("{:<18} {:>14} {:>14} {:>14}\n", s.policy, cell(s.mean_player_percentile),
                           cell(s.mean_reward), cell(s.mean_loss));
    }
}

}  // namespace cobalt
