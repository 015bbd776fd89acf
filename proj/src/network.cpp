#include "cobalt/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>

namespace cobalt {

namespace {

// Relative slack so that exactly-on-threshold hash sums (uniform shares) are
// classified the same way regardless of summation order.
constexpr double kHashSlack = 1e-12;

bool meets_threshold(double accumulated, double target, double total, Comparison comparison) {
    const double slack = kHashSlack * total;
    if (comparison == Comparison::strict) return accumulated > target + slack;
    return accumulated >= target - slack;
}

double checked_total(std::span<const double> hash) {
    const double total = std::accumulate(hash.begin(), hash.end(), 0.0);
    if (!(total > 0.0)) throw NetworkError("hash vector must have a positive sum");
    return total;
}

}  // namespace

std::string NetworkSpec::label(NodeId v) const {
    if (v < labels.size() && !labels[v].empty()) return labels[v];
    return std::to_string(v);
}

void validate_spec(const NetworkSpec& spec) {
    const std::size_t n = spec.size();
    if (n < 2) throw NetworkError("network needs at least two nodes");
    if (!spec.labels.empty() && spec.labels.size() != n)
        throw NetworkError("label count does not match node count");
    if (spec.latency.rows() != n || spec.latency.cols() != n)
        throw NetworkError("latency matrix must be n x n");
    if (spec.player >= n) throw NetworkError("player index out of range");
    double total = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        if (!(spec.hash[v] >= 0.0) || !std::isfinite(spec.hash[v]))
            throw NetworkError("hash of node " + spec.label(v) + " must be a non-negative number");
        total += spec.hash[v];
    }
    if (!(total > 0.0)) throw NetworkError("hash vector must have a positive sum");
    for (NodeId i = 0; i < n; ++i) {
        if (spec.latency(i, i) != 0.0)
            throw NetworkError("latency diagonal must be zero at node " + spec.label(i));
        for (NodeId j = 0; j < n; ++j) {
            if (!(spec.latency(i, j) >= 0.0) || !std::isfinite(spec.latency(i, j)))
                throw NetworkError("latency[" + std::to_string(i) + "][" + std::to_string(j) +
                                   "] must be a non-negative number");
        }
    }
    for (const Edge& e : spec.fixed_edges) {
        if (e.from >= n || e.to >= n) throw NetworkError("fixed edge endpoint out of range");
        if (e.from == e.to) throw NetworkError("fixed edge self-loop at " + spec.label(e.from));
        if (e.from == spec.player)
            throw NetworkError("fixed edge originates at the player " + spec.label(e.from));
    }
    const auto in = incoming_degrees(n, spec.fixed_edges);
    for (NodeId v = 0; v < n; ++v) {
        if (in[v] > spec.gamma)
            throw NetworkError("node " + spec.label(v) + " exceeds the incoming cap");
    }
}

std::vector<Edge> normalize_edges(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<std::size_t> incoming_degrees(std::size_t n, std::span<const Edge> edges) {
    std::vector<std::size_t> in(n, 0);
    for (const Edge& e : edges) {
        if (e.to < n) ++in[e.to];
    }
    return in;
}

Action::Action(std::vector<NodeId> neighbors) : neighbors_(std::move(neighbors)) {
    std::sort(neighbors_.begin(), neighbors_.end());
}

bool Action::contains(NodeId v) const {
    return std::binary_search(neighbors_.begin(), neighbors_.end(), v);
}

std::string_view to_string(Violation v) {
    switch (v) {
        case Violation::cardinality: return "cardinality";
        case Violation::self_connection: return "self-connection";
        case Violation::invalid_node: return "invalid-node";
        case Violation::duplicate: return "duplicate";
        case Violation::gamma: return "gamma";
    }
    return "unknown";
}

std::vector<Violation> validate_action(const NetworkSpec& spec, const Action& action,
                                       bool enforce_gamma) {
    std::vector<Violation> out;
    const auto& nb = action.neighbors();
    if (nb.size() != spec.delta) out.push_back(Violation::cardinality);
    if (action.contains(spec.player)) out.push_back(Violation::self_connection);
    if (std::any_of(nb.begin(), nb.end(), [&](NodeId v) { return v >= spec.size(); }))
        out.push_back(Violation::invalid_node);
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) out.push_back(Violation::duplicate);
    if (enforce_gamma) {
        const auto in = incoming_degrees(spec.size(), spec.fixed_edges);
        const bool over = std::any_of(nb.begin(), nb.end(), [&](NodeId v) {
            return v < spec.size() && v != spec.player && in[v] >= spec.gamma;
        });
        if (over) out.push_back(Violation::gamma);
    }
    return out;
}

std::vector<NodeId> eligible_targets(const NetworkSpec& spec, bool enforce_gamma) {
    const auto in = incoming_degrees(spec.size(), spec.fixed_edges);
    std::vector<NodeId> out;
    for (NodeId v = 0; v < spec.size(); ++v) {
        if (v == spec.player) continue;
        if (enforce_gamma && in[v] >= spec.gamma) continue;
        out.push_back(v);
    }
    return out;
}

Action sample_action(std::span<const NodeId> targets, std::size_t delta, std::mt19937_64& rng) {
    if (targets.size() < delta)
        throw ConstraintViolation("only " + std::to_string(targets.size()) +
                                  " eligible targets for " + std::to_string(delta) + " connections");
    std::vector<NodeId> pool(targets.begin(), targets.end());
    for (std::size_t i = 0; i < delta; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(delta);
    return Action(std::move(pool));
}

Topology augment_topology(std::size_t n, std::span<const Edge> base, NodeId player,
                          std::span<const NodeId> neighbors, LinkMode mode) {
    std::vector<Edge> edges(base.begin(), base.end());
    for (NodeId u : neighbors) {
        edges.push_back({player, u});
        if (mode == LinkMode::bidirectional) edges.push_back({u, player});
    }
    return {n, normalize_edges(std::move(edges))};
}

Topology build_topology(const NetworkSpec& spec, const Action& action, LinkMode mode,
                        bool enforce_gamma) {
    const auto violations = validate_action(spec, action, enforce_gamma);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid action:";
        for (Violation v : violations) msg << ' ' << to_string(v);
        throw ConstraintViolation(msg.str());
    }
    return augment_topology(spec.size(), spec.fixed_edges, spec.player, action.neighbors(), mode);
}

std::vector<Edge> ShortestPaths::path(NodeId source, NodeId target) const {
    std::vector<Edge> out;
    if (!std::isfinite(distance(source, target))) return out;
    for (NodeId cur = target; cur != source;) {
        const NodeId prev = parent[source][cur];
        out.push_back({prev, cur});
        cur = prev;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

ShortestPaths shortest_path_trees(const Topology& topology, const Matrix& latency) {
    const std::size_t n = topology.node_count;
    std::vector<std::vector<NodeId>> adjacency(n);
    for (const Edge& e : topology.edges) adjacency[e.from].push_back(e.to);

    ShortestPaths sp{Matrix(n, n, kInfinity), std::vector<std::vector<NodeId>>(n)};
    using Entry = std::pair<double, NodeId>;
    for (NodeId s = 0; s < n; ++s) {
        auto dist = sp.distance.row(s);
        auto& parent = sp.parent[s];
        parent.assign(n, kNoNode);
        std::vector<bool> settled(n, false);
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
        dist[s] = 0.0;
        queue.push({0.0, s});
        while (!queue.empty()) {
            const auto [d, u] = queue.top();
            queue.pop();
            if (settled[u]) continue;
            settled[u] = true;
            for (NodeId w : adjacency[u]) {
                const double candidate = d + latency(u, w);
                if (candidate < dist[w]) {
                    dist[w] = candidate;
                    parent[w] = u;
                    queue.push({candidate, w});
                }
            }
        }
    }
    return sp;
}

Matrix shortest_path_latencies(const Topology& topology, const Matrix& latency) {
    return shortest_path_trees(topology, latency).distance;
}

PercentileResult percentile_detail(NodeId v, std::span<const double> row,
                                   std::span<const double> hash,
                                   const PercentileOptions& options) {
    const std::size_t n = hash.size();
    const double total = checked_total(hash);
    const double target = options.threshold * total;

    std::vector<NodeId> order;
    order.reserve(n - 1);
    for (NodeId u = 0; u < n; ++u) {
        if (u != v) order.push_back(u);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return row[a] < row[b]; });

    double accumulated = options.self_hash == SelfHash::include ? hash[v] : 0.0;
    if (meets_threshold(accumulated, target, total, options.comparison)) return {0.0, kNoNode, 0};

    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeId u = order[i];
        accumulated += hash[u];
        if (!meets_threshold(accumulated, target, total, options.comparison)) continue;
        if (!std::isfinite(row[u]))
            throw UnreachablePercentile("node " + std::to_string(v) +
                                        " cannot reach the hash threshold");
        return {row[u], u, i + 1};
    }
    throw UnreachablePercentile("hash threshold unattainable from node " + std::to_string(v));
}

double percentile_latency(NodeId v, std::span<const double> row, std::span<const double> hash,
                          const PercentileOptions& options) {
    return percentile_detail(v, row, hash, options).value;
}

double brute_force_percentile(NodeId v, std::span<const double> row,
                              std::span<const double> hash, const PercentileOptions& options,
                              std::size_t max_nodes) {
    const std::size_t n = hash.size();
    if (n > max_nodes)
        throw std::invalid_argument("brute-force percentile limited to " +
                                    std::to_string(max_nodes) + " nodes");
    const double total = checked_total(hash);
    const double target = options.threshold * total;
    const double self = options.self_hash == SelfHash::include ? hash[v] : 0.0;

    std::vector<NodeId> others;
    for (NodeId u = 0; u < n; ++u) {
        if (u != v) others.push_back(u);
    }
    double best = kInfinity;
    bool any = false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << others.size()); ++mask) {
        double accumulated = self;
        double worst = 0.0;
        for (std::size_t i = 0; i < others.size(); ++i) {
            if (mask & (std::size_t{1} << i)) {
                accumulated += hash[others[i]];
                worst = std::max(worst, row[others[i]]);
            }
        }
        if (!meets_threshold(accumulated, target, total, options.comparison)) continue;
        any = true;
        best = std::min(best, worst);
    }
    if (!any || !std::isfinite(best))
        throw UnreachablePercentile("hash threshold unattainable from node " + std::to_string(v));
    return best;
}

std::vector<double> all_percentiles(const Matrix& distance, std::span<const double> hash,
                                    const PercentileOptions& options) {
    std::vector<double> out(hash.size());
    for (NodeId v = 0; v < hash.size(); ++v)
        out[v] = percentile_latency(v, distance.row(v), hash, options);
    return out;
}

double average_percentile_latency(const NetworkSpec& spec, const Topology& topology,
                                  const PercentileOptions& options) {
    const auto a = all_percentiles(shortest_path_latencies(topology, spec.latency), spec.hash,
                                   options);
    return std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
}

double relative_reward(std::span<const double> percentiles, NodeId player, double beta) {
    const double mean = std::accumulate(percentiles.begin(), percentiles.end(), 0.0) /
                        static_cast<double>(percentiles.size());
    if (!(mean > 0.0)) throw NetworkError("mean percentile latency is zero");
    return -beta * percentiles[player] / mean;
}

RewardBreakdown evaluate_reward(const NetworkSpec& spec, const Action& action,
                                const RewardOptions& options) {
    const Topology topology = build_topology(spec, action, options.link_mode, options.enforce_gamma);
    RewardBreakdown out;
    out.percentiles = all_percentiles(shortest_path_latencies(topology, spec.latency), spec.hash,
                                      options.percentile);
    out.player_percentile = out.percentiles[spec.player];
    out.mean_percentile = std::accumulate(out.percentiles.begin(), out.percentiles.end(), 0.0) /
                          static_cast<double>(out.percentiles.size());
    out.reward = relative_reward(out.percentiles, spec.player, options.beta);
    return out;
}

double player_reward(const NetworkSpec& spec, const Action& action, const RewardOptions& options) {
    return evaluate_reward(spec, action, options).reward;
}

}  // namespace cobalt
