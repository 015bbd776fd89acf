#pragma once

// Shared fixtures and reference implementations for the unit and acceptance
// tests. The references here are deliberately naive and do not call into the
// library's own path or percentile code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "cobalt/coordinates.hpp"
#include "cobalt/network.hpp"

namespace cobalt::testing {

// Five-node example: fixed links a-d, b-c, b-d, c-d; the player v may link
// to any of a, b, c, d. With all hash equal the actions {a,d,b} and {a,d,c} give rewards -3/4.2 and -3/4.62.
enum ToyNode : NodeId { toy_a = 0, toy_b = 1, toy_c = 2, toy_d = 3, toy_v = 4 };

inline NetworkSpec toy_network() {
    NetworkSpec spec;
    spec.labels = {"a", "b", "c", "d", "v"};
    spec.hash = {1.0, 1.0, 1.0, 1.0, 1.0};
    spec.latency = Matrix(5, 5, 10.0);
    for (NodeId i = 0; i < 5; ++i) spec.latency(i, i) = 0.0;
    auto link = [&](NodeId u, NodeId w, double ms) {
        spec.latency(u, w) = ms;
        spec.latency(w, u) = ms;
    };
    link(toy_a, toy_d, 4.0);
    link(toy_b, toy_c, 1.0);
    link(toy_b, toy_d, 4.0);
    link(toy_c, toy_d, 2.5);
    link(toy_v, toy_a, 2.7);
    link(toy_v, toy_d, 3.0);
    link(toy_v, toy_b, 1.3);
    link(toy_v, toy_c, 2.0);
    spec.fixed_edges = normalize_edges({{toy_a, toy_d}, {toy_d, toy_a}, {toy_b, toy_c},
                                        {toy_c, toy_b}, {toy_b, toy_d}, {toy_d, toy_b},
                                        {toy_c, toy_d}, {toy_d, toy_c}});
    spec.player = toy_v;
    spec.delta = 3;
    spec.gamma = 12;
    return spec;
}

// With five equal shares a 90% threshold needs every node, so A_v is the
// eccentricity under the default options.
inline RewardOptions toy_options() { return {}; }

// Random symmetric latencies in [1, 100) with zero diagonal.
inline Matrix random_latency(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ms(1.0, 100.0);
    Matrix m(n, n);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) m(i, j) = m(j, i) = ms(rng);
    return m;
}

// Bidirectional random spanning tree plus extra random directed edges.
inline std::vector<Edge> random_connected_edges(std::size_t n, std::mt19937_64& rng,
                                                double extra_density = 0.2) {
    std::vector<Edge> edges;
    std::vector<NodeId> order(n);
    for (NodeId i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        NodeId p = order[pick(rng)];
        edges.push_back({p, order[i]});
        edges.push_back({order[i], p});
    }
    std::bernoulli_distribution extra(extra_density);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
            if (i != j && extra(rng)) edges.push_back({i, j});
    return normalize_edges(std::move(edges));
}

// Connected overlay among the non-player nodes, plus some edges into the
// player. Nothing leaves the player.
inline std::vector<Edge> connected_without_player(std::size_t n, NodeId player,
                                                  std::mt19937_64& rng,
                                                  double extra_density = 0.2) {
    auto shift = [&](NodeId u) { return u >= player ? u + 1 : u; };
    std::vector<Edge> edges;
    for (const Edge& e : random_connected_edges(n - 1, rng, extra_density))
        edges.push_back({shift(e.from), shift(e.to)});
    std::bernoulli_distribution in(0.3);
    for (NodeId u = 0; u < n; ++u)
        if (u != player && in(rng)) edges.push_back({u, player});
    return normalize_edges(std::move(edges));
}

inline std::vector<double> random_hash(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> h(0.01, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) x = h(rng);
    return out;
}

// Length of the shortest simple path found by exhaustive DFS.
inline Matrix reference_shortest_paths(std::size_t n, const std::vector<Edge>& edges,
                                       const Matrix& latency) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<NodeId>> adj(n);
    for (const Edge& e : edges) adj[e.from].push_back(e.to);
    Matrix out(n, n, inf);
    std::vector<bool> seen(n);
    std::function<void(NodeId, NodeId, double)> dfs = [&](NodeId s, NodeId u, double len) {
        out(s, u) = std::min(out(s, u), len);
        for (NodeId w : adj[u]) {
            if (seen[w]) continue;
            seen[w] = true;
            dfs(s, w, len + latency(u, w));
            seen[w] = false;
        }
    };
    for (NodeId s = 0; s < n; ++s) {
        std::fill(seen.begin(), seen.end(), false);
        seen[s] = true;
        dfs(s, s, 0.0);
    }
    return out;
}

// Smallest ball radius around v that captures enough hash. Candidate radii
// are 0 and every finite entry of the row. Returns NaN when none qualifies.
inline double reference_percentile(NodeId v, const std::vector<double>& row,
                                   const std::vector<double>& hash, double threshold,
                                   bool include_self, bool strict) {
    double total = 0.0;
    for (double h : hash) total += h;
    const double slack = 1e-12 * total;
    std::vector<double> radii{0.0};
    for (NodeId u = 0; u < row.size(); ++u)
        if (u != v && std::isfinite(row[u])) radii.push_back(row[u]);
    std::sort(radii.begin(), radii.end());
    for (double r : radii) {
        double mass = include_self ? hash[v] : 0.0;
        for (NodeId u = 0; u < row.size(); ++u)
            if (u != v && row[u] <= r) mass += hash[u];
        bool ok = strict ? mass > threshold * total + slack : mass >= threshold * total - slack;
        if (ok) return r;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Coordinates, estimated edges and an action whose estimate is not a
// sentinel. The estimated topology keeps each non-player pair with
// probability `density` on top of a spanning tree.
struct ModelInstance {
    CoordinateModel model;
    Action action;
    std::vector<double> hash;
};

inline ModelInstance random_model_instance(std::size_t n, std::size_t k, std::size_t delta,
                                           std::mt19937_64& rng, double density = 0.3) {
    std::normal_distribution<double> normal(0.0, 50.0);
    Matrix coords(n, k);
    for (double& x : coords.flat()) x = normal(rng);
    std::uniform_int_distribution<NodeId> pick(0, n - 1);
    NodeId player = pick(rng);
    std::vector<Edge> edges = connected_without_player(n, player, rng, density);
    std::vector<NodeId> targets;
    for (NodeId u = 0; u < n; ++u)
        if (u != player) targets.push_back(u);
    std::shuffle(targets.begin(), targets.end(), rng);
    targets.resize(delta);
    return {CoordinateModel(std::move(coords), std::move(edges), player, 1.0, 1e-6),
            Action(targets), random_hash(n, rng)};
}

// Reward estimate recomputed from scratch: Euclidean edge weights, exhaustive
// path search and the ball-radius percentile.
inline double reference_estimate(const CoordinateModel& model, const Action& action,
                                 const std::vector<double>& hash, double beta,
                                 double threshold = 0.9) {
    const std::size_t n = model.size();
    Matrix lat(n, n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId w = 0; w < n; ++w) {
            double s = 0.0;
            for (std::size_t i = 0; i < model.dimension(); ++i) {
                double d = model.coords()(u, i) - model.coords()(w, i);
                s += d * d;
            }
            lat(u, w) = std::sqrt(s);
        }
    std::vector<Edge> edges = model.estimated_edges();
    for (NodeId t : action.neighbors()) {
        edges.push_back({model.player(), t});
        edges.push_back({t, model.player()});
    }
    Matrix dist = reference_shortest_paths(n, normalize_edges(edges), lat);
    std::vector<double> a(n);
    double mean = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        std::vector<double> row(dist.row(v).begin(), dist.row(v).end());
        a[v] = reference_percentile(v, row, hash, threshold, true, true);
        mean += a[v] / static_cast<double>(n);
    }
    return -beta * a[model.player()] / mean;
}

// Largest componentwise relative error between the analytic loss gradient
// and central differences. Empty when a perturbation changes any critical
// path, i.e. the point sits on a kink of the piecewise-smooth loss.
inline std::optional<double> gradient_check(const CoordinateModel& model, const Action& action,
                                            double observed, const std::vector<double>& hash,
                                            const OracleOptions& options, double h = 1e-5) {
    const LossEvaluation base = evaluate_loss(model, action, observed, hash, options);
    if (!base.loss) return std::nullopt;
    double worst = 0.0;
    CoordinateModel probe = model;
    for (std::size_t idx = 0; idx < probe.coords().flat().size(); ++idx) {
        double& x = probe.coords().flat()[idx];
        const double saved = x;
        x = saved + h;
        auto up = estimate_reward(probe, action, hash, options);
        x = saved - h;
        auto down = estimate_reward(probe, action, hash, options);
        x = saved;
        if (up.sentinel || down.sentinel || up.critical_paths != base.estimate.critical_paths ||
            down.critical_paths != base.estimate.critical_paths)
            return std::nullopt;
        const double lu = (observed - up.value) * (observed - up.value);
        const double ld = (observed - down.value) * (observed - down.value);
        const double numeric = (lu - ld) / (2.0 * h);
        const double analytic = base.gradient.flat()[idx];
        const double scale = std::max(std::abs(numeric), std::abs(analytic));
        if (scale < 1e-12) continue;
        worst = std::max(worst, std::abs(numeric - analytic) / scale);
    }
    return worst;
}

}  // namespace cobalt::testing
