#include "cobalt/coordinates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cobalt/format.hpp"

namespace cobalt {

CoordinateModel::CoordinateModel(Matrix coords, std::vector<Edge> estimated_edges, NodeId player,
                                 double eta, double dist_floor)
    : coords_(std::move(coords)),
      estimated_edges_(normalize_edges(std::move(estimated_edges))),
      player_(player),
      eta_(eta),
      dist_floor_(dist_floor) {
    if (player_ >= coords_.rows()) throw std::invalid_argument("player outside the model");
    if (!(eta_ > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(dist_floor_ > 0.0)) throw std::invalid_argument("distance floor must be positive");
    for (const Edge& e : estimated_edges_) {
        if (e.from == player_) throw std::invalid_argument("estimated edge leaves the player");
        if (e.from >= size() || e.to >= size() || e.from == e.to)
            throw std::invalid_argument("malformed estimated edge");
    }
}

CoordinateModel init_model(std::size_t n, NodeId player, std::size_t delta,
                           const OracleInit& init, std::span<const Edge> true_edges) {
    if (init.dimension == 0) throw std::invalid_argument("coordinate dimension must be >= 1");
    std::mt19937_64 rng(init.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix coords(n, init.dimension);
    for (double& x : coords.flat()) x = normal(rng) * init.spread;

    std::vector<Edge> edges;
    if (init.topology == OracleTopology::exact) {
        for (const Edge& e : true_edges) {
            if (e.from != player) edges.push_back(e);
        }
    } else {
        const double density = init.density > 0.0
                                   ? init.density
                                   : std::min(1.0, static_cast<double>(delta) /
                                                       static_cast<double>(n - 1));
        if (density > 1.0) throw std::invalid_argument("topology density must be in (0, 1]");
        std::bernoulli_distribution coin(density);
        for (NodeId u = 0; u < n; ++u) {
            if (u == player) continue;
            for (NodeId w = 0; w < n; ++w) {
                if (w == player || w == u) continue;
                if (coin(rng)) edges.push_back({u, w});
            }
        }
    }
    return CoordinateModel(std::move(coords), std::move(edges), player, init.eta,
                           init.dist_floor);
}

double estimated_latency(const CoordinateModel& model, NodeId u, NodeId w) {
    const auto a = model.coords().row(u);
    const auto b = model.coords().row(w);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

Matrix estimated_latency_matrix(const CoordinateModel& model) {
    const std::size_t n = model.size();
    Matrix out(n, n);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId w = u + 1; w < n; ++w) {
            out(u, w) = out(w, u) = estimated_latency(model, u, w);
        }
    }
    return out;
}

RewardEstimate estimate_reward(const CoordinateModel& model, const Action& action,
                               std::span<const double> hash, const OracleOptions& options) {
    const std::size_t n = model.size();
    const NodeId player = model.player();
    RewardEstimate sentinel;
    sentinel.value = -options.sentinel_multiplier * options.beta;
    sentinel.sentinel = true;

    const Topology topology = augment_topology(n, model.estimated_edges(), player,
                                               action.neighbors(), options.link_mode);
    const ShortestPaths sp = shortest_path_trees(topology, estimated_latency_matrix(model));

    RewardEstimate out;
    out.percentiles.resize(n);
    out.critical_paths.resize(n);
    for (NodeId u = 0; u < n; ++u) {
        PercentileResult r;
        try {
            r = percentile_detail(u, sp.distance.row(u), hash, options.percentile);
        } catch (const UnreachablePercentile&) {
            return sentinel;
        }
        out.percentiles[u] = r.value;
        if (r.critical_node != kNoNode) out.critical_paths[u] = sp.path(u, r.critical_node);
    }
    out.player_percentile = out.percentiles[player];
    out.mean_percentile =
        std::accumulate(out.percentiles.begin(), out.percentiles.end(), 0.0) / static_cast<double>(n);
    if (!(out.mean_percentile > 0.0)) return sentinel;
    out.value = -options.beta * out.player_percentile / out.mean_percentile;
    return out;
}

Matrix reward_gradient(const CoordinateModel& model, const RewardEstimate& estimate,
                       double beta) {
    const std::size_t n = model.size();
    const std::size_t k = model.dimension();
    Matrix grad(n, k);
    if (estimate.sentinel) return grad;

    // R = -beta * A_p / M with M = mean(A):
    // dR/dA_u = -beta * ([u == p] / M - A_p / (n * M^2)).
    const double mean = estimate.mean_percentile;
    const double shared = beta * estimate.player_percentile / (static_cast<double>(n) * mean * mean);
    const auto& x = model.coords();
    std::vector<double> unit(k);
    for (NodeId u = 0; u < n; ++u) {
        const double weight = shared - (u == model.player() ? beta / mean : 0.0);
        for (const Edge& e : estimate.critical_paths[u]) {
            double norm = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                unit[i] = x(e.from, i) - x(e.to, i);
                norm += unit[i] * unit[i];
            }
            norm = std::max(std::sqrt(norm), model.dist_floor());
            for (std::size_t i = 0; i < k; ++i) {
                const double g = weight * unit[i] / norm;
                grad(e.from, i) += g;
                grad(e.to, i) -= g;
            }
        }
    }
    return grad;
}

LossEvaluation evaluate_loss(const CoordinateModel& model, const Action& action,
                             double observed_reward, std::span<const double> hash,
                             const OracleOptions& options) {
    LossEvaluation out{estimate_reward(model, action, hash, options), std::nullopt,
                       Matrix(model.size(), model.dimension())};
    if (out.estimate.sentinel) return out;
    const double residual = observed_reward - out.estimate.value;
    out.loss = residual * residual;
    out.gradient = reward_gradient(model, out.estimate, options.beta);
    for (double& g : out.gradient.flat()) g *= -2.0 * residual;
    return out;
}

UpdateResult update_model(CoordinateModel& model, const Action& action, double observed_reward,
                          std::span<const double> hash, const OracleOptions& options) {
    if (!std::isfinite(observed_reward))
        throw std::invalid_argument("observed reward must be finite");
    const LossEvaluation eval = evaluate_loss(model, action, observed_reward, hash, options);
    UpdateResult out{eval.estimate.value, eval.estimate.sentinel, eval.loss};
    if (eval.estimate.sentinel) return out;

    auto coords = model.coords().flat();
    const auto grad = eval.gradient.flat();
    for (std::size_t i = 0; i < coords.size(); ++i) {
        coords[i] -= model.eta() * grad[i];
        if (!std::isfinite(coords[i]))
            throw std::runtime_error("coordinate update produced a non-finite value");
    }
    return out;
}

void warm_start_player(CoordinateModel& model, std::span<const double> ping_row,
                       std::size_t iterations) {
    const std::size_t n = model.size();
    const std::size_t k = model.dimension();
    const NodeId p = model.player();
    const double step = 0.25 / static_cast<double>(n - 1);
    auto& x = model.coords();
    std::vector<double> grad(k);
    for (std::size_t it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (NodeId u = 0; u < n; ++u) {
            if (u == p) continue;
            const double d = std::max(estimated_latency(model, p, u), model.dist_floor());
            const double r = d - ping_row[u];
            for (std::size_t i = 0; i < k; ++i) grad[i] += 2.0 * r * (x(p, i) - x(u, i)) / d;
        }
        for (std::size_t i = 0; i < k; ++i) x(p, i) -= step * grad[i];
    }
}

namespace {

void combinations(std::span<const NodeId> targets, std::size_t delta, std::size_t start,
                  std::vector<NodeId>& partial, std::vector<Action>& out) {
    if (partial.size() == delta) {
        out.emplace_back(partial);
        return;
    }
    for (std::size_t i = start; i + (delta - partial.size()) <= targets.size(); ++i) {
        partial.push_back(targets[i]);
        combinations(targets, delta, i + 1, partial, out);
        partial.pop_back();
    }
}

}  // namespace

std::vector<Action> generate_candidates(const Action& current, std::span<const NodeId> targets,
                                        std::size_t delta, const CandidateOptions& options,
                                        std::mt19937_64& rng) {
    std::vector<Action> out;
    switch (options.mode) {
        case CandidateMode::single_swap: {
            out.push_back(current);
            const auto& nb = current.neighbors();
            for (std::size_t i = 0; i < nb.size(); ++i) {
                for (NodeId t : targets) {
                    if (current.contains(t)) continue;
                    auto swapped = nb;
                    swapped[i] = t;
                    out.emplace_back(std::move(swapped));
                }
            }
            break;
        }
        case CandidateMode::exhaustive: {
            std::vector<NodeId> partial;
            combinations(targets, delta, 0, partial, out);
            break;
        }
        case CandidateMode::random_subsample: {
            std::set<Action> seen{current};
            out.push_back(current);
            const std::size_t want = std::max<std::size_t>(options.sample_size, 1);
            for (std::size_t attempt = 0; out.size() < want && attempt < 4 * want; ++attempt) {
                Action a = sample_action(targets, delta, rng);
                if (seen.insert(a).second) out.push_back(std::move(a));
            }
            break;
        }
    }
    return out;
}

Action best_action(const CoordinateModel& model, std::span<const Action> candidates,
                   std::span<const double> hash, const OracleOptions& options) {
    if (candidates.empty()) throw std::invalid_argument("no candidate actions");
    const Action* best = nullptr;
    double best_value = -kInfinity;
    for (const Action& a : candidates) {
        const double value = estimate_reward(model, a, hash, options).value;
        if (best == nullptr || value > best_value || (value == best_value && a < *best)) {
            best = &a;
            best_value = value;
        }
    }
    return *best;
}

void write_coordinates_csv(std::ostream& out, const CoordinateModel& model,
                           std::span<const std::string> labels) {
    out << "node,label";
    for (std::size_t i = 0; i < model.dimension(); ++i) out << ",dim_" << i;
    out << '\n';
    for (NodeId v = 0; v < model.size(); ++v) {
        out << v << ',' << (v < labels.size() ? labels[v] : std::to_string(v));
        for (double x : model.coords().row(v)) out << ',' << format_number(x);
        out << '\n';
    }
}

}  // namespace cobalt
