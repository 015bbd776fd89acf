#pragma once

// Network-coordinate environment model. Every node gets a point in R^k; the
// distance between two points is the model's guess of their link latency.
// Together with a topology estimate fixed at construction, the model
// predicts the player's reward for any candidate action, and it is fitted
// to observed rewards by gradient descent on the squared prediction error.

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cobalt/matrix.hpp"
#include "cobalt/network.hpp"

namespace cobalt {

enum class OracleTopology { random, exact };

struct OracleInit {
    std::size_t dimension = 5;
    std::uint64_t seed = 0;
    OracleTopology topology = OracleTopology::random;
    double density = 0.0;  // <= 0 selects delta / (n - 1)
    double spread = 100.0;
    double eta = 1e4;
    double dist_floor = 1e-6;
};

class CoordinateModel {
public:
    CoordinateModel(Matrix coords, std::vector<Edge> estimated_edges, NodeId player, double eta,
                    double dist_floor);

    std::size_t size() const { return coords_.rows(); }
    std::size_t dimension() const { return coords_.cols(); }
    NodeId player() const { return player_; }
    double eta() const { return eta_; }
    double dist_floor() const { return dist_floor_; }

    const Matrix& coords() const { return coords_; }
    Matrix& coords() { return coords_; }

    // Fixed for the lifetime of the model.
    const std::vector<Edge>& estimated_edges() const { return estimated_edges_; }

private:
    Matrix coords_;
    std::vector<Edge> estimated_edges_;
    NodeId player_;
    double eta_;
    double dist_floor_;
};

// Coordinates are i.i.d. N(0, 1) * spread. In random mode each ordered pair
// of non-player nodes is an estimated edge with probability `density`; in
// exact mode `true_edges` is copied (minus anything leaving the player).
CoordinateModel init_model(std::size_t n, NodeId player, std::size_t delta,
                           const OracleInit& init, std::span<const Edge> true_edges = {});

double estimated_latency(const CoordinateModel& model, NodeId u, NodeId w);

Matrix estimated_latency_matrix(const CoordinateModel& model);

struct OracleOptions {
    LinkMode link_mode = LinkMode::bidirectional;
    PercentileOptions percentile;
    double beta = 1.0;
    double sentinel_multiplier = 10.0;  // disconnected estimate predicts -multiplier * beta
};

struct RewardEstimate {
    double value = 0.0;
    bool sentinel = false;
    double player_percentile = 0.0;
    double mean_percentile = 0.0;
    std::vector<double> percentiles;
    // Per node, the estimated shortest path to its percentile-defining node.
    std::vector<std::vector<Edge>> critical_paths;
};

RewardEstimate estimate_reward(const CoordinateModel& model, const Action& action,
                               std::span<const double> hash, const OracleOptions& options = {});

// d(estimate)/d(coords) with every discrete selection held at the values
// recorded in `estimate`. Zero for sentinel estimates.
Matrix reward_gradient(const CoordinateModel& model, const RewardEstimate& estimate,
                       double beta);

struct LossEvaluation {
    RewardEstimate estimate;
    std::optional<double> loss;  // absent for sentinel estimates
    Matrix gradient;             // d(loss)/d(coords)
};

LossEvaluation evaluate_loss(const CoordinateModel& model, const Action& action,
                             double observed_reward, std::span<const double> hash,
                             const OracleOptions& options = {});

struct UpdateResult {
    double predicted = 0.0;
    bool sentinel = false;
    std::optional<double> loss;
};

// One gradient step of size eta on (observed - predicted)^2. Sentinel
// predictions leave the model untouched.
UpdateResult update_model(CoordinateModel& model, const Action& action, double observed_reward,
                          std::span<const double> hash, const OracleOptions& options = {});

// Moves only the player's coordinate towards distances matching its ping row.
void warm_start_player(CoordinateModel& model, std::span<const double> ping_row,
                       std::size_t iterations = 500);

enum class CandidateMode { single_swap, exhaustive, random_subsample };

struct CandidateOptions {
    CandidateMode mode = CandidateMode::single_swap;
    std::size_t sample_size = 64;
};

// Candidate actions around `current`. Single-swap yields `current` followed by
// every action replacing one neighbor with an eligible non-neighbor.
std::vector<Action> generate_candidates(const Action& current, std::span<const NodeId> targets,
                                        std::size_t delta, const CandidateOptions& options,
                                        std::mt19937_64& rng);

// Argmax of the estimate; ties go to the lexicographically smallest action.
Action best_action(const CoordinateModel& model, std::span<const Action> candidates,
                   std::span<const double> hash, const OracleOptions& options = {});

// CSV with header node,label,dim_0..dim_{k-1}.
void write_coordinates_csv(std::ostream& out, const CoordinateModel& model,
                           std::span<const std::string> labels);

}  // namespace cobalt
