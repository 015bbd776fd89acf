#pragma once

// Ground-truth environment of the single-player topology game: the fixed
// p2p overlay, the player's neighbor choice, shortest-path latencies, the
// hash-weighted percentile latency of every node and the player's reward.

#include <compare>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cobalt/matrix.hpp"

namespace cobalt {

using NodeId = std::size_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Edge {
    NodeId from = 0;
    NodeId to = 0;

    auto operator<=>(const Edge&) const = default;
};

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstraintViolation : public NetworkError {
public:
    using NetworkError::NetworkError;
};

// The hash threshold cannot be met from the nodes reachable from a source.
class UnreachablePercentile : public NetworkError {
public:
    using NetworkError::NetworkError;
};

struct NetworkSpec {
    std::vector<std::string> labels;
    std::vector<double> hash;
    Matrix latency;               // milliseconds, zero diagonal
    std::vector<Edge> fixed_edges;  // sorted, unique, none originating at `player`
    NodeId player = 0;
    std::size_t delta = 4;   // outgoing connections of the player
    std::size_t gamma = 12;  // incoming connection cap

    std::size_t size() const { return hash.size(); }
    std::string label(NodeId v) const;
};

// Throws NetworkError describing the first broken invariant.
void validate_spec(const NetworkSpec& spec);

// Sorted, de-duplicated copy of `edges`.
std::vector<Edge> normalize_edges(std::vector<Edge> edges);

// Number of edges in `edges` that end at each node.
std::vector<std::size_t> incoming_degrees(std::size_t n, std::span<const Edge> edges);

// The player's neighbor set. Neighbors are kept sorted; duplicates are kept so
// validation can report them.
class Action {
public:
    Action() = default;
    explicit Action(std::vector<NodeId> neighbors);

    const std::vector<NodeId>& neighbors() const { return neighbors_; }
    std::size_t size() const { return neighbors_.size(); }
    bool contains(NodeId v) const;

    auto operator<=>(const Action&) const = default;

private:
    std::vector<NodeId> neighbors_;
};

enum class LinkMode { bidirectional, outgoing_only };
enum class SelfHash { include, exclude };
enum class Comparison { strict, non_strict };

struct PercentileOptions {
    double threshold = 0.9;
    SelfHash self_hash = SelfHash::include;
    Comparison comparison = Comparison::strict;
};

struct RewardOptions {
    LinkMode link_mode = LinkMode::bidirectional;
    PercentileOptions percentile;
    bool enforce_gamma = true;
    double beta = 1.0;
};

enum class Violation { cardinality, self_connection, invalid_node, duplicate, gamma };

std::string_view to_string(Violation v);

std::vector<Violation> validate_action(const NetworkSpec& spec, const Action& action,
                                       bool enforce_gamma = true);

// Nodes the player may connect to: everything except itself and, when
// enforced, targets already holding gamma incoming fixed edges.
std::vector<NodeId> eligible_targets(const NetworkSpec& spec, bool enforce_gamma = true);

// Uniform random `delta`-subset of `targets`. Throws ConstraintViolation when
// fewer than `delta` targets exist.
Action sample_action(std::span<const NodeId> targets, std::size_t delta, std::mt19937_64& rng);

struct Topology {
    std::size_t node_count = 0;
    std::vector<Edge> edges;  // sorted, unique
};

// `base` plus the player's links for `neighbors`. No validation.
Topology augment_topology(std::size_t n, std::span<const Edge> base, NodeId player,
                          std::span<const NodeId> neighbors, LinkMode mode);

// Throws ConstraintViolation naming every violated constraint.
Topology build_topology(const NetworkSpec& spec, const Action& action,
                        LinkMode mode = LinkMode::bidirectional, bool enforce_gamma = true);

// All-pairs shortest path latencies with the predecessor of every target in
// each source's shortest-path tree.
struct ShortestPaths {
    Matrix distance;                          // kInfinity when unreachable
    std::vector<std::vector<NodeId>> parent;  // parent[s][t], kNoNode at s and when unreachable

    // Edges of the recorded path from `source` to `target`, in order.
    std::vector<Edge> path(NodeId source, NodeId target) const;
};

ShortestPaths shortest_path_trees(const Topology& topology, const Matrix& latency);

Matrix shortest_path_latencies(const Topology& topology, const Matrix& latency);

struct PercentileResult {
    double value = 0.0;
    NodeId critical_node = kNoNode;  // last node of the minimal qualifying prefix
    std::size_t prefix_length = 0;
};

// Smallest radius around `v` whose nodes (sorted by distance, ties by index)
// hold more than `threshold` of the total hash. Throws UnreachablePercentile.
PercentileResult percentile_detail(NodeId v, std::span<const double> row,
                                   std::span<const double> hash,
                                   const PercentileOptions& options = {});

double percentile_latency(NodeId v, std::span<const double> row, std::span<const double> hash,
                          const PercentileOptions& options = {});

inline constexpr std::size_t kBruteForceNodeCap = 12;

// Exhaustive min over qualifying subsets of the max distance. Refuses
// (std::invalid_argument) above `max_nodes` nodes.
double brute_force_percentile(NodeId v, std::span<const double> row,
                              std::span<const double> hash,
                              const PercentileOptions& options = {},
                              std::size_t max_nodes = kBruteForceNodeCap);

std::vector<double> all_percentiles(const Matrix& distance, std::span<const double> hash,
                                    const PercentileOptions& options = {});

double average_percentile_latency(const NetworkSpec& spec, const Topology& topology,
                                  const PercentileOptions& options = {});

// -beta * A[player] / mean(A).
double relative_reward(std::span<const double> percentiles, NodeId player, double beta);

struct RewardBreakdown {
    double reward = 0.0;
    double player_percentile = 0.0;
    double mean_percentile = 0.0;
    std::vector<double> percentiles;
};

RewardBreakdown evaluate_reward(const NetworkSpec& spec, const Action& action,
                                const RewardOptions& options = {});

double player_reward(const NetworkSpec& spec, const Action& action,
                     const RewardOptions& options = {});

}  // namespace cobalt
