#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobalt/matrix.hpp"
#include "cobalt/network.hpp"

namespace cobalt {

inline constexpr int kDatasetVersion = 1;

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// On-disk network description. `edges` holds every overlay link, including
// any that the eventual player made; make_network drops those.
struct Dataset {
    int version = kDatasetVersion;
    std::vector<std::string> labels;
    std::vector<double> hash;
    Matrix latency;
    std::vector<Edge> edges;
    std::string notes;
    std::vector<std::string> warnings;  // filled by the loader, not serialized

    std::size_t size() const { return labels.size(); }
    bool operator==(const Dataset& other) const;
};

Dataset parse_dataset(const nlohmann::json& doc);
nlohmann::json dataset_to_json(const Dataset& ds);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& ds);

// Node index for a label or a decimal index string.
NodeId resolve_node(const Dataset& ds, const std::string& name);

NetworkSpec make_network(const Dataset& ds, NodeId player, std::size_t delta, std::size_t gamma,
                         std::vector<double> hash);

enum class HashMode { real, uniform, exponential };

HashMode parse_hash_mode(const std::string& text);
std::string to_string(HashMode mode);

// Shares summing to one. Uniform gives 1/n each; exponential normalizes
// i.i.d. Exp(rate) draws.
std::vector<double> generate_hash(HashMode mode, std::size_t n, std::uint64_t seed,
                                  double rate = 1.0);

// Raw Exp(rate) draws before normalization.
std::vector<double> exponential_draws(std::size_t n, std::uint64_t seed, double rate);

// The dataset's own shares for real mode, generated shares otherwise.
std::vector<double> resolve_hash(const Dataset& ds, HashMode mode, std::uint64_t seed,
                                 double rate = 1.0);

struct GeneratedTopology {
    std::vector<Edge> connections;  // initiator -> acceptor
    std::vector<Edge> edges;        // both directions of every connection
};

// Every node except `player` (kNoNode for none) opens `delta` links to
// distinct nodes it is not yet linked with, never to the player and never
// past `gamma` incoming edges. Throws DatasetError when no placement is
// found within the retry budget.
GeneratedTopology generate_fixed_topology(std::size_t n, NodeId player, std::size_t delta,
                                          std::size_t gamma, std::uint64_t seed);

struct SyntheticOptions {
    std::size_t nodes = 10;
    std::size_t dimension = 2;
    double spread = 100.0;
    std::size_t delta = 2;
    std::size_t gamma = 8;
    NodeId player = kNoNode;
    std::uint64_t seed = 0;
    // When positive, node i sits near centre i % clusters instead of
    // anywhere in the box.
    std::size_t clusters = 0;
    double cluster_radius = 5.0;
};

// Nodes at random points; latency is their Euclidean distance and hash is
// uniform.
Dataset generate_synthetic(const SyntheticOptions& options);

// True when every node can reach every other node over `edges`.
bool strongly_connected(std::size_t n, std::span<const Edge> edges);

}  // namespace cobalt
