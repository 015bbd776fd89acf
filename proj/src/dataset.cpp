#include "cobalt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace cobalt {

using nlohmann::json;

bool Dataset::operator==(const Dataset& other) const {
    return version == other.version && labels == other.labels && hash == other.hash &&
           latency == other.latency && edges == other.edges && notes == other.notes;
}

Dataset parse_dataset(const json& doc) {
    if (!doc.is_object()) throw DatasetError("dataset must be a JSON object");
    for (const char* key : {"version", "nodes", "latency_ms", "fixed_edges"}) {
        if (!doc.contains(key)) throw DatasetError(std::string("dataset is missing key '") + key + "'");
    }
    Dataset ds;
    ds.version = doc.at("version").get<int>();
    if (ds.version != kDatasetVersion)
        throw DatasetError("unsupported dataset version " + std::to_string(ds.version));
    if (doc.contains("notes")) ds.notes = doc.at("notes").get<std::string>();

    const json& nodes = doc.at("nodes");
    if (!nodes.is_array() || nodes.size() < 2) throw DatasetError("'nodes' needs at least two entries");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const json& node = nodes[i];
        if (!node.contains("label") || !node.contains("hash"))
            throw DatasetError("node " + std::to_string(i) + " needs 'label' and 'hash'");
        ds.labels.push_back(node.at("label").get<std::string>());
        const double h = node.at("hash").get<double>();
        if (!(h >= 0.0) || !std::isfinite(h))
            throw DatasetError("node " + std::to_string(i) + " (" + ds.labels.back() +
                               ") has a negative or non-finite hash");
        ds.hash.push_back(h);
    }
    const std::size_t n = ds.labels.size();
    if (std::accumulate(ds.hash.begin(), ds.hash.end(), 0.0) <= 0.0)
        throw DatasetError("total hash must be positive");

    const json& rows = doc.at("latency_ms");
    if (!rows.is_array() || rows.size() != n)
        throw DatasetError("latency_ms has " + std::to_string(rows.is_array() ? rows.size() : 0) +
                           " rows, expected " + std::to_string(n));
    ds.latency = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
            throw DatasetError("latency_ms row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].is_array() ? rows[i].size() : 0) +
                               " columns, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) {
            const double l = rows[i][j].get<double>();
            if (!(l >= 0.0) || !std::isfinite(l))
                throw DatasetError("latency_ms[" + std::to_string(i) + "][" + std::to_string(j) +
                                   "] is negative or non-finite");
            if (i == j && l != 0.0)
                throw DatasetError("latency_ms[" + std::to_string(i) + "][" + std::to_string(i) +
                                   "] must be zero");
            ds.latency(i, j) = l;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = ds.latency(i, j);
            const double b = ds.latency(j, i);
            if (std::abs(a - b) > 0.1 * std::max(a, b))
                ds.warnings.push_back("latency between " + ds.labels[i] + " and " + ds.labels[j] +
                                      " is asymmetric by more than 10%");
        }
    }

    const json& edges = doc.at("fixed_edges");
    if (!edges.is_array()) throw DatasetError("fixed_edges must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const json& e = edges[i];
        if (!e.is_array() || e.size() != 2)
            throw DatasetError("fixed_edges[" + std::to_string(i) + "] must be a [from, to] pair");
        const auto from = e[0].get<long long>();
        const auto to = e[1].get<long long>();
        if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= n ||
            static_cast<std::size_t>(to) >= n)
            throw DatasetError("fixed_edges[" + std::to_string(i) + "] references a missing node");
        if (from == to) throw DatasetError("fixed_edges[" + std::to_string(i) + "] is a self-loop");
        ds.edges.push_back({static_cast<NodeId>(from), static_cast<NodeId>(to)});
    }
    ds.edges = normalize_edges(std::move(ds.edges));
    return ds;
}

json dataset_to_json(const Dataset& ds) {
    json doc;
    doc["version"] = ds.version;
    if (!ds.notes.empty()) doc["notes"] = ds.notes;
    doc["nodes"] = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i)
        doc["nodes"].push_back({{"label", ds.labels[i]}, {"hash", ds.hash[i]}});
    doc["latency_ms"] = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto row = ds.latency.row(i);
        doc["latency_ms"].push_back(std::vector<double>(row.begin(), row.end()));
    }
    doc["fixed_edges"] = json::array();
    for (const Edge& e : ds.edges) doc["fixed_edges"].push_back({e.from, e.to});
    return doc;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open dataset " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DatasetError(path.string() + ": " + e.what());
    }
    try {
        return parse_dataset(doc);
    } catch (const json::exception& e) {
        throw DatasetError(path.string() + ": " + e.what());
    }
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write dataset " + path.string());
    out << dataset_to_json(ds).dump(2) << '\n';
}

NodeId resolve_node(const Dataset& ds, const std::string& name) {
    const auto it = std::find(ds.labels.begin(), ds.labels.end(), name);
    if (it != ds.labels.end()) return static_cast<NodeId>(it - ds.labels.begin());
    if (!name.empty() && std::all_of(name.begin(), name.end(), ::isdigit)) {
        const auto index = static_cast<NodeId>(std::stoull(name));
        if (index < ds.size()) return index;
    }
    throw DatasetError("unknown node '" + name + "'");
}

NetworkSpec make_network(const Dataset& ds, NodeId player, std::size_t delta, std::size_t gamma,
                         std::vector<double> hash) {
    NetworkSpec spec;
    spec.labels = ds.labels;
    spec.hash = std::move(hash);
    spec.latency = ds.latency;
    spec.player = player;
    spec.delta = delta;
    spec.gamma = gamma;
    for (const Edge& e : ds.edges) {
        if (e.from != player) spec.fixed_edges.push_back(e);
    }
    validate_spec(spec);
    return spec;
}

HashMode parse_hash_mode(const std::string& text) {
    if (text == "real") return HashMode::real;
    if (text == "uniform") return HashMode::uniform;
    if (text == "exponential") return HashMode::exponential;
    throw DatasetError("unknown hash mode '" + text + "'");
}

std::string to_string(HashMode mode) {
    switch (mode) {
        case HashMode::real: return "real";
        case HashMode::uniform: return "uniform";
        case HashMode::exponential: return "exponential";
    }
    return "unknown";
}

std::vector<double> exponential_draws(std::size_t n, std::uint64_t seed, double rate) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> dist(rate);
    std::vector<double> out(n);
    for (double& x : out) x = dist(rng);
    return out;
}

std::vector<double> generate_hash(HashMode mode, std::size_t n, std::uint64_t seed, double rate) {
    if (n < 2) throw DatasetError("hash generation needs at least two nodes");
    std::vector<double> out;
    switch (mode) {
        case HashMode::uniform:
            out.assign(n, 1.0 / static_cast<double>(n));
            return out;
        case HashMode::exponential:
            out = exponential_draws(n, seed, rate);
            break;
        case HashMode::real:
            throw DatasetError("real hash shares come from a dataset");
    }
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& x : out) x /= total;
    return out;
}

std::vector<double> resolve_hash(const Dataset& ds, HashMode mode, std::uint64_t seed,
                                 double rate) {
    if (mode == HashMode::real) return ds.hash;
    return generate_hash(mode, ds.size(), seed, rate);
}

GeneratedTopology generate_fixed_topology(std::size_t n, NodeId player, std::size_t delta,
                                          std::size_t gamma, std::uint64_t seed) {
    constexpr int kAttempts = 1000;
    std::mt19937_64 rng(seed);
    std::vector<NodeId> members;
    for (NodeId v = 0; v < n; ++v) {
        if (v != player) members.push_back(v);
    }
    if (members.size() <= delta)
        throw DatasetError("too few nodes for " + std::to_string(delta) + " links each");

    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
        std::vector<std::size_t> degree(n, 0);
        GeneratedTopology out;
        bool stuck = false;
        for (NodeId u : members) {
            for (std::size_t c = 0; c < delta && !stuck; ++c) {
                if (degree[u] >= gamma) {
                    stuck = true;
                    break;
                }
                std::vector<NodeId> options;
                for (NodeId w : members) {
                    if (w != u && !linked[u][w] && degree[w] < gamma) options.push_back(w);
                }
                if (options.empty()) {
                    stuck = true;
                    break;
                }
                std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
                const NodeId w = options[pick(rng)];
                linked[u][w] = linked[w][u] = true;
                ++degree[u];
                ++degree[w];
                out.connections.push_back({u, w});
            }
            if (stuck) break;
        }
        if (stuck) continue;
        for (const Edge& e : out.connections) {
            out.edges.push_back(e);
            out.edges.push_back({e.to, e.from});
        }
        out.edges = normalize_edges(std::move(out.edges));
        return out;
    }
    throw DatasetError("no fixed topology with delta=" + std::to_string(delta) +
                       ", gamma=" + std::to_string(gamma) + ", n=" + std::to_string(n) +
                       " found after " + std::to_string(kAttempts) + " attempts");
}

Dataset generate_synthetic(const SyntheticOptions& options) {
    const std::size_t n = options.nodes;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> coord(0.0, options.spread);
    Matrix points(n, options.dimension);
    if (options.clusters == 0) {
        for (double& x : points.flat()) x = coord(rng);
    } else {
        Matrix centres(options.clusters, options.dimension);
        for (double& x : centres.flat()) x = coord(rng);
        std::normal_distribution<double> jitter(0.0, options.cluster_radius);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < options.dimension; ++d)
                points(i, d) = centres(i % options.clusters, d) + jitter(rng);
        }
    }

    Dataset ds;
    ds.notes = "synthetic: Euclidean latencies between random points, uniform hash";
    ds.latency = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels.push_back("n" + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t d = 0; d < options.dimension; ++d) {
                const double diff = points(i, d) - points(j, d);
                sum += diff * diff;
            }
            ds.latency(i, j) = std::sqrt(sum);
        }
    }
    ds.hash.assign(n, 1.0 / static_cast<double>(n));
    ds.edges = generate_fixed_topology(n, options.player, options.delta, options.gamma,
                                       rng())
                   .edges;
    return ds;
}

bool strongly_connected(std::size_t n, std::span<const Edge> edges) {
    if (n == 0) return true;
    auto reaches_all = [&](bool reverse) {
        std::vector<std::vector<NodeId>> adj(n);
        for (const Edge& e : edges) {
            if (reverse) adj[e.to].push_back(e.from);
            else adj[e.from].push_back(e.to);
        }
        std::vector<bool> seen(n, false);
        std::vector<NodeId> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId w : adj[u]) {
                if (!seen[w]) {
                    seen[w] = true;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

}  // namespace cobalt
