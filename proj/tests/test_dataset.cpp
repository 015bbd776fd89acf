#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "cobalt/dataset.hpp"

using namespace cobalt;
using nlohmann::json;

namespace {

json small_doc() {
    return json::parse(R"({
        "version": 1,
        "notes": "three nodes",
        "nodes": [{"label": "x", "hash": 0.5}, {"label": "y", "hash": 0.3},
                  {"label": "z", "hash": 0.2}],
        "latency_ms": [[0, 10, 20], [10, 0, 15], [20, 15, 0]],
        "fixed_edges": [[1, 2], [2, 1], [0, 1]]
    })");
}

std::string error_of(const json& doc) {
    try {
        parse_dataset(doc);
    } catch (const DatasetError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("bundled sample dataset") {
    Dataset ds = load_dataset(COBALT_SAMPLE_DATASET);
    CHECK(ds.warnings.empty());
    CHECK(ds.size() == 20);
    CHECK(std::accumulate(ds.hash.begin(), ds.hash.end(), 0.0) == doctest::Approx(1.0));
    CHECK(strongly_connected(ds.size(), ds.edges));
    for (const char* city : {"Amsterdam", "Atlanta", "Shanghai", "Tokyo"})
        CHECK_NOTHROW(resolve_node(ds, city));
    for (NodeId v = 0; v < ds.size(); ++v) {
        NetworkSpec spec = make_network(ds, v, 4, 12, ds.hash);
        for (const Edge& e : spec.fixed_edges) CHECK(e.from != v);
    }
}

TEST_CASE("parsing") {
    Dataset ds = parse_dataset(small_doc());
    CHECK(ds.labels == std::vector<std::string>{"x", "y", "z"});
    CHECK(ds.latency(2, 1) == 15.0);
    CHECK(ds.edges == std::vector<Edge>{{0, 1}, {1, 2}, {2, 1}});
    CHECK(ds.notes == "three nodes");

    SUBCASE("truncated latency row") {
        json doc = small_doc();
        doc["latency_ms"][1] = json::array({10, 0});
        auto msg = error_of(doc);
        CHECK(msg.find("row 1") != std::string::npos);
        CHECK(msg.find("2 columns") != std::string::npos);
    }
    SUBCASE("negative hash names the node") {
        json doc = small_doc();
        doc["nodes"][2]["hash"] = -0.1;
        CHECK(error_of(doc).find("(z)") != std::string::npos);
    }
    SUBCASE("missing key") {
        json doc = small_doc();
        doc.erase("fixed_edges");
        CHECK(error_of(doc).find("fixed_edges") != std::string::npos);
    }
    SUBCASE("dangling edge") {
        json doc = small_doc();
        doc["fixed_edges"].push_back({0, 3});
        CHECK(error_of(doc).find("missing node") != std::string::npos);
    }
    SUBCASE("nonzero diagonal") {
        json doc = small_doc();
        doc["latency_ms"][0][0] = 1;
        CHECK(error_of(doc).find("must be zero") != std::string::npos);
    }
    SUBCASE("wrong version") {
        json doc = small_doc();
        doc["version"] = 2;
        CHECK(error_of(doc).find("version") != std::string::npos);
    }
    SUBCASE("asymmetry warns") {
        json doc = small_doc();
        doc["latency_ms"][0][2] = 30;
        Dataset warned = parse_dataset(doc);
        REQUIRE(warned.warnings.size() == 1);
        CHECK(warned.warnings[0].find("x and z") != std::string::npos);
    }
}

TEST_CASE("round trip") {
    Dataset ds = parse_dataset(small_doc());
    CHECK(parse_dataset(dataset_to_json(ds)) == ds);

    auto path = std::filesystem::temp_directory_path() / "cobalt_roundtrip.json";
    save_dataset(path, ds);
    CHECK(load_dataset(path) == ds);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_dataset("/nonexistent/cobalt.json"), DatasetError);
}

TEST_CASE("node resolution") {
    Dataset ds = parse_dataset(small_doc());
    CHECK(resolve_node(ds, "y") == 1);
    CHECK(resolve_node(ds, "2") == 2);
    CHECK_THROWS_AS(resolve_node(ds, "3"), DatasetError);
    CHECK_THROWS_AS(resolve_node(ds, "w"), DatasetError);
}

TEST_CASE("make_network drops links the player made") {
    Dataset ds = parse_dataset(small_doc());
    NetworkSpec spec = make_network(ds, 0, 1, 12, ds.hash);
    CHECK(spec.fixed_edges == std::vector<Edge>{{1, 2}, {2, 1}});
    NetworkSpec other = make_network(ds, 2, 1, 12, ds.hash);
    CHECK(other.fixed_edges == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("hash generation") {
    CHECK(generate_hash(HashMode::uniform, 4, 0) == std::vector<double>(4, 0.25));
    CHECK(parse_hash_mode("exponential") == HashMode::exponential);
    CHECK(to_string(HashMode::real) == "real");
    CHECK_THROWS_AS(parse_hash_mode("zipf"), DatasetError);
    CHECK_THROWS_AS(generate_hash(HashMode::real, 4, 0), DatasetError);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto h = generate_hash(HashMode::exponential, 50, seed, 2.0);
        CHECK(std::abs(std::accumulate(h.begin(), h.end(), 0.0) - 1.0) <= 1e-12);
        for (double x : h) CHECK(x > 0.0);
    }
    CHECK(generate_hash(HashMode::exponential, 10, 5) == generate_hash(HashMode::exponential, 10, 5));

    // Exponential draws have coefficient of variation one.
    auto raw = exponential_draws(10000, 17, 1.0);
    const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / raw.size();
    double var = 0.0;
    for (double x : raw) var += (x - mean) * (x - mean);
    var /= raw.size() - 1;
    CHECK(std::sqrt(var) / mean == doctest::Approx(1.0).epsilon(0.05));

    Dataset ds = parse_dataset(small_doc());
    CHECK(resolve_hash(ds, HashMode::real, 0) == ds.hash);
    CHECK(resolve_hash(ds, HashMode::uniform, 0).size() == 3);
}

TEST_CASE("fixed topology generator") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto t = generate_fixed_topology(12, 3, 2, 6, seed);
        CHECK(t.connections.size() == 11 * 2);
        CHECK(t.edges.size() == 2 * t.connections.size());
        auto indeg = incoming_degrees(12, t.edges);
        CHECK(indeg[3] == 0);
        for (std::size_t d : indeg) CHECK(d <= 6);
        for (const Edge& e : t.edges) {
            CHECK(e.from != e.to);
            CHECK(std::binary_search(t.edges.begin(), t.edges.end(), Edge{e.to, e.from}));
        }
    }
    auto a = generate_fixed_topology(10, kNoNode, 3, 12, 9);
    auto b = generate_fixed_topology(10, kNoNode, 3, 12, 9);
    CHECK(a.edges == b.edges);
    CHECK_THROWS_AS(generate_fixed_topology(4, kNoNode, 3, 2, 0), DatasetError);
    CHECK_THROWS_AS(generate_fixed_topology(3, kNoNode, 3, 12, 0), DatasetError);
}

TEST_CASE("synthetic networks") {
    SyntheticOptions o;
    o.nodes = 10;
    o.seed = 4;
    Dataset ds = generate_synthetic(o);
    CHECK(ds.size() == 10);
    CHECK(ds.hash == std::vector<double>(10, 0.1));
    for (NodeId i = 0; i < 10; ++i) {
        CHECK(ds.latency(i, i) == 0.0);
        for (NodeId j = 0; j < 10; ++j) CHECK(ds.latency(i, j) == ds.latency(j, i));
    }
    CHECK(parse_dataset(dataset_to_json(ds)) == ds);
    CHECK(generate_synthetic(o) == ds);

    o.clusters = 2;
    o.cluster_radius = 1.0;
    Dataset clustered = generate_synthetic(o);
    // Same-cluster pairs sit far closer than the box size.
    CHECK(clustered.latency(0, 2) < 10.0);
    CHECK(clustered.latency(1, 3) < 10.0);
}

TEST_CASE("strong connectivity") {
    CHECK(strongly_connected(3, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}}));
    CHECK_FALSE(strongly_connected(3, std::vector<Edge>{{0, 1}, {1, 2}}));
    CHECK_FALSE(strongly_connected(2, std::vector<Edge>{}));
}
