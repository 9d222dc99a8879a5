#include <doctest.h>

#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "ridesim/roadnet.hpp"
#include "ridesim/rng.hpp"

using namespace ridesim;

namespace {

// Line graph A(1) - B(2) - C(3) with weights 2 and 3.
RoadNetwork line_abc(std::size_t cache = NetConfig{}.cache_capacity) {
  NetConfig cfg;
  cfg.cache_capacity = cache;
  return RoadNetwork({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}}, {{1, 2, 2.0}, {2, 3, 3.0}}, cfg);
}

}  // namespace

TEST_CASE("load_network accepts the smallest valid graph") {
  std::istringstream nodes("1 39.9 116.3\n2 39.95 116.35\n");
  std::istringstream edges("# comment\n1 2 5.0\n");
  RoadNetwork net = load_network(nodes, edges);
  CHECK(net.vertex_count() == 2);
  CHECK(net.edge_count() == 1);
  auto p = msp(net, 1, 2);
  REQUIRE(p.has_value());
  CHECK(p->distance == 5.0);
}

TEST_CASE("load_network rejects an edge with an unknown vertex") {
  std::istringstream nodes("1 0 0\n2 0 1\n");
  std::istringstream edges("1 3 2.0\n");
  CHECK_THROWS_WITH_AS(load_network(nodes, edges), doctest::Contains("unknown vertex 3"),
                       NetworkLoadError);
}

TEST_CASE("load_network rejects non-positive weights") {
  std::istringstream nodes("1 0 0\n2 0 1\n");
  std::istringstream edges("1 2 0.0\n");
  CHECK_THROWS_WITH_AS(load_network(nodes, edges), doctest::Contains("non-positive weight"),
                       NetworkLoadError);
}

TEST_CASE("load_network rejects duplicate vertex ids") {
  std::istringstream nodes("1 0 0\n1 0 1\n");
  std::istringstream edges("");
  CHECK_THROWS_WITH_AS(load_network(nodes, edges), doctest::Contains("duplicate vertex id: 1"),
                       NetworkLoadError);
}

TEST_CASE("load_network rejects malformed records with a line number") {
  std::istringstream nodes("1 0 0\nnot-a-node\n");
  std::istringstream edges("");
  CHECK_THROWS_WITH_AS(load_network(nodes, edges), doctest::Contains("line 2"), NetworkLoadError);
}

TEST_CASE("msp on the line graph") {
  RoadNetwork net = line_abc();
  auto path = msp(net, 1, 3);
  REQUIRE(path.has_value());
  CHECK(path->distance == 5.0);  // 2 + 3
  CHECK(path->hops == std::vector<VertexId>{1, 2, 3});

  auto self = msp(net, 1, 1);
  REQUIRE(self.has_value());
  CHECK(self->distance == 0.0);
  CHECK(self->hops == std::vector<VertexId>{1});
}

TEST_CASE("msp reports unreachable pairs explicitly") {
  RoadNetwork net({{1, 0, 0}, {2, 0, 1}}, {});
  CHECK_FALSE(msp(net, 1, 2).has_value());
}

TEST_CASE("msp requires known vertices") {
  RoadNetwork net = line_abc();
  CHECK_THROWS_AS((void)msp(net, 1, 99), std::invalid_argument);
}

TEST_CASE("schedule_distance concatenates pairwise shortest paths") {
  RoadNetwork net = line_abc();
  CHECK(schedule_distance(net, std::vector<VertexId>{1}) == 0.0);
  CHECK(schedule_distance(net, std::vector<VertexId>{1, 3, 1}) == 10.0);
  CHECK(schedule_distance(net, std::vector<VertexId>{1, 2, 3}) == 5.0);
}

TEST_CASE("schedule_distance propagates unreachable legs") {
  RoadNetwork net({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}}, {{1, 2, 1.0}});
  CHECK_FALSE(schedule_distance(net, std::vector<VertexId>{1, 3}).has_value());
}

TEST_CASE("msp matches Floyd-Warshall on random connected graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.below(49));
    auto g = oracle::random_connected_graph(n, n / 2, rng);
    RoadNetwork net(g.nodes, g.edges);
    auto expected = oracle::floyd_warshall(g.nodes, g.edges);
    for (VertexId u = 1; u <= n; ++u) {
      for (VertexId v = 1; v <= n; ++v) {
        auto got = msp(net, u, v);
        REQUIRE(got.has_value());
        CHECK(got->distance ==
              doctest::Approx(expected[static_cast<std::size_t>(u - 1)][static_cast<std::size_t>(v - 1)])
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("msp path invariants: endpoints, weight sum, symmetry, triangle") {
  Rng rng(77);
  auto g = oracle::random_connected_graph(30, 25, rng);
  RoadNetwork net(g.nodes, g.edges);
  for (int trial = 0; trial < 200; ++trial) {
    VertexId u = static_cast<VertexId>(rng.range(1, 30));
    VertexId v = static_cast<VertexId>(rng.range(1, 30));
    VertexId w = static_cast<VertexId>(rng.range(1, 30));
    auto uv = msp(net, u, v);
    REQUIRE(uv.has_value());
    CHECK(uv->hops.front() == u);
    CHECK(uv->hops.back() == v);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < uv->hops.size(); ++i) {
      sum += *net.min_edge_weight(uv->hops[i], uv->hops[i + 1]);
    }
    CHECK(uv->distance == doctest::Approx(sum).epsilon(1e-12));
    CHECK((uv->distance == 0.0) == (u == v));

    auto vu = msp(net, v, u);
    CHECK(uv->distance == vu->distance);

    auto uw = msp(net, u, w);
    auto wv = msp(net, w, v);
    CHECK(uv->distance <= uw->distance + wv->distance + 1e-9);
  }
}

TEST_CASE("cache is transparent: capacity 0 and large capacity agree bitwise") {
  Rng rng(5150);
  auto g = oracle::random_connected_graph(40, 30, rng);
  NetConfig none, big;
  none.cache_capacity = 0;
  big.cache_capacity = 1000000;
  RoadNetwork uncached(g.nodes, g.edges, none);
  RoadNetwork cached(g.nodes, g.edges, big);
  for (int trial = 0; trial < 400; ++trial) {
    VertexId u = static_cast<VertexId>(rng.range(1, 40));
    VertexId v = static_cast<VertexId>(rng.range(1, 40));
    auto a = uncached.shortest_path(u, v);
    auto b = cached.shortest_path(u, v);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->distance == b->distance);  // bit identical
    CHECK(a->hops == b->hops);
  }
  CHECK(uncached.cache_entries() == 0);
  CHECK(cached.cache_entries() > 0);
}

TEST_CASE("cache evicts least recently used entries at capacity") {
  NetConfig cfg;
  cfg.cache_capacity = 2;
  RoadNetwork net({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}, {4, 0, 3}},
                  {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}}, cfg);
  (void)net.shortest_path(1, 2);
  (void)net.shortest_path(2, 3);
  (void)net.shortest_path(3, 4);  // evicts (1,2)
  CHECK(net.cache_entries() == 2);
  CHECK(net.shortest_path(1, 2)->distance == 1.0);  // recomputed, same value
}

TEST_CASE("repeated and reversed queries return identical results") {
  RoadNetwork net = line_abc();
  auto first = msp(net, 3, 1);
  auto second = msp(net, 3, 1);
  CHECK(first->distance == second->distance);
  CHECK(first->hops == second->hops);
  CHECK(first->hops == std::vector<VertexId>{3, 2, 1});
}

TEST_CASE("distances_from agrees with per-pair msp") {
  Rng rng(31);
  auto g = oracle::random_connected_graph(25, 20, rng);
  RoadNetwork net(g.nodes, g.edges);
  std::vector<VertexId> targets;
  for (VertexId v = 1; v <= 25; ++v) targets.push_back(v);
  auto dists = net.distances_from(7, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto direct = msp(net, 7, targets[i]);
    REQUIRE(dists[i].has_value());
    CHECK(*dists[i] == doctest::Approx(direct->distance).epsilon(1e-12));
  }
}

TEST_CASE("concurrent msp readers see serial results") {
  Rng rng(99);
  auto g = oracle::random_connected_graph(30, 20, rng);
  RoadNetwork net(g.nodes, g.edges);
  std::vector<std::pair<VertexId, VertexId>> queries;
  for (int i = 0; i < 64; ++i) {
    queries.emplace_back(static_cast<VertexId>(rng.range(1, 30)),
                         static_cast<VertexId>(rng.range(1, 30)));
  }
  std::vector<double> serial;
  for (auto [u, v] : queries) serial.push_back(net.shortest_path(u, v)->distance);

  RoadNetwork fresh(g.nodes, g.edges);
  std::vector<double> parallel(queries.size());
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < queries.size(); i += 4) {
        parallel[i] = fresh.shortest_path(queries[i].first, queries[i].second)->distance;
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK(parallel == serial);
}
