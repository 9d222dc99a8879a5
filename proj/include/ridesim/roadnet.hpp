#pragma once

#include <cstdint>
#include <istream>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ridesim {

using VertexId = std::int64_t;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

// Shortest-path answer for one vertex pair. `hops` runs from the query
// source to the query target; `distance` is the sum of edge weights along it.
struct PathResult {
  double distance = 0.0;
  std::vector<VertexId> hops;
};

struct NetConfig {
  // Maximum number of cached vertex-pair results. 0 disables caching
  // without changing any query result.
  std::size_t cache_capacity = std::size_t{1} << 30;
};

struct NodeRecord {
  VertexId id = 0;
  double lat = 0.0;
  double lon = 0.0;
};

struct EdgeRecord {
  VertexId u = 0;
  VertexId v = 0;
  double w = 0.0;
};

class NetworkLoadError : public std::runtime_error {
 public:
  explicit NetworkLoadError(const std::string& what) : std::runtime_error(what) {}
};

// Immutable undirected road graph with positive edge weights (meters) and an
// internal LRU cache of shortest-path results keyed by unordered vertex pair.
// Safe for concurrent readers; the cache is guarded by a mutex and query
// results never depend on interleaving.
class RoadNetwork {
 public:
  RoadNetwork(const std::vector<NodeRecord>& nodes, const std::vector<EdgeRecord>& edges,
              NetConfig config = {});
  RoadNetwork(RoadNetwork&&) = default;
  RoadNetwork& operator=(RoadNetwork&&) = default;
  RoadNetwork(const RoadNetwork&) = delete;
  RoadNetwork& operator=(const RoadNetwork&) = delete;

  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool has_vertex(VertexId id) const { return index_.count(id) != 0; }
  LatLon coord(VertexId id) const;
  const std::vector<VertexId>& vertex_ids() const { return ids_; }

  // Exact shortest path between two existing vertices; std::nullopt when the
  // pair is disconnected. Results are cached (unordered pair key, LRU).
  std::optional<PathResult> shortest_path(VertexId u, VertexId v) const;

  // Distances from `source` to each of `targets` with a single search.
  // Bypasses the cache; intended for batch prefiltering.
  std::vector<std::optional<double>> distances_from(VertexId source,
                                                    const std::vector<VertexId>& targets) const;

  std::size_t cache_entries() const;

  // Smallest weight among parallel (u,v) edges; used by tests to re-sum hops.
  std::optional<double> min_edge_weight(VertexId u, VertexId v) const;

 private:
  int index_of(VertexId id) const;
  PathResult dijkstra(int src, int dst) const;  // canonical direction

  std::vector<VertexId> ids_;  // sorted external ids
  std::vector<LatLon> coords_;
  std::unordered_map<VertexId, int> index_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::size_t edge_count_ = 0;

  // LRU cache, canonical key = (min id, max id). Heap allocated so the
  // network itself stays movable.
  using CacheList = std::list<std::pair<std::pair<VertexId, VertexId>, PathResult>>;
  struct PairHash {
    std::size_t operator()(const std::pair<VertexId, VertexId>& p) const;
  };
  struct Cache {
    std::mutex mutex;
    CacheList list;
    std::unordered_map<std::pair<VertexId, VertexId>, CacheList::iterator, PairHash> map;
  };
  std::size_t cache_capacity_;
  mutable std::unique_ptr<Cache> cache_;
};

// Minimal shortest path over the network.
inline std::optional<PathResult> msp(const RoadNetwork& net, VertexId u, VertexId v) {
  return net.shortest_path(u, v);
}

// Sum of msp distances over consecutive stops; single stop -> 0;
// std::nullopt if any consecutive pair is unreachable.
std::optional<double> schedule_distance(const RoadNetwork& net, const std::vector<VertexId>& stops);

// Parses "id lat lon" / "u v w" whitespace-separated records, one per line,
// '#' starts a comment line. Throws NetworkLoadError naming the offending
// record on duplicate ids, unknown endpoints, or non-positive weights.
RoadNetwork load_network(std::istream& nodes, std::istream& edges, NetConfig config = {});
RoadNetwork load_network_files(const std::string& node_path, const std::string& edge_path,
                               NetConfig config = {});

}  // namespace ridesim
