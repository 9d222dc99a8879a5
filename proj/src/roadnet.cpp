#include "ridesim/roadnet.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace ridesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

std::size_t RoadNetwork::PairHash::operator()(const std::pair<VertexId, VertexId>& p) const {
  return static_cast<std::size_t>(
      mix64(static_cast<std::uint64_t>(p.first) * 0x9e3779b97f4a7c15ULL ^
            static_cast<std::uint64_t>(p.second)));
}

RoadNetwork::RoadNetwork(const std::vector<NodeRecord>& nodes, const std::vector<EdgeRecord>& edges,
                         NetConfig config)
    : cache_capacity_(config.cache_capacity), cache_(std::make_unique<Cache>()) {
  ids_.reserve(nodes.size());
  for (const NodeRecord& n : nodes) {
    if (index_.count(n.id)) {
      throw NetworkLoadError("duplicate vertex id: " + std::to_string(n.id));
    }
    index_.emplace(n.id, 0);
    ids_.push_back(n.id);
  }
  std::sort(ids_.begin(), ids_.end());
  coords_.resize(ids_.size());
  adj_.assign(ids_.size(), {});
  for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<int>(i);
  for (const NodeRecord& n : nodes) coords_[static_cast<std::size_t>(index_[n.id])] = {n.lat, n.lon};

  for (const EdgeRecord& e : edges) {
    auto iu = index_.find(e.u);
    auto iv = index_.find(e.v);
    if (iu == index_.end()) {
      throw NetworkLoadError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             "): unknown vertex " + std::to_string(e.u));
    }
    if (iv == index_.end()) {
      throw NetworkLoadError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             "): unknown vertex " + std::to_string(e.v));
    }
    if (!(e.w > 0.0)) {
      throw NetworkLoadError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             "): non-positive weight " + std::to_string(e.w));
    }
    adj_[static_cast<std::size_t>(iu->second)].emplace_back(iv->second, e.w);
    adj_[static_cast<std::size_t>(iv->second)].emplace_back(iu->second, e.w);
    ++edge_count_;
  }
}

LatLon RoadNetwork::coord(VertexId id) const {
  return coords_[static_cast<std::size_t>(index_of(id))];
}

int RoadNetwork::index_of(VertexId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw std::invalid_argument("unknown vertex id: " + std::to_string(id));
  }
  return it->second;
}

PathResult RoadNetwork::dijkstra(int src, int dst) const {
  const std::size_t n = adj_.size();
  std::vector<double> dist(n, kInf);
  std::vector<int> parent(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[static_cast<std::size_t>(src)] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    if (u == dst) break;
    for (const auto& [v, w] : adj_[static_cast<std::size_t>(u)]) {
      double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        parent[static_cast<std::size_t>(v)] = u;
        heap.emplace(nd, v);
      }
    }
  }
  PathResult result;
  result.distance = dist[static_cast<std::size_t>(dst)];
  if (result.distance == kInf) return result;  // caller checks
  std::vector<int> rev;
  for (int v = dst; v != -1; v = parent[static_cast<std::size_t>(v)]) rev.push_back(v);
  result.hops.reserve(rev.size());
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    result.hops.push_back(ids_[static_cast<std::size_t>(*it)]);
  }
  return result;
}

std::optional<PathResult> RoadNetwork::shortest_path(VertexId u, VertexId v) const {
  int su = index_of(u);
  int sv = index_of(v);
  if (u == v) {
    PathResult r;
    r.distance = 0.0;
    r.hops = {u};
    return r;
  }

  const std::pair<VertexId, VertexId> key{std::min(u, v), std::max(u, v)};
  if (cache_capacity_ > 0) {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->map.find(key);
    if (it != cache_->map.end()) {
      cache_->list.splice(cache_->list.begin(), cache_->list, it->second);
      PathResult r = it->second->second;
      if (r.distance == kInf) return std::nullopt;
      if (u != key.first) std::reverse(r.hops.begin(), r.hops.end());
      return r;
    }
  }

  // Compute in canonical direction so both query orders share one entry.
  int csrc = (u == key.first) ? su : sv;
  int cdst = (u == key.first) ? sv : su;
  PathResult canonical = dijkstra(csrc, cdst);

  if (cache_capacity_ > 0) {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (cache_->map.find(key) == cache_->map.end()) {
      cache_->list.emplace_front(key, canonical);
      cache_->map[key] = cache_->list.begin();
      if (cache_->map.size() > cache_capacity_) {
        cache_->map.erase(cache_->list.back().first);
        cache_->list.pop_back();
      }
    }
  }

  if (canonical.distance == kInf) return std::nullopt;
  PathResult r = canonical;
  if (u != key.first) std::reverse(r.hops.begin(), r.hops.end());
  return r;
}

std::vector<std::optional<double>> RoadNetwork::distances_from(
    VertexId source, const std::vector<VertexId>& targets) const {
  int src = index_of(source);
  std::vector<int> want;
  want.reserve(targets.size());
  for (VertexId t : targets) want.push_back(index_of(t));

  const std::size_t n = adj_.size();
  std::vector<double> dist(n, kInf);
  std::vector<char> pending(n, 0);
  std::size_t remaining = 0;
  for (int t : want) {
    if (!pending[static_cast<std::size_t>(t)]) {
      pending[static_cast<std::size_t>(t)] = 1;
      ++remaining;
    }
  }
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[static_cast<std::size_t>(src)] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty() && remaining > 0) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    if (pending[static_cast<std::size_t>(u)]) {
      pending[static_cast<std::size_t>(u)] = 0;
      --remaining;
    }
    for (const auto& [v, w] : adj_[static_cast<std::size_t>(u)]) {
      double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  std::vector<std::optional<double>> out;
  out.reserve(want.size());
  for (int t : want) {
    double d = dist[static_cast<std::size_t>(t)];
    if (d == kInf) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(d);
    }
  }
  return out;
}

std::size_t RoadNetwork::cache_entries() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->map.size();
}

std::optional<double> RoadNetwork::min_edge_weight(VertexId u, VertexId v) const {
  int su = index_of(u);
  int sv = index_of(v);
  std::optional<double> best;
  for (const auto& [t, w] : adj_[static_cast<std::size_t>(su)]) {
    if (t == sv && (!best || w < *best)) best = w;
  }
  return best;
}

std::optional<double> schedule_distance(const RoadNetwork& net, const std::vector<VertexId>& stops) {
  if (stops.empty()) {
    throw std::invalid_argument("schedule_distance: empty stop sequence");
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
    auto leg = net.shortest_path(stops[i], stops[i + 1]);
    if (!leg) return std::nullopt;
    total += leg->distance;
  }
  return total;
}

namespace {

// Shared line scanner: skips blank and '#' lines, reports 1-based line numbers.
template <class Fn>
void for_each_record(std::istream& in, const char* what, Fn fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    if (!fn(ss)) {
      throw NetworkLoadError(std::string(what) + " line " + std::to_string(lineno) +
                             ": malformed record '" + line + "'");
    }
    std::string extra;
    if (ss >> extra) {
      throw NetworkLoadError(std::string(what) + " line " + std::to_string(lineno) +
                             ": trailing fields in '" + line + "'");
    }
  }
}

}  // namespace

RoadNetwork load_network(std::istream& nodes, std::istream& edges, NetConfig config) {
  std::vector<NodeRecord> node_records;
  for_each_record(nodes, "node file", [&](std::istringstream& ss) {
    NodeRecord n;
    if (!(ss >> n.id >> n.lat >> n.lon)) return false;
    node_records.push_back(n);
    return true;
  });
  std::vector<EdgeRecord> edge_records;
  for_each_record(edges, "edge file", [&](std::istringstream& ss) {
    EdgeRecord e;
    if (!(ss >> e.u >> e.v >> e.w)) return false;
    edge_records.push_back(e);
    return true;
  });
  return RoadNetwork(node_records, edge_records, config);
}

RoadNetwork load_network_files(const std::string& node_path, const std::string& edge_path,
                               NetConfig config) {
  std::ifstream nodes(node_path);
  if (!nodes) throw NetworkLoadError("cannot open node file: " + node_path);
  std::ifstream edges(edge_path);
  if (!edges) throw NetworkLoadError("cannot open edge file: " + edge_path);
  return load_network(nodes, edges, config);
}

}  // namespace ridesim
