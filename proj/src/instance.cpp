#include "ridesim/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ridesim/rng.hpp"

namespace ridesim {

std::vector<int> batched_counts_riders(int rider_count, int batches) {
  std::vector<int> counts(static_cast<std::size_t>(batches), 0);
  if (batches == 0) return counts;
  int base = rider_count / batches;
  for (int& c : counts) c = base;
  counts.back() += rider_count - base * batches;
  return counts;
}

std::vector<int> batched_counts_drivers(int driver_count, int batches) {
  std::vector<int> counts(static_cast<std::size_t>(batches), 0);
  if (batches == 0) return counts;
  int base = driver_count / batches;
  int rem = driver_count - base * batches;
  for (int& c : counts) c = base;
  if (rem >= 1) {
    counts.back() += 1;
    counts.front() += rem - 1;
  }
  return counts;
}

namespace {

struct Draft {
  bool driver;
  VertexId origin, dest;
  Seconds early, late;
  int load;
};

// Uniform reachable origin/destination pair with origin != dest.
std::pair<VertexId, VertexId> sample_od(const RoadNetwork& net, Rng& rng, double* direct) {
  const auto& ids = net.vertex_ids();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    VertexId o = ids[static_cast<std::size_t>(rng.below(ids.size()))];
    VertexId d = ids[static_cast<std::size_t>(rng.below(ids.size()))];
    if (o == d) continue;
    auto path = net.shortest_path(o, d);
    if (!path) continue;
    *direct = path->distance;
    return {o, d};
  }
  throw std::runtime_error("generate: could not sample a reachable origin/destination pair");
}

std::vector<Seconds> arrival_times(int count, Seconds horizon, ArrivalProfile profile,
                                   Seconds batch_seconds, bool drivers, Rng& rng) {
  std::vector<Seconds> times;
  times.reserve(static_cast<std::size_t>(count));
  if (profile == ArrivalProfile::Uniform || batch_seconds <= 0 || horizon < batch_seconds) {
    for (int i = 0; i < count; ++i) times.push_back(rng.range(0, std::max<Seconds>(horizon - 1, 0)));
    return times;
  }
  int batches = static_cast<int>(horizon / batch_seconds);
  std::vector<int> counts = drivers ? batched_counts_drivers(count, batches)
                                    : batched_counts_riders(count, batches);
  for (int b = 0; b < batches; ++b) {
    Seconds start = static_cast<Seconds>(b) * batch_seconds;
    for (int i = 0; i < counts[static_cast<std::size_t>(b)]; ++i) {
      times.push_back(start + rng.range(0, batch_seconds - 1));
    }
  }
  return times;
}

}  // namespace

std::vector<InstanceRecord> generate(const RoadNetwork& net, const GenParams& p) {
  if (net.vertex_count() < 2) throw std::runtime_error("generate: network too small");
  if (p.driver_count < 0 || p.rider_count < 0) {
    throw std::invalid_argument("generate: counts must be non-negative");
  }
  if (p.driver_slack < 1.0 || p.rider_slack < 1.0) {
    throw std::invalid_argument("generate: slack factors must be >= 1");
  }
  if (!(p.speed > 0.0)) throw std::invalid_argument("generate: speed must be positive");
  Rng rng(Rng::derive(p.seed, 0x6E57ULL));

  std::vector<Draft> drafts;
  drafts.reserve(static_cast<std::size_t>(p.driver_count + p.rider_count));

  std::vector<Seconds> driver_times =
      arrival_times(p.driver_count, p.horizon_seconds, p.profile, p.batch_seconds, true, rng);
  for (int i = 0; i < p.driver_count; ++i) {
    double direct = 0.0;
    auto [o, d] = sample_od(net, rng, &direct);
    Seconds early = driver_times[static_cast<std::size_t>(i)];
    Seconds late = early + static_cast<Seconds>(std::ceil(p.driver_slack * direct / p.speed));
    drafts.push_back({true, o, d, early, late, -p.capacity});
  }

  std::vector<Seconds> rider_times =
      arrival_times(p.rider_count, p.horizon_seconds, p.profile, p.batch_seconds, false, rng);
  for (int i = 0; i < p.rider_count; ++i) {
    double direct = 0.0;
    auto [o, d] = sample_od(net, rng, &direct);
    Seconds early = rider_times[static_cast<std::size_t>(i)];
    Seconds late = early + static_cast<Seconds>(std::ceil(p.rider_slack * direct / p.speed));
    drafts.push_back({false, o, d, early, late, 1});
  }

  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.early < b.early; });
  std::vector<InstanceRecord> records;
  records.reserve(drafts.size());
  std::int64_t next_id = 1;
  for (const Draft& d : drafts) {
    records.push_back(InstanceRecord{next_id++, d.origin, d.dest, d.early, d.late, d.load});
  }
  return records;
}

std::vector<InstanceRecord> load_instance(std::istream& in) {
  std::vector<InstanceRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    InstanceRecord rec;
    std::string extra;
    if (!(ss >> rec.id >> rec.origin >> rec.dest >> rec.early >> rec.late >> rec.load) ||
        (ss >> extra)) {
      throw std::runtime_error("instance line " + std::to_string(lineno) + ": malformed record '" +
                               line + "'");
    }
    if (rec.load == 0) {
      throw std::runtime_error("instance line " + std::to_string(lineno) +
                               ": load must be negative (driver) or positive (rider)");
    }
    if (rec.early > rec.late) {
      throw std::runtime_error("instance line " + std::to_string(lineno) +
                               ": early time after late time");
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<InstanceRecord> load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return load_instance(in);
}

void save_instance(std::ostream& out, const std::vector<InstanceRecord>& records) {
  out << "# id origin destination early late load\n";
  for (const InstanceRecord& r : records) {
    out << r.id << ' ' << r.origin << ' ' << r.dest << ' ' << r.early << ' ' << r.late << ' '
        << r.load << '\n';
  }
}

void save_instance_file(const std::string& path, const std::vector<InstanceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open instance file for writing: " + path);
  save_instance(out, records);
}

std::pair<std::vector<NodeRecord>, std::vector<EdgeRecord>> grid_records(const GridParams& p) {
  if (p.n < 1) throw std::invalid_argument("grid size must be >= 1");
  Rng rng(Rng::derive(p.seed, 0x9219ULL));
  auto weight = [&]() {
    if (p.weights == GridWeights::Unit) return 1.0;
    return p.weight_min + rng.uniform() * (p.weight_max - p.weight_min);
  };
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  const int n = p.n;
  nodes.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  auto id_at = [n](int row, int col) {
    return static_cast<VertexId>(row) * n + col + 1;
  };
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      nodes.push_back(NodeRecord{id_at(row, col), static_cast<double>(row),
                                 static_cast<double>(col)});
    }
  }
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      if (col + 1 < n) edges.push_back(EdgeRecord{id_at(row, col), id_at(row, col + 1), weight()});
      if (row + 1 < n) edges.push_back(EdgeRecord{id_at(row, col), id_at(row + 1, col), weight()});
    }
  }
  return {std::move(nodes), std::move(edges)};
}

RoadNetwork make_grid_network(const GridParams& p, NetConfig config) {
  auto [nodes, edges] = grid_records(p);
  return RoadNetwork(nodes, edges, config);
}

Rider record_to_rider(const InstanceRecord& rec) {
  if (rec.is_driver()) throw std::invalid_argument("record is a driver");
  Rider r;
  r.id = rec.id;
  r.origin = rec.origin;
  r.dest = rec.dest;
  r.earliest = rec.early;
  r.latest = rec.late;
  r.requested = rec.early;
  r.state = RiderState::Waiting;
  if (r.origin == r.dest) {
    throw std::runtime_error("rider " + std::to_string(r.id) + ": origin equals destination");
  }
  return r;
}

Driver record_to_driver(const InstanceRecord& rec, double speed) {
  if (!rec.is_driver()) throw std::invalid_argument("record is a rider");
  return make_driver(rec.id, rec.origin, rec.dest, rec.early, rec.late, rec.capacity(), speed);
}

}  // namespace ridesim
