#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ridesim/domain.hpp"
#include "ridesim/roadnet.hpp"

namespace ridesim {

// One line of an instance file: `id origin destination early late load`.
// load < 0 marks a driver with capacity |load|; load > 0 marks a rider.
struct InstanceRecord {
  std::int64_t id = 0;
  VertexId origin = 0;
  VertexId dest = 0;
  Seconds early = 0;
  Seconds late = 0;
  int load = 0;

  bool is_driver() const { return load < 0; }
  int capacity() const { return -load; }

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

enum class ArrivalProfile { Uniform, Batched };

struct GenParams {
  int driver_count = 0;
  int rider_count = 0;
  Seconds horizon_seconds = 1800;
  Seconds batch_seconds = 30;  // window length for the batched profile
  int capacity = 3;
  double driver_slack = 2.0;  // deadline = earliest + slack * direct time
  double rider_slack = 2.0;
  double speed = 10.0;  // meters/second, fleet constant
  ArrivalProfile profile = ArrivalProfile::Uniform;
  std::uint64_t seed = 0;
};

// Random reachable origin/destination pairs with windows derived from the
// direct travel time. The batched profile spreads riders evenly over the
// batch windows with the remainder in the last window, and front-loads the
// driver remainder into the first window keeping one extra for the last.
std::vector<InstanceRecord> generate(const RoadNetwork& net, const GenParams& p);

// Arrival counts per batch window under the batched profile.
std::vector<int> batched_counts_riders(int rider_count, int batches);
std::vector<int> batched_counts_drivers(int driver_count, int batches);

std::vector<InstanceRecord> load_instance(std::istream& in);
std::vector<InstanceRecord> load_instance_file(const std::string& path);
void save_instance(std::ostream& out, const std::vector<InstanceRecord>& records);
void save_instance_file(const std::string& path, const std::vector<InstanceRecord>& records);

enum class GridWeights { Unit, Uniform };

struct GridParams {
  int n = 5;  // n x n lattice
  GridWeights weights = GridWeights::Unit;
  double weight_min = 1.0;
  double weight_max = 1.0;
  std::uint64_t seed = 0;
};

// Built-in test network: n x n lattice, vertex ids 1..n*n, coordinates at the
// grid positions, unit or uniformly random edge weights.
std::pair<std::vector<NodeRecord>, std::vector<EdgeRecord>> grid_records(const GridParams& p);
RoadNetwork make_grid_network(const GridParams& p, NetConfig config = {});

// Conversion into simulation inputs.
Rider record_to_rider(const InstanceRecord& rec);
Driver record_to_driver(const InstanceRecord& rec, double speed);

}  // namespace ridesim
