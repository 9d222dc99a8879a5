#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ridesim/instance.hpp"
#include "ridesim/match.hpp"
#include "ridesim/metrics.hpp"

namespace ridesim {

struct SimConfig {
  Seconds batch_seconds = 30;
  Seconds tick_seconds = 1;      // batch_seconds must be a multiple
  Seconds horizon_seconds = 0;   // must be a multiple of batch_seconds
  MatcherSpec matcher;
  CostParams cost_params;
  double fleet_speed = 10.0;  // meters/second for every driver
  std::uint64_t seed = 0;
};

struct Event {
  enum class Kind { Arrival, Match, Pickup, Dropoff, Expire };
  double t = 0.0;
  Kind kind = Kind::Arrival;
  RiderId rider = -1;
  DriverId driver = -1;
};

std::string format_event(const Event& e);

// Motion state of one admitted driver. `path`/`cum` hold the concatenated
// shortest-path route of the pending schedule from the anchor vertex;
// `markers` maps path positions to pending schedule stops.
struct VehicleRun {
  Driver d;
  bool departed = false;
  bool completed = false;
  double base_distance = 0.0;   // msp(origin, dest)
  double force_depart = 0.0;    // latest solo departure keeping the deadline
  std::vector<VertexId> path;
  std::vector<double> cum;      // cumulative meters, cum[0] = 0
  std::size_t pos = 0;          // last reached path index
  double edge_progress = 0.0;   // meters beyond path[pos]
  std::vector<std::pair<std::size_t, std::size_t>> markers;  // (path idx, stop idx)
  std::size_t marker_next = 0;
  double wait_until = -1.0;     // hold position until this time (pickup wait)
};

struct WorldState {
  Seconds clock = 0;
  Seconds tick_seconds = 1;
  std::vector<VehicleRun> vehicles;  // admission order
  std::vector<RiderId> pool;         // waiting riders
  RiderTable riders;                 // every admitted rider, with current state
  std::unordered_map<RiderId, DriverId> committed_to;
  std::unordered_map<RiderId, double> match_time;
  std::unordered_map<RiderId, double> pickup_time;
  std::unordered_map<RiderId, double> dropoff_time;
  std::vector<Event> events;
  std::vector<std::string> defects;  // constraint violations observed at run time
};

// Advances every departed vehicle by one tick of motion, firing pickup,
// dropoff, and completion events at exact fractional times, then advances
// the clock.
void advance_tick(WorldState& world, const RoadNetwork& net);

// Rider/driver admission conservation: every admitted rider is in exactly
// one lifecycle set.
bool lifecycle_conserved(const WorldState& world);

struct BatchStats {
  int index = 0;
  Seconds boundary = 0;
  int pool_size = 0;
  int newly_matched = 0;
  int newly_expired = 0;
  std::optional<double> batch_cost;  // absent when the pool was empty
  double overhead_sum = 0.0;         // active drivers, after commit
  double pool_msp_sum = 0.0;
  double wall_ms = 0.0;
};

struct SimReport {
  std::string matcher;
  SimConfig config;
  std::vector<BatchStats> per_batch;
  MetricsSnapshot cumulative;
  std::optional<double> total_cost;  // absent when the instance has no riders
  DelayStats delays;
  std::int64_t total_drivers = 0;
  std::int64_t delivered = 0;
  std::int64_t expired = 0;
  std::vector<Event> events;
  std::vector<std::string> defects;
};

// Full rolling-horizon simulation of one instance.
SimReport run(const std::vector<InstanceRecord>& instance, const SimConfig& cfg,
              const RoadNetwork& net);

}  // namespace ridesim
