#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ridesim/roadnet.hpp"

namespace ridesim {

using RiderId = std::int64_t;
using DriverId = std::int64_t;
using Seconds = std::int64_t;

enum class RiderState { Waiting, Matched, OnBoard, Delivered, Expired };

struct Rider {
  RiderId id = 0;
  VertexId origin = 0;
  VertexId dest = 0;
  Seconds earliest = 0;   // earliest pickup
  Seconds latest = 0;     // latest dropoff
  Seconds requested = 0;  // request timestamp, equal to earliest
  RiderState state = RiderState::Waiting;

  friend bool operator==(const Rider&, const Rider&) = default;
};

enum class StopKind { DriverOrigin, Pickup, Dropoff, DriverDest };

struct Stop {
  VertexId vertex = 0;
  StopKind kind = StopKind::DriverOrigin;
  RiderId rider = -1;  // valid for Pickup/Dropoff only

  friend bool operator==(const Stop&, const Stop&) = default;
};

// Full trip of one driver, executed stops included. The first stop is always
// the driver's origin and the last its destination; pickups precede their
// dropoffs; the running onboard count never exceeds capacity on any prefix.
struct Schedule {
  std::vector<Stop> stops;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct Driver {
  DriverId id = 0;
  VertexId origin = 0;
  VertexId dest = 0;
  Seconds earliest = 0;  // earliest departure
  Seconds latest = 0;    // latest arrival at dest
  VertexId loc = 0;      // current planning vertex
  double loc_ready = 0;  // earliest time the driver is available at loc
  int capacity = 0;
  int load = 0;          // riders assigned or on board (not yet delivered)
  double speed = 1.0;    // meters/second, constant
  Schedule schedule;
  std::size_t next_stop = 1;  // index of first pending stop (origin stop is visited at spawn)

  friend bool operator==(const Driver&, const Driver&) = default;
};

Driver make_driver(DriverId id, VertexId origin, VertexId dest, Seconds earliest, Seconds latest,
                   int capacity, double speed);

using RiderTable = std::unordered_map<RiderId, Rider>;

struct Violation {
  enum class Kind {
    Structure,       // schedule invariant broken
    Capacity,        // onboard count exceeds capacity on some prefix
    DropoffDeadline, // projected dropoff after rider's latest
    DriverDeadline,  // projected arrival at dest after driver's latest
    Unreachable,     // some leg has no path
  };
  Kind kind;
  RiderId rider = -1;  // -1 when not rider specific
  std::string detail;
};

struct Feasibility {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Structural invariants only (ordering, duplicates, prefix capacity).
bool structurally_valid(const Driver& driver, const Schedule& sched, std::string* why = nullptr);

// Simulates traversal of the pending stops from the driver's current vertex,
// starting at max(now, driver.earliest, driver.loc_ready), waiting at pickups
// until the rider's earliest time. Checks every rider's projected dropoff,
// the driver's deadline, and capacity on every prefix. `extra` supplies the
// window of a rider not yet present in `riders`.
Feasibility validate_schedule(const Driver& driver, const Schedule& sched, const RoadNetwork& net,
                              double now, const RiderTable& riders, const Rider* extra = nullptr);

struct Insertion {
  Schedule schedule;
  double added_distance = 0.0;
};

// Best feasible insertion of `rider` into the driver's pending stops over all
// pickup/dropoff position pairs, minimizing the schedule-distance increase.
// Ties break on lowest pickup index, then lowest dropoff index.
// std::nullopt when no feasible insertion exists (a normal outcome).
std::optional<Insertion> insert_rider(const Driver& driver, const Rider& rider,
                                      const RoadNetwork& net, double now, const RiderTable& riders);

// Erases the rider's pickup/dropoff stops. Only legal while both stops are
// still pending; restores the exact pre-insertion sequence.
Schedule remove_rider(const Schedule& sched, RiderId rider);

// Concatenated msp distance over the schedule's stop vertices.
std::optional<double> schedule_distance(const RoadNetwork& net, const Schedule& sched);

// schedule_distance(current stops) - msp(origin, dest); >= 0 for any schedule
// through those endpoints. std::nullopt propagates unreachable legs.
std::optional<double> distance_overhead(const Driver& driver, const RoadNetwork& net);

// Onboard count after the first `count` stops (pickups minus dropoffs).
int onboard_after_prefix(const Schedule& sched, std::size_t count);

}  // namespace ridesim
