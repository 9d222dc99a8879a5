#include "ridesim/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace ridesim {

namespace {

constexpr double kTimeEps = 1e-9;

const Rider* find_rider(const RiderTable& riders, const Rider* extra, RiderId id) {
  if (extra != nullptr && extra->id == id) return extra;
  auto it = riders.find(id);
  return it == riders.end() ? nullptr : &it->second;
}

}  // namespace

Driver make_driver(DriverId id, VertexId origin, VertexId dest, Seconds earliest, Seconds latest,
                   int capacity, double speed) {
  Driver d;
  d.id = id;
  d.origin = origin;
  d.dest = dest;
  d.earliest = earliest;
  d.latest = latest;
  d.loc = origin;
  d.loc_ready = static_cast<double>(earliest);
  d.capacity = capacity;
  d.load = 0;
  d.speed = speed;
  d.schedule.stops = {Stop{origin, StopKind::DriverOrigin, -1}, Stop{dest, StopKind::DriverDest, -1}};
  d.next_stop = 1;
  return d;
}

int onboard_after_prefix(const Schedule& sched, std::size_t count) {
  int onboard = 0;
  for (std::size_t i = 0; i < count && i < sched.stops.size(); ++i) {
    if (sched.stops[i].kind == StopKind::Pickup) ++onboard;
    if (sched.stops[i].kind == StopKind::Dropoff) --onboard;
  }
  return onboard;
}

bool structurally_valid(const Driver& driver, const Schedule& sched, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  const auto& stops = sched.stops;
  if (stops.size() < 2) return fail("schedule must contain origin and destination stops");
  if (stops.front().kind != StopKind::DriverOrigin || stops.front().vertex != driver.origin) {
    return fail("first stop must be the driver origin");
  }
  if (stops.back().kind != StopKind::DriverDest || stops.back().vertex != driver.dest) {
    return fail("last stop must be the driver destination");
  }
  std::unordered_map<RiderId, int> pickup_at;
  std::unordered_set<RiderId> dropped;
  int onboard = 0;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const Stop& s = stops[i];
    if ((s.kind == StopKind::DriverOrigin && i != 0) ||
        (s.kind == StopKind::DriverDest && i + 1 != stops.size())) {
      return fail("origin/destination stop in schedule interior");
    }
    if (s.kind == StopKind::Pickup) {
      if (s.rider < 0) return fail("pickup without rider id");
      if (!pickup_at.emplace(s.rider, static_cast<int>(i)).second) {
        return fail("duplicate pickup for rider " + std::to_string(s.rider));
      }
      ++onboard;
      if (onboard > driver.capacity) return fail("onboard count exceeds capacity");
    } else if (s.kind == StopKind::Dropoff) {
      if (s.rider < 0) return fail("dropoff without rider id");
      if (!pickup_at.count(s.rider)) {
        return fail("dropoff before pickup for rider " + std::to_string(s.rider));
      }
      if (!dropped.insert(s.rider).second) {
        return fail("duplicate dropoff for rider " + std::to_string(s.rider));
      }
      --onboard;
    }
  }
  for (const auto& [rider, idx] : pickup_at) {
    (void)idx;
    if (!dropped.count(rider)) return fail("pickup without dropoff for rider " + std::to_string(rider));
  }
  return true;
}

Feasibility validate_schedule(const Driver& driver, const Schedule& sched, const RoadNetwork& net,
                              double now, const RiderTable& riders, const Rider* extra) {
  Feasibility result;
  std::string why;
  if (!structurally_valid(driver, sched, &why)) {
    Violation::Kind kind = why.find("capacity") != std::string::npos
                               ? Violation::Kind::Capacity
                               : Violation::Kind::Structure;
    result.violations.push_back({kind, -1, why});
    return result;
  }

  double t = std::max({now, static_cast<double>(driver.earliest), driver.loc_ready});
  VertexId cur = driver.loc;
  for (std::size_t i = driver.next_stop; i < sched.stops.size(); ++i) {
    const Stop& s = sched.stops[i];
    auto leg = net.shortest_path(cur, s.vertex);
    if (!leg) {
      result.violations.push_back({Violation::Kind::Unreachable, s.rider,
                                   "no path from " + std::to_string(cur) + " to " +
                                       std::to_string(s.vertex)});
      return result;
    }
    t += leg->distance / driver.speed;
    cur = s.vertex;
    switch (s.kind) {
      case StopKind::Pickup: {
        const Rider* r = find_rider(riders, extra, s.rider);
        if (r == nullptr) {
          result.violations.push_back(
              {Violation::Kind::Structure, s.rider, "unknown rider in schedule"});
          return result;
        }
        t = std::max(t, static_cast<double>(r->earliest));  // wait if early
        break;
      }
      case StopKind::Dropoff: {
        const Rider* r = find_rider(riders, extra, s.rider);
        if (r == nullptr) {
          result.violations.push_back(
              {Violation::Kind::Structure, s.rider, "unknown rider in schedule"});
          return result;
        }
        if (t > static_cast<double>(r->latest) + kTimeEps) {
          result.violations.push_back({Violation::Kind::DropoffDeadline, s.rider,
                                       "projected dropoff at " + std::to_string(t) + " after " +
                                           std::to_string(r->latest)});
        }
        break;
      }
      case StopKind::DriverDest: {
        if (t > static_cast<double>(driver.latest) + kTimeEps) {
          result.violations.push_back({Violation::Kind::DriverDeadline, -1,
                                       "projected arrival at " + std::to_string(t) + " after " +
                                           std::to_string(driver.latest)});
        }
        break;
      }
      case StopKind::DriverOrigin:
        break;
    }
  }
  return result;
}

std::optional<double> schedule_distance(const RoadNetwork& net, const Schedule& sched) {
  std::vector<VertexId> vertices;
  vertices.reserve(sched.stops.size());
  for (const Stop& s : sched.stops) vertices.push_back(s.vertex);
  return schedule_distance(net, vertices);
}

std::optional<Insertion> insert_rider(const Driver& driver, const Rider& rider,
                                      const RoadNetwork& net, double now, const RiderTable& riders) {
  if (driver.load >= driver.capacity) return std::nullopt;

  auto base = schedule_distance(net, driver.schedule);
  if (!base) return std::nullopt;

  const std::size_t n = driver.schedule.stops.size();
  const std::size_t lo = std::max<std::size_t>(driver.next_stop, 1);

  std::optional<Insertion> best;
  for (std::size_t i = lo; i + 1 <= n; ++i) {       // pickup before old index i, i <= n-1
    for (std::size_t j = i + 1; j <= n; ++j) {      // dropoff position in the grown sequence
      Schedule cand = driver.schedule;
      cand.stops.insert(cand.stops.begin() + static_cast<std::ptrdiff_t>(i),
                        Stop{rider.origin, StopKind::Pickup, rider.id});
      cand.stops.insert(cand.stops.begin() + static_cast<std::ptrdiff_t>(j),
                        Stop{rider.dest, StopKind::Dropoff, rider.id});
      if (!validate_schedule(driver, cand, net, now, riders, &rider).ok()) continue;
      auto dist = schedule_distance(net, cand);
      if (!dist) continue;
      double added = *dist - *base;
      if (!best || added < best->added_distance) {
        best = Insertion{std::move(cand), added};
      }
    }
  }
  return best;
}

Schedule remove_rider(const Schedule& sched, RiderId rider) {
  Schedule out;
  out.stops.reserve(sched.stops.size());
  for (const Stop& s : sched.stops) {
    if ((s.kind == StopKind::Pickup || s.kind == StopKind::Dropoff) && s.rider == rider) continue;
    out.stops.push_back(s);
  }
  return out;
}

std::optional<double> distance_overhead(const Driver& driver, const RoadNetwork& net) {
  auto sched = schedule_distance(net, driver.schedule);
  if (!sched) return std::nullopt;
  auto direct = net.shortest_path(driver.origin, driver.dest);
  if (!direct) return std::nullopt;
  return std::max(0.0, *sched - direct->distance);
}

}  // namespace ridesim
