#include "ridesim/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include "ridesim/rng.hpp"

namespace ridesim {

namespace {

constexpr double kEps = 1e-12;
constexpr double kDeadlineEps = 1e-6;

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", t);
  return buf;
}

const char* kind_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::Arrival: return "arrival";
    case Event::Kind::Match: return "match";
    case Event::Kind::Pickup: return "pickup";
    case Event::Kind::Dropoff: return "dropoff";
    case Event::Kind::Expire: return "expire";
  }
  return "?";
}

// Rebuilds path/cum/markers for the pending schedule. A vehicle mid-edge
// keeps that edge as the first segment; the plan continues from its far end.
void rebuild_route(VehicleRun& v, const RoadNetwork& net) {
  std::vector<VertexId> path;
  std::vector<double> cum;
  std::vector<std::pair<std::size_t, std::size_t>> markers;
  if (v.departed && v.edge_progress > 0.0) {
    VertexId prev = v.path[v.pos];
    VertexId next = v.path[v.pos + 1];
    double seg = v.cum[v.pos + 1] - v.cum[v.pos];
    path = {prev, next};
    cum = {0.0, seg};
  } else {
    path = {v.d.loc};
    cum = {0.0};
    v.edge_progress = 0.0;
  }
  VertexId cur = v.d.loc;
  for (std::size_t si = v.d.next_stop; si < v.d.schedule.stops.size(); ++si) {
    VertexId target = v.d.schedule.stops[si].vertex;
    auto leg = net.shortest_path(cur, target);
    if (!leg) {
      throw std::logic_error("route rebuild: unreachable leg for driver " +
                             std::to_string(v.d.id));
    }
    for (std::size_t h = 1; h < leg->hops.size(); ++h) {
      auto w = net.min_edge_weight(leg->hops[h - 1], leg->hops[h]);
      path.push_back(leg->hops[h]);
      cum.push_back(cum.back() + *w);
    }
    markers.emplace_back(path.size() - 1, si);
    cur = target;
  }
  v.path = std::move(path);
  v.cum = std::move(cum);
  v.markers = std::move(markers);
  v.pos = 0;
  v.marker_next = 0;
  v.wait_until = -1.0;
}

// Fires every marker due at the current path position; returns false when a
// pickup must wait (wait_until set) so the caller can advance time first.
bool fire_due_markers(VehicleRun& v, WorldState& w, double tau) {
  while (v.marker_next < v.markers.size() && v.markers[v.marker_next].first == v.pos) {
    std::size_t si = v.markers[v.marker_next].second;
    const Stop& stop = v.d.schedule.stops[si];
    switch (stop.kind) {
      case StopKind::Pickup: {
        Rider& r = w.riders.at(stop.rider);
        double ev = std::max(tau, static_cast<double>(r.earliest));
        if (ev > tau + kEps) {
          v.wait_until = ev;
          return false;
        }
        r.state = RiderState::OnBoard;
        w.pickup_time[r.id] = ev;
        w.events.push_back({ev, Event::Kind::Pickup, r.id, v.d.id});
        break;
      }
      case StopKind::Dropoff: {
        Rider& r = w.riders.at(stop.rider);
        r.state = RiderState::Delivered;
        w.dropoff_time[r.id] = tau;
        w.events.push_back({tau, Event::Kind::Dropoff, r.id, v.d.id});
        v.d.load -= 1;
        if (tau > static_cast<double>(r.latest) + kDeadlineEps) {
          w.defects.push_back("rider " + std::to_string(r.id) + " dropped at " + format_time(tau) +
                              " after deadline " + std::to_string(r.latest));
        }
        break;
      }
      case StopKind::DriverDest: {
        v.completed = true;
        if (tau > static_cast<double>(v.d.latest) + kDeadlineEps) {
          w.defects.push_back("driver " + std::to_string(v.d.id) + " arrived at " +
                              format_time(tau) + " after deadline " + std::to_string(v.d.latest));
        }
        break;
      }
      case StopKind::DriverOrigin:
        break;
    }
    v.d.next_stop = si + 1;
    v.d.loc = stop.vertex;
    v.d.loc_ready = tau;
    ++v.marker_next;
    if (v.completed) break;
  }
  return true;
}

void advance_vehicle(VehicleRun& v, WorldState& w, double t0, double t1) {
  if (!v.departed || v.completed) return;
  double tau = t0;
  while (tau < t1 - kEps && !v.completed) {
    if (v.wait_until > tau + kEps) {
      tau = std::min(v.wait_until, t1);
      if (tau >= t1 - kEps) return;  // still holding at tick end
    }
    v.wait_until = -1.0;
    if (!fire_due_markers(v, w, tau)) continue;
    if (v.completed) return;
    if (v.pos + 1 >= v.path.size()) return;
    double seg = v.cum[v.pos + 1] - v.cum[v.pos];
    double remaining = seg - v.edge_progress;
    double dt = remaining / v.d.speed;
    if (tau + dt > t1 + kEps) {
      v.edge_progress += (t1 - tau) * v.d.speed;
      return;
    }
    tau += dt;
    v.pos += 1;
    v.edge_progress = 0.0;
    if (!fire_due_markers(v, w, tau)) continue;
  }
}

// The matcher's view of a vehicle: current vertex (the far end of the edge
// being traversed) and the exact time the vehicle is available there.
Driver snapshot_driver(const VehicleRun& v, double now) {
  Driver d = v.d;
  if (v.departed && v.edge_progress > 0.0) {
    double seg = v.cum[v.pos + 1] - v.cum[v.pos];
    d.loc = v.path[v.pos + 1];
    d.loc_ready = now + (seg - v.edge_progress) / d.speed;
  } else if (v.departed && !v.path.empty()) {
    d.loc = v.path[v.pos];
    d.loc_ready = now;
  } else {
    d.loc = d.origin;
    d.loc_ready = std::max(now, static_cast<double>(d.earliest));
  }
  return d;
}

}  // namespace

std::string format_event(const Event& e) {
  std::string out = "t=" + format_time(e.t);
  out += " kind=";
  out += kind_name(e.kind);
  out += " rider=" + std::to_string(e.rider);
  out += " driver=" + std::to_string(e.driver);
  return out;
}

void advance_tick(WorldState& world, const RoadNetwork& net) {
  (void)net;  // routes are prebuilt; kept for interface symmetry
  double t0 = static_cast<double>(world.clock);
  double t1 = static_cast<double>(world.clock + world.tick_seconds);
  for (VehicleRun& v : world.vehicles) {
    advance_vehicle(v, world, t0, t1);
  }
  world.clock += world.tick_seconds;
}

bool lifecycle_conserved(const WorldState& world) {
  std::size_t waiting = 0, matched = 0, onboard = 0, delivered = 0, expired = 0;
  for (const auto& [id, r] : world.riders) {
    (void)id;
    switch (r.state) {
      case RiderState::Waiting: ++waiting; break;
      case RiderState::Matched: ++matched; break;
      case RiderState::OnBoard: ++onboard; break;
      case RiderState::Delivered: ++delivered; break;
      case RiderState::Expired: ++expired; break;
    }
  }
  if (world.pool.size() != waiting) return false;
  for (RiderId id : world.pool) {
    auto it = world.riders.find(id);
    if (it == world.riders.end() || it->second.state != RiderState::Waiting) return false;
  }
  if (world.committed_to.size() != matched + onboard + delivered) return false;
  return waiting + matched + onboard + delivered + expired == world.riders.size();
}

SimReport run(const std::vector<InstanceRecord>& instance, const SimConfig& cfg,
              const RoadNetwork& net) {
  if (cfg.tick_seconds < 1) throw std::invalid_argument("tick_seconds must be >= 1");
  if (cfg.batch_seconds < 1 || cfg.batch_seconds % cfg.tick_seconds != 0) {
    throw std::invalid_argument("batch_seconds must be a positive multiple of tick_seconds");
  }
  if (cfg.horizon_seconds < 0 || cfg.horizon_seconds % cfg.batch_seconds != 0) {
    throw std::invalid_argument("horizon_seconds must be a multiple of batch_seconds");
  }
  if (!known_matcher(cfg.matcher.name)) {
    throw std::invalid_argument("unknown matcher '" + cfg.matcher.name +
                                "' (expected greedy|nn|sa|bbo)");
  }

  std::vector<Rider> rider_queue;
  std::vector<Driver> driver_queue;
  std::unordered_set<std::int64_t> ids;
  for (const InstanceRecord& rec : instance) {
    if (!ids.insert(rec.id).second) {
      throw std::runtime_error("instance: duplicate id " + std::to_string(rec.id));
    }
    if (!net.has_vertex(rec.origin) || !net.has_vertex(rec.dest)) {
      throw std::runtime_error("instance record " + std::to_string(rec.id) +
                               ": vertex not in network");
    }
    if (rec.is_driver()) {
      driver_queue.push_back(record_to_driver(rec, cfg.fleet_speed));
    } else {
      rider_queue.push_back(record_to_rider(rec));
    }
  }
  std::sort(rider_queue.begin(), rider_queue.end(), [](const Rider& a, const Rider& b) {
    if (a.requested != b.requested) return a.requested < b.requested;
    return a.id < b.id;
  });
  std::sort(driver_queue.begin(), driver_queue.end(), [](const Driver& a, const Driver& b) {
    if (a.earliest != b.earliest) return a.earliest < b.earliest;
    return a.id < b.id;
  });

  double base_driver_distance = 0.0;
  Seconds max_driver_latest = 0;
  std::unordered_map<DriverId, double> driver_base;
  for (const Driver& d : driver_queue) {
    auto base = net.shortest_path(d.origin, d.dest);
    if (!base) {
      throw std::runtime_error("driver " + std::to_string(d.id) + ": destination unreachable");
    }
    driver_base[d.id] = base->distance;
    base_driver_distance += base->distance;
    max_driver_latest = std::max(max_driver_latest, d.latest);
  }
  double base_rider_distance = 0.0;
  std::unordered_map<RiderId, std::optional<double>> rider_direct;
  for (const Rider& r : rider_queue) {
    auto direct = net.shortest_path(r.origin, r.dest);
    if (direct) {
      rider_direct[r.id] = direct->distance;
      base_rider_distance += direct->distance;
    } else {
      rider_direct[r.id] = std::nullopt;
    }
  }

  SimReport report;
  report.matcher = cfg.matcher.name;
  report.config = cfg;

  WorldState world;
  world.tick_seconds = cfg.tick_seconds;

  std::size_t next_rider = 0, next_driver = 0;
  int batch_index = 0;
  const Seconds hard_stop =
      std::max(cfg.horizon_seconds, max_driver_latest) + 10 * cfg.batch_seconds + 10;

  for (Seconds t = 0;; t += cfg.tick_seconds) {
    world.clock = t;

    // Drivers may be admitted anywhere in the tick window: departure and
    // matching are anchored at their earliest time, never before it.
    while (next_driver < driver_queue.size() &&
           driver_queue[next_driver].earliest < t + cfg.tick_seconds) {
      VehicleRun v;
      v.d = driver_queue[next_driver];
      v.base_distance = driver_base[v.d.id];
      v.force_depart = std::max(static_cast<double>(v.d.earliest),
                                static_cast<double>(v.d.latest) - v.base_distance / v.d.speed);
      world.events.push_back(
          {static_cast<double>(v.d.earliest), Event::Kind::Arrival, -1, v.d.id});
      world.vehicles.push_back(std::move(v));
      ++next_driver;
    }
    // Riders join the pool at the first tick at or after their timestamp so a
    // boundary never matches a request from its own future.
    while (next_rider < rider_queue.size() && rider_queue[next_rider].requested <= t) {
      Rider r = rider_queue[next_rider];
      ++next_rider;
      world.events.push_back({static_cast<double>(r.requested), Event::Kind::Arrival, r.id, -1});
      auto direct = rider_direct[r.id];
      bool admissible =
          direct.has_value() &&
          static_cast<double>(r.earliest) + *direct / cfg.fleet_speed <=
              static_cast<double>(r.latest) + 1e-9;
      if (!admissible) {
        r.state = RiderState::Expired;
        world.riders[r.id] = r;
        world.events.push_back({static_cast<double>(t), Event::Kind::Expire, r.id, -1});
        continue;
      }
      world.riders[r.id] = r;
      world.pool.push_back(r.id);
    }

    const bool boundary = t > 0 && t % cfg.batch_seconds == 0 && t <= cfg.horizon_seconds;
    if (boundary) {
      ++batch_index;
      BatchStats stats;
      stats.index = batch_index;
      stats.boundary = t;

      // Expire pool riders whose window can no longer be met even by a
      // dedicated vehicle at fleet speed.
      std::vector<RiderId> kept;
      kept.reserve(world.pool.size());
      for (RiderId id : world.pool) {
        Rider& r = world.riders.at(id);
        double best_drop = std::max(static_cast<double>(t), static_cast<double>(r.earliest)) +
                           *rider_direct[id] / cfg.fleet_speed;
        if (best_drop > static_cast<double>(r.latest) + 1e-9) {
          r.state = RiderState::Expired;
          world.events.push_back({static_cast<double>(t), Event::Kind::Expire, id, -1});
          ++stats.newly_expired;
        } else {
          kept.push_back(id);
        }
      }
      world.pool = std::move(kept);
      stats.pool_size = static_cast<int>(world.pool.size());

      bool any_active = false;
      for (const VehicleRun& v : world.vehicles) {
        if (!v.completed) any_active = true;
      }
      if (!world.pool.empty() && any_active) {
        std::vector<Rider> pool_riders;
        pool_riders.reserve(world.pool.size());
        for (RiderId id : world.pool) pool_riders.push_back(world.riders.at(id));
        std::vector<Driver> active;
        std::vector<VehicleRun*> active_runs;
        for (VehicleRun& v : world.vehicles) {
          if (v.completed) continue;
          active.push_back(snapshot_driver(v, static_cast<double>(t)));
          active_runs.push_back(&v);
        }
        BatchContext ctx = BatchContext::build(net, std::move(pool_riders), active, world.riders,
                                               static_cast<double>(t), cfg.cost_params);
        auto t_start = std::chrono::steady_clock::now();
        MatchPlan plan = match(cfg.matcher, ctx,
                               Rng::derive(cfg.seed, static_cast<std::uint64_t>(batch_index)));
        stats.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t_start)
                            .count();
        std::string why;
        if (!plan_valid(plan, ctx, &why)) {
          throw std::logic_error("matcher '" + cfg.matcher.name + "' produced invalid plan: " + why);
        }

        // Commit: group by driver, apply each final schedule once.
        std::unordered_map<DriverId, const Schedule*> final_sched;
        std::unordered_map<DriverId, int> added;
        for (const Assignment& a : plan.assignments) {
          final_sched[a.driver] = &a.schedule;
          added[a.driver] += 1;
        }
        for (VehicleRun* vp : active_runs) {
          auto it = final_sched.find(vp->d.id);
          if (it == final_sched.end()) continue;
          Driver snap = snapshot_driver(*vp, static_cast<double>(t));
          vp->d.loc = snap.loc;
          vp->d.loc_ready = snap.loc_ready;
          vp->d.schedule = *it->second;
          vp->d.load += added[vp->d.id];
          vp->departed = true;
          rebuild_route(*vp, net);
        }
        std::unordered_set<RiderId> matched_now;
        for (const Assignment& a : plan.assignments) {
          Rider& r = world.riders.at(a.rider);
          r.state = RiderState::Matched;
          world.committed_to[a.rider] = a.driver;
          world.match_time[a.rider] = static_cast<double>(t);
          world.events.push_back({static_cast<double>(t), Event::Kind::Match, a.rider, a.driver});
          matched_now.insert(a.rider);
        }
        std::vector<RiderId> still_waiting;
        for (RiderId id : world.pool) {
          if (!matched_now.count(id)) still_waiting.push_back(id);
        }
        world.pool = std::move(still_waiting);
        stats.newly_matched = static_cast<int>(matched_now.size());
        stats.pool_msp_sum = ctx.pool_msp_sum;

        double overhead_after = 0.0;
        for (const VehicleRun& v : world.vehicles) {
          if (v.completed) continue;
          auto dist = schedule_distance(net, v.d.schedule);
          overhead_after += std::max(0.0, *dist - driver_base[v.d.id]);
        }
        stats.overhead_sum = overhead_after;
        stats.batch_cost = cost_terms(cfg.cost_params, overhead_after, ctx.pool_msp_sum,
                                      stats.newly_matched, stats.pool_size);
      }
      report.per_batch.push_back(stats);
    }

    if (t >= cfg.horizon_seconds) {
      // No further batches: whatever still waits can never be served.
      for (RiderId id : world.pool) {
        world.riders.at(id).state = RiderState::Expired;
        world.events.push_back({static_cast<double>(t), Event::Kind::Expire, id, -1});
      }
      world.pool.clear();
    }

    for (VehicleRun& v : world.vehicles) {
      if (!v.departed && !v.completed &&
          v.force_depart < static_cast<double>(t + cfg.tick_seconds)) {
        v.departed = true;
        rebuild_route(v, net);
        v.wait_until = std::max(v.force_depart, static_cast<double>(t));
      }
    }

    advance_tick(world, net);
    if (!lifecycle_conserved(world)) {
      world.defects.push_back("rider lifecycle conservation broken at t=" + std::to_string(t));
    }

    bool drained = next_rider == rider_queue.size() && next_driver == driver_queue.size() &&
                   world.pool.empty();
    for (const VehicleRun& v : world.vehicles) {
      if (!v.completed) drained = false;
    }
    if (t >= cfg.horizon_seconds && drained) break;
    if (t > hard_stop) {
      world.defects.push_back("simulation failed to drain by hard stop");
      break;
    }
  }

  // Cumulative metrics over the whole instance.
  MetricsSnapshot cum;
  cum.total_riders = static_cast<std::int64_t>(rider_queue.size());
  cum.matched_count = static_cast<std::int64_t>(world.match_time.size());
  cum.base_driver_distance = base_driver_distance;
  cum.base_rider_distance = base_rider_distance;
  cum.rider_msp_sum = base_rider_distance;
  double matched_trip = 0.0;
  double overhead_total = 0.0;
  for (const VehicleRun& v : world.vehicles) {
    auto dist = schedule_distance(net, v.d.schedule);
    matched_trip += *dist;
    overhead_total += std::max(0.0, *dist - driver_base[v.d.id]);
  }
  cum.matched_trip_distance = matched_trip;
  cum.overhead_sum = overhead_total;
  std::vector<std::pair<RiderId, double>> delays(world.match_time.begin(), world.match_time.end());
  std::sort(delays.begin(), delays.end());
  for (const auto& [id, mt] : delays) {
    cum.matching_delays.push_back(mt - static_cast<double>(world.riders.at(id).requested));
  }
  report.cumulative = cum;
  report.total_drivers = static_cast<std::int64_t>(driver_queue.size());
  if (cum.total_riders > 0 && cum.rider_msp_sum > 0.0) {
    report.total_cost = cost(cfg.cost_params, cum);
  }
  report.delays = matching_delay_stats(cum);
  for (const auto& [id, r] : world.riders) {
    (void)id;
    if (r.state == RiderState::Delivered) ++report.delivered;
    if (r.state == RiderState::Expired) ++report.expired;
  }
  std::stable_sort(world.events.begin(), world.events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  report.events = std::move(world.events);
  report.defects = std::move(world.defects);
  return report;
}

}  // namespace ridesim
