#include "ridesim/assignment.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace ridesim {

BatchContext BatchContext::build(const RoadNetwork& net, std::vector<Rider> pool,
                                 std::vector<Driver> drivers, RiderTable riders, double now,
                                 CostParams cost_params) {
  BatchContext ctx;
  ctx.net = &net;
  ctx.now = now;
  ctx.cost_params = cost_params;
  std::sort(pool.begin(), pool.end(), [](const Rider& a, const Rider& b) {
    if (a.requested != b.requested) return a.requested < b.requested;
    return a.id < b.id;
  });
  std::sort(drivers.begin(), drivers.end(),
            [](const Driver& a, const Driver& b) { return a.id < b.id; });
  ctx.pool = std::move(pool);
  ctx.drivers = std::move(drivers);
  ctx.riders = std::move(riders);
  for (const Rider& r : ctx.pool) ctx.riders[r.id] = r;

  ctx.driver_base.reserve(ctx.drivers.size());
  std::vector<VertexId> locs, dests;
  for (const Driver& d : ctx.drivers) {
    auto base = net.shortest_path(d.origin, d.dest);
    if (!base) throw std::runtime_error("driver " + std::to_string(d.id) + ": destination unreachable");
    ctx.driver_base.push_back(base->distance);
    locs.push_back(d.loc);
    dests.push_back(d.dest);
  }

  ctx.pool_msp.reserve(ctx.pool.size());
  ctx.shortlist.resize(ctx.pool.size());
  for (std::size_t p = 0; p < ctx.pool.size(); ++p) {
    const Rider& r = ctx.pool[p];
    auto direct = net.shortest_path(r.origin, r.dest);
    if (!direct) throw std::runtime_error("rider " + std::to_string(r.id) + ": destination unreachable");
    ctx.pool_msp.push_back(direct->distance);
    ctx.pool_msp_sum += direct->distance;

    // Timing lower bounds: any insertion visits loc -> ... -> origin -> ... ->
    // dest -> ... -> driver dest, and detours only add distance, so a driver
    // failing these bounds is infeasible for every position pair.
    auto from_origin = net.distances_from(r.origin, locs);
    auto from_dest = net.distances_from(r.dest, dests);
    for (std::size_t d = 0; d < ctx.drivers.size(); ++d) {
      const Driver& drv = ctx.drivers[d];
      if (!from_origin[d] || !from_dest[d]) continue;
      double start = std::max({now, static_cast<double>(drv.earliest), drv.loc_ready});
      double pickup = std::max(start + *from_origin[d] / drv.speed,
                               static_cast<double>(r.earliest));
      double dropoff = pickup + direct->distance / drv.speed;
      if (dropoff > static_cast<double>(r.latest) + 1e-9) continue;
      if (dropoff + *from_dest[d] / drv.speed > static_cast<double>(drv.latest) + 1e-9) continue;
      ctx.shortlist[p].push_back(static_cast<int>(d));
    }
  }
  return ctx;
}

AssignmentState::AssignmentState(const BatchContext& ctx)
    : ctx_(&ctx),
      drivers_(ctx.drivers),
      assigned_(ctx.pool.size(), -1),
      by_driver_(ctx.drivers.size()) {
  sched_dist_.reserve(drivers_.size());
  for (const Driver& d : drivers_) {
    auto dist = schedule_distance(*ctx.net, d.schedule);
    if (!dist) throw std::runtime_error("driver " + std::to_string(d.id) + ": schedule unreachable");
    sched_dist_.push_back(*dist);
  }
}

double AssignmentState::overhead_sum() const {
  double total = 0.0;
  for (std::size_t d = 0; d < drivers_.size(); ++d) {
    total += std::max(0.0, sched_dist_[d] - ctx_->driver_base[d]);
  }
  return total;
}

double AssignmentState::cost() const {
  return cost_terms(ctx_->cost_params, overhead_sum(), ctx_->pool_msp_sum, matched_,
                    static_cast<std::int64_t>(ctx_->pool.size()));
}

bool AssignmentState::feasible(int pool_idx, int didx) const {
  if (assigned_[static_cast<std::size_t>(pool_idx)] != -1) return false;
  const Driver& d = drivers_[static_cast<std::size_t>(didx)];
  return insert_rider(d, ctx_->pool[static_cast<std::size_t>(pool_idx)], *ctx_->net, ctx_->now,
                      ctx_->riders)
      .has_value();
}

std::optional<double> AssignmentState::try_assign(int pool_idx, int didx, UndoLog* undo) {
  if (assigned_[static_cast<std::size_t>(pool_idx)] != -1) {
    throw std::logic_error("try_assign: rider already assigned");
  }
  Driver& d = drivers_[static_cast<std::size_t>(didx)];
  auto ins = insert_rider(d, ctx_->pool[static_cast<std::size_t>(pool_idx)], *ctx_->net, ctx_->now,
                          ctx_->riders);
  if (!ins) return std::nullopt;
  if (undo != nullptr) {
    undo->note_driver(didx);
    undo->note_assign(pool_idx);
  }
  d.schedule = std::move(ins->schedule);
  d.load += 1;
  auto dist = schedule_distance(*ctx_->net, d.schedule);
  sched_dist_[static_cast<std::size_t>(didx)] = *dist;
  assigned_[static_cast<std::size_t>(pool_idx)] = didx;
  auto& riders = by_driver_[static_cast<std::size_t>(didx)];
  riders.insert(std::upper_bound(riders.begin(), riders.end(), pool_idx), pool_idx);
  ++matched_;
  return ins->added_distance;
}

void AssignmentState::unassign(int pool_idx, UndoLog* undo) {
  int didx = assigned_[static_cast<std::size_t>(pool_idx)];
  if (didx == -1) throw std::logic_error("unassign: rider not assigned");
  if (undo != nullptr) {
    undo->note_driver(didx);
    undo->note_assign(pool_idx);
  }
  Driver& d = drivers_[static_cast<std::size_t>(didx)];
  d.schedule = remove_rider(d.schedule, ctx_->pool[static_cast<std::size_t>(pool_idx)].id);
  d.load -= 1;
  auto dist = schedule_distance(*ctx_->net, d.schedule);
  sched_dist_[static_cast<std::size_t>(didx)] = *dist;
  assigned_[static_cast<std::size_t>(pool_idx)] = -1;
  auto& riders = by_driver_[static_cast<std::size_t>(didx)];
  riders.erase(std::find(riders.begin(), riders.end(), pool_idx));
  --matched_;
}

std::vector<int> AssignmentState::feasible_drivers(int pool_idx, int exclude) const {
  std::vector<int> out;
  for (int didx : ctx_->shortlist[static_cast<std::size_t>(pool_idx)]) {
    if (didx == exclude) continue;
    if (feasible(pool_idx, didx)) out.push_back(didx);
  }
  return out;
}

int AssignmentState::best_driver(int pool_idx, int exclude) const {
  int best = -1;
  double best_added = 0.0;
  for (int didx : ctx_->shortlist[static_cast<std::size_t>(pool_idx)]) {
    if (didx == exclude) continue;
    const Driver& d = drivers_[static_cast<std::size_t>(didx)];
    auto ins = insert_rider(d, ctx_->pool[static_cast<std::size_t>(pool_idx)], *ctx_->net,
                            ctx_->now, ctx_->riders);
    if (!ins) continue;
    if (best == -1 || ins->added_distance < best_added) {
      best = didx;
      best_added = ins->added_distance;
    }
  }
  return best;
}

bool operator==(const AssignmentState& a, const AssignmentState& b) {
  return a.drivers_ == b.drivers_ && a.sched_dist_ == b.sched_dist_ &&
         a.assigned_ == b.assigned_ && a.by_driver_ == b.by_driver_ && a.matched_ == b.matched_;
}

void UndoLog::note_driver(int didx) {
  if (driver_seen_.size() < state_->drivers_.size()) driver_seen_.resize(state_->drivers_.size(), 0);
  if (driver_seen_[static_cast<std::size_t>(didx)]) return;
  driver_seen_[static_cast<std::size_t>(didx)] = 1;
  drivers_.emplace_back(didx, state_->drivers_[static_cast<std::size_t>(didx)]);
  dists_.emplace_back(didx, state_->sched_dist_[static_cast<std::size_t>(didx)]);
  rider_lists_.emplace_back(didx, state_->by_driver_[static_cast<std::size_t>(didx)]);
}

void UndoLog::note_assign(int pool_idx) {
  if (assign_seen_.size() < state_->assigned_.size()) assign_seen_.resize(state_->assigned_.size(), 0);
  if (assign_seen_[static_cast<std::size_t>(pool_idx)]) return;
  assign_seen_[static_cast<std::size_t>(pool_idx)] = 1;
  assigns_.emplace_back(pool_idx, state_->assigned_[static_cast<std::size_t>(pool_idx)]);
}

void UndoLog::rollback() {
  for (auto& [didx, d] : drivers_) state_->drivers_[static_cast<std::size_t>(didx)] = d;
  for (auto& [didx, dist] : dists_) state_->sched_dist_[static_cast<std::size_t>(didx)] = dist;
  for (auto& [didx, list] : rider_lists_) state_->by_driver_[static_cast<std::size_t>(didx)] = list;
  for (auto& [pidx, didx] : assigns_) state_->assigned_[static_cast<std::size_t>(pidx)] = didx;
  state_->matched_ = matched_;
}

MatchPlan extract_plan(const AssignmentState& state) {
  MatchPlan plan;
  const BatchContext& ctx = state.context();
  for (int p = 0; p < state.pool_size(); ++p) {
    int didx = state.assigned_driver(p);
    if (didx == -1) {
      plan.unmatched.push_back(ctx.pool[static_cast<std::size_t>(p)].id);
    } else {
      plan.assignments.push_back(Assignment{ctx.pool[static_cast<std::size_t>(p)].id,
                                            state.driver(didx).id, state.driver(didx).schedule});
    }
  }
  return plan;
}

bool plan_valid(const MatchPlan& plan, const BatchContext& ctx, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  std::unordered_set<RiderId> seen;
  for (const Assignment& a : plan.assignments) {
    if (!seen.insert(a.rider).second) return fail("rider appears twice in plan");
  }
  for (RiderId r : plan.unmatched) {
    if (!seen.insert(r).second) return fail("rider both matched and unmatched");
  }
  if (seen.size() != ctx.pool.size()) return fail("plan does not cover the pool");
  for (const Rider& r : ctx.pool) {
    if (!seen.count(r.id)) return fail("pool rider missing from plan");
  }

  // One schedule per driver; all of that driver's plan riders must appear in it.
  std::unordered_map<DriverId, const Assignment*> per_driver;
  std::unordered_map<DriverId, std::vector<RiderId>> plan_riders;
  for (const Assignment& a : plan.assignments) {
    auto [it, fresh] = per_driver.emplace(a.driver, &a);
    if (!fresh && !(it->second->schedule == a.schedule)) {
      return fail("inconsistent schedules for driver " + std::to_string(a.driver));
    }
    plan_riders[a.driver].push_back(a.rider);
  }
  for (const auto& [driver_id, assignment] : per_driver) {
    const Driver* base = nullptr;
    for (const Driver& d : ctx.drivers) {
      if (d.id == driver_id) base = &d;
    }
    if (base == nullptr) return fail("plan references unknown driver");
    Driver augmented = *base;
    augmented.schedule = assignment->schedule;
    augmented.load = base->load + static_cast<int>(plan_riders[driver_id].size());
    if (augmented.load > augmented.capacity) return fail("plan exceeds driver capacity");
    if (!validate_schedule(augmented, augmented.schedule, *ctx.net, ctx.now, ctx.riders).ok()) {
      return fail("plan schedule fails validation for driver " + std::to_string(driver_id));
    }
    for (RiderId r : plan_riders[driver_id]) {
      bool pickup = false, dropoff = false;
      for (const Stop& s : assignment->schedule.stops) {
        if (s.rider == r && s.kind == StopKind::Pickup) pickup = true;
        if (s.rider == r && s.kind == StopKind::Dropoff) dropoff = true;
      }
      if (!pickup || !dropoff) return fail("assigned rider missing from schedule");
    }
  }
  return true;
}

}  // namespace ridesim
