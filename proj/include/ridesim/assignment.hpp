#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ridesim/domain.hpp"
#include "ridesim/metrics.hpp"

namespace ridesim {

// One assignment decided by a matcher. `schedule` is the driver's schedule
// at plan time with all of the plan's riders for that driver inserted, so
// repeated entries for one driver agree with each other.
struct Assignment {
  RiderId rider = 0;
  DriverId driver = 0;
  Schedule schedule;
};

struct MatchPlan {
  std::vector<Assignment> assignments;
  std::vector<RiderId> unmatched;
};

// Immutable inputs shared by every candidate evaluated within one batch:
// the waiting pool in FCFS order, snapshots of the active drivers, direct
// distances, and a per-rider shortlist of drivers that pass the
// shortest-path timing lower bound (a superset of the feasible drivers).
struct BatchContext {
  const RoadNetwork* net = nullptr;
  double now = 0.0;
  CostParams cost_params;
  std::vector<Rider> pool;      // FCFS: (request time, id) ascending
  std::vector<Driver> drivers;  // active drivers, id ascending
  RiderTable riders;            // windows for pool and committed riders
  std::vector<double> driver_base;          // msp(origin, dest) per driver
  std::vector<double> pool_msp;             // direct distance per pool rider
  double pool_msp_sum = 0.0;
  std::vector<std::vector<int>> shortlist;  // per pool rider: driver indices

  static BatchContext build(const RoadNetwork& net, std::vector<Rider> pool,
                            std::vector<Driver> drivers, RiderTable riders, double now,
                            CostParams cost_params);
};

class UndoLog;

// One complete assignment of the batch pool onto the fleet (a "virtual map"):
// independent driver copies plus the rider-to-driver mapping. All mutating
// operations keep schedules valid and per-driver distances exact.
class AssignmentState {
 public:
  explicit AssignmentState(const BatchContext& ctx);

  const BatchContext& context() const { return *ctx_; }
  int driver_count() const { return static_cast<int>(drivers_.size()); }
  int pool_size() const { return static_cast<int>(ctx_->pool.size()); }
  const Driver& driver(int didx) const { return drivers_[static_cast<std::size_t>(didx)]; }
  double driver_schedule_distance(int didx) const {
    return sched_dist_[static_cast<std::size_t>(didx)];
  }

  // -1 when the pool rider is unmatched.
  int assigned_driver(int pool_idx) const { return assigned_[static_cast<std::size_t>(pool_idx)]; }
  // Pool riders on one vehicle, ascending pool index.
  const std::vector<int>& vehicle_riders(int didx) const {
    return by_driver_[static_cast<std::size_t>(didx)];
  }
  int matched_count() const { return matched_; }

  // Batch overhead: sum over drivers of (schedule distance - direct distance).
  double overhead_sum() const;
  // Batch cost per the weighted objective, restricted to this pool.
  double cost() const;

  bool feasible(int pool_idx, int didx) const;
  // Best insertion into one driver; commits on success and returns the added
  // distance. The rider must currently be unassigned.
  std::optional<double> try_assign(int pool_idx, int didx, UndoLog* undo = nullptr);
  void unassign(int pool_idx, UndoLog* undo = nullptr);

  // Drivers from the rider's shortlist where insertion currently succeeds.
  std::vector<int> feasible_drivers(int pool_idx, int exclude = -1) const;
  // Feasible driver with minimum added distance, ties to the lower driver id;
  // -1 when none.
  int best_driver(int pool_idx, int exclude = -1) const;

  friend bool operator==(const AssignmentState&, const AssignmentState&);

 private:
  friend class UndoLog;

  const BatchContext* ctx_;
  std::vector<Driver> drivers_;
  std::vector<double> sched_dist_;
  std::vector<int> assigned_;               // pool idx -> driver idx or -1
  std::vector<std::vector<int>> by_driver_; // driver idx -> pool idxs, ascending
  int matched_ = 0;
};

// Captures the first-touch state of drivers and assignment slots so a failed
// multi-step edit can be restored exactly (same bytes, same doubles).
class UndoLog {
 public:
  explicit UndoLog(AssignmentState& state) : state_(&state), matched_(state.matched_) {}

  void note_driver(int didx);
  void note_assign(int pool_idx);
  void rollback();

 private:
  AssignmentState* state_;
  int matched_;
  std::vector<std::pair<int, Driver>> drivers_;
  std::vector<std::pair<int, double>> dists_;
  std::vector<std::pair<int, std::vector<int>>> rider_lists_;
  std::vector<std::pair<int, int>> assigns_;
  std::vector<char> driver_seen_;
  std::vector<char> assign_seen_;
};

// Plan for the committed state: assignments ascending by pool index, each
// carrying its driver's final schedule.
MatchPlan extract_plan(const AssignmentState& state);

// Every plan invariant: partition of the pool, schedule validity, capacity.
bool plan_valid(const MatchPlan& plan, const BatchContext& ctx, std::string* why = nullptr);

}  // namespace ridesim
