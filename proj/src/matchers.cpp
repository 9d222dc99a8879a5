#include "ridesim/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ridesim/rng.hpp"

namespace ridesim {

MatchPlan greedy_match(const BatchContext& ctx) {
  AssignmentState state(ctx);
  for (int p = 0; p < state.pool_size(); ++p) {
    int didx = state.best_driver(p);
    if (didx != -1) state.try_assign(p, didx);
  }
  return extract_plan(state);
}

MatchPlan nn_match(const BatchContext& ctx) {
  AssignmentState state(ctx);
  for (int p = 0; p < state.pool_size(); ++p) {
    const Rider& rider = ctx.pool[static_cast<std::size_t>(p)];
    LatLon ro = ctx.net->coord(rider.origin);
    std::vector<std::pair<double, int>> queue;
    queue.reserve(ctx.shortlist[static_cast<std::size_t>(p)].size());
    for (int didx : ctx.shortlist[static_cast<std::size_t>(p)]) {
      LatLon dl = ctx.net->coord(state.driver(didx).loc);
      double dx = dl.lat - ro.lat;
      double dy = dl.lon - ro.lon;
      queue.emplace_back(std::sqrt(dx * dx + dy * dy), didx);
    }
    std::sort(queue.begin(), queue.end());  // distance, then driver index (= id order)
    for (const auto& [dist, didx] : queue) {
      (void)dist;
      if (state.try_assign(p, didx)) break;
    }
  }
  return extract_plan(state);
}

namespace {

enum class MoveKind { Reassign, Unassign, Assign };

// One proposed neighborhood move; applied through an undo scope so a
// rejection restores the state exactly.
bool propose_move(AssignmentState& state, Rng& rng, UndoLog& undo) {
  const int pool = state.pool_size();
  if (pool == 0) return false;
  MoveKind kind = static_cast<MoveKind>(rng.below(3));
  std::vector<int> applicable;
  applicable.reserve(static_cast<std::size_t>(pool));
  for (int p = 0; p < pool; ++p) {
    bool assigned = state.assigned_driver(p) != -1;
    if (kind == MoveKind::Assign ? !assigned : assigned) applicable.push_back(p);
  }
  if (applicable.empty()) return false;
  int p = applicable[static_cast<std::size_t>(rng.below(applicable.size()))];

  switch (kind) {
    case MoveKind::Unassign:
      state.unassign(p, &undo);
      return true;
    case MoveKind::Reassign: {
      int current = state.assigned_driver(p);
      state.unassign(p, &undo);
      std::vector<int> options = state.feasible_drivers(p, current);
      if (options.empty()) return true;  // degenerates to unassign
      int didx = options[static_cast<std::size_t>(rng.below(options.size()))];
      state.try_assign(p, didx, &undo);
      return true;
    }
    case MoveKind::Assign: {
      std::vector<int> options = state.feasible_drivers(p);
      if (options.empty()) return false;
      int didx = options[static_cast<std::size_t>(rng.below(options.size()))];
      state.try_assign(p, didx, &undo);
      return true;
    }
  }
  return false;
}

}  // namespace

MatchPlan sa_match(const BatchContext& ctx, const SAParams& params,
                   std::vector<double>* best_trace) {
  if (!(params.initial_temperature > 0.0) || !(params.min_temperature > 0.0) ||
      !(params.cooling_rate > 0.0 && params.cooling_rate < 1.0) ||
      params.iterations_per_temperature < 0) {
    throw std::invalid_argument("invalid annealing parameters");
  }
  AssignmentState state(ctx);
  for (int p = 0; p < state.pool_size(); ++p) {
    int didx = state.best_driver(p);
    if (didx != -1) state.try_assign(p, didx);
  }
  if (state.pool_size() == 0) return extract_plan(state);

  Rng rng(Rng::derive(params.seed, 0x5a5a5a5aULL));
  double current_cost = state.cost();
  AssignmentState best = state;
  double best_cost = current_cost;

  for (double temperature = params.initial_temperature;
       temperature >= params.min_temperature; temperature *= params.cooling_rate) {
    for (int it = 0; it < params.iterations_per_temperature; ++it) {
      UndoLog undo(state);
      if (propose_move(state, rng, undo)) {
        double next_cost = state.cost();
        double delta = next_cost - current_cost;
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
          current_cost = next_cost;
          if (next_cost < best_cost) {
            best = state;
            best_cost = next_cost;
          }
        } else {
          undo.rollback();
        }
      }
      if (best_trace != nullptr) best_trace->push_back(best_cost);
    }
  }
  return extract_plan(best);
}

}  // namespace ridesim
