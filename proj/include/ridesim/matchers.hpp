#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ridesim/assignment.hpp"

namespace ridesim {

struct SAParams {
  double initial_temperature = 1.0;
  double cooling_rate = 0.95;           // in (0,1)
  int iterations_per_temperature = 50;
  double min_temperature = 1e-3;
  std::uint64_t seed = 0;
};

// First-come first-serve: each pool rider goes to the feasible driver with
// minimum added distance (ties to the lower driver id), committed immediately.
// Deterministic and seed independent.
MatchPlan greedy_match(const BatchContext& ctx);

// First-come first-serve: drivers ranked by Euclidean lat/lon distance from
// their current vertex to the rider's origin; the first feasible driver in
// that order takes the rider.
MatchPlan nn_match(const BatchContext& ctx);

// Simulated annealing from the greedy plan. Moves reassign, unassign, or
// assign a uniformly chosen pool rider; worse plans are accepted with
// probability exp(-delta/T); returns the best plan seen. `best_trace`, when
// given, records the best-seen cost after every move.
MatchPlan sa_match(const BatchContext& ctx, const SAParams& params,
                   std::vector<double>* best_trace = nullptr);

}  // namespace ridesim
