#pragma once

#include <cstdint>
#include <vector>

#include "ridesim/assignment.hpp"
#include "ridesim/rng.hpp"

namespace ridesim {

struct BBOConfig {
  int population_size = 20;       // N
  int generation_limit = 10;      // G_max
  int elite_count = 1;            // E
  double hybrid_ratio = 0.85;     // fraction of the population built randomly
  bool rollback_enabled = true;   // undo a migration that strands a rider
  double mutation_probability = 0.1;
  double alpha = 0.5;
  std::uint64_t seed = 0;
};

enum class InitMethod { Greedy, Random };

// One island / virtual map: an independent full assignment of the batch pool
// plus the migration rates assigned from its cost rank.
struct CandidateSolution {
  AssignmentState state;
  double cached_cost = 0.0;
  double immigration_rate = 0.0;  // lambda
  double emigration_rate = 0.0;   // mu
  InitMethod init_method = InitMethod::Greedy;

  explicit CandidateSolution(const BatchContext& ctx) : state(ctx) {}

  friend bool operator==(const CandidateSolution& a, const CandidateSolution& b) {
    return a.state == b.state && a.cached_cost == b.cached_cost &&
           a.immigration_rate == b.immigration_rate && a.emigration_rate == b.emigration_rate;
  }
};

struct Population {
  std::vector<CandidateSolution> candidates;
  int generation = 0;
  std::vector<CandidateSolution> best_ever;  // size 0 or 1
};

// N candidates on N virtual maps. ceil(N * hybrid_ratio) are built by random
// assignment, the rest greedily; every candidate walks the pool from its own
// rotation start so equal build methods still produce distinct solutions.
Population init_population(const BatchContext& ctx, const BBOConfig& cfg);

// Rank candidates by cost ascending (ties by candidate index); rank i of N
// gets mu = (N - i + 1) / (N + 1) and lambda = 1 - mu.
void compute_rates(Population& pop);

// Copies the emigrant's version of one vehicle (driver didx and its pool
// riders) into the target: strip the target vehicle's current pool riders to
// a waiting list, insert the emigrant's rider set, then greedily reassign the
// waiting list to other drivers. Returns false when a stranded rider forced a
// rollback (rollback enabled) leaving the target exactly as before.
bool apply_feature_migration(CandidateSolution& target, const CandidateSolution& source, int didx,
                             const BBOConfig& cfg);

// Per-feature immigration pass over all fleet vehicles: each vehicle
// immigrates with probability lambda(target), the source drawn by roulette
// over the snapshot's emigration rates (target excluded).
void migrate(CandidateSolution& target, const std::vector<CandidateSolution>& snapshot,
             int target_index, const BBOConfig& cfg, Rng& rng);

// With probability mutation_probability: move one uniformly chosen pool rider
// to a uniformly chosen feasible driver (or leave it unmatched when none).
void mutate(CandidateSolution& candidate, const BBOConfig& cfg, Rng& rng);

struct EvolveResult {
  MatchPlan plan;
  std::vector<double> best_cost_trace;  // per-generation best, after elitism
  std::vector<InitMethod> init_methods;
};

// Full loop: init, then generation_limit rounds of rates -> elites ->
// migration -> mutation -> elite reinsertion; returns the best-ever plan.
EvolveResult evolve(const BatchContext& ctx, const BBOConfig& cfg);

}  // namespace ridesim
