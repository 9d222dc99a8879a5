#include "ridesim/bbo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ridesim {

namespace {

// Walks a shuffled candidate list and takes the first feasible driver; the
// first success in a uniform random permutation is uniform over the feasible
// set, so no feasibility prepass is needed.
bool random_assign(AssignmentState& state, int pool_idx, Rng& rng, int exclude = -1) {
  std::vector<int> order = state.context().shortlist[static_cast<std::size_t>(pool_idx)];
  rng.shuffle(order);
  for (int didx : order) {
    if (didx == exclude) continue;
    if (state.try_assign(pool_idx, didx)) return true;
  }
  return false;
}

void build_candidate(CandidateSolution& cand, std::size_t rotation, InitMethod method, Rng& rng) {
  AssignmentState& state = cand.state;
  const int pool = state.pool_size();
  for (int t = 0; t < pool; ++t) {
    int p = static_cast<int>((rotation + static_cast<std::size_t>(t)) % static_cast<std::size_t>(pool));
    if (method == InitMethod::Random) {
      random_assign(state, p, rng);
    } else {
      int didx = state.best_driver(p);
      if (didx != -1) state.try_assign(p, didx);
    }
  }
  cand.init_method = method;
  cand.cached_cost = state.cost();
}

}  // namespace

Population init_population(const BatchContext& ctx, const BBOConfig& cfg) {
  if (ctx.pool.empty()) throw std::invalid_argument("init_population: empty rider pool");
  if (cfg.population_size < 2) throw std::invalid_argument("population_size must be >= 2");

  const int n = cfg.population_size;
  const int random_count =
      static_cast<int>(std::ceil(static_cast<double>(n) * cfg.hybrid_ratio));

  // Rotation starts: shuffled blocks of [0, pool) so rotations differ as long
  // as distinct starts remain.
  Rng master(Rng::derive(cfg.seed, 0xB0B01ULL));
  std::vector<std::size_t> rotations;
  rotations.reserve(static_cast<std::size_t>(n));
  while (rotations.size() < static_cast<std::size_t>(n)) {
    std::vector<std::size_t> block(ctx.pool.size());
    std::iota(block.begin(), block.end(), std::size_t{0});
    master.shuffle(block);
    for (std::size_t s : block) {
      if (rotations.size() < static_cast<std::size_t>(n)) rotations.push_back(s);
    }
  }

  Population pop;
  pop.candidates.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    CandidateSolution cand(ctx);
    Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(k) + 1, 0));
    InitMethod method = k < random_count ? InitMethod::Random : InitMethod::Greedy;
    build_candidate(cand, rotations[static_cast<std::size_t>(k)], method, rng);
    pop.candidates.push_back(std::move(cand));
  }

  auto best = std::min_element(pop.candidates.begin(), pop.candidates.end(),
                               [](const CandidateSolution& a, const CandidateSolution& b) {
                                 return a.cached_cost < b.cached_cost;
                               });
  pop.best_ever.clear();
  pop.best_ever.push_back(*best);
  return pop;
}

void compute_rates(Population& pop) {
  const int n = static_cast<int>(pop.candidates.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ca = pop.candidates[static_cast<std::size_t>(a)].cached_cost;
    double cb = pop.candidates[static_cast<std::size_t>(b)].cached_cost;
    if (ca != cb) return ca < cb;
    return a < b;
  });
  for (int rank = 1; rank <= n; ++rank) {
    CandidateSolution& cand = pop.candidates[static_cast<std::size_t>(order[rank - 1])];
    cand.emigration_rate = static_cast<double>(n - rank + 1) / static_cast<double>(n + 1);
    cand.immigration_rate = 1.0 - cand.emigration_rate;
  }
}

bool apply_feature_migration(CandidateSolution& target, const CandidateSolution& source, int didx,
                             const BBOConfig& cfg) {
  const std::vector<int>& emigrant_riders = source.state.vehicle_riders(didx);
  if (emigrant_riders.empty()) return true;  // nothing to copy
  if (target.state.vehicle_riders(didx) == emigrant_riders) return true;  // already identical

  AssignmentState& state = target.state;
  UndoLog undo(state);
  bool stranded = false;

  // Riders currently on the target vehicle but not part of the emigrant set
  // go to the waiting list; emigrant riders held elsewhere are released first.
  std::vector<int> waiting;
  for (int p : std::vector<int>(state.vehicle_riders(didx))) {
    if (std::find(emigrant_riders.begin(), emigrant_riders.end(), p) == emigrant_riders.end()) {
      waiting.push_back(p);
    }
  }
  for (int p : waiting) state.unassign(p, &undo);
  for (int p : emigrant_riders) {
    int cur = state.assigned_driver(p);
    if (cur == didx) continue;
    if (cur != -1) state.unassign(p, &undo);
    if (!state.try_assign(p, didx, &undo)) stranded = true;
  }
  for (int p : waiting) {
    if (stranded && cfg.rollback_enabled) break;
    int other = state.best_driver(p, didx);
    if (other == -1) {
      stranded = true;  // stays unmatched unless rolled back
      continue;
    }
    state.try_assign(p, other, &undo);
  }

  if (stranded && cfg.rollback_enabled) {
    undo.rollback();
    target.cached_cost = state.cost();
    return false;
  }
  // Rollback disabled: keep the change, stranded riders stay unmatched.
  target.cached_cost = state.cost();
  return true;
}

void migrate(CandidateSolution& target, const std::vector<CandidateSolution>& snapshot,
             int target_index, const BBOConfig& cfg, Rng& rng) {
  const int drivers = target.state.driver_count();
  double mu_total = 0.0;
  for (int j = 0; j < static_cast<int>(snapshot.size()); ++j) {
    if (j != target_index) mu_total += snapshot[static_cast<std::size_t>(j)].emigration_rate;
  }
  if (mu_total <= 0.0) return;

  for (int didx = 0; didx < drivers; ++didx) {
    if (rng.uniform() >= target.immigration_rate) continue;
    // Roulette wheel over emigration rates, the target itself excluded.
    double pick = rng.uniform() * mu_total;
    int source = -1;
    double run = 0.0;
    for (int j = 0; j < static_cast<int>(snapshot.size()); ++j) {
      if (j == target_index) continue;
      run += snapshot[static_cast<std::size_t>(j)].emigration_rate;
      source = j;
      if (pick < run) break;
    }
    if (source == -1) continue;
    apply_feature_migration(target, snapshot[static_cast<std::size_t>(source)], didx, cfg);
  }
  target.cached_cost = target.state.cost();
}

void mutate(CandidateSolution& candidate, const BBOConfig& cfg, Rng& rng) {
  if (rng.uniform() >= cfg.mutation_probability) return;
  AssignmentState& state = candidate.state;
  const int pool = state.pool_size();
  if (pool == 0) return;
  int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(pool)));
  if (state.assigned_driver(p) != -1) state.unassign(p);
  random_assign(state, p, rng);
  candidate.cached_cost = state.cost();
}

EvolveResult evolve(const BatchContext& ctx, const BBOConfig& cfg) {
  if (cfg.generation_limit < 1) throw std::invalid_argument("generation_limit must be >= 1");
  if (cfg.elite_count < 0 || cfg.elite_count >= cfg.population_size) {
    throw std::invalid_argument("elite_count must satisfy 0 <= E < population_size");
  }
  if (!(cfg.hybrid_ratio >= 0.0 && cfg.hybrid_ratio <= 1.0)) {
    throw std::invalid_argument("hybrid_ratio must lie in [0, 1]");
  }
  if (!(cfg.mutation_probability >= 0.0 && cfg.mutation_probability <= 1.0)) {
    throw std::invalid_argument("mutation_probability must lie in [0, 1]");
  }
  Population pop = init_population(ctx, cfg);

  EvolveResult result;
  result.init_methods.reserve(pop.candidates.size());
  for (const CandidateSolution& c : pop.candidates) result.init_methods.push_back(c.init_method);

  auto cost_order = [&](std::vector<int>& order) {
    order.resize(pop.candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double ca = pop.candidates[static_cast<std::size_t>(a)].cached_cost;
      double cb = pop.candidates[static_cast<std::size_t>(b)].cached_cost;
      if (ca != cb) return ca < cb;
      return a < b;
    });
  };

  const int elite_count = cfg.elite_count;
  for (int generation = 1; generation <= cfg.generation_limit; ++generation) {
    compute_rates(pop);

    std::vector<int> order;
    cost_order(order);
    std::vector<CandidateSolution> elites;
    elites.reserve(static_cast<std::size_t>(elite_count));
    for (int e = 0; e < elite_count; ++e) {
      elites.push_back(pop.candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);
    }

    // Migration reads the previous generation immutably.
    const std::vector<CandidateSolution> snapshot = pop.candidates;
    for (int k = 0; k < static_cast<int>(pop.candidates.size()); ++k) {
      Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(k) + 1,
                          static_cast<std::uint64_t>(generation)));
      migrate(pop.candidates[static_cast<std::size_t>(k)], snapshot, k, cfg, rng);
      mutate(pop.candidates[static_cast<std::size_t>(k)], cfg, rng);
    }

    // Replace the worst candidates with the saved elites.
    cost_order(order);
    for (int e = 0; e < elite_count; ++e) {
      int victim = order[order.size() - 1 - static_cast<std::size_t>(e)];
      pop.candidates[static_cast<std::size_t>(victim)] = elites[static_cast<std::size_t>(e)];
    }

    auto best = std::min_element(pop.candidates.begin(), pop.candidates.end(),
                                 [](const CandidateSolution& a, const CandidateSolution& b) {
                                   return a.cached_cost < b.cached_cost;
                                 });
    result.best_cost_trace.push_back(best->cached_cost);
    if (pop.best_ever.empty() || best->cached_cost < pop.best_ever.front().cached_cost) {
      pop.best_ever.clear();
      pop.best_ever.push_back(*best);
    }
    pop.generation = generation;
  }

  result.plan = extract_plan(pop.best_ever.front().state);
  return result;
}

}  // namespace ridesim
