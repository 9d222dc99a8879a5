#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ridesim/bbo.hpp"
#include "ridesim/instance.hpp"
#include "ridesim/matchers.hpp"

using namespace ridesim;

namespace {

Rider make_rider(RiderId id, VertexId o, VertexId d, Seconds e, Seconds l) {
  Rider r;
  r.id = id;
  r.origin = o;
  r.dest = d;
  r.earliest = e;
  r.latest = l;
  r.requested = e;
  return r;
}

// Line v1-v2-v3 (weights w, w). Driver 1 runs v1->v3 with slack; driver 2 runs
// v3->v1 with zero slack so it can never serve anyone. Riders 10 and 11 both
// go v1->v3, so either fits driver 1 at zero detour but displacement has no
// fallback vehicle.
struct StrandingFixture {
  RoadNetwork net;
  BatchContext ctx;

  explicit StrandingFixture(double w)
      : net({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}}, {{1, 2, w}, {2, 3, w}}),
        ctx(BatchContext::build(
            net, {make_rider(10, 1, 3, 0, static_cast<Seconds>(20 * w)),
                  make_rider(11, 1, 3, 0, static_cast<Seconds>(20 * w))},
            {make_driver(1, 1, 3, 0, static_cast<Seconds>(20 * w), 3, 1.0),
             make_driver(2, 3, 1, 0, static_cast<Seconds>(2 * w), 3, 1.0)},
            {}, 0.0, CostParams{0.5})) {}
};

bool state_valid(const CandidateSolution& cand) {
  const AssignmentState& st = cand.state;
  const BatchContext& ctx = st.context();
  for (int d = 0; d < st.driver_count(); ++d) {
    const Driver& drv = st.driver(d);
    if (!validate_schedule(drv, drv.schedule, *ctx.net, ctx.now, ctx.riders).ok()) return false;
    if (drv.load < 0 || drv.load > drv.capacity) return false;
  }
  if (std::abs(cand.cached_cost - st.cost()) > 1e-9) return false;
  return true;
}

GridParams micro_grid(std::uint64_t seed) {
  GridParams gp;
  gp.n = 5;
  gp.weights = GridWeights::Uniform;
  gp.weight_min = 100;
  gp.weight_max = 400;
  gp.seed = seed;
  return gp;
}

BatchContext micro_ctx(const RoadNetwork& net, std::uint64_t seed) {
  GenParams params;
  params.driver_count = 2;
  params.rider_count = 3;
  params.horizon_seconds = 1;  // everyone arrives at t = 0
  params.capacity = 1;  // seat contention makes ordering mistakes visible
  params.driver_slack = 2.4;
  params.rider_slack = 3.0;
  params.speed = 10.0;
  params.seed = seed * 31 + 7;
  auto records = generate(net, params);
  std::vector<Rider> pool;
  std::vector<Driver> drivers;
  for (const auto& rec : records) {
    if (rec.is_driver()) {
      drivers.push_back(record_to_driver(rec, params.speed));
    } else {
      pool.push_back(record_to_rider(rec));
    }
  }
  return BatchContext::build(net, pool, drivers, {}, 0.0, CostParams{0.5});
}

// 2 drivers, 3 riders on a random-weight 5x5 grid.
struct MicroFixture {
  RoadNetwork net;
  BatchContext ctx;
  explicit MicroFixture(std::uint64_t seed)
      : net(make_grid_network(micro_grid(seed))), ctx(micro_ctx(net, seed)) {}
};

double plan_cost(const BatchContext& ctx, const MatchPlan& plan) {
  AssignmentState state(ctx);
  for (const Assignment& a : plan.assignments) {
    for (int p = 0; p < state.pool_size(); ++p) {
      if (ctx.pool[static_cast<std::size_t>(p)].id != a.rider) continue;
      for (int d = 0; d < state.driver_count(); ++d) {
        if (ctx.drivers[static_cast<std::size_t>(d)].id == a.driver) {
          REQUIRE(state.try_assign(p, d).has_value());
        }
      }
    }
  }
  return state.cost();
}

}  // namespace

TEST_CASE("init_population: hybrid ratio endpoints control the build method") {
  MicroFixture fx(5);
  BatchContext& ctx = fx.ctx;

  BBOConfig all_greedy;
  all_greedy.hybrid_ratio = 0.0;
  all_greedy.population_size = 8;
  Population pg = init_population(ctx, all_greedy);
  REQUIRE(pg.candidates.size() == 8);
  for (const auto& c : pg.candidates) CHECK(c.init_method == InitMethod::Greedy);

  BBOConfig all_random;
  all_random.hybrid_ratio = 1.0;
  all_random.population_size = 8;
  Population pr = init_population(ctx, all_random);
  for (const auto& c : pr.candidates) CHECK(c.init_method == InitMethod::Random);

  BBOConfig mixed;
  mixed.hybrid_ratio = 0.85;
  mixed.population_size = 20;
  Population pm = init_population(ctx, mixed);
  int random_count = 0;
  for (const auto& c : pm.candidates) {
    if (c.init_method == InitMethod::Random) ++random_count;
  }
  CHECK(random_count == 17);  // ceil(20 * 0.85)
}

TEST_CASE("init_population: rotations differ so greedy candidates are not clones") {
  // Single-seat drivers: whichever rider leads the walk claims a seat, so the
  // three distinct rotations must produce at least two distinct candidates.
  MicroFixture fx(4);
  BatchContext& ctx = fx.ctx;  // 3 pool riders -> 3 distinct rotations
  BBOConfig cfg;
  cfg.hybrid_ratio = 0.0;
  cfg.population_size = 3;
  Population pop = init_population(ctx, cfg);
  for (const auto& c : pop.candidates) CHECK(state_valid(c));
  bool any_distinct = false;
  for (std::size_t i = 0; i < pop.candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < pop.candidates.size(); ++j) {
      if (!(pop.candidates[i].state == pop.candidates[j].state)) any_distinct = true;
    }
  }
  CHECK(any_distinct);
}

TEST_CASE("init_population: forced pairing makes identical candidates") {
  RoadNetwork net({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}}, {{1, 2, 5.0}, {2, 3, 5.0}});
  BatchContext ctx = BatchContext::build(net, {make_rider(10, 1, 3, 0, 100)},
                                         {make_driver(1, 1, 3, 0, 100, 3, 1.0)}, {}, 0.0, {});
  BBOConfig cfg;
  cfg.population_size = 2;
  cfg.hybrid_ratio = 0.5;  // one random, one greedy
  Population pop = init_population(ctx, cfg);
  REQUIRE(pop.candidates.size() == 2);
  CHECK(pop.candidates[0].state == pop.candidates[1].state);
  CHECK(pop.candidates[0].state.assigned_driver(0) == 0);
}

TEST_CASE("compute_rates: linear rank formula at N=3") {
  MicroFixture fx(7);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.population_size = 3;
  cfg.hybrid_ratio = 1.0;
  Population pop = init_population(ctx, cfg);
  pop.candidates[0].cached_cost = 0.9;
  pop.candidates[1].cached_cost = 0.1;
  pop.candidates[2].cached_cost = 0.5;
  compute_rates(pop);
  CHECK(pop.candidates[1].emigration_rate == doctest::Approx(0.75));  // best
  CHECK(pop.candidates[2].emigration_rate == doctest::Approx(0.50));
  CHECK(pop.candidates[0].emigration_rate == doctest::Approx(0.25));  // worst
  for (const auto& c : pop.candidates) {
    CHECK(c.immigration_rate + c.emigration_rate == 1.0);
    CHECK(c.immigration_rate > 0.0);
    CHECK(c.immigration_rate < 1.0);
    CHECK(c.emigration_rate > 0.0);
    CHECK(c.emigration_rate < 1.0);
  }
}

TEST_CASE("compute_rates: equal costs break ties by candidate index") {
  MicroFixture fx(8);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.population_size = 4;
  cfg.hybrid_ratio = 1.0;
  Population pop = init_population(ctx, cfg);
  for (auto& c : pop.candidates) c.cached_cost = 0.5;
  compute_rates(pop);
  for (std::size_t i = 0; i + 1 < pop.candidates.size(); ++i) {
    CHECK(pop.candidates[i].emigration_rate > pop.candidates[i + 1].emigration_rate);
  }
}

TEST_CASE("migrate: zero immigration rate leaves the target unchanged") {
  MicroFixture fx(9);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.population_size = 4;
  cfg.hybrid_ratio = 0.5;
  Population pop = init_population(ctx, cfg);
  compute_rates(pop);
  CandidateSolution target = pop.candidates[0];
  target.immigration_rate = 0.0;
  CandidateSolution before = target;
  Rng rng(123);
  migrate(target, pop.candidates, 0, cfg, rng);
  CHECK(target == before);
}

TEST_CASE("migrate feature: identical emigrant assignment is a no-op") {
  StrandingFixture fx(5.0);
  BBOConfig cfg;
  CandidateSolution a(fx.ctx), b(fx.ctx);
  REQUIRE(a.state.try_assign(0, 0).has_value());  // rider 10 on driver 1
  REQUIRE(b.state.try_assign(0, 0).has_value());
  a.cached_cost = a.state.cost();
  b.cached_cost = b.state.cost();
  CandidateSolution before = a;
  CHECK(apply_feature_migration(a, b, 0, cfg));
  CHECK(a == before);
}

TEST_CASE("migrate feature: rollback restores the exact pre-migration state") {
  for (int trial = 0; trial < 10; ++trial) {
    StrandingFixture fx(1.0 + trial);
    BBOConfig cfg;
    cfg.rollback_enabled = true;
    // target: rider 11 rides driver 1; rider 10 unmatched.
    CandidateSolution target(fx.ctx);
    REQUIRE(target.state.try_assign(1, 0).has_value());
    target.cached_cost = target.state.cost();
    // source: rider 10 rides driver 1.
    CandidateSolution source(fx.ctx);
    REQUIRE(source.state.try_assign(0, 0).has_value());
    source.cached_cost = source.state.cost();

    CandidateSolution before = target;
    bool kept = apply_feature_migration(target, source, 0, cfg);
    CHECK_FALSE(kept);       // rider 11 had no fallback vehicle
    CHECK(target == before); // byte-equal restore
  }
}

TEST_CASE("migrate feature: rollback disabled keeps the change, stranded rider unmatched") {
  StrandingFixture fx(5.0);
  BBOConfig cfg;
  cfg.rollback_enabled = false;
  CandidateSolution target(fx.ctx);
  REQUIRE(target.state.try_assign(1, 0).has_value());
  target.cached_cost = target.state.cost();
  CandidateSolution source(fx.ctx);
  REQUIRE(source.state.try_assign(0, 0).has_value());
  source.cached_cost = source.state.cost();

  apply_feature_migration(target, source, 0, cfg);
  CHECK(target.state.assigned_driver(0) == 0);   // emigrant rider installed
  CHECK(target.state.assigned_driver(1) == -1);  // displaced rider unmatched
  CHECK(state_valid(target));
}

TEST_CASE("mutate: zero probability is the identity") {
  MicroFixture fx(10);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.mutation_probability = 0.0;
  Population pop = init_population(ctx, cfg);
  CandidateSolution before = pop.candidates[0];
  Rng rng(55);
  mutate(pop.candidates[0], cfg, rng);
  CHECK(pop.candidates[0] == before);
}

TEST_CASE("mutate: single rider, single driver stays assigned-or-unchanged") {
  RoadNetwork net({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}}, {{1, 2, 5.0}, {2, 3, 5.0}});
  BatchContext ctx = BatchContext::build(net, {make_rider(10, 1, 3, 0, 100)},
                                         {make_driver(1, 1, 3, 0, 100, 3, 1.0)}, {}, 0.0, {});
  BBOConfig cfg;
  cfg.mutation_probability = 1.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CandidateSolution cand(ctx);
    cand.cached_cost = cand.state.cost();
    Rng rng(seed);
    mutate(cand, cfg, rng);
    int didx = cand.state.assigned_driver(0);
    CHECK((didx == -1 || didx == 0));
    CHECK(state_valid(cand));
  }
}

TEST_CASE("mutate fuzz: a thousand mutations never violate constraints") {
  MicroFixture fx(11);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.mutation_probability = 1.0;
  Population pop = init_population(ctx, cfg);
  Rng rng(999);
  for (int i = 0; i < 1000; ++i) {
    CandidateSolution& cand = pop.candidates[static_cast<std::size_t>(i) % pop.candidates.size()];
    mutate(cand, cfg, rng);
    REQUIRE(state_valid(cand));
  }
}

TEST_CASE("evolve: degenerate run returns the unique plan") {
  RoadNetwork net({{1, 0, 0}, {2, 0, 1}, {3, 0, 2}}, {{1, 2, 5.0}, {2, 3, 5.0}});
  BatchContext ctx = BatchContext::build(net, {make_rider(10, 1, 3, 0, 100)},
                                         {make_driver(1, 1, 3, 0, 100, 3, 1.0)}, {}, 0.0, {});
  BBOConfig cfg;
  cfg.population_size = 4;
  cfg.generation_limit = 1;
  cfg.mutation_probability = 0.0;
  EvolveResult result = evolve(ctx, cfg);
  REQUIRE(result.plan.assignments.size() == 1);
  CHECK(result.plan.assignments[0].rider == 10);
  CHECK(result.plan.assignments[0].driver == 1);
  CHECK(result.plan.unmatched.empty());
  CHECK(result.best_cost_trace.size() == 1);
}

TEST_CASE("evolve: best-cost trace never increases") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MicroFixture fx(20 + seed);
    BatchContext& ctx = fx.ctx;
    BBOConfig cfg;
    cfg.generation_limit = 12;
    cfg.seed = seed;
    EvolveResult result = evolve(ctx, cfg);
    for (std::size_t g = 1; g < result.best_cost_trace.size(); ++g) {
      CHECK(result.best_cost_trace[g] <= result.best_cost_trace[g - 1] + 1e-12);
    }
  }
}

TEST_CASE("evolve: reaches the brute-force optimum on micro instances") {
  int bbo_hits = 0, greedy_hits = 0, trials = 0;
  for (std::uint64_t inst = 1; inst <= 5; ++inst) {
    MicroFixture fx(100 + inst);
    BatchContext& ctx = fx.ctx;
    auto optimal = oracle::brute_force_best_cost(ctx);
    REQUIRE(optimal.has_value());
    double greedy_cost = plan_cost(ctx, greedy_match(ctx));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      BBOConfig cfg;
      cfg.generation_limit = 50;
      cfg.seed = seed;
      EvolveResult result = evolve(ctx, cfg);
      double got = plan_cost(ctx, result.plan);
      CHECK(got >= *optimal - 1e-9);
      if (got <= *optimal + 1e-9) ++bbo_hits;
      if (greedy_cost <= *optimal + 1e-9) ++greedy_hits;
      ++trials;
    }
  }
  CHECK(bbo_hits >= trials * 9 / 10);
  CHECK(bbo_hits >= greedy_hits);
}

TEST_CASE("virtual maps are isolated: operators on one candidate leave others intact") {
  MicroFixture fx(12);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.mutation_probability = 1.0;
  Population pop = init_population(ctx, cfg);
  compute_rates(pop);
  CandidateSolution snapshot = pop.candidates[1];
  Rng rng(42);
  mutate(pop.candidates[0], cfg, rng);
  migrate(pop.candidates[0], pop.candidates, 0, cfg, rng);
  CHECK(pop.candidates[1] == snapshot);
}

TEST_CASE("evolve is deterministic for a fixed seed") {
  MicroFixture fx(13);
  BatchContext& ctx = fx.ctx;
  BBOConfig cfg;
  cfg.seed = 77;
  cfg.generation_limit = 8;
  EvolveResult a = evolve(ctx, cfg);
  EvolveResult b = evolve(ctx, cfg);
  CHECK(a.best_cost_trace == b.best_cost_trace);
  REQUIRE(a.plan.assignments.size() == b.plan.assignments.size());
  for (std::size_t i = 0; i < a.plan.assignments.size(); ++i) {
    CHECK(a.plan.assignments[i].rider == b.plan.assignments[i].rider);
    CHECK(a.plan.assignments[i].driver == b.plan.assignments[i].driver);
    CHECK(a.plan.assignments[i].schedule == b.plan.assignments[i].schedule);
  }
  CHECK(a.plan.unmatched == b.plan.unmatched);
}

TEST_CASE("evolve validates its configuration") {
  MicroFixture fx(14);
  BatchContext& ctx = fx.ctx;
  BBOConfig bad;
  bad.elite_count = 20;
  bad.population_size = 20;
  CHECK_THROWS_AS(evolve(ctx, bad), std::invalid_argument);
  BBOConfig bad2;
  bad2.generation_limit = 0;
  CHECK_THROWS_AS(evolve(ctx, bad2), std::invalid_argument);
  BBOConfig bad3;
  bad3.population_size = 1;
  bad3.elite_count = 0;
  CHECK_THROWS_AS(evolve(ctx, bad3), std::invalid_argument);
}

TEST_CASE("every candidate stays feasible through full evolve runs") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    MicroFixture fx(30 + seed);
    BatchContext& ctx = fx.ctx;
    BBOConfig cfg;
    cfg.seed = seed;
    cfg.generation_limit = 10;
    EvolveResult result = evolve(ctx, cfg);
    std::string why;
    CHECK_MESSAGE(plan_valid(result.plan, ctx, &why), why);
  }
}
