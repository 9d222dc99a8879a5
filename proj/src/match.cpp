#include "ridesim/match.hpp"

#include <stdexcept>

namespace ridesim {

bool known_matcher(std::string_view name) {
  return name == "greedy" || name == "nn" || name == "sa" || name == "bbo";
}

MatchPlan match(const MatcherSpec& spec, const BatchContext& ctx, std::uint64_t seed) {
  if (ctx.pool.empty()) return MatchPlan{};
  if (spec.name == "greedy") return greedy_match(ctx);
  if (spec.name == "nn") return nn_match(ctx);
  if (spec.name == "sa") {
    SAParams params = spec.sa;
    params.seed = seed;
    return sa_match(ctx, params);
  }
  if (spec.name == "bbo") {
    BBOConfig cfg = spec.bbo;
    cfg.seed = seed;
    cfg.alpha = ctx.cost_params.alpha;
    return evolve(ctx, cfg).plan;
  }
  throw std::invalid_argument("unknown matcher '" + spec.name + "' (expected greedy|nn|sa|bbo)");
}

}  // namespace ridesim
