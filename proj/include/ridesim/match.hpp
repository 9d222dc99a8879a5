#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ridesim/bbo.hpp"
#include "ridesim/matchers.hpp"

namespace ridesim {

// Matcher selected by name: greedy | nn | sa | bbo.
struct MatcherSpec {
  std::string name = "greedy";
  SAParams sa;
  BBOConfig bbo;
};

bool known_matcher(std::string_view name);

// Uniform entry point over the matching algorithms. `seed` overrides the
// sub-configuration seed so one master seed drives a whole run.
MatchPlan match(const MatcherSpec& spec, const BatchContext& ctx, std::uint64_t seed);

}  // namespace ridesim
