#include "ridesim/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace ridesim {

double matching_rate(const MetricsSnapshot& s) {
  if (s.total_riders == 0) {
    throw std::domain_error("matching_rate undefined: no riders");
  }
  return static_cast<double>(s.matched_count) / static_cast<double>(s.total_riders);
}

std::optional<double> overhead_sum(const std::vector<Driver>& drivers, const RoadNetwork& net) {
  double total = 0.0;
  for (const Driver& d : drivers) {
    auto ov = distance_overhead(d, net);
    if (!ov) return std::nullopt;
    total += *ov;
  }
  return total;
}

double cost_terms(const CostParams& p, double overhead_sum, double rider_msp_sum,
                  std::int64_t matched, std::int64_t total) {
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
    throw std::domain_error("objective weight must lie in [0, 1]");
  }
  if (!(rider_msp_sum > 0.0)) {
    throw std::domain_error("cost undefined: rider msp sum must be positive");
  }
  if (total == 0) {
    throw std::domain_error("cost undefined: no riders");
  }
  double rate = static_cast<double>(matched) / static_cast<double>(total);
  return p.alpha * overhead_sum / rider_msp_sum + (1.0 - p.alpha) * (1.0 - rate);
}

double cost(const CostParams& p, const MetricsSnapshot& s) {
  return cost_terms(p, s.overhead_sum, s.rider_msp_sum, s.matched_count, s.total_riders);
}

DelayStats matching_delay_stats(const MetricsSnapshot& s) {
  DelayStats out;
  if (s.matching_delays.empty()) return out;
  double sum = 0.0;
  for (double d : s.matching_delays) {
    sum += d;
    out.max = std::max(out.max, d);
  }
  out.mean = sum / static_cast<double>(s.matching_delays.size());
  return out;
}

}  // namespace ridesim
