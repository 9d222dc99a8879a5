#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ridesim/domain.hpp"

namespace ridesim {

struct CostParams {
  double alpha = 0.5;  // objective weight, in [0,1]
};

struct MetricsSnapshot {
  std::int64_t matched_count = 0;  // |R_s|
  std::int64_t total_riders = 0;   // |R|
  double overhead_sum = 0.0;       // D_ov, meters
  double rider_msp_sum = 0.0;      // sum of direct rider distances, meters
  std::vector<double> matching_delays;  // seconds, one per matched rider
  double base_driver_distance = 0.0;
  double base_rider_distance = 0.0;
  double matched_trip_distance = 0.0;
};

// |R_s| / |R|; throws std::domain_error when total_riders == 0.
double matching_rate(const MetricsSnapshot& s);

// Sum of per-driver distance overheads; std::nullopt propagates unreachable.
std::optional<double> overhead_sum(const std::vector<Driver>& drivers, const RoadNetwork& net);

// alpha * overhead_sum / rider_msp_sum + (1 - alpha) * (1 - matching rate).
// Throws std::domain_error when rider_msp_sum <= 0.
double cost(const CostParams& p, const MetricsSnapshot& s);

double cost_terms(const CostParams& p, double overhead_sum, double rider_msp_sum,
                  std::int64_t matched, std::int64_t total);

struct DelayStats {
  double mean = 0.0;
  double max = 0.0;
};

// Mean/max matching delay over matched riders; (0,0) when none.
DelayStats matching_delay_stats(const MetricsSnapshot& s);

}  // namespace ridesim
