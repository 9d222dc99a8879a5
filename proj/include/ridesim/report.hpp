#pragma once

#include <map>
#include <string>
#include <vector>

#include "ridesim/sim.hpp"

namespace ridesim {

struct ReportOptions {
  // Wall-clock timings vary run to run; they are only emitted on request so
  // that reports with equal seed and config stay byte-identical.
  bool emit_timing = false;
};

std::string report_to_json(const SimReport& report, const ReportOptions& opts = {});
std::string report_to_csv(const SimReport& report);

// One row per matcher over the same instance and seed.
struct ComparisonRow {
  std::string matcher;
  double matching_rate = 0.0;
  double overhead_sum = 0.0;
  double overhead_mean = 0.0;
  double mean_delay = 0.0;
  double max_delay = 0.0;
  double cost = 0.0;
};

std::vector<ComparisonRow> comparison_rows(const std::vector<SimReport>& reports,
                                           std::int64_t driver_count);
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_to_json(const std::vector<ComparisonRow>& rows,
                               const std::vector<SimReport>& reports,
                               const ReportOptions& opts = {});

// Parameter-sweep table: metric rows by case columns.
struct SweepCase {
  std::string label;
  BBOConfig bbo;
};

std::vector<SweepCase> default_sweep_cases();
std::string sweep_to_csv(const std::vector<SweepCase>& cases, const std::vector<SimReport>& reports);
std::string sweep_to_json(const std::vector<SweepCase>& cases, const std::vector<SimReport>& reports,
                          const ReportOptions& opts = {});

std::string events_to_text(const std::vector<Event>& events);

// `key = value` per line, '#' comments, case-insensitive keys:
// population_size, generation_limit, elite_count, hybrid_ratio, rollback,
// mutation_probability, alpha, seed, cache_capacity, batch_seconds.
std::map<std::string, std::string> parse_config_text(std::istream& in);
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct FileConfig {
  SimConfig sim;
  std::size_t cache_capacity = NetConfig{}.cache_capacity;
};

// Applies the recognized keys onto defaults; unknown keys are an error.
FileConfig apply_config(const std::map<std::string, std::string>& kv, FileConfig base);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ridesim
