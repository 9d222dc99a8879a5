#include "ridesim/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ridesim {

namespace {

using nlohmann::json;

json config_to_json(const SimConfig& cfg) {
  json j;
  j["batch_seconds"] = cfg.batch_seconds;
  j["tick_seconds"] = cfg.tick_seconds;
  j["horizon_seconds"] = cfg.horizon_seconds;
  j["matcher"] = cfg.matcher.name;
  j["alpha"] = cfg.cost_params.alpha;
  j["fleet_speed"] = cfg.fleet_speed;
  j["seed"] = cfg.seed;
  if (cfg.matcher.name == "sa") {
    j["sa"] = {{"initial_temperature", cfg.matcher.sa.initial_temperature},
               {"cooling_rate", cfg.matcher.sa.cooling_rate},
               {"iterations_per_temperature", cfg.matcher.sa.iterations_per_temperature},
               {"min_temperature", cfg.matcher.sa.min_temperature}};
  }
  if (cfg.matcher.name == "bbo") {
    j["bbo"] = {{"population_size", cfg.matcher.bbo.population_size},
                {"generation_limit", cfg.matcher.bbo.generation_limit},
                {"elite_count", cfg.matcher.bbo.elite_count},
                {"hybrid_ratio", cfg.matcher.bbo.hybrid_ratio},
                {"rollback", cfg.matcher.bbo.rollback_enabled},
                {"mutation_probability", cfg.matcher.bbo.mutation_probability}};
  }
  return j;
}

json snapshot_to_json(const MetricsSnapshot& s) {
  json j;
  j["matched_count"] = s.matched_count;
  j["total_riders"] = s.total_riders;
  j["overhead_sum"] = s.overhead_sum;
  j["rider_msp_sum"] = s.rider_msp_sum;
  j["base_driver_distance"] = s.base_driver_distance;
  j["base_rider_distance"] = s.base_rider_distance;
  j["matched_trip_distance"] = s.matched_trip_distance;
  return j;
}

json report_to_json_value(const SimReport& r, const ReportOptions& opts) {
  json j;
  j["matcher"] = r.matcher;
  j["config"] = config_to_json(r.config);
  json batches = json::array();
  for (const BatchStats& b : r.per_batch) {
    json jb;
    jb["index"] = b.index;
    jb["t"] = b.boundary;
    jb["pool_size"] = b.pool_size;
    jb["newly_matched"] = b.newly_matched;
    jb["newly_expired"] = b.newly_expired;
    jb["overhead_sum"] = b.overhead_sum;
    jb["pool_msp_sum"] = b.pool_msp_sum;
    if (b.batch_cost) {
      jb["batch_cost"] = *b.batch_cost;
    } else {
      jb["batch_cost"] = nullptr;
    }
    if (opts.emit_timing) jb["wall_ms"] = b.wall_ms;
    batches.push_back(std::move(jb));
  }
  j["batches"] = std::move(batches);
  j["cumulative"] = snapshot_to_json(r.cumulative);
  j["cumulative"]["total_drivers"] = r.total_drivers;
  if (r.total_drivers > 0) {
    j["cumulative"]["overhead_mean"] =
        r.cumulative.overhead_sum / static_cast<double>(r.total_drivers);
  }
  if (r.cumulative.total_riders > 0) {
    j["cumulative"]["matching_rate"] =
        static_cast<double>(r.cumulative.matched_count) /
        static_cast<double>(r.cumulative.total_riders);
  }
  if (r.total_cost) {
    j["cost"] = *r.total_cost;
  } else {
    j["cost"] = nullptr;
  }
  j["mean_matching_delay"] = r.delays.mean;
  j["max_matching_delay"] = r.delays.max;
  j["delivered"] = r.delivered;
  j["expired"] = r.expired;
  j["defects"] = r.defects;
  return j;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

}  // namespace

std::string report_to_json(const SimReport& report, const ReportOptions& opts) {
  return report_to_json_value(report, opts).dump(2) + "\n";
}

std::string report_to_csv(const SimReport& report) {
  std::ostringstream out;
  out << "batch,t,pool_size,newly_matched,newly_expired,overhead_sum,pool_msp_sum,batch_cost\n";
  for (const BatchStats& b : report.per_batch) {
    out << b.index << ',' << b.boundary << ',' << b.pool_size << ',' << b.newly_matched << ','
        << b.newly_expired << ',' << fmt(b.overhead_sum) << ',' << fmt(b.pool_msp_sum) << ',';
    if (b.batch_cost) out << fmt(*b.batch_cost);
    out << '\n';
  }
  return out.str();
}

std::vector<ComparisonRow> comparison_rows(const std::vector<SimReport>& reports,
                                           std::int64_t driver_count) {
  std::vector<ComparisonRow> rows;
  rows.reserve(reports.size());
  for (const SimReport& r : reports) {
    ComparisonRow row;
    row.matcher = r.matcher;
    if (r.cumulative.total_riders > 0) {
      row.matching_rate = static_cast<double>(r.cumulative.matched_count) /
                          static_cast<double>(r.cumulative.total_riders);
    }
    if (driver_count == 0) driver_count = r.total_drivers;
    row.overhead_sum = r.cumulative.overhead_sum;
    row.overhead_mean =
        driver_count > 0 ? r.cumulative.overhead_sum / static_cast<double>(driver_count) : 0.0;
    row.mean_delay = r.delays.mean;
    row.max_delay = r.delays.max;
    row.cost = r.total_cost.value_or(0.0);
    rows.push_back(row);
  }
  return rows;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "matcher,matching_rate,overhead_sum,overhead_mean,mean_delay,max_delay,cost\n";
  for (const ComparisonRow& r : rows) {
    out << r.matcher << ',' << fmt(r.matching_rate) << ',' << fmt(r.overhead_sum) << ','
        << fmt(r.overhead_mean) << ',' << fmt(r.mean_delay) << ',' << fmt(r.max_delay) << ','
        << fmt(r.cost) << '\n';
  }
  return out.str();
}

std::string comparison_to_json(const std::vector<ComparisonRow>& rows,
                               const std::vector<SimReport>& reports, const ReportOptions& opts) {
  json j;
  json jr = json::array();
  for (const ComparisonRow& r : rows) {
    jr.push_back({{"matcher", r.matcher},
                  {"matching_rate", r.matching_rate},
                  {"overhead_sum", r.overhead_sum},
                  {"overhead_mean", r.overhead_mean},
                  {"mean_delay", r.mean_delay},
                  {"max_delay", r.max_delay},
                  {"cost", r.cost}});
  }
  j["rows"] = std::move(jr);
  json details = json::array();
  for (const SimReport& r : reports) details.push_back(report_to_json_value(r, opts));
  j["runs"] = std::move(details);
  return j.dump(2) + "\n";
}

std::vector<SweepCase> default_sweep_cases() {
  std::vector<SweepCase> cases;
  BBOConfig base;  // N=20, G_max=10, E=1, alpha=0.5
  for (int i = 0; i < 4; ++i) {
    SweepCase c;
    c.label = "case" + std::to_string(i + 1);
    c.bbo = base;
    c.bbo.hybrid_ratio = i < 2 ? 0.85 : 1.0;
    c.bbo.rollback_enabled = (i % 2) == 0;
    cases.push_back(c);
  }
  return cases;
}

std::string sweep_to_csv(const std::vector<SweepCase>& cases,
                         const std::vector<SimReport>& reports) {
  std::ostringstream out;
  out << "metric";
  for (const SweepCase& c : cases) out << ',' << c.label;
  out << '\n';
  auto row = [&](const std::string& name, auto getter) {
    out << name;
    for (const SimReport& r : reports) out << ',' << fmt(getter(r));
    out << '\n';
  };
  row("hybrid_ratio", [&](const SimReport& r) { return r.config.matcher.bbo.hybrid_ratio; });
  row("rollback", [&](const SimReport& r) { return r.config.matcher.bbo.rollback_enabled ? 1.0 : 0.0; });
  row("base_driver_dist", [](const SimReport& r) { return r.cumulative.base_driver_distance; });
  row("base_rider_dist", [](const SimReport& r) { return r.cumulative.base_rider_distance; });
  row("matched_trip_dist", [](const SimReport& r) { return r.cumulative.matched_trip_distance; });
  row("d_ov", [](const SimReport& r) { return r.cumulative.overhead_sum; });
  row("m_r", [](const SimReport& r) {
    return r.cumulative.total_riders > 0
               ? static_cast<double>(r.cumulative.matched_count) /
                     static_cast<double>(r.cumulative.total_riders)
               : 0.0;
  });
  row("cost", [](const SimReport& r) { return r.total_cost.value_or(0.0); });
  return out.str();
}

std::string sweep_to_json(const std::vector<SweepCase>& cases,
                          const std::vector<SimReport>& reports, const ReportOptions& opts) {
  json j;
  json jc = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    json c;
    c["label"] = cases[i].label;
    c["report"] = report_to_json_value(reports[i], opts);
    jc.push_back(std::move(c));
  }
  j["cases"] = std::move(jc);
  return j.dump(2) + "\n";
}

std::string events_to_text(const std::vector<Event>& events) {
  std::ostringstream out;
  for (const Event& e : events) out << format_event(e) << '\n';
  return out.str();
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key.empty() || value.empty()) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key or value");
    }
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config_text(in);
}

namespace {

bool parse_bool(const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw std::runtime_error("expected on/off boolean, got '" + v + "'");
}

}  // namespace

FileConfig apply_config(const std::map<std::string, std::string>& kv, FileConfig base) {
  for (const auto& [key, value] : kv) {
    if (key == "population_size") {
      base.sim.matcher.bbo.population_size = std::stoi(value);
    } else if (key == "generation_limit") {
      base.sim.matcher.bbo.generation_limit = std::stoi(value);
    } else if (key == "elite_count") {
      base.sim.matcher.bbo.elite_count = std::stoi(value);
    } else if (key == "hybrid_ratio") {
      base.sim.matcher.bbo.hybrid_ratio = std::stod(value);
    } else if (key == "rollback") {
      base.sim.matcher.bbo.rollback_enabled = parse_bool(value);
    } else if (key == "mutation_probability") {
      base.sim.matcher.bbo.mutation_probability = std::stod(value);
    } else if (key == "alpha") {
      base.sim.cost_params.alpha = std::stod(value);
      base.sim.matcher.bbo.alpha = base.sim.cost_params.alpha;
    } else if (key == "seed") {
      base.sim.seed = std::stoull(value);
    } else if (key == "cache_capacity") {
      base.cache_capacity = std::stoull(value);
    } else if (key == "batch_seconds") {
      base.sim.batch_seconds = std::stoll(value);
    } else {
      throw std::runtime_error("unknown config key '" + key + "'");
    }
  }
  return base;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

}  // namespace ridesim
