#pragma once

// Experiment configs (JSON in) and reports (JSON or CSV out).
//
// Report JSON carries "schema": "hqlab-report/1". CSV has one row per cell:
//   error_rate, consistency_path: experiment,penalty,n,trials,correct,overestimate,underestimate
//   lil:                          experiment,dk,n,band,paths,exceedances,frequency
// Reals are written with 17 significant digits so reports round-trip exactly.

#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hqlab/error.hpp"
#include "hqlab/penalty.hpp"
#include "hqlab/simlab.hpp"
#include "json.hpp"

namespace hqlab {

inline constexpr const char* kReportSchema = "hqlab-report/1";

using ordered_json = nlohmann::ordered_json;

inline std::string format_real(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct ExperimentConfig {
  std::string experiment;
  GeneratorSpec spec = GeneratorSpec::lr(0, {}, {}, 1.0, 0);
  std::vector<PenaltySequence> penalties;
  std::vector<std::size_t> checkpoints;
  std::size_t trials = 0;
  std::size_t paths = 0;
  int dk = 1;
  ExperimentOptions options;
  std::string raw;  // the JSON text as given
};

namespace detail {

inline void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw Error(Errc::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

inline const ordered_json& require(const ordered_json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(Errc::ConfigError, std::string("missing required key '") + key + "'");
  return obj.at(key);
}

inline std::size_t positive_count(const ordered_json& v, const char* key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw Error(Errc::ConfigError, std::string("'") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

inline GeneratorSpec parse_model(const ordered_json& m, std::uint64_t seed) {
  if (!m.is_object()) throw Error(Errc::ConfigError, "'model' must be an object");
  const std::string kind = require(m, "kind").get<std::string>();
  const double sigma = m.value("sigma", 1.0);
  const NoiseKind noise = parse_noise(m.value("noise", std::string("gaussian")));
  if (kind == "lr") {
    reject_unknown_keys(m, {"kind", "m", "truth", "alpha", "sigma", "noise"}, "model");
    const std::size_t count = require(m, "m").get<std::size_t>();
    Subset truth;
    for (const auto& j : m.value("truth", ordered_json::array())) {
      const auto idx = j.get<std::int64_t>();
      if (idx < 1) throw Error(Errc::ConfigError, "'truth' uses 1-based regressor indices");
      truth.push_back(static_cast<std::size_t>(idx - 1));
    }
    Vec alpha = m.value("alpha", Vec{});
    return GeneratorSpec::lr(count, std::move(truth), std::move(alpha), sigma, seed, noise);
  }
  if (kind == "ar") {
    reject_unknown_keys(m, {"kind", "coeffs", "sigma", "noise"}, "model");
    return GeneratorSpec::ar(m.value("coeffs", Vec{}), sigma, seed, noise);
  }
  throw Error(Errc::ConfigError, "model kind must be 'lr' or 'ar'");
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.raw = text;
  try {
    const auto doc = ordered_json::parse(text);
    if (!doc.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
    cfg.experiment = detail::require(doc, "experiment").get<std::string>();
    std::set<std::string> allowed = {"experiment", "seed", "model", "checkpoints", "mode", "kmax"};
    if (cfg.experiment == "error_rate") {
      allowed.insert({"penalties", "trials"});
    } else if (cfg.experiment == "consistency_path") {
      allowed.insert({"penalties", "paths"});
    } else if (cfg.experiment == "lil") {
      allowed.insert({"paths", "dk"});
    } else {
      throw Error(Errc::ConfigError, "experiment must be error_rate, consistency_path or lil");
    }
    detail::reject_unknown_keys(doc, allowed, "config");

    const std::uint64_t seed = doc.value("seed", std::uint64_t{0});
    cfg.spec = detail::parse_model(detail::require(doc, "model"), seed);

    const auto& grid = detail::require(doc, "checkpoints");
    if (!grid.is_array() || grid.empty()) throw Error(Errc::ConfigError, "'checkpoints' must be a non-empty array");
    for (const auto& n : grid) cfg.checkpoints.push_back(detail::positive_count(n, "checkpoints"));

    const std::string mode = doc.value("mode", std::string("exhaustive"));
    if (mode == "exhaustive") cfg.options.mode = SearchMode::Exhaustive;
    else if (mode == "nested") cfg.options.mode = SearchMode::Nested;
    else throw Error(Errc::ConfigError, "mode must be 'exhaustive' or 'nested'");
    if (doc.contains("kmax")) cfg.options.k_max = doc.at("kmax").get<std::size_t>();
    if (!cfg.spec.is_lr() && !doc.contains("kmax")) throw Error(Errc::ConfigError, "autoregressive runs need 'kmax'");

    if (cfg.experiment == "lil") {
      cfg.paths = detail::positive_count(detail::require(doc, "paths"), "paths");
      cfg.dk = static_cast<int>(detail::positive_count(doc.value("dk", ordered_json(1)), "dk"));
    } else {
      const auto& pens = detail::require(doc, "penalties");
      if (!pens.is_array() || pens.empty()) throw Error(Errc::ConfigError, "'penalties' must be a non-empty array");
      for (const auto& p : pens) cfg.penalties.push_back(PenaltySequence::parse(p.get<std::string>()));
      if (cfg.experiment == "error_rate") cfg.trials = detail::positive_count(detail::require(doc, "trials"), "trials");
      else cfg.paths = detail::positive_count(detail::require(doc, "paths"), "paths");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, std::string("invalid config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidPenalty || e.code() == Errc::NonStationary) throw Error(Errc::ConfigError, e.what());
    throw;
  }
  return cfg;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 0) {
  ExperimentOptions opts = cfg.options;
  opts.threads = threads;
  ExperimentReport report;
  if (cfg.experiment == "error_rate") {
    report = error_rate_experiment(cfg.spec, cfg.penalties, cfg.checkpoints, cfg.trials, opts);
  } else if (cfg.experiment == "consistency_path") {
    report = consistency_path_experiment(cfg.spec, cfg.penalties, cfg.checkpoints, cfg.paths, opts);
  } else {
    report = lil_experiment(cfg.spec, cfg.dk, cfg.checkpoints, cfg.paths, opts);
  }
  report.config_json = cfg.raw;
  return report;
}

inline ordered_json report_to_json(const ExperimentReport& r) {
  ordered_json doc;
  doc["schema"] = kReportSchema;
  doc["experiment"] = r.experiment;
  doc["seed"] = r.seed;
  doc["config"] = r.config_json.empty() ? ordered_json() : ordered_json::parse(r.config_json);
  doc["checkpoints"] = r.checkpoints;
  if (r.experiment != "lil") {
    auto& cells = doc["cells"] = ordered_json::array();
    for (const auto& c : r.cells) {
      cells.push_back({{"penalty", c.penalty},
                       {"n", c.n},
                       {"trials", c.trials},
                       {"correct", c.correct},
                       {"overestimate", c.overestimate},
                       {"underestimate", c.underestimate}});
    }
  }
  if (r.experiment == "consistency_path") {
    auto& paths = doc["paths"] = ordered_json::array();
    for (const auto& p : r.paths) {
      paths.push_back({{"penalty", p.penalty},
                       {"path", p.path},
                       {"wrong", p.wrong},
                       {"last_error_n", p.last_error_n ? ordered_json(*p.last_error_n) : ordered_json()}});
    }
    auto& dist = doc["last_error_distribution"] = ordered_json::object();
    for (const auto& c : r.cells) {
      if (dist.contains(c.penalty)) continue;
      auto& rows = dist[c.penalty] = ordered_json::array();
      for (const auto& [n, count] : r.last_error_distribution(c.penalty)) {
        rows.push_back({{"last_error_n", n == 0 ? ordered_json() : ordered_json(n)}, {"paths", count}});
      }
    }
  }
  if (r.experiment == "lil") {
    auto& cells = doc["lil_cells"] = ordered_json::array();
    for (const auto& c : r.lil_cells) {
      cells.push_back({{"n", c.n},
                       {"dk", c.dk},
                       {"band", c.band},
                       {"paths", c.paths},
                       {"exceedances", c.exceedances},
                       {"frequency", c.frequency()}});
    }
    auto& paths = doc["lil_paths"] = ordered_json::array();
    for (const auto& p : r.lil_paths) {
      paths.push_back({{"path", p.path}, {"statistic", p.statistic}, {"exceeded", p.exceeded}});
    }
  }
  return doc;
}

inline std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  if (r.experiment == "lil") {
    os << "experiment,dk,n,band,paths,exceedances,frequency\n";
    for (const auto& c : r.lil_cells) {
      os << r.experiment << ',' << c.dk << ',' << c.n << ',' << format_real(c.band) << ',' << c.paths << ','
         << c.exceedances << ',' << format_real(c.frequency()) << '\n';
    }
    return os.str();
  }
  os << "experiment,penalty,n,trials,correct,overestimate,underestimate\n";
  for (const auto& c : r.cells) {
    os << r.experiment << ',' << c.penalty << ',' << c.n << ',' << c.trials << ',' << c.correct << ','
       << c.overestimate << ',' << c.underestimate << '\n';
  }
  return os.str();
}

/// One human-readable line per cell.
inline std::vector<std::string> report_summary(const ExperimentReport& r) {
  std::vector<std::string> lines;
  if (r.experiment == "lil") {
    for (const auto& c : r.lil_cells) {
      lines.push_back("lil dk=" + std::to_string(c.dk) + " n=" + std::to_string(c.n) + " band=" + format_real(c.band, 6) +
                      " exceedance=" + format_real(c.frequency(), 6) + " (" + std::to_string(c.exceedances) + "/" +
                      std::to_string(c.paths) + ")");
    }
    return lines;
  }
  for (const auto& c : r.cells) {
    const double t = static_cast<double>(c.trials);
    lines.push_back(r.experiment + " penalty=" + c.penalty + " n=" + std::to_string(c.n) +
                    " correct=" + format_real(c.correct / t, 6) + " overestimation=" + format_real(c.overestimate / t, 6) +
                    " underestimation=" + format_real(c.underestimate / t, 6) + " trials=" + std::to_string(c.trials));
  }
  return lines;
}

}  // namespace hqlab
