#pragma once

// Seeded data generators and Monte Carlo experiment runners.
//
// Stream layout (see rng.hpp):
//   regression row i of a dataset      stream_key(seed, {kRowStream, i})
//   autoregressive path                stream_key(seed, {kSeriesStream})
//   fresh-draw trial t at checkpoint c stream_key(seed, {kTrialStream, c, t})
//   growing path p                     stream_key(seed, {kPathStream, p})
// Rows are keyed individually, so generate_lr(spec, n) is a prefix of
// generate_lr(spec, n') for n < n'. Growing-path experiments rely on that.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "hqlab/ar_select.hpp"
#include "hqlab/error.hpp"
#include "hqlab/lr_select.hpp"
#include "hqlab/numkernel.hpp"
#include "hqlab/overestimation.hpp"
#include "hqlab/penalty.hpp"
#include "hqlab/rng.hpp"

namespace hqlab {

inline constexpr std::uint64_t kRowStream = 1;
inline constexpr std::uint64_t kSeriesStream = 2;
inline constexpr std::uint64_t kTrialStream = 3;
inline constexpr std::uint64_t kPathStream = 4;

enum class NoiseKind { Gaussian, Uniform, Laplace, Rademacher };

constexpr std::string_view to_string(NoiseKind k) noexcept {
  switch (k) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::Rademacher: return "rademacher";
  }
  return "gaussian";
}

inline NoiseKind parse_noise(std::string_view s) {
  for (auto k : {NoiseKind::Gaussian, NoiseKind::Uniform, NoiseKind::Laplace, NoiseKind::Rademacher}) {
    if (s == to_string(k)) return k;
  }
  throw Error(Errc::ConfigError, "unknown noise kind '" + std::string(s) + "'");
}

/// Zero-mean noise with variance sigma^2.
inline double draw_noise(CounterRng& rng, NoiseKind kind, double sigma) {
  switch (kind) {
    case NoiseKind::Gaussian: return sigma * rng.normal();
    case NoiseKind::Uniform: return sigma * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    case NoiseKind::Laplace: {
      const double u = rng.uniform() - 0.5;
      const double b = sigma / std::sqrt(2.0);
      return u < 0.0 ? b * std::log1p(2.0 * u) : -b * std::log1p(-2.0 * u);
    }
    case NoiseKind::Rademacher: return (rng.next_u64() >> 63) ? sigma : -sigma;
  }
  return 0.0;
}

/// y = sum_{j in truth} alpha_j x_j + eps with i.i.d. standard normal regressors.
struct LrModel {
  std::size_t m = 0;
  Subset truth;
  Vec alpha;
  double sigma = 1.0;
  NoiseKind noise = NoiseKind::Gaussian;
};

/// X_i = sum_j coeffs_j X_{i-j} + W_i.
struct ArModel {
  Vec coeffs;
  double sigma = 1.0;
  NoiseKind noise = NoiseKind::Gaussian;
};

class GeneratorSpec {
 public:
  static GeneratorSpec lr(std::size_t m, Subset truth, Vec alpha, double sigma, std::uint64_t seed,
                          NoiseKind noise = NoiseKind::Gaussian) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::ConfigError, "noise sigma must be > 0");
    if (truth.size() != alpha.size()) throw Error(Errc::ConfigError, "alpha must have one entry per true regressor");
    if (!std::is_sorted(truth.begin(), truth.end()) || std::adjacent_find(truth.begin(), truth.end()) != truth.end()) {
      throw Error(Errc::ConfigError, "true subset must be sorted and free of duplicates");
    }
    if (!truth.empty() && truth.back() >= m) throw Error(Errc::ConfigError, "true subset index exceeds m");
    for (double a : alpha) {
      if (!std::isfinite(a)) throw Error(Errc::ConfigError, "alpha must be finite");
    }
    return GeneratorSpec(LrModel{m, std::move(truth), std::move(alpha), sigma, noise}, seed);
  }

  static GeneratorSpec ar(Vec coeffs, double sigma, std::uint64_t seed, NoiseKind noise = NoiseKind::Gaussian) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::ConfigError, "innovation sigma must be > 0");
    if (!is_stationary(coeffs)) throw Error(Errc::NonStationary, "AR coefficients do not define a stationary process");
    return GeneratorSpec(ArModel{std::move(coeffs), sigma, noise}, seed);
  }

  bool is_lr() const noexcept { return std::holds_alternative<LrModel>(model_); }
  const LrModel& lr_model() const { return std::get<LrModel>(model_); }
  const ArModel& ar_model() const { return std::get<ArModel>(model_); }
  std::uint64_t seed() const noexcept { return seed_; }

  GeneratorSpec with_seed(std::uint64_t seed) const {
    GeneratorSpec copy = *this;
    copy.seed_ = seed;
    return copy;
  }

 private:
  GeneratorSpec(std::variant<LrModel, ArModel> model, std::uint64_t seed) : model_(std::move(model)), seed_(seed) {}

  std::variant<LrModel, ArModel> model_;
  std::uint64_t seed_;
};

inline RegressionDataset generate_lr(const GeneratorSpec& spec, std::size_t n) {
  if (!spec.is_lr()) throw Error(Errc::InvalidArgument, "generate_lr needs a regression spec");
  const auto& model = spec.lr_model();
  Mat x(n, model.m);
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(stream_key(spec.seed(), {kRowStream, i}));
    for (std::size_t j = 0; j < model.m; ++j) x(i, j) = rng.normal();
    double v = 0.0;
    for (std::size_t t = 0; t < model.truth.size(); ++t) v += model.alpha[t] * x(i, model.truth[t]);
    y[i] = v + draw_noise(rng, model.noise, model.sigma);
  }
  return RegressionDataset(std::move(x), std::move(y));
}

inline std::size_t ar_burn_in(std::size_t order) noexcept { return 10 * order + 1000; }

inline ARSeries generate_ar(const GeneratorSpec& spec, std::size_t n) {
  if (spec.is_lr()) throw Error(Errc::InvalidArgument, "generate_ar needs an autoregressive spec");
  const auto& model = spec.ar_model();
  const std::size_t k = model.coeffs.size();
  const std::size_t burn = ar_burn_in(k);
  CounterRng rng(stream_key(spec.seed(), {kSeriesStream}));
  Vec path(burn + n, 0.0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    double v = draw_noise(rng, model.noise, model.sigma);
    for (std::size_t j = 1; j <= k && j <= i; ++j) v += model.coeffs[j - 1] * path[i - j];
    path[i] = v;
  }
  return ARSeries(Vec(path.begin() + static_cast<std::ptrdiff_t>(burn), path.end()));
}

// ---------------------------------------------------------------------------
// Experiments

enum class Outcome { Correct, Overestimate, Underestimate };

/// Under: chosen misses a true regressor. Over: chosen strictly contains the truth.
inline Outcome classify(const Subset& chosen, const Subset& truth) {
  if (!std::includes(chosen.begin(), chosen.end(), truth.begin(), truth.end())) return Outcome::Underestimate;
  return chosen.size() == truth.size() ? Outcome::Correct : Outcome::Overestimate;
}

inline Outcome classify(std::size_t chosen_order, std::size_t true_order) {
  if (chosen_order < true_order) return Outcome::Underestimate;
  return chosen_order == true_order ? Outcome::Correct : Outcome::Overestimate;
}

struct CellRecord {
  std::string penalty;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t correct = 0;
  std::size_t overestimate = 0;
  std::size_t underestimate = 0;

  void add(Outcome o) {
    ++trials;
    if (o == Outcome::Correct) ++correct;
    else if (o == Outcome::Overestimate) ++overestimate;
    else ++underestimate;
  }
};

/// One growing path under one penalty.
struct PathLog {
  std::string penalty;
  std::size_t path = 0;
  std::vector<std::uint8_t> wrong;         // per checkpoint
  std::optional<std::size_t> last_error_n;  // last checkpoint with a wrong selection
};

struct LilCell {
  std::size_t n = 0;
  int dk = 1;
  double band = 0.0;
  std::size_t paths = 0;
  std::size_t exceedances = 0;

  double frequency() const noexcept { return paths ? static_cast<double>(exceedances) / static_cast<double>(paths) : 0.0; }
};

struct LilPathLog {
  std::size_t path = 0;
  Vec statistic;                    // per checkpoint
  std::vector<std::uint8_t> exceeded;  // per checkpoint
};

struct ExperimentReport {
  std::string experiment;  // "error_rate", "consistency_path" or "lil"
  std::uint64_t seed = 0;
  std::string config_json;  // echoed input, empty when run programmatically
  std::vector<std::size_t> checkpoints;
  std::vector<CellRecord> cells;
  std::vector<PathLog> paths;
  std::vector<LilCell> lil_cells;
  std::vector<LilPathLog> lil_paths;

  const CellRecord& cell(std::string_view penalty, std::size_t n) const {
    for (const auto& c : cells) {
      if (c.penalty == penalty && c.n == n) return c;
    }
    throw Error(Errc::InvalidArgument, "no cell for penalty " + std::string(penalty) + " at n = " + std::to_string(n));
  }

  /// Histogram of last-error checkpoints for one penalty; key 0 counts paths that were never wrong.
  std::map<std::size_t, std::size_t> last_error_distribution(std::string_view penalty) const {
    std::map<std::size_t, std::size_t> out;
    for (const auto& p : paths) {
      if (p.penalty == penalty) ++out[p.last_error_n.value_or(0)];
    }
    return out;
  }
};

struct ExperimentOptions {
  SearchMode mode = SearchMode::Exhaustive;
  std::size_t k_max = 0;  // autoregressive runs only
  unsigned threads = 0;   // 0: hardware concurrency
};

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace detail {

inline void check_run_inputs(const std::vector<PenaltySequence>& penalties, const std::vector<std::size_t>& grid,
                             std::size_t units, const char* unit_name) {
  if (penalties.empty()) throw Error(Errc::ConfigError, "at least one penalty is required");
  if (grid.empty()) throw Error(Errc::ConfigError, "at least one checkpoint is required");
  if (units < 1) throw Error(Errc::ConfigError, std::string(unit_name) + " must be >= 1");
}

// Outcome of every penalty on one sample of size n.
inline std::vector<Outcome> judge_sample(const GeneratorSpec& spec, const RegressionDataset* ds, const ARSeries* series,
                                         const std::vector<PenaltySequence>& penalties, const ExperimentOptions& opts) {
  std::vector<Outcome> out;
  out.reserve(penalties.size());
  if (spec.is_lr()) {
    const auto scores = score_candidates(*ds, opts.mode);
    for (const auto& pen : penalties) out.push_back(classify(rank_scores(scores, ds->n(), pen).chosen, spec.lr_model().truth));
  } else {
    for (const auto& pen : penalties) {
      out.push_back(classify(select_ar_order(*series, pen, opts.k_max).chosen, spec.ar_model().coeffs.size()));
    }
  }
  return out;
}

}  // namespace detail

/// Fresh independent samples per (checkpoint, trial); all penalties judge the same samples.
inline ExperimentReport error_rate_experiment(const GeneratorSpec& spec, const std::vector<PenaltySequence>& penalties,
                                              const std::vector<std::size_t>& checkpoints, std::size_t trials,
                                              const ExperimentOptions& opts = {}) {
  detail::check_run_inputs(penalties, checkpoints, trials, "trials");
  ExperimentReport report;
  report.experiment = "error_rate";
  report.seed = spec.seed();
  report.checkpoints = checkpoints;

  std::vector<std::vector<std::vector<Outcome>>> outcomes(checkpoints.size());  // [checkpoint][trial][penalty]
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    outcomes[c].resize(trials);
    const std::size_t n = checkpoints[c];
    parallel_for(trials, opts.threads, [&](std::size_t t) {
      const auto trial_spec = spec.with_seed(stream_key(spec.seed(), {kTrialStream, c, t}));
      if (spec.is_lr()) {
        const auto ds = generate_lr(trial_spec, n);
        outcomes[c][t] = detail::judge_sample(spec, &ds, nullptr, penalties, opts);
      } else {
        const auto series = generate_ar(trial_spec, n);
        outcomes[c][t] = detail::judge_sample(spec, nullptr, &series, penalties, opts);
      }
    });
  }
  for (std::size_t p = 0; p < penalties.size(); ++p) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      CellRecord cell;
      cell.penalty = penalties[p].label();
      cell.n = checkpoints[c];
      for (std::size_t t = 0; t < trials; ++t) cell.add(outcomes[c][t][p]);
      report.cells.push_back(cell);
    }
  }
  return report;
}

/// Each path is one growing sample; checkpoint n sees its first n observations.
inline ExperimentReport consistency_path_experiment(const GeneratorSpec& spec,
                                                    const std::vector<PenaltySequence>& penalties,
                                                    const std::vector<std::size_t>& n_grid, std::size_t paths,
                                                    const ExperimentOptions& opts = {}) {
  detail::check_run_inputs(penalties, n_grid, paths, "paths");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw Error(Errc::ConfigError, "checkpoint grid must be strictly increasing");
  }
  ExperimentReport report;
  report.experiment = "consistency_path";
  report.seed = spec.seed();
  report.checkpoints = n_grid;

  const std::size_t n_max = n_grid.back();
  std::vector<std::vector<std::vector<Outcome>>> outcomes(paths);  // [path][checkpoint][penalty]
  parallel_for(paths, opts.threads, [&](std::size_t p) {
    const auto path_spec = spec.with_seed(stream_key(spec.seed(), {kPathStream, p}));
    auto& mine = outcomes[p];
    if (spec.is_lr()) {
      const auto full = generate_lr(path_spec, n_max);
      for (std::size_t n : n_grid) {
        const auto ds = full.prefix(n);
        mine.push_back(detail::judge_sample(spec, &ds, nullptr, penalties, opts));
      }
    } else {
      const auto full = generate_ar(path_spec, n_max);
      for (std::size_t n : n_grid) {
        const auto series = full.prefix(n);
        mine.push_back(detail::judge_sample(spec, nullptr, &series, penalties, opts));
      }
    }
  });

  for (std::size_t q = 0; q < penalties.size(); ++q) {
    for (std::size_t c = 0; c < n_grid.size(); ++c) {
      CellRecord cell;
      cell.penalty = penalties[q].label();
      cell.n = n_grid[c];
      for (std::size_t p = 0; p < paths; ++p) cell.add(outcomes[p][c][q]);
      report.cells.push_back(cell);
    }
    for (std::size_t p = 0; p < paths; ++p) {
      PathLog log;
      log.penalty = penalties[q].label();
      log.path = p;
      for (std::size_t c = 0; c < n_grid.size(); ++c) {
        const bool wrong = outcomes[p][c][q] != Outcome::Correct;
        log.wrong.push_back(wrong ? 1 : 0);
        if (wrong) log.last_error_n = n_grid[c];
      }
      report.paths.push_back(std::move(log));
    }
  }
  return report;
}

/// The true subset plus the first `dk` regressors outside it.
inline Subset lil_probe_subset(const LrModel& model, int dk) {
  Subset probe = model.truth;
  for (std::size_t j = 0; j < model.m && probe.size() < model.truth.size() + static_cast<std::size_t>(dk); ++j) {
    if (!std::binary_search(model.truth.begin(), model.truth.end(), j)) probe.push_back(j);
  }
  if (probe.size() != model.truth.size() + static_cast<std::size_t>(dk)) {
    throw Error(Errc::ConfigError, "model has too few regressors outside the true subset for this dk");
  }
  std::sort(probe.begin(), probe.end());
  return probe;
}

/// Along growing paths, compares (S_p - S_q) / (S_p / n) for the true subset
/// and a superset with dk extra regressors against dk ln ln n.
inline ExperimentReport lil_experiment(const GeneratorSpec& spec, int dk, const std::vector<std::size_t>& n_grid,
                                       std::size_t paths, const ExperimentOptions& opts = {}) {
  if (!spec.is_lr()) throw Error(Errc::ConfigError, "lil experiment needs a regression model");
  if (dk < 1) throw Error(Errc::ConfigError, "dk must be >= 1");
  if (paths < 1) throw Error(Errc::ConfigError, "paths must be >= 1");
  if (n_grid.empty()) throw Error(Errc::ConfigError, "at least one checkpoint is required");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw Error(Errc::ConfigError, "checkpoint grid must be strictly increasing");
  }
  const auto& model = spec.lr_model();
  const Subset probe = lil_probe_subset(model, dk);
  if (n_grid.front() < 3 || n_grid.front() <= probe.size()) {
    throw Error(Errc::ConfigError, "checkpoints must be >= 3 and exceed the probe model size");
  }

  ExperimentReport report;
  report.experiment = "lil";
  report.seed = spec.seed();
  report.checkpoints = n_grid;
  report.lil_paths.resize(paths);
  parallel_for(paths, opts.threads, [&](std::size_t p) {
    const auto path_spec = spec.with_seed(stream_key(spec.seed(), {kPathStream, p}));
    const auto full = generate_lr(path_spec, n_grid.back());
    auto& log = report.lil_paths[p];
    log.path = p;
    for (std::size_t n : n_grid) {
      const double stat = delta_rss_statistic(full.prefix(n), model.truth, probe);
      log.statistic.push_back(stat);
      log.exceeded.push_back(stat > lil_band(static_cast<double>(n), dk) ? 1 : 0);
    }
  });
  for (std::size_t c = 0; c < n_grid.size(); ++c) {
    LilCell cell{n_grid[c], dk, lil_band(static_cast<double>(n_grid[c]), dk), paths, 0};
    for (const auto& log : report.lil_paths) cell.exceedances += log.exceeded[c];
    report.lil_cells.push_back(cell);
  }
  return report;
}

}  // namespace hqlab
