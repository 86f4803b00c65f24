// hqlab: batch frontend for information-criterion model selection.
//
// Exit codes: 0 ok, 2 usage or data error, 3 internal numeric failure.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hqlab/hqlab.hpp"
#include "json.hpp"

namespace {

using hqlab::Errc;
using hqlab::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::SingularSystem:
    case Errc::NonpositiveVariance:
    case Errc::DegenerateFit:
    case Errc::DegenerateVariance:
      return kExitInternal;
    default:
      return kExitUsage;
  }
}

struct OutputOptions {
  std::string format = "json";
  std::string path;  // empty: stdout
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--output", out.path, "Output file (default: stdout)");
}

void emit(const OutputOptions& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw hqlab::Error(Errc::InvalidArgument, "cannot write '" + out.path + "'");
  f << text;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hqlab::Error(Errc::InvalidArgument, "cannot open '" + path + "'");
  return in;
}

ordered_json subset_json(const hqlab::Subset& s) {
  auto arr = ordered_json::array();
  for (auto j : s) arr.push_back(j + 1);
  return arr;
}

ordered_json real_json(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

double round_sig(double v, int digits) { return std::stod(hqlab::format_real(v, digits)); }

unsigned worker_threads() {
  if (const char* env = std::getenv("HQLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw hqlab::Error(Errc::InvalidArgument, "HQLAB_THREADS must be a positive integer");
  }
  return 0;
}

// --- select-lr --------------------------------------------------------------

struct SelectLrArgs {
  std::string dataset;
  std::string penalty = "bic";
  std::string mode = "exhaustive";
  OutputOptions out;
};

void run_select_lr(const SelectLrArgs& a) {
  const auto pen = hqlab::PenaltySequence::parse(a.penalty);
  auto in = open_input(a.dataset);
  const auto ds = hqlab::read_dataset_csv(in);
  const auto mode = a.mode == "nested" ? hqlab::SearchMode::Nested : hqlab::SearchMode::Exhaustive;
  auto result = hqlab::select_subset(ds, pen, mode);
  std::stable_sort(result.scores.begin(), result.scores.end(), hqlab::ranks_before);

  if (a.out.format == "csv") {
    std::ostringstream os;
    os << "subset,k,rss,criterion,chosen\n";
    for (const auto& s : result.scores) {
      os << '"' << hqlab::format_subset(s.subset) << "\"," << s.k << ',' << hqlab::format_real(s.rss) << ','
         << (std::isinf(s.criterion) ? std::string("-inf") : hqlab::format_real(s.criterion)) << ','
         << (s.subset == result.chosen ? 1 : 0) << '\n';
    }
    emit(a.out, os.str());
    return;
  }
  ordered_json doc;
  doc["n"] = result.n;
  doc["m"] = ds.m();
  doc["penalty"] = result.penalty;
  doc["d_n"] = result.d_n;
  doc["mode"] = a.mode;
  doc["chosen"] = subset_json(result.chosen);
  auto& scores = doc["scores"] = ordered_json::array();
  for (const auto& s : result.scores) {
    scores.push_back({{"subset", subset_json(s.subset)}, {"k", s.k}, {"rss", s.rss}, {"criterion", real_json(s.criterion)}});
  }
  emit(a.out, doc.dump(2) + "\n");
}

// --- select-ar --------------------------------------------------------------

struct SelectArArgs {
  std::string series;
  std::string penalty = "bic";
  std::size_t kmax = 10;
  OutputOptions out;
};

void run_select_ar(const SelectArArgs& a) {
  const auto pen = hqlab::PenaltySequence::parse(a.penalty);
  auto in = open_input(a.series);
  const auto series = hqlab::read_series(in);
  const auto result = hqlab::select_ar_order(series, pen, a.kmax);
  auto ranked = result.scores;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.criterion != y.criterion ? x.criterion < y.criterion : x.k < y.k;
  });

  if (a.out.format == "csv") {
    std::ostringstream os;
    os << "k,sigma2,reflection,criterion,chosen\n";
    for (const auto& s : ranked) {
      os << s.k << ',' << hqlab::format_real(s.sigma2) << ',' << hqlab::format_real(s.reflection) << ','
         << hqlab::format_real(s.criterion) << ',' << (s.k == result.chosen ? 1 : 0) << '\n';
    }
    emit(a.out, os.str());
    return;
  }
  ordered_json doc;
  doc["n"] = result.n;
  doc["kmax"] = a.kmax;
  doc["penalty"] = result.penalty;
  doc["d_n"] = result.d_n;
  doc["chosen_order"] = result.chosen;
  auto& scores = doc["scores"] = ordered_json::array();
  for (const auto& s : ranked) {
    scores.push_back({{"k", s.k}, {"sigma2", s.sigma2}, {"reflection", s.reflection}, {"criterion", s.criterion}});
  }
  emit(a.out, doc.dump(2) + "\n");
}

// --- overest-prob -----------------------------------------------------------

struct OverestArgs {
  std::uint64_t n = 0;
  int dk = 1;
  std::string penalty = "bic";
  OutputOptions out;
};

void run_overest(const OverestArgs& a) {
  if (a.n < 1) throw hqlab::Error(Errc::InvalidArgument, "--n must be >= 1");
  if (a.dk < 1) throw hqlab::Error(Errc::InvalidArgument, "--dk must be >= 1");
  const auto pen = hqlab::PenaltySequence::parse(a.penalty);
  const hqlab::OverestimationQuery q{static_cast<double>(a.n), a.dk, pen.evaluate(static_cast<double>(a.n))};
  const double t = hqlab::threshold(q);
  const auto b = hqlab::threshold_bounds(q);
  const double p = hqlab::overestimation_probability(q);

  if (a.out.format == "csv") {
    std::ostringstream os;
    os << "n,dk,penalty,d_n,threshold,lower_bound,upper_bound,probability\n"
       << a.n << ',' << a.dk << ',' << pen.label() << ',' << hqlab::format_real(q.d_n, 10) << ','
       << hqlab::format_real(t, 10) << ',' << hqlab::format_real(b.lower, 10) << ',' << hqlab::format_real(b.upper, 10)
       << ',' << hqlab::format_real(p, 10) << '\n';
    emit(a.out, os.str());
    return;
  }
  ordered_json doc;
  doc["n"] = a.n;
  doc["dk"] = a.dk;
  doc["penalty"] = pen.label();
  doc["d_n"] = round_sig(q.d_n, 10);
  doc["threshold"] = round_sig(t, 10);
  doc["lower_bound"] = round_sig(b.lower, 10);
  doc["upper_bound"] = round_sig(b.upper, 10);
  doc["probability"] = round_sig(p, 10);
  emit(a.out, doc.dump(2) + "\n");
}

// --- simulate / lil-check ---------------------------------------------------

void write_report(const hqlab::ExperimentReport& report, const OutputOptions& out) {
  for (const auto& line : hqlab::report_summary(report)) std::cerr << line << '\n';
  emit(out, out.format == "csv" ? hqlab::report_to_csv(report) : hqlab::report_to_json(report).dump(2) + "\n");
}

struct SimulateArgs {
  std::string config;
  OutputOptions out;
};

void run_simulate(const SimulateArgs& a) {
  auto in = open_input(a.config);
  std::ostringstream text;
  text << in.rdbuf();
  const auto cfg = hqlab::parse_experiment_config(text.str());
  write_report(hqlab::run_experiment(cfg, worker_threads()), a.out);
}

struct LilArgs {
  int dk = 1;
  std::vector<std::size_t> grid = {1000, 10000, 100000};
  std::size_t paths = 100;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  double sigma = 1.0;
  std::string noise = "gaussian";
  OutputOptions out;
};

void run_lil(const LilArgs& a) {
  if (a.dk < 1) throw hqlab::Error(Errc::InvalidArgument, "--dk must be >= 1");
  const auto spec = hqlab::GeneratorSpec::lr(1 + static_cast<std::size_t>(a.dk), {0}, {a.alpha}, a.sigma, a.seed,
                                             hqlab::parse_noise(a.noise));
  hqlab::ExperimentOptions opts;
  opts.threads = worker_threads();
  write_report(hqlab::lil_experiment(spec, a.dk, a.grid, a.paths, opts), a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hqlab: information-criterion model selection laboratory"};
  app.require_subcommand(1);

  SelectLrArgs lr;
  auto* cmd_lr = app.add_subcommand("select-lr", "Select a regressor subset from a CSV dataset");
  cmd_lr->add_option("dataset", lr.dataset, "CSV with header y,x1,...,xm")->required();
  cmd_lr->add_option("--penalty", lr.penalty, "aic | bic | hq:<c> | const:<a> | custom:<path>");
  cmd_lr->add_option("--mode", lr.mode, "Candidate set")->check(CLI::IsMember({"exhaustive", "nested"}));
  add_output_flags(cmd_lr, lr.out);

  SelectArArgs ar;
  auto* cmd_ar = app.add_subcommand("select-ar", "Estimate an autoregressive order from a series file");
  cmd_ar->add_option("series", ar.series, "One real per line")->required();
  cmd_ar->add_option("--penalty", ar.penalty, "aic | bic | hq:<c> | const:<a> | custom:<path>");
  cmd_ar->add_option("--kmax", ar.kmax, "Largest order considered");
  add_output_flags(cmd_ar, ar.out);

  OverestArgs ov;
  auto* cmd_ov = app.add_subcommand("overest-prob", "Asymptotic probability that a superset beats the true model");
  cmd_ov->add_option("--n", ov.n, "Sample size")->required();
  cmd_ov->add_option("--dk", ov.dk, "Extra parameters in the superset");
  cmd_ov->add_option("--penalty", ov.penalty, "aic | bic | hq:<c> | const:<a> | custom:<path>");
  add_output_flags(cmd_ov, ov.out);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment described by a JSON config");
  cmd_sim->add_option("config", sim.config, "Experiment config (JSON)")->required();
  add_output_flags(cmd_sim, sim.out);

  LilArgs lil;
  auto* cmd_lil = app.add_subcommand("lil-check", "Iterated-logarithm band check along growing regression paths");
  cmd_lil->add_option("--dk", lil.dk, "Extra regressors in the probe model");
  cmd_lil->add_option("--grid", lil.grid, "Checkpoints (increasing)")->delimiter(',');
  cmd_lil->add_option("--paths", lil.paths, "Number of growing paths");
  cmd_lil->add_option("--seed", lil.seed, "Base seed");
  cmd_lil->add_option("--alpha", lil.alpha, "Coefficient of the single true regressor");
  cmd_lil->add_option("--sigma", lil.sigma, "Noise standard deviation");
  cmd_lil->add_option("--noise", lil.noise, "Noise distribution")
      ->check(CLI::IsMember({"gaussian", "uniform", "laplace", "rademacher"}));
  add_output_flags(cmd_lil, lil.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hqlab: error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (cmd_lr->parsed()) run_select_lr(lr);
    else if (cmd_ar->parsed()) run_select_ar(ar);
    else if (cmd_ov->parsed()) run_overest(ov);
    else if (cmd_sim->parsed()) run_simulate(sim);
    else if (cmd_lil->parsed()) run_lil(lil);
  } catch (const hqlab::Error& e) {
    std::cerr << "hqlab: error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hqlab: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
