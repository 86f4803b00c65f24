#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "hqlab/report.hpp"

using hqlab::Errc;

namespace {

const char* kErrorRate = R"({
  "experiment": "error_rate",
  "seed": 11,
  "model": {"kind": "lr", "m": 2, "truth": [1], "alpha": [1.0], "sigma": 1.0},
  "penalties": ["aic", "bic"],
  "checkpoints": [50, 200],
  "trials": 30
})";

const char* kPaths = R"({
  "experiment": "consistency_path",
  "model": {"kind": "lr", "m": 3, "truth": [1], "alpha": [1.0]},
  "penalties": ["hq:1.5"],
  "checkpoints": [20, 80, 320],
  "paths": 10
})";

const char* kLil = R"({
  "experiment": "lil",
  "seed": 3,
  "model": {"kind": "lr", "m": 2, "truth": [1], "alpha": [1.0]},
  "checkpoints": [100, 1000],
  "paths": 5,
  "dk": 1
})";

Errc config_error(const std::string& text) {
  try {
    hqlab::parse_experiment_config(text);
  } catch (const hqlab::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected failure for " << text;
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Config, ParsesErrorRate) {
  const auto cfg = hqlab::parse_experiment_config(kErrorRate);
  EXPECT_EQ(cfg.experiment, "error_rate");
  EXPECT_EQ(cfg.spec.seed(), 11u);
  EXPECT_EQ(cfg.spec.lr_model().truth, (hqlab::Subset{0}));
  ASSERT_EQ(cfg.penalties.size(), 2u);
  EXPECT_EQ(cfg.penalties[1].label(), "bic");
  EXPECT_EQ(cfg.checkpoints, (std::vector<std::size_t>{50, 200}));
  EXPECT_EQ(cfg.trials, 30u);
}

TEST(Config, ParsesArModel) {
  const auto cfg = hqlab::parse_experiment_config(
      R"({"experiment":"error_rate","model":{"kind":"ar","coeffs":[0.5]},"penalties":["bic"],"checkpoints":[500],"trials":2,"kmax":3})");
  EXPECT_FALSE(cfg.spec.is_lr());
  EXPECT_EQ(cfg.options.k_max, 3u);
}

TEST(Config, Rejections) {
  const std::string model = R"("model":{"kind":"lr","m":2,"truth":[1],"alpha":[1]})";
  EXPECT_EQ(config_error("not json"), Errc::ConfigError);
  EXPECT_EQ(config_error("[]"), Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"other",)" + model + R"(,"checkpoints":[10]})"), Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate",)" + model + R"(,"penalties":["hq:"],"checkpoints":[10],"trials":1})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate",)" + model + R"(,"penalties":["bic"],"checkpoints":[10],"trials":0})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate",)" + model + R"(,"penalties":["bic"],"checkpoints":[],"trials":1})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate",)" + model + R"(,"penalties":["bic"],"checkpoints":[10],"trials":1,"bogus":1})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate",)" + model + R"(,"penalties":["bic"],"checkpoints":[10]})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate","model":{"kind":"ar","coeffs":[1.2]},"penalties":["bic"],"checkpoints":[10],"trials":1,"kmax":2})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate","model":{"kind":"ar","coeffs":[0.2]},"penalties":["bic"],"checkpoints":[10],"trials":1})"),
            Errc::ConfigError);
  EXPECT_EQ(config_error(R"({"experiment":"error_rate","model":{"kind":"lr","m":2,"truth":[0],"alpha":[1]},"penalties":["bic"],"checkpoints":[10],"trials":1})"),
            Errc::ConfigError);
}

TEST(Report, ErrorRateJsonSchema) {
  const auto cfg = hqlab::parse_experiment_config(kErrorRate);
  const auto doc = hqlab::report_to_json(hqlab::run_experiment(cfg));
  EXPECT_EQ(doc["schema"], "hqlab-report/1");
  EXPECT_EQ(doc["experiment"], "error_rate");
  EXPECT_EQ(doc["seed"], 11);
  EXPECT_EQ(doc["config"]["trials"], 30);
  ASSERT_EQ(doc["cells"].size(), 4u);
  EXPECT_EQ(doc["cells"][0]["penalty"], "aic");
  EXPECT_EQ(doc["cells"][0]["n"], 50);
  for (const auto& c : doc["cells"]) {
    EXPECT_EQ(c["correct"].get<int>() + c["overestimate"].get<int>() + c["underestimate"].get<int>(), 30);
  }
}

TEST(Report, CsvRows) {
  const auto r = hqlab::run_experiment(hqlab::parse_experiment_config(kErrorRate));
  const auto csv = hqlab::report_to_csv(r);
  EXPECT_EQ(csv.rfind("experiment,penalty,n,trials,correct,overestimate,underestimate\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("\nerror_rate,bic,200,30,"), std::string::npos);
}

TEST(Report, ConsistencyPathCarriesPathLogs) {
  const auto doc = hqlab::report_to_json(hqlab::run_experiment(hqlab::parse_experiment_config(kPaths)));
  ASSERT_EQ(doc["paths"].size(), 10u);
  EXPECT_EQ(doc["paths"][0]["wrong"].size(), 3u);
  std::size_t total = 0;
  for (const auto& row : doc["last_error_distribution"]["hq:1.5"]) total += row["paths"].get<std::size_t>();
  EXPECT_EQ(total, 10u);
}

TEST(Report, LilLayout) {
  const auto r = hqlab::run_experiment(hqlab::parse_experiment_config(kLil));
  const auto doc = hqlab::report_to_json(r);
  ASSERT_EQ(doc["lil_cells"].size(), 2u);
  EXPECT_FALSE(doc.contains("cells"));
  EXPECT_EQ(doc["lil_paths"][0]["statistic"].size(), 2u);
  const auto csv = hqlab::report_to_csv(r);
  EXPECT_EQ(csv.rfind("experiment,dk,n,band,paths,exceedances,frequency\n", 0), 0u);
  EXPECT_EQ(hqlab::report_summary(r).size(), 2u);
}

TEST(Report, ByteIdenticalAcrossRunsAndThreadCounts) {
  for (const char* text : {kErrorRate, kPaths, kLil}) {
    const auto cfg = hqlab::parse_experiment_config(text);
    const auto a = hqlab::report_to_json(hqlab::run_experiment(cfg, 1)).dump(2);
    const auto b = hqlab::report_to_json(hqlab::run_experiment(cfg, 4)).dump(2);
    const auto c = hqlab::report_to_json(hqlab::run_experiment(cfg, 4)).dump(2);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b, c);
  }
}

TEST(Report, FormatReal) {
  EXPECT_EQ(hqlab::format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(hqlab::format_real(2.0), "2");
  EXPECT_EQ(std::stod(hqlab::format_real(1.0 / 3.0)), 1.0 / 3.0);
}
