#include <catch_amalgamated.hpp>

#include "llmmom/config.hpp"
#include "llmmom/error.hpp"
#include "support.hpp"

using namespace llmmom;

TEST_CASE("defaults apply when the config is empty") {
  const auto cfg = RunConfig::from_json("{}");
  CHECK(cfg.backend == BackendKind::Mock);
  CHECK(cfg.cost_bps == 2.0);
  CHECK(cfg.live.auth_env == "OPENAI_API_KEY");
  CHECK(cfg.split.test_from == Date(2024, 1, 1));
  CHECK(cfg.effective_threads() >= 1);
}

TEST_CASE("a full config round-trips") {
  const std::string text = R"({
    "paths": {"returns": "data/returns.csv", "risk_free": "/abs/rf.csv", "output": "out"},
    "backend": {"kind": "cache-only", "model": "m1", "auth_env": "MY_TOKEN", "retries": 5,
                "max_in_flight": 2, "requests_per_minute": 60},
    "split": {"validation_from": "2020-01-01", "validation_to": "2020-12-31",
              "test_from": "2021-01-01", "test_to": "2021-06-30"},
    "theta": {"tau": "weekly", "k": 5, "m": 75, "pi": "advanced", "c": false, "w": "equal", "eta": 3.75},
    "cost_bps": 5, "threads": 3
  })";
  const auto cfg = RunConfig::from_json(text, "/base");
  CHECK(cfg.paths.returns == "/base/data/returns.csv");
  CHECK(cfg.paths.risk_free == "/abs/rf.csv");
  CHECK(cfg.backend == BackendKind::CacheOnly);
  CHECK(cfg.live.auth_env == "MY_TOKEN");
  CHECK(cfg.scorer.retries == 5);
  CHECK(cfg.scorer.max_in_flight == 2);
  CHECK(cfg.split.test_to == Date(2021, 6, 30));
  CHECK(cfg.theta.tau == Frequency::Weekly);
  CHECK(cfg.theta.pi == PromptVariant::Advanced);
  CHECK_FALSE(cfg.theta.cap);
  CHECK(cfg.theta.w == WeightScheme::Equal);
  CHECK(cfg.theta.eta == 3.75);
  CHECK(cfg.effective_threads() == 3);

  const auto again = RunConfig::from_json(cfg.to_json());
  CHECK(again.theta == cfg.theta);
  CHECK(again.paths.returns == cfg.paths.returns);
  CHECK(again.cost_bps == 5.0);
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      RunConfig::from_json(text);
    } catch (const PreconditionError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"backend": {"token": "x"}})").find("backend.token") != std::string::npos);
  CHECK(message(R"({"theta": {"k": "five"}})").find("theta.k") != std::string::npos);
  CHECK(message(R"({"backend": {"kind": "remote"}})").find("remote") != std::string::npos);
  CHECK(message(R"({"split": {"test_from": "2019-01-01"}})") != "no error");
  CHECK(message("not json").find("JSON") != std::string::npos);
  CHECK(message(R"({"cost_bps": -1})").find("cost_bps") != std::string::npos);
}

TEST_CASE("theta files") {
  HyperParams t;
  t.tau = Frequency::Weekly;
  t.eta = 1.25;
  const auto text = theta_to_json(t);
  CHECK(theta_from_json(text) == t);
  CHECK(theta_from_json(R"({"theta": )" + text + "}") == t);
  HyperParams bad;
  bad.eta = 0.0;
  CHECK_THROWS_AS(validate_theta(bad), PreconditionError);
}

TEST_CASE("load resolves paths against the file's directory") {
  testing::TempDir dir;
  testing::write_file(dir / "run.json", R"({"paths": {"news": "n.jsonl"}})");
  const auto cfg = RunConfig::load(dir / "run.json");
  CHECK(cfg.paths.news == dir.path() / "n.jsonl");
  CHECK_THROWS(RunConfig::load(dir / "missing.json"));
}
