#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "adarem/config.hpp"
#include "adarem/errors.hpp"
#include "adarem/runner.hpp"
#include "adarem/schedule.hpp"

using namespace adarem;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("adarem_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small(const std::string& opt, const fs::path& out) {
  json j = {{"problem", {{"kind", "logistic"}, {"dim", 8}, {"samples", 128}, {"seed", 3}}},
            {"optimizer", {{"kind", opt}}},
            {"schedule", {{"kind", "cosine"}, {"total_steps", 60}, {"epochs", 3}}},
            {"metrics", {{"trajectory", true}}},
            {"output_dir", out.string()},
            {"seed", 5}};
  if (opt == "adam") j["schedule"]["base_lr"] = 0.01;
  return config_from_json(j);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ADAREM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

}  // namespace

TEST_CASE("schedule examples") {
  ScheduleSpec s;
  s.base_lr = 0.4;
  CHECK(schedule_lr(s, 0, 100) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(schedule_lr(s, 50, 100) == doctest::Approx(0.2).epsilon(1e-15));
  s.kind = ScheduleKind::inv_sqrt;
  CHECK(schedule_lr(s, 3, 100) == doctest::Approx(0.2).epsilon(1e-15));
  s.kind = ScheduleKind::constant;
  CHECK(schedule_lr(s, 99, 100) == 0.4);
  CHECK_THROWS_AS(schedule_lr(s, 100, 100), DomainError);
  CHECK_THROWS_AS(schedule_kind_from_string("step"), ConfigError);
}

TEST_CASE("config defaults and round trip") {
  for (const char* opt : {"sgd", "sgdm", "adam", "adamw", "rmsprop", "adabound", "adarem", "adarem_s"}) {
    const auto cfg = small(opt, "out");
    const auto back = config_from_json(config_to_json(cfg));
    INFO(opt);
    CHECK(back == cfg);
    CHECK(config_to_json(back) == config_to_json(cfg));
  }
  const auto def = config_from_json(json::object());
  CHECK(def.optimizer.kind == OptimizerKind::adarem);
  CHECK(def.schedule.base_lr == 0.4);
  CHECK(def.optimizer.lambda == 0.999);
  CHECK(def.optimizer.weight_decay == 3e-4);
  CHECK(default_base_lr(OptimizerKind::adam) == 0.004);
  CHECK(default_base_lr(OptimizerKind::rmsprop) == 0.0001);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config_from_json({{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"optimizer", {{"kind", "lion"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"optimizer", {{"kind", "sgd"}, {"lambda", 0.9}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"schedule", {{"total_steps", 0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"schedule", {{"kind", "slr"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"optimizer", {{"kind", "adarem"}, {"lambda", 1.0}}}}), ConfigError);
}

TEST_CASE("run writes the documented outputs") {
  const auto dir = scratch("run");
  const auto s = run(small("adarem", dir));
  REQUIRE(s.ok());
  CHECK(s.steps_completed == 60);
  std::ifstream csv(dir / "steps.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == kStepCsvHeader);
  int rows = 0;
  std::string line, last;
  while (std::getline(csv, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 60);
  CHECK(std::stod(last.substr(last.find(',') + 1)) == s.final_loss);
  CHECK(s.epoch_losses.size() == 3);
  REQUIRE(s.q);
  CHECK(*s.q >= 1.0);

  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(config_from_json(summary.at("config")) == small("adarem", dir));
  CHECK(summary.at("version") == kVersion);
  CHECK(fs::exists(dir / "trajectory.json"));
}

TEST_CASE("runs are deterministic") {
  for (const char* opt : {"adarem", "sgdm", "adam", "adarem_s"}) {
    const auto a = scratch(std::string("det_a_") + opt);
    const auto b = scratch(std::string("det_b_") + opt);
    run(small(opt, a));
    run(small(opt, b));
    INFO(opt);
    CHECK(slurp(a / "steps.csv") == slurp(b / "steps.csv"));
    CHECK(slurp(a / "trajectory.json") == slurp(b / "trajectory.json"));
  }
}

TEST_CASE("first AdaRem step equals the SGD step") {
  auto ada = small("adarem", scratch("first_ada"));
  auto sgd = small("sgd", scratch("first_sgd"));
  for (auto* c : {&ada, &sgd}) {
    c->schedule.total_steps = 1;
    c->schedule.epochs = 1;
    c->optimizer.weight_decay = 0;
  }
  run(ada);
  run(sgd);
  const auto ta = json::parse(slurp(fs::path(ada.output_dir) / "trajectory.json"));
  const auto ts = json::parse(slurp(fs::path(sgd.output_dir) / "trajectory.json"));
  CHECK(ta.at("end") == ts.at("end"));
}

TEST_CASE("threshold is blank when unreached") {
  auto c = small("sgd", scratch("thresh"));
  c.metrics.loss_threshold = -1.0;
  const auto s = run(c);
  CHECK_FALSE(s.steps_to_threshold);
  CHECK(s.to_json().at("steps_to_threshold").is_null());
  c.metrics.loss_threshold = 10.0;
  CHECK(run(c).steps_to_threshold == std::size_t{0});  // CSV step index
}

TEST_CASE("numeric failure keeps partial output") {
  auto c = small("sgd", scratch("blowup"));
  c.problem.kind = ProblemKind::quadratic;
  c.problem.dim = 4;
  c.schedule.kind = ScheduleKind::constant;
  c.schedule.base_lr = 1e3;
  c.schedule.total_steps = 500;
  c.init.kind = InitKind::uniform;
  const auto s = run(c);
  REQUIRE_FALSE(s.ok());
  CHECK(s.steps_completed < 500);
  const auto csv = slurp(fs::path(c.output_dir) / "steps.csv");
  CHECK(csv.rfind(kStepCsvHeader, 0) == 0);
}

TEST_CASE("compare tabulates one row per config") {
  const auto dir = scratch("compare");
  std::vector<RunConfig> cfgs{small("adarem", dir), small("sgdm", dir), small("adam", dir)};
  const auto rows = compare(cfgs, dir);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].problem_hash == rows[1].problem_hash);
  CHECK(rows[1].problem_hash == rows[2].problem_hash);
  CHECK(rows[2].optimizer == "adam");
  CHECK(fs::exists(dir / "comparison.csv"));
  CHECK(fs::exists(dir / "comparison.json"));

  auto other = small("sgd", dir);
  other.problem.seed = 99;
  cfgs.push_back(other);
  CHECK_THROWS_AS(compare(cfgs, dir), ConfigError);
}

TEST_CASE("verify reports the bound") {
  const json j = {{"problem", {{"kind", "quadratic"}, {"dim", 10}, {"seed", 1}}},
                  {"optimizer", {{"kind", "adarem"}, {"lambda", 0.9}, {"weight_decay", 0.0}}},
                  {"schedule", {{"kind", "inv_sqrt"}, {"base_lr", 0.1}, {"total_steps", 2000}}},
                  {"feasible", {{"kind", "box"}, {"half_width", 1.0}}}};
  const auto rep = verify(config_from_json(j));
  CHECK(rep.result.holds());
  const auto out = rep.to_json();
  for (const char* key : {"R_T", "bound", "margin", "T", "config_hash"}) CHECK(out.contains(key));

  auto bad = j;
  bad["schedule"]["kind"] = "cosine";
  CHECK_THROWS_AS(verify(config_from_json(bad)), PreconditionError);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  write(dir / "ok.json", config_to_json(small("adarem", dir / "ok")));
  CHECK(cli("run --config " + (dir / "ok.json").string() + " --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "steps.csv"));
  CHECK(cli("run --config " + (dir / "ok.json").string() + " --out " + (dir / "ok2").string() +
            " --seed 5") == 0);
  CHECK(slurp(dir / "ok" / "steps.csv") == slurp(dir / "ok2" / "steps.csv"));

  write(dir / "bad.json", json{{"optimizer", {{"kind", "adarem"}, {"colour", 1}}}});
  CHECK(cli("run --config " + (dir / "bad.json").string()) == 2);
  CHECK(cli("run --config " + (dir / "missing.json").string()) == 2);

  auto blow = small("sgd", dir / "blow");
  blow.problem.kind = ProblemKind::quadratic;
  blow.problem.dim = 4;
  blow.schedule.kind = ScheduleKind::constant;
  blow.schedule.base_lr = 1e3;
  blow.schedule.total_steps = 500;
  blow.init.kind = InitKind::uniform;
  write(dir / "blow.json", config_to_json(blow));
  CHECK(cli("run --config " + (dir / "blow.json").string()) == 3);

  write(dir / "verify.json",
        json{{"problem", {{"kind", "quadratic"}, {"dim", 4}, {"seed", 1}}},
             {"optimizer", {{"kind", "adarem"}, {"lambda", 0.9}, {"weight_decay", 0.0}}},
             {"schedule", {{"kind", "inv_sqrt"}, {"base_lr", 0.1}, {"total_steps", 500}}},
             {"feasible", {{"kind", "box"}}}});
  CHECK(cli("verify --config " + (dir / "verify.json").string() + " --out " + (dir / "v").string()) == 0);
  CHECK(fs::exists(dir / "v" / "verify.json"));

  write(dir / "c2.json", config_to_json(small("sgdm", dir / "c2")));
  CHECK(cli("compare --configs " + (dir / "ok.json").string() + " " + (dir / "c2.json").string() +
            " --out " + (dir / "cmp").string()) == 0);
  CHECK(fs::exists(dir / "cmp" / "comparison.csv"));
}
