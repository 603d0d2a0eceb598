#include "adarem/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "adarem/errors.hpp"

namespace adarem {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::string read_string(const json& j, const char* key, const std::string& fallback,
                        const std::string& where) {
  std::string s = fallback;
  read(j, key, s, where);
  return s;
}

ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "quadratic") return ProblemKind::quadratic;
  if (s == "logistic") return ProblemKind::logistic;
  if (s == "scale_invariant_net") return ProblemKind::scale_invariant_net;
  throw ConfigError("unknown problem kind '" + s + "'");
}

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  static const std::pair<const char*, OptimizerKind> table[] = {
      {"sgd", OptimizerKind::sgd},         {"sgdm", OptimizerKind::sgdm},
      {"adam", OptimizerKind::adam},       {"adamw", OptimizerKind::adamw},
      {"rmsprop", OptimizerKind::rmsprop}, {"adabound", OptimizerKind::adabound},
      {"adarem", OptimizerKind::adarem},   {"adarem_s", OptimizerKind::adarem_s}};
  for (const auto& [name, kind] : table) {
    if (s == name) return kind;
  }
  throw ConfigError("unknown optimizer kind '" + s + "'");
}

std::string to_string(FeasibleKind k) { return k == FeasibleKind::box ? "box" : "unconstrained"; }

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::zeros: return "zeros";
    case InitKind::uniform: return "uniform";
    case InitKind::normal: return "normal";
  }
  return "zeros";
}

std::string to_string(LambdaCadence c) { return c == LambdaCadence::per_step ? "per_step" : "per_epoch"; }
std::string to_string(MaxScope s) { return s == MaxScope::global ? "global" : "per_group"; }

std::set<std::string> problem_keys(ProblemKind k) {
  switch (k) {
    case ProblemKind::quadratic: return {"kind", "dim", "seed", "center_bound"};
    case ProblemKind::logistic: return {"kind", "dim", "seed", "samples", "batch_size", "data_path"};
    case ProblemKind::scale_invariant_net:
      return {"kind", "hidden", "inputs", "seed", "samples", "batch_size"};
  }
  return {};
}

std::set<std::string> optimizer_keys(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::sgd: return {"kind", "weight_decay"};
    case OptimizerKind::sgdm: return {"kind", "momentum", "weight_decay"};
    case OptimizerKind::adam:
    case OptimizerKind::adamw: return {"kind", "beta1", "beta2", "epsilon", "weight_decay"};
    case OptimizerKind::adabound:
      return {"kind", "beta1", "beta2", "epsilon", "weight_decay", "final_lr"};
    case OptimizerKind::rmsprop: return {"kind", "beta2", "epsilon", "weight_decay"};
    case OptimizerKind::adarem:
      return {"kind", "beta", "lambda", "epsilon", "weight_decay", "lambda_cadence", "max_scope"};
    case OptimizerKind::adarem_s:
      return {"kind",         "beta",           "lambda",    "epsilon",
              "weight_decay", "lambda_cadence", "max_scope", "radius"};
  }
  return {};
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::logistic: return "logistic";
    case ProblemKind::scale_invariant_net: return "scale_invariant_net";
  }
  throw ConfigError("unknown problem kind");
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::sgdm: return "sgdm";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adamw: return "adamw";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::adabound: return "adabound";
    case OptimizerKind::adarem: return "adarem";
    case OptimizerKind::adarem_s: return "adarem_s";
  }
  throw ConfigError("unknown optimizer kind");
}

double default_base_lr(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::adam:
    case OptimizerKind::adamw:
    case OptimizerKind::adabound: return 0.004;
    case OptimizerKind::rmsprop: return 0.0001;
    default: return 0.4;
  }
}

OptimizerSpec OptimizerSpec::defaults(OptimizerKind kind) {
  OptimizerSpec s;
  s.kind = kind;
  switch (kind) {
    case OptimizerKind::sgd:
      s.momentum = 0.0;
      s.weight_decay = 1e-4;
      break;
    case OptimizerKind::sgdm:
    case OptimizerKind::adam:
    case OptimizerKind::adamw:
    case OptimizerKind::adabound:
      s.weight_decay = 1e-4;
      break;
    case OptimizerKind::rmsprop:
      s.beta2 = 0.99;
      s.weight_decay = 1e-4;
      break;
    case OptimizerKind::adarem:
      break;
    case OptimizerKind::adarem_s:
      s.weight_decay = 1e-4;
      break;
  }
  return s;
}

void RunConfig::validate() const {
  if (schedule.total_steps < 1) throw ConfigError("schedule.total_steps must be >= 1");
  if (schedule.epochs < 1 || schedule.epochs > schedule.total_steps) {
    throw ConfigError("schedule.epochs must lie in [1, total_steps]");
  }
  if (!(schedule.base_lr > 0.0)) throw ConfigError("schedule.base_lr must be positive");
  if (schedule.inner == ScheduleKind::slr) throw ConfigError("schedule.inner cannot be slr");
  if (schedule.kind == ScheduleKind::slr && optimizer.kind != OptimizerKind::adarem_s) {
    throw ConfigError("the slr schedule is only defined for adarem_s");
  }
  if (metrics.q_window_start >= schedule.total_steps) {
    throw ConfigError("metrics.q_window_start must be < total_steps");
  }
  if (!(metrics.min_displacement > 0.0)) throw ConfigError("metrics.min_displacement must be positive");
  if (feasible.kind == FeasibleKind::box && !(feasible.half_width > 0.0)) {
    throw ConfigError("feasible.half_width must be positive");
  }
  if (!(init.scale >= 0.0)) throw ConfigError("init.scale must be non-negative");

  switch (problem.kind) {
    case ProblemKind::quadratic:
      if (problem.dim < 1) throw ConfigError("problem.dim must be >= 1");
      if (!(problem.center_bound >= 0.0)) throw ConfigError("problem.center_bound must be >= 0");
      break;
    case ProblemKind::logistic:
      if (problem.data_path.empty() && (problem.dim < 1 || problem.samples < problem.dim)) {
        throw ConfigError("problem: logistic needs dim >= 1 and samples >= dim");
      }
      if (problem.batch_size < 1) throw ConfigError("problem.batch_size must be >= 1");
      break;
    case ProblemKind::scale_invariant_net:
      if (problem.hidden < 1 || problem.inputs < 1 || problem.samples < 1) {
        throw ConfigError("problem: scale_invariant_net needs hidden, inputs, samples >= 1");
      }
      if (problem.batch_size < 1) throw ConfigError("problem.batch_size must be >= 1");
      if (init.kind == InitKind::zeros || init.scale == 0.0) {
        throw ConfigError("scale_invariant_net needs a nonzero init");
      }
      break;
  }

  if (optimizer.kind == OptimizerKind::adarem || optimizer.kind == OptimizerKind::adarem_s) {
    adarem_config(*this).validate();
    if (optimizer.kind == OptimizerKind::adarem_s) {
      if (!(optimizer.radius > 0.0)) throw ConfigError("optimizer.radius must be positive");
      if (init.kind == InitKind::zeros || init.scale == 0.0) {
        throw ConfigError("adarem_s needs a nonzero init");
      }
    }
  } else {
    const auto kind = optimizer.kind == OptimizerKind::sgd ? BaselineKind::sgdm
                      : optimizer.kind == OptimizerKind::sgdm ? BaselineKind::sgdm
                      : optimizer.kind == OptimizerKind::adam ? BaselineKind::adam
                      : optimizer.kind == OptimizerKind::adamw ? BaselineKind::adamw
                      : optimizer.kind == OptimizerKind::rmsprop ? BaselineKind::rmsprop
                                                                 : BaselineKind::adabound;
    baseline_config(*this).validate(kind);
  }
}

AdaRemConfig adarem_config(const RunConfig& cfg) {
  AdaRemConfig a;
  a.base_lr = cfg.schedule.base_lr;
  a.beta = cfg.optimizer.beta;
  a.lambda = cfg.optimizer.lambda;
  a.epsilon = cfg.optimizer.epsilon;
  a.weight_decay = cfg.optimizer.weight_decay;
  a.lambda_cadence = cfg.optimizer.lambda_cadence;
  a.max_scope = cfg.optimizer.max_scope;
  return a;
}

BaselineConfig baseline_config(const RunConfig& cfg) {
  const auto& o = cfg.optimizer;
  BaselineConfig b;
  b.lr = cfg.schedule.base_lr;
  b.beta1 = (o.kind == OptimizerKind::sgd || o.kind == OptimizerKind::sgdm) ? o.momentum : o.beta1;
  b.beta2 = o.beta2;
  b.epsilon = o.epsilon;
  b.weight_decay = o.weight_decay;
  b.final_lr = o.final_lr;
  return b;
}

RunConfig config_from_json(const json& j) {
  check_keys(j, {"problem", "optimizer", "schedule", "feasible", "init", "metrics", "output_dir",
                 "seed"},
             "config");
  RunConfig cfg;

  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (!p.is_object()) throw ConfigError("problem: expected an object");
    cfg.problem.kind = problem_kind_from_string(read_string(p, "kind", "logistic", "problem"));
    check_keys(p, problem_keys(cfg.problem.kind), "problem");
    read(p, "dim", cfg.problem.dim, "problem");
    read(p, "seed", cfg.problem.seed, "problem");
    read(p, "samples", cfg.problem.samples, "problem");
    read(p, "batch_size", cfg.problem.batch_size, "problem");
    read(p, "center_bound", cfg.problem.center_bound, "problem");
    read(p, "hidden", cfg.problem.hidden, "problem");
    read(p, "inputs", cfg.problem.inputs, "problem");
    read(p, "data_path", cfg.problem.data_path, "problem");
  }

  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    if (!o.is_object()) throw ConfigError("optimizer: expected an object");
    const auto kind = optimizer_kind_from_string(read_string(o, "kind", "adarem", "optimizer"));
    cfg.optimizer = OptimizerSpec::defaults(kind);
    check_keys(o, optimizer_keys(kind), "optimizer");
    auto& s = cfg.optimizer;
    read(o, "beta", s.beta, "optimizer");
    read(o, "momentum", s.momentum, "optimizer");
    read(o, "beta1", s.beta1, "optimizer");
    read(o, "beta2", s.beta2, "optimizer");
    read(o, "epsilon", s.epsilon, "optimizer");
    read(o, "weight_decay", s.weight_decay, "optimizer");
    read(o, "lambda", s.lambda, "optimizer");
    read(o, "final_lr", s.final_lr, "optimizer");
    read(o, "radius", s.radius, "optimizer");
    const auto cadence = read_string(o, "lambda_cadence", to_string(s.lambda_cadence), "optimizer");
    if (cadence == "per_step") {
      s.lambda_cadence = LambdaCadence::per_step;
    } else if (cadence == "per_epoch") {
      s.lambda_cadence = LambdaCadence::per_epoch;
    } else {
      throw ConfigError("optimizer.lambda_cadence: unknown value '" + cadence + "'");
    }
    const auto scope = read_string(o, "max_scope", to_string(s.max_scope), "optimizer");
    if (scope == "global") {
      s.max_scope = MaxScope::global;
    } else if (scope == "per_group") {
      s.max_scope = MaxScope::per_group;
    } else {
      throw ConfigError("optimizer.max_scope: unknown value '" + scope + "'");
    }
  } else {
    cfg.optimizer = OptimizerSpec::defaults(OptimizerKind::adarem);
  }

  cfg.schedule.base_lr = default_base_lr(cfg.optimizer.kind);
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    check_keys(s, {"kind", "base_lr", "total_steps", "epochs", "inner"}, "schedule");
    cfg.schedule.kind = schedule_kind_from_string(read_string(s, "kind", "cosine", "schedule"));
    cfg.schedule.inner = schedule_kind_from_string(read_string(s, "inner", "constant", "schedule"));
    read(s, "base_lr", cfg.schedule.base_lr, "schedule");
    read(s, "total_steps", cfg.schedule.total_steps, "schedule");
    read(s, "epochs", cfg.schedule.epochs, "schedule");
  }

  if (j.contains("feasible")) {
    const auto& f = j.at("feasible");
    check_keys(f, {"kind", "half_width"}, "feasible");
    const auto kind = read_string(f, "kind", "unconstrained", "feasible");
    if (kind == "box") {
      cfg.feasible.kind = FeasibleKind::box;
    } else if (kind == "unconstrained") {
      cfg.feasible.kind = FeasibleKind::unconstrained;
    } else {
      throw ConfigError("feasible.kind: unknown value '" + kind + "'");
    }
    read(f, "half_width", cfg.feasible.half_width, "feasible");
  }

  if (cfg.problem.kind == ProblemKind::scale_invariant_net || cfg.optimizer.kind == OptimizerKind::adarem_s) {
    cfg.init.kind = InitKind::normal;
  }
  if (j.contains("init")) {
    const auto& i = j.at("init");
    check_keys(i, {"kind", "scale"}, "init");
    const auto kind = read_string(i, "kind", to_string(cfg.init.kind), "init");
    if (kind == "zeros") {
      cfg.init.kind = InitKind::zeros;
    } else if (kind == "uniform") {
      cfg.init.kind = InitKind::uniform;
    } else if (kind == "normal") {
      cfg.init.kind = InitKind::normal;
    } else {
      throw ConfigError("init.kind: unknown value '" + kind + "'");
    }
    read(i, "scale", cfg.init.scale, "init");
  }

  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    check_keys(m, {"record_q", "record_regret", "trajectory", "q_window_start", "min_displacement",
                   "loss_threshold"},
               "metrics");
    read(m, "record_q", cfg.metrics.record_q, "metrics");
    read(m, "record_regret", cfg.metrics.record_regret, "metrics");
    read(m, "trajectory", cfg.metrics.trajectory, "metrics");
    read(m, "q_window_start", cfg.metrics.q_window_start, "metrics");
    read(m, "min_displacement", cfg.metrics.min_displacement, "metrics");
    if (m.contains("loss_threshold") && !m.at("loss_threshold").is_null()) {
      double t = 0.0;
      read(m, "loss_threshold", t, "metrics");
      cfg.metrics.loss_threshold = t;
    }
  }

  read(j, "output_dir", cfg.output_dir, "config");
  read(j, "seed", cfg.seed, "config");
  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;

  const auto& p = cfg.problem;
  json pj{{"kind", to_string(p.kind)}, {"seed", p.seed}};
  switch (p.kind) {
    case ProblemKind::quadratic:
      pj["dim"] = p.dim;
      pj["center_bound"] = p.center_bound;
      break;
    case ProblemKind::logistic:
      pj["dim"] = p.dim;
      pj["samples"] = p.samples;
      pj["batch_size"] = p.batch_size;
      if (!p.data_path.empty()) pj["data_path"] = p.data_path;
      break;
    case ProblemKind::scale_invariant_net:
      pj["hidden"] = p.hidden;
      pj["inputs"] = p.inputs;
      pj["samples"] = p.samples;
      pj["batch_size"] = p.batch_size;
      break;
  }
  j["problem"] = pj;

  const auto& o = cfg.optimizer;
  json oj{{"kind", to_string(o.kind)}};
  const auto keys = optimizer_keys(o.kind);
  auto put = [&](const char* key, const json& value) {
    if (keys.count(key)) oj[key] = value;
  };
  put("beta", o.beta);
  put("momentum", o.momentum);
  put("beta1", o.beta1);
  put("beta2", o.beta2);
  put("epsilon", o.epsilon);
  put("weight_decay", o.weight_decay);
  put("lambda", o.lambda);
  put("lambda_cadence", to_string(o.lambda_cadence));
  put("max_scope", to_string(o.max_scope));
  put("final_lr", o.final_lr);
  put("radius", o.radius);
  j["optimizer"] = oj;

  j["schedule"] = {{"kind", to_string(cfg.schedule.kind)},
                   {"base_lr", cfg.schedule.base_lr},
                   {"total_steps", cfg.schedule.total_steps},
                   {"epochs", cfg.schedule.epochs},
                   {"inner", to_string(cfg.schedule.inner)}};
  j["feasible"] = {{"kind", to_string(cfg.feasible.kind)}, {"half_width", cfg.feasible.half_width}};
  j["init"] = {{"kind", to_string(cfg.init.kind)}, {"scale", cfg.init.scale}};
  json mj{{"record_q", cfg.metrics.record_q},
          {"record_regret", cfg.metrics.record_regret},
          {"trajectory", cfg.metrics.trajectory},
          {"q_window_start", cfg.metrics.q_window_start},
          {"min_displacement", cfg.metrics.min_displacement}};
  if (cfg.metrics.loss_threshold) mj["loss_threshold"] = *cfg.metrics.loss_threshold;
  j["metrics"] = mj;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t json_hash(const json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace adarem
