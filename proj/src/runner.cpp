#include "adarem/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "adarem/errors.hpp"
#include "adarem/metrics.hpp"
#include "adarem/sphere.hpp"

namespace adarem {

using nlohmann::json;

namespace {

// Seed offsets keep the init and batch order streams independent of each other.
constexpr std::uint64_t kInitStream = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kBatchStream = 0xbf58476d1ce4e5b9ull;

BaselineKind baseline_kind(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::sgd:
    case OptimizerKind::sgdm: return BaselineKind::sgdm;
    case OptimizerKind::adam: return BaselineKind::adam;
    case OptimizerKind::adamw: return BaselineKind::adamw;
    case OptimizerKind::rmsprop: return BaselineKind::rmsprop;
    case OptimizerKind::adabound: return BaselineKind::adabound;
    default: throw ConfigError("not a baseline optimizer: " + to_string(k));
  }
}

json optional_number(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json RunSummary::to_json() const {
  json j;
  j["final_loss"] = std::isfinite(final_loss) ? json(final_loss) : json(nullptr);
  j["Q"] = optional_number(q);
  j["n_included"] = n_included;
  j["n_excluded"] = n_excluded;
  j["R_T"] = optional_number(regret);
  j["bound"] = optional_number(bound);
  j["steps_to_threshold"] = steps_to_threshold ? json(*steps_to_threshold) : json(nullptr);
  j["wall_time"] = wall_time;
  j["steps_completed"] = steps_completed;
  j["epoch_losses"] = epoch_losses;
  j["config"] = config;
  j["version"] = version;
  j["error"] = error ? json(*error) : json(nullptr);
  return j;
}

std::unique_ptr<Problem> make_problem(const RunConfig& cfg) {
  const auto& p = cfg.problem;
  switch (p.kind) {
    case ProblemKind::quadratic: {
      std::optional<double> box;
      if (cfg.feasible.kind == FeasibleKind::box) box = cfg.feasible.half_width;
      return std::make_unique<OnlineQuadratic>(
          make_online_quadratic(p.dim, cfg.schedule.total_steps, p.seed, p.center_bound, box));
    }
    case ProblemKind::logistic:
      if (!p.data_path.empty()) {
        return std::make_unique<LogisticProblem>(load_csv(p.data_path), p.batch_size);
      }
      return std::make_unique<LogisticProblem>(make_logistic(p.dim, p.samples, p.seed, p.batch_size));
    case ProblemKind::scale_invariant_net:
      return std::make_unique<ScaleInvariantNet>(
          make_scale_invariant_net(p.hidden, p.seed, p.inputs, p.samples, p.batch_size));
  }
  throw ConfigError("unknown problem kind");
}

FeasibleSet make_feasible(const RunConfig& cfg, std::size_t dim) {
  if (cfg.feasible.kind == FeasibleKind::box) {
    return FeasibleSet::symmetric_box(dim, cfg.feasible.half_width);
  }
  return FeasibleSet::unconstrained();
}

std::vector<double> make_init(const RunConfig& cfg, std::size_t dim) {
  std::vector<double> x(dim, 0.0);
  std::mt19937_64 rng(cfg.seed ^ kInitStream);
  switch (cfg.init.kind) {
    case InitKind::zeros: break;
    case InitKind::uniform: {
      std::uniform_real_distribution<double> u(-cfg.init.scale, cfg.init.scale);
      for (double& v : x) v = u(rng);
      break;
    }
    case InitKind::normal: {
      std::normal_distribution<double> n(0.0, cfg.init.scale);
      for (double& v : x) v = n(rng);
      break;
    }
  }
  return x;
}

std::unique_ptr<Optimizer> make_optimizer(const RunConfig& cfg, const ParamVector& init) {
  switch (cfg.optimizer.kind) {
    case OptimizerKind::adarem:
      return std::make_unique<AdaRem>(adarem_config(cfg), init.size());
    case OptimizerKind::adarem_s:
      return std::make_unique<AdaRemS>(adarem_config(cfg), init, cfg.optimizer.radius,
                                       cfg.schedule.kind == ScheduleKind::slr);
    default:
      return std::make_unique<Baseline>(baseline_kind(cfg.optimizer.kind), baseline_config(cfg),
                                        init.size());
  }
}

RunSummary run(const RunConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.config = config_to_json(cfg);

  const auto problem = make_problem(cfg);
  const std::size_t dim = problem->dimension();
  const auto feasible = make_feasible(cfg, dim);
  ParamVector theta(project(make_init(cfg, dim), feasible), problem->group_ids());
  auto optimizer = make_optimizer(cfg, theta);
  if (const auto* sphere = dynamic_cast<const AdaRemS*>(optimizer.get())) {
    theta = sphere->initial_point();
  }

  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "steps.csv");
  if (!csv) throw ConfigError("cannot write " + (out_dir / "steps.csv").string());
  csv << kStepCsvHeader << '\n';

  // Online problems play f_t in order; finite datasets are sampled by epoch.
  const bool online = cfg.problem.kind == ProblemKind::quadratic;
  BatchStream batches(cfg.seed ^ kBatchStream, problem->num_batches(), !online);

  const std::size_t total = cfg.schedule.total_steps;
  const std::size_t per_epoch = std::max<std::size_t>(1, total / cfg.schedule.epochs);
  std::optional<TrajectoryRecord> record;
  RegretLedger ledger;
  double epoch_sum = 0.0;
  std::size_t epoch_rows = 0;

  try {
    for (std::size_t t = 0; t < total; ++t) {
      if (cfg.metrics.record_q && t == cfg.metrics.q_window_start) record.emplace(theta.values());

      const std::size_t batch = batches.next();
      const double loss = problem->loss(theta.values(), batch);
      const GradVector g(problem->gradient(theta.values(), batch));
      if (!std::isfinite(loss)) throw NumericError("non-finite loss", t);
      const double lr = schedule_lr(cfg.schedule, t, total);
      auto out = optimizer->step(theta, g, lr, feasible);

      const auto stats = lr_stats(out.rates);
      csv << t << ',' << format_double(loss) << ',' << format_double(stats.min) << ','
          << format_double(stats.mean) << ',' << format_double(stats.max) << ','
          << format_double(norm2(g.values())) << '\n';

      if (record) record->record_step(theta.values(), out.params.values(), loss, out.rates);
      if (cfg.metrics.record_regret) ledger.add(loss, batch);
      if (cfg.metrics.loss_threshold && !summary.steps_to_threshold &&
          loss <= *cfg.metrics.loss_threshold) {
        summary.steps_to_threshold = t;
      }
      summary.final_loss = loss;
      summary.steps_completed = t + 1;
      epoch_sum += loss;
      ++epoch_rows;

      theta = std::move(out.params);
      if ((t + 1) % per_epoch == 0) {
        optimizer->end_epoch();
        summary.epoch_losses.push_back(epoch_sum / static_cast<double>(epoch_rows));
        epoch_sum = 0.0;
        epoch_rows = 0;
      }
    }
  } catch (const NumericError& e) {
    summary.error = e.what();
  }
  if (epoch_rows > 0) summary.epoch_losses.push_back(epoch_sum / static_cast<double>(epoch_rows));
  csv.flush();

  if (record && record->steps() > 0) {
    try {
      const auto q = q_metric(*record, cfg.metrics.min_displacement);
      summary.q = q.q;
      summary.n_included = q.n_included;
      summary.n_excluded = q.n_excluded;
    } catch (const DomainError&) {
      summary.n_excluded = record->size();
    }
    if (cfg.metrics.trajectory) {
      write_json(out_dir / "trajectory.json",
                 {{"path_length", record->path_length()},
                  {"start", record->start()},
                  {"end", record->last()}});
    }
  }

  if (cfg.metrics.record_regret && ledger.T > 0) {
    summary.regret = regret(ledger, *problem, feasible);
    if (cfg.optimizer.kind == OptimizerKind::adarem) {
      const auto acfg = adarem_config(cfg);
      try {
        check_theorem_regime(*problem, feasible, acfg, cfg.schedule.kind);
        const BoundInputs inputs{feasible.diameter_inf(), *problem->grad_bound(), dim,
                                 cfg.schedule.base_lr, acfg.lambda, ledger.T};
        summary.bound = theorem1_bound(inputs);
      } catch (const PreconditionError&) {
        // Outside the bound's regime: report R_T only.
      }
    }
  }

  summary.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json(out_dir / "summary.json", summary.to_json());
  return summary;
}

std::vector<ComparisonRow> compare(const std::vector<RunConfig>& configs,
                                   const std::filesystem::path& out_dir) {
  if (configs.empty()) throw ConfigError("compare: no configs");
  for (const auto& c : configs) {
    if (!(c.problem == configs.front().problem) || c.seed != configs.front().seed) {
      throw ConfigError("compare: all configs must share the same problem and seed");
    }
  }
  const auto problem_hash = json_hash(config_to_json(configs.front())["problem"]);
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunConfig c = configs[i];
    c.output_dir = (out_dir / (std::to_string(i) + "_" + to_string(c.optimizer.kind))).string();
    const auto s = run(c);
    rows.push_back({to_string(c.optimizer.kind), s.final_loss, s.q, s.steps_to_threshold,
                    problem_hash, s.error});
  }
  write_comparison(rows, out_dir);
  return rows;
}

void write_comparison(const std::vector<ComparisonRow>& rows, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "comparison.csv");
  if (!csv) throw ConfigError("cannot write " + (out_dir / "comparison.csv").string());
  csv << "optimizer,final_loss,q,steps_to_threshold,problem_hash\n";
  json j = json::array();
  for (const auto& r : rows) {
    csv << r.optimizer << ',' << format_double(r.final_loss) << ','
        << (r.q ? format_double(*r.q) : "") << ','
        << (r.steps_to_threshold ? std::to_string(*r.steps_to_threshold) : "") << ','
        << r.problem_hash << '\n';
    j.push_back({{"optimizer", r.optimizer},
                 {"final_loss", r.final_loss},
                 {"q", optional_number(r.q)},
                 {"steps_to_threshold",
                  r.steps_to_threshold ? json(*r.steps_to_threshold) : json(nullptr)},
                 {"problem_hash", r.problem_hash},
                 {"error", r.error ? json(*r.error) : json(nullptr)}});
  }
  write_json(out_dir / "comparison.json", j);
}

json VerifyReport::to_json() const {
  json marks = json::array();
  for (const auto& m : result.checkpoints) {
    marks.push_back({{"t", m.t}, {"R_t", m.regret}, {"average", m.average}});
  }
  return {{"R_T", result.regret},
          {"bound", result.bound},
          {"margin", result.margin},
          {"T", result.T},
          {"config_hash", config_hash},
          {"holds", result.holds()},
          {"inputs",
           {{"D_inf", result.inputs.d_inf},
            {"G2", result.inputs.g2},
            {"dim", result.inputs.dim},
            {"eta", result.inputs.eta},
            {"lambda", result.inputs.lambda}}},
          {"checkpoints", marks}};
}

VerifyReport verify(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  cfg.optimizer.lambda_cadence = LambdaCadence::per_step;
  cfg.validate();
  if (cfg.problem.kind != ProblemKind::quadratic) {
    throw PreconditionError("verify: only the quadratic stream has a regret bound here");
  }
  if (cfg.optimizer.kind != OptimizerKind::adarem) {
    throw PreconditionError("verify: the bound is stated for adarem only");
  }
  const auto problem = make_problem(cfg);
  const auto feasible = make_feasible(cfg, problem->dimension());
  const auto init = make_init(cfg, problem->dimension());
  const std::size_t T = cfg.schedule.total_steps;
  std::vector<std::size_t> marks{T};
  if (T >= 10) marks.insert(marks.begin(), T / 10);
  VerifyReport report{verify_regret(*problem, feasible, adarem_config(cfg), cfg.schedule.kind,
                                    cfg.schedule.base_lr, T, init, marks),
                      json_hash(config_to_json(cfg))};
  return report;
}

}  // namespace adarem
