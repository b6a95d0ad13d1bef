#include "opg/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "opg/io.hpp"
#include "opg/numeric.hpp"

namespace opg {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

std::string pad2(std::size_t i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

json json_vector(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(x);
  return arr;
}

json json_indices(const std::vector<std::size_t>& xs) {
  json arr = json::array();
  for (std::size_t x : xs) arr.push_back(x);
  return arr;
}

std::string hash_string(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

ExperimentKind ExperimentConfig::parse_kind(const std::string& s) {
  if (s == "gen") return ExperimentKind::Gen;
  if (s == "run") return ExperimentKind::Run;
  if (s == "limit") return ExperimentKind::Limit;
  if (s == "improve") return ExperimentKind::Improve;
  if (s == "sweep") return ExperimentKind::Sweep;
  if (s == "basin") return ExperimentKind::Basin;
  if (s == "contextual") return ExperimentKind::Contextual;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Gen: return "gen";
    case ExperimentKind::Run: return "run";
    case ExperimentKind::Limit: return "limit";
    case ExperimentKind::Improve: return "improve";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Basin: return "basin";
    case ExperimentKind::Contextual: return "contextual";
  }
  return "?";
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Expected: return "expected";
    case RunMode::DelayedExpected: return "delayed_expected";
    case RunMode::DelayedStochastic: return "delayed_stochastic";
  }
  return "?";
}

RunMode parse_mode(const std::string& s) {
  if (s == "expected") return RunMode::Expected;
  if (s == "delayed_expected") return RunMode::DelayedExpected;
  if (s == "delayed_stochastic") return RunMode::DelayedStochastic;
  throw ConfigError("unknown run mode '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(j,
                      {"kind", "instance", "dynamics", "run", "improve", "contextual",
                       "sweep", "basin", "v", "delta_v", "seed", "eps", "out", "threads"},
                      "config root");

  ExperimentConfig cfg;
  if (j.contains("kind")) cfg.kind = parse_kind(j["kind"].get<std::string>());

  if (j.contains("instance")) {
    const json& inst = j["instance"];
    reject_unknown_keys(
        inst, {"n_arms", "rewards", "reward_law", "logits", "logit_slope", "logit_law", "file"},
        "instance");
    if (inst.contains("file")) {
      cfg.instance_file = inst["file"].get<std::string>();
    }
    if (inst.contains("n_arms")) cfg.instance.n_arms = inst["n_arms"].get<int>();
    if (inst.contains("rewards")) {
      cfg.instance.rewards = inst["rewards"].get<std::vector<double>>();
      if (cfg.instance.n_arms == 0) {
        cfg.instance.n_arms = static_cast<int>(cfg.instance.rewards->size());
      }
    }
    if (inst.contains("reward_law")) {
      const std::string law = inst["reward_law"].get<std::string>();
      if (law != "uniform") throw ConfigError("unknown reward_law '" + law + "'");
    }
    if (inst.contains("logits")) {
      cfg.instance.logits = inst["logits"].get<std::vector<double>>();
      if (cfg.instance.n_arms == 0) {
        cfg.instance.n_arms = static_cast<int>(cfg.instance.logits->size());
      }
    }
    if (inst.contains("logit_slope")) cfg.instance.logit_slope = inst["logit_slope"].get<double>();
    if (inst.contains("logit_law")) {
      const std::string law = inst["logit_law"].get<std::string>();
      if (law != "uniform") throw ConfigError("unknown logit_law '" + law + "'");
    }
  }

  if (j.contains("dynamics")) {
    const json& dyn = j["dynamics"];
    reject_unknown_keys(dyn, {"eta", "steps", "grad_tol", "record_every"}, "dynamics");
    if (dyn.contains("eta")) cfg.eta = dyn["eta"].get<double>();
    if (dyn.contains("steps")) cfg.steps = dyn["steps"].get<long>();
    if (dyn.contains("grad_tol")) cfg.grad_tol = dyn["grad_tol"].get<double>();
    if (dyn.contains("record_every")) cfg.record_every = dyn["record_every"].get<long>();
  }

  if (j.contains("run")) {
    const json& run = j["run"];
    reject_unknown_keys(run, {"mode", "update_interval"}, "run");
    if (run.contains("mode")) cfg.run_mode = parse_mode(run["mode"].get<std::string>());
    if (run.contains("update_interval")) {
      cfg.run_update_interval = run["update_interval"].get<long>();
    }
  }

  if (j.contains("improve")) {
    const json& imp = j["improve"];
    reject_unknown_keys(imp, {"iters", "steps_per_iter"}, "improve");
    if (imp.contains("iters")) cfg.improve_iters = imp["iters"].get<long>();
    if (imp.contains("steps_per_iter")) {
      cfg.improve_steps_per_iter = imp["steps_per_iter"].get<long>();
    }
  }

  if (j.contains("contextual")) {
    const json& ctx = j["contextual"];
    reject_unknown_keys(
        ctx, {"G", "delta_v", "update_interval", "total_steps", "n_contexts", "eta",
              "record_every"},
        "contextual");
    if (ctx.contains("G")) cfg.ctx_group_size = ctx["G"].get<int>();
    if (ctx.contains("delta_v")) cfg.ctx_delta_v = ctx["delta_v"].get<double>();
    if (ctx.contains("update_interval")) cfg.ctx_update_interval = ctx["update_interval"].get<long>();
    if (ctx.contains("total_steps")) cfg.ctx_total_steps = ctx["total_steps"].get<long>();
    if (ctx.contains("n_contexts")) cfg.ctx_n_contexts = ctx["n_contexts"].get<int>();
    if (ctx.contains("eta")) cfg.ctx_eta = ctx["eta"].get<double>();
    if (ctx.contains("record_every")) cfg.ctx_record_every = ctx["record_every"].get<long>();
  }

  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    reject_unknown_keys(sw, {"v_values", "delta_v_values"}, "sweep");
    if (sw.contains("v_values")) cfg.v_values = sw["v_values"].get<std::vector<double>>();
    if (sw.contains("delta_v_values")) {
      cfg.delta_v_values = sw["delta_v_values"].get<std::vector<double>>();
    }
    if (cfg.v_values && cfg.delta_v_values) {
      throw ConfigError("sweep: give v_values or delta_v_values, not both");
    }
  }

  if (j.contains("basin")) {
    const json& bas = j["basin"];
    reject_unknown_keys(bas, {"resolution", "v"}, "basin");
    if (bas.contains("resolution")) cfg.basin_resolution = bas["resolution"].get<int>();
    if (bas.contains("v")) cfg.basin_v = bas["v"].get<double>();
  }

  if (j.contains("v")) cfg.v_single = j["v"].get<double>();
  if (j.contains("delta_v")) cfg.delta_v_single = j["delta_v"].get<double>();
  if (cfg.v_single && cfg.delta_v_single) {
    throw ConfigError("give v or delta_v, not both");
  }
  if (j.contains("seed")) {
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.seed_given = true;
  }
  if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

  return cfg;
}

void ExperimentConfig::validate() const {
  if (!instance_file) {
    if (instance.n_arms < 1 && kind != ExperimentKind::Contextual) {
      throw ConfigError("instance.n_arms must be given (or an instance file)");
    }
    if (instance.n_arms >= 1) instance.validate();
  }
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (steps < 1) throw ConfigError("dynamics.steps must be >= 1");
  if (record_every < 1) throw ConfigError("dynamics.record_every must be >= 1");
  if (out.empty()) throw ConfigError("out prefix must not be empty");

  const bool stochastic = kind == ExperimentKind::Contextual ||
                          (kind == ExperimentKind::Run && run_mode == RunMode::DelayedStochastic);
  if (stochastic && !seed_given) {
    throw ConfigError("a seed is required for stochastic experiments");
  }
  if (kind == ExperimentKind::Basin && !basin_v) {
    throw ConfigError("basin.v is required for basin experiments");
  }
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["kind"] = kind_name(kind);
  json inst;
  if (instance_file) {
    inst["file"] = *instance_file;
  } else {
    inst["n_arms"] = instance.n_arms;
    if (instance.rewards) {
      inst["rewards"] = json_vector(*instance.rewards);
    } else {
      inst["reward_law"] = "uniform";
    }
    if (instance.logits) {
      inst["logits"] = json_vector(*instance.logits);
    } else if (instance.logit_slope) {
      inst["logit_slope"] = *instance.logit_slope;
    } else {
      inst["logit_law"] = "uniform";
    }
  }
  j["instance"] = inst;

  json dyn;
  if (eta) dyn["eta"] = *eta;
  dyn["steps"] = steps;
  dyn["grad_tol"] = grad_tol;
  dyn["record_every"] = record_every;
  j["dynamics"] = dyn;

  if (kind == ExperimentKind::Run) {
    j["run"] = {{"mode", mode_name(run_mode)}, {"update_interval", run_update_interval}};
  }
  if (kind == ExperimentKind::Improve) {
    j["improve"] = {{"iters", improve_iters}, {"steps_per_iter", improve_steps_per_iter}};
  }
  if (kind == ExperimentKind::Contextual) {
    j["contextual"] = {{"G", ctx_group_size},
                       {"delta_v", ctx_delta_v},
                       {"update_interval", ctx_update_interval},
                       {"total_steps", ctx_total_steps},
                       {"n_contexts", ctx_n_contexts},
                       {"eta", ctx_eta},
                       {"record_every", ctx_record_every}};
  }
  if (v_values) j["sweep"]["v_values"] = json_vector(*v_values);
  if (delta_v_values) j["sweep"]["delta_v_values"] = json_vector(*delta_v_values);
  if (kind == ExperimentKind::Basin) {
    j["basin"] = {{"resolution", basin_resolution}, {"v", *basin_v}};
  }
  if (v_single) j["v"] = *v_single;
  if (delta_v_single) j["delta_v"] = *delta_v_single;
  j["seed"] = seed;
  j["eps"] = eps;
  j["out"] = out;
  j["threads"] = threads;
  return j.dump();
}

std::uint64_t ExperimentConfig::config_hash() const {
  return fnv1a_hash(canonical_json());
}

namespace {

Instance load_instance(const ExperimentConfig& cfg) {
  if (cfg.instance_file) {
    const std::string text = read_text_file(*cfg.instance_file);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("instance file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.contains("rewards") || !j.contains("logits")) {
      throw ConfigError("instance file must contain rewards and logits arrays");
    }
    LogitPolicy l0{j["logits"].get<std::vector<double>>()};
    return Instance{RewardModel{j["rewards"].get<std::vector<double>>()}, softmax(l0),
                    std::move(l0)};
  }
  return generate_instance(cfg.instance, cfg.seed);
}

RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions opts;
  opts.eta = cfg.eta;
  opts.steps = cfg.steps;
  opts.grad_tol = cfg.grad_tol;
  opts.record_every = cfg.record_every;
  opts.support_eps = cfg.eps;
  opts.threads = cfg.threads;
  return opts;
}

std::vector<double> baseline_list(const ExperimentConfig& cfg, const Instance& instance) {
  const double v_mu = expected_reward(instance.mu, instance.rewards);
  if (cfg.v_values) return *cfg.v_values;
  if (cfg.delta_v_values) {
    std::vector<double> vs;
    for (double d : *cfg.delta_v_values) vs.push_back(v_mu + d);
    return vs;
  }
  if (cfg.v_single) return {*cfg.v_single};
  if (cfg.delta_v_single) return {v_mu + *cfg.delta_v_single};
  return default_v_grid(instance);
}

json base_summary(const ExperimentConfig& cfg) {
  json j;
  j["config"] = json::parse(cfg.canonical_json());
  j["config_hash"] = hash_string(cfg.config_hash());
  j["seed"] = cfg.seed;
  return j;
}

json instance_json(const Instance& instance) {
  json j;
  j["n_arms"] = instance.rewards.size();
  j["rewards"] = json_vector(instance.rewards.values());
  j["logits"] = json_vector(instance.l0.values());
  j["mu"] = json_vector(instance.mu.values());
  j["v_mu"] = expected_reward(instance.mu, instance.rewards);
  j["min_reward"] = instance.rewards.min();
  j["max_reward"] = instance.rewards.max();
  return j;
}

std::string sweep_summary_csv(const SweepResult& sweep) {
  std::string csv = "v,final_reward,final_entropy,final_support_size,tau_star,regime\n";
  for (const SweepRow& row : sweep.rows) {
    csv += format_double(row.v);
    csv += ',';
    csv += format_double(row.final_reward);
    csv += ',';
    csv += format_double(row.final_entropy);
    csv += ',';
    csv += std::to_string(row.final_support_size);
    csv += ',';
    csv += format_double(row.tau_star);
    csv += ',';
    csv += to_string(row.regime);
    csv += '\n';
  }
  return csv;
}

std::string basin_csv(const BasinResult& basin) {
  std::string csv = "x,y,limit_arm\n";
  for (const BasinCell& cell : basin.cells) {
    csv += format_double(cell.x);
    csv += ',';
    csv += format_double(cell.y);
    csv += ',';
    csv += std::to_string(cell.limit_arm);
    csv += '\n';
  }
  return csv;
}

std::string improvement_csv(const ImprovementRun& run) {
  std::string csv = "iteration,expected_reward,entropy,support_size\n";
  for (std::size_t n = 0; n < run.reward_per_iteration.size(); ++n) {
    csv += std::to_string(n);
    csv += ',';
    csv += format_double(run.reward_per_iteration[n]);
    csv += ',';
    csv += format_double(run.entropy_per_iteration[n]);
    csv += ',';
    csv += std::to_string(run.support_per_iteration[n]);
    csv += '\n';
  }
  return csv;
}

std::string aggregate_csv(const std::vector<AggregatePoint>& points) {
  std::string csv = "step,mean_reward,mean_entropy\n";
  for (const AggregatePoint& p : points) {
    csv += std::to_string(p.step);
    csv += ',';
    csv += format_double(p.mean_reward);
    csv += ',';
    csv += format_double(p.mean_entropy);
    csv += '\n';
  }
  return csv;
}

json limit_result_json(const LimitResult& lim) {
  json j;
  j["regime"] = to_string(lim.regime.tag);
  j["v_mu"] = lim.regime.v_mu;
  j["tau_defined"] = lim.tau_defined;
  j["tau_star"] = lim.tau_star;
  j["support"] = json_indices(lim.support);
  j["depends_on_pi0"] = lim.depends_on_pi0;
  if (lim.policy) j["policy"] = json_vector(lim.policy->values());
  return j;
}

}  // namespace

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::filesystem::path> written;
  const std::string prefix = cfg.out;
  auto emit = [&written](const std::filesystem::path& path, const std::string& content) {
    write_text_file(path, content);
    written.push_back(path);
  };

  switch (cfg.kind) {
    case ExperimentKind::Gen: {
      const Instance instance = load_instance(cfg);
      json j = base_summary(cfg);
      j.update(instance_json(instance));
      emit(prefix + "instance.json", j.dump(2) + "\n");
      break;
    }

    case ExperimentKind::Run: {
      const Instance instance = load_instance(cfg);
      const double v_mu = expected_reward(instance.mu, instance.rewards);
      DynamicsConfig dyn;
      dyn.steps = cfg.steps;
      dyn.grad_tol = cfg.grad_tol;
      dyn.record_every = cfg.record_every;
      dyn.support_eps = cfg.eps;

      RunResult run{instance.l0, {}};
      double v_used = 0.0;
      if (cfg.run_mode == RunMode::Expected) {
        v_used = cfg.v_single ? *cfg.v_single
                              : (cfg.delta_v_single ? v_mu + *cfg.delta_v_single : 0.0);
        const AdvantageProfile adv = advantage_profile(instance.mu, instance.rewards, v_used);
        dyn.eta = cfg.eta.value_or(default_step_size(adv));
        run = run_expected(instance.l0, instance.mu, instance.rewards, v_used, dyn);
      } else {
        const BaselineSpec baseline = cfg.delta_v_single
                                          ? BaselineSpec::offset(*cfg.delta_v_single)
                                          : BaselineSpec::absolute(cfg.v_single.value_or(0.0));
        v_used = baseline.resolve(v_mu);
        dyn.eta = cfg.eta.value_or(1.0);
        DelayedConfig dcfg;
        dcfg.update_interval = cfg.run_update_interval;
        dcfg.total_steps = cfg.steps;
        dcfg.expected_updates = cfg.run_mode == RunMode::DelayedExpected;
        Rng rng = Rng::stream(cfg.seed, 1);
        run = run_delayed(instance.l0, instance.rewards, baseline, dyn, dcfg, rng);
      }

      emit(prefix + "trajectory.csv", trajectory_csv(run.log));
      const SimplexPolicy final_pi = softmax(run.logits);
      const Regime regime = classify_regime(instance.mu, instance.rewards, v_used);
      json j = base_summary(cfg);
      j["v"] = v_used;
      j["v_mu"] = v_mu;
      j["regime"] = to_string(regime.tag);
      j["final_reward"] = expected_reward(final_pi, instance.rewards);
      j["final_entropy"] = entropy(final_pi);
      j["final_support"] = json_indices(support(final_pi, cfg.eps));
      if (regime.tag == RegimeTag::BelowCritical && cfg.run_mode == RunMode::Expected) {
        j["tau_star"] = solve_tau(advantage_profile(instance.mu, instance.rewards, v_used));
      }
      emit(prefix + "summary.json", j.dump(2) + "\n");
      break;
    }

    case ExperimentKind::Limit: {
      const Instance instance = load_instance(cfg);
      const std::vector<double> vs = baseline_list(cfg, instance);
      const SimplexPolicy pi0 = softmax(instance.l0);
      json results = json::array();
      for (double v : vs) {
        json entry = limit_result_json(limit_policy(instance.mu, instance.rewards, v, pi0));
        entry["v"] = v;
        results.push_back(entry);
      }
      json j = base_summary(cfg);
      j["limits"] = results;
      emit(prefix + "limit.json", j.dump(2) + "\n");
      break;
    }

    case ExperimentKind::Improve: {
      const Instance instance = load_instance(cfg);
      const std::vector<double> vs = baseline_list(cfg, instance);
      const std::vector<ImprovementRun> runs = improvement_experiment(
          instance, vs, cfg.improve_iters, cfg.improve_steps_per_iter, run_options(cfg));
      json per_v = json::array();
      for (std::size_t i = 0; i < runs.size(); ++i) {
        emit(prefix + "v" + pad2(i) + "_improvement.csv", improvement_csv(runs[i]));
        per_v.push_back({{"v", runs[i].v},
                         {"final_reward", runs[i].reward_per_iteration.back()},
                         {"final_support_size", runs[i].support_per_iteration.back()}});
      }
      json j = base_summary(cfg);
      j["runs"] = per_v;
      emit(prefix + "summary.json", j.dump(2) + "\n");
      break;
    }

    case ExperimentKind::Sweep: {
      const Instance instance = load_instance(cfg);
      const std::vector<double> vs = baseline_list(cfg, instance);
      const SweepResult sweep = sweep_baseline(instance, vs, run_options(cfg));
      for (std::size_t i = 0; i < sweep.logs.size(); ++i) {
        emit(prefix + "v" + pad2(i) + "_trajectory.csv", trajectory_csv(sweep.logs[i]));
      }
      emit(prefix + "summary.csv", sweep_summary_csv(sweep));
      json rows = json::array();
      for (const SweepRow& row : sweep.rows) {
        json r = {{"v", row.v},
                  {"final_reward", row.final_reward},
                  {"final_entropy", row.final_entropy},
                  {"final_support_size", row.final_support_size},
                  {"tau_star", row.tau_star},
                  {"regime", to_string(row.regime)}};
        if (std::isfinite(row.limit_l1)) r["limit_l1"] = row.limit_l1;
        rows.push_back(r);
      }
      json j = base_summary(cfg);
      j["v_mu"] = expected_reward(instance.mu, instance.rewards);
      j["rows"] = rows;
      emit(prefix + "summary.json", j.dump(2) + "\n");
      break;
    }

    case ExperimentKind::Basin: {
      const Instance instance = load_instance(cfg);
      const BasinResult basin =
          basin_map(instance, *cfg.basin_v, cfg.basin_resolution, run_options(cfg));
      emit(prefix + "basin.csv", basin_csv(basin));
      std::set<int> observed;
      for (const BasinCell& cell : basin.cells) observed.insert(cell.limit_arm);
      json j = base_summary(cfg);
      j["v"] = basin.v;
      j["resolution"] = basin.resolution;
      j["candidate_support"] = json_indices(basin.candidate_support);
      j["observed_limit_arms"] = observed;
      emit(prefix + "summary.json", j.dump(2) + "\n");
      break;
    }

    case ExperimentKind::Contextual: {
      const int ctx_arms = cfg.instance.n_arms == 0 ? 10 : cfg.instance.n_arms;
      if (ctx_arms < 2) throw ConfigError("contextual: instance.n_arms must be >= 2");
      const ContextSet ctxs = gen_binary_contexts(cfg.ctx_n_contexts, ctx_arms, cfg.seed);
      ContextualConfig ccfg;
      ccfg.group_size = cfg.ctx_group_size;
      ccfg.delta_v = cfg.ctx_delta_v;
      ccfg.eta = cfg.ctx_eta;
      ccfg.total_steps = cfg.ctx_total_steps;
      ccfg.update_interval = cfg.ctx_update_interval;
      ccfg.record_every = cfg.ctx_record_every;
      ccfg.support_eps = cfg.eps;
      Rng rng = Rng::stream(cfg.seed, 0);
      const ContextualRunResult res = run_contextual(ctxs, ccfg, rng);

      emit(prefix + "aggregate.csv", aggregate_csv(res.aggregate));
      for (std::size_t x = 0; x < res.per_context.size(); ++x) {
        emit(prefix + "ctx" + pad2(x) + "_trajectory.csv", trajectory_csv(res.per_context[x]));
      }
      json j = base_summary(cfg);
      j["delta_v"] = cfg.ctx_delta_v;
      j["final_mean_reward"] = res.aggregate.back().mean_reward;
      j["final_mean_entropy"] = res.aggregate.back().mean_entropy;
      j["vhat_residual"] = {{"mean", res.vhat_residual_mean},
                            {"std", res.vhat_residual_std},
                            {"count", res.vhat_residual_count}};
      emit(prefix + "summary.json", j.dump(2) + "\n");
      break;
    }
  }
  return written;
}

}  // namespace opg
