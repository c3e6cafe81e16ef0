#include "adasize/driver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adasize {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::gd:
      return "gd";
    case Method::agd:
      return "agd";
    case Method::svrg:
      return "svrg";
  }
  return "";
}

Method method_from_string(std::string_view name) {
  if (name == "gd") return Method::gd;
  if (name == "agd") return Method::agd;
  if (name == "svrg") return Method::svrg;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(BudgetMode mode) {
  return mode == BudgetMode::until_threshold ? "threshold" : "theory";
}

void Trace::append(TraceEvent event) {
  if (!events_.empty()) {
    if (event.grad_evals <= events_.back().grad_evals)
      throw std::logic_error("trace grad_evals must strictly increase");
    if (event.stage_n < events_.back().stage_n)
      throw std::logic_error("trace stage_n must not decrease");
  }
  events_.push_back(std::move(event));
}

std::optional<std::uint64_t> Trace::last_grad_evals() const {
  if (events_.empty()) return std::nullopt;
  return events_.back().grad_evals;
}

void RunConfig::validate(Index train_size) const {
  const Index n_total = resolved_N(train_size);
  if (n_total < 1 || n_total > train_size)
    throw std::invalid_argument("N must lie in [1, training size]");
  if (m0 < 1 || m0 > n_total) throw std::invalid_argument("need 1 <= m0 <= N");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (!(pass_cap >= 0.0)) throw std::invalid_argument("pass_cap must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

namespace {

/// Samples the run into a Trace: R_N and test error at every eval_every-th
/// iteration and at stage exits.
class Recorder {
 public:
  Recorder(const RiskSpec &spec, const DatasetView &full, const Dataset *test,
           std::uint64_t eval_every, Trace *trace)
      : spec_(spec), full_(full), test_(test), every_(eval_every), trace_(trace) {}

  IterationObserver<double> observer(Index stage_n) {
    if (trace_ == nullptr) return {};
    return [this, stage_n](std::uint64_t it, const SolverState<double> &state,
                           const RiskEval<double> &eval) {
      if (it % every_ == 0) record(stage_n, state, eval.grad_norm, eval.value);
    };
  }

  void stage_exit(Index stage_n, const SolverState<double> &state,
                  const DatasetView &stage_view) {
    if (trace_ == nullptr) return;
    const auto last = trace_->last_grad_evals();
    if (state.grad_evals == 0 || (last && *last >= state.grad_evals)) return;
    const auto eval = risk_value_and_grad(spec_, state.w, stage_view);
    record(stage_n, state, eval.grad_norm, eval.value);
  }

 private:
  void record(Index stage_n, const SolverState<double> &state, double grad_norm,
              double stage_risk) {
    TraceEvent event;
    event.grad_evals = state.grad_evals;
    event.stage_n = stage_n;
    event.risk_value = stage_n == full_.size() ? stage_risk
                                               : risk_value(spec_, state.w, full_);
    event.grad_norm = grad_norm;
    event.stage_risk_value = stage_risk;
    if (test_ != nullptr) event.test_error = test_error(state.w, *test_);
    trace_->append(std::move(event));
  }

  const RiskSpec &spec_;
  DatasetView full_;
  const Dataset *test_;
  std::uint64_t every_;
  Trace *trace_;
};

std::uint64_t theoretical_iterations(const RunConfig &config,
                                     const RiskSpec &spec, Index n) {
  switch (config.method) {
    case Method::gd:
      return iterations_generic(gd_rate(spec, n), spec, config.wstar);
    case Method::agd:
      return iterations_agd(spec, n, config.wstar);
    case Method::svrg:
      return iterations_svrg(spec, config.wstar);
  }
  return 0;
}

StageReport run_stage(SolverState<double> &state, const RiskSpec &spec,
                      const DatasetView &view, const StepBudget &budget,
                      Recorder &recorder) {
  state.restart();
  const auto result = solve(state, spec, view, budget, recorder.observer(view.size()));
  recorder.stage_exit(view.size(), state, view);
  StageReport report;
  report.n = view.size();
  report.iterations = result.iterations;
  report.grad_evals_at_exit = state.grad_evals;
  report.exit_grad_norm = result.exit_grad_norm;
  report.threshold = stop_threshold(spec, view.size());
  report.budget_exhausted = result.budget_exhausted;
  report.exit_w = state.w;
  return report;
}

void fill_meta(Trace &trace, const RunConfig &config, const RiskSpec &spec,
               const Dataset &train, Index N) {
  trace.meta["method"] = to_string(config.method);
  trace.meta["adaptive"] = config.adaptive ? "true" : "false";
  trace.meta["m0"] = std::to_string(config.m0);
  trace.meta["N"] = std::to_string(N);
  trace.meta["budget"] = to_string(config.budget_mode);
  trace.meta["seed"] = std::to_string(config.seed);
  trace.meta["loss"] = to_string(spec.loss);
  trace.meta["c"] = std::to_string(spec.c);
  trace.meta["alpha"] = std::to_string(spec.alpha);
  trace.meta["gamma"] = std::to_string(spec.gamma);
  trace.meta["M"] = std::to_string(spec.M);
  trace.meta["dataset"] = train.name();
}

}  // namespace

std::pair<SolverState<double>, StageReport> bootstrap(const RunConfig &config,
                                                      const RiskSpec &spec,
                                                      const Dataset &train,
                                                      Trace *trace,
                                                      const Dataset *test) {
  spec.validate();
  config.validate(train.size());
  const Index N = config.resolved_N(train.size());
  Recorder recorder(spec, prefix(train, N), test, config.eval_every, trace);
  auto state = SolverState<double>::start(config.method,
                                          Vector<double>::Zero(train.dim()),
                                          config.seed);
  const auto view = prefix(train, config.m0);
  auto report = run_stage(state, spec, view,
                          StepBudget::until(stop_threshold(spec, config.m0),
                                            config.max_iterations),
                          recorder);
  if (report.budget_exhausted)
    throw BudgetExhaustedError("bootstrap stage n=" + std::to_string(config.m0) +
                               " hit the iteration cap");
  return {std::move(state), std::move(report)};
}

RunResult adaptive_run(const RunConfig &config, const RiskSpec &spec,
                       const Dataset &train, const Dataset *test) {
  if (!config.adaptive) throw std::invalid_argument("adaptive_run needs adaptive = true");
  RunResult out;
  const Index N = config.resolved_N(train.size());
  auto [state, first] = bootstrap(config, spec, train, &out.trace, test);
  fill_meta(out.trace, config, spec, train, N);
  out.stages.push_back(std::move(first));

  Recorder recorder(spec, prefix(train, N), test, config.eval_every, &out.trace);
  const auto sizes = stage_sizes(config.m0, N);
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    const Index n = sizes[k];
    const auto budget =
        config.budget_mode == BudgetMode::until_threshold
            ? StepBudget::until(stop_threshold(spec, n), config.max_iterations)
            : StepBudget::fixed(theoretical_iterations(config, spec, n),
                                config.max_iterations);
    out.stages.push_back(run_stage(state, spec, prefix(train, n), budget, recorder));
  }
  out.w = std::move(state.w);
  return out;
}

RunResult fixed_run(const RunConfig &config, const RiskSpec &spec,
                    const Dataset &train, const Dataset *test) {
  if (config.adaptive) throw std::invalid_argument("fixed_run needs adaptive = false");
  spec.validate();
  config.validate(train.size());
  RunResult out;
  const Index N = config.resolved_N(train.size());
  fill_meta(out.trace, config, spec, train, N);
  const auto view = prefix(train, N);
  auto state = SolverState<double>::start(config.method,
                                          Vector<double>::Zero(train.dim()),
                                          config.seed);

  const double per_iteration = config.method == Method::svrg ? 2.0 : 1.0;
  const auto cap = static_cast<std::uint64_t>(
      std::min(std::ceil(config.pass_cap / per_iteration),
               static_cast<double>(config.max_iterations)));
  if (cap == 0) {
    StageReport report;
    report.n = N;
    report.threshold = stop_threshold(spec, N);
    report.exit_grad_norm = risk_value_and_grad(spec, state.w, view).grad_norm;
    report.budget_exhausted = report.exit_grad_norm > report.threshold;
    report.exit_w = state.w;
    out.stages.push_back(std::move(report));
    out.w = std::move(state.w);
    return out;
  }

  Recorder recorder(spec, view, test, config.eval_every, &out.trace);
  out.stages.push_back(run_stage(state, spec, view,
                                 StepBudget::until(stop_threshold(spec, N), cap),
                                 recorder));
  out.w = std::move(state.w);
  return out;
}

RunResult run(const RunConfig &config, const RiskSpec &spec,
              const Dataset &train, const Dataset *test) {
  return config.adaptive ? adaptive_run(config, spec, train, test)
                         : fixed_run(config, spec, train, test);
}

}  // namespace adasize
