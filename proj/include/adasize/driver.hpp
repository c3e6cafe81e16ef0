#ifndef ADASIZE_DRIVER_HPP
#define ADASIZE_DRIVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "adasize/solvers.hpp"
#include "adasize/trace.hpp"

namespace adasize {

enum class BudgetMode { until_threshold, theoretical_s_n };

std::string_view to_string(BudgetMode mode);

struct RunConfig {
  Method method = Method::agd;
  bool adaptive = true;
  Index m0 = 400;
  /// Training size; 0 means the whole training set.
  Index N = 0;
  BudgetMode budget_mode = BudgetMode::until_threshold;
  std::uint64_t seed = 1;
  std::uint64_t eval_every = 1;
  /// Fixed runs stop after this many effective passes.
  double pass_cap = 100.0;
  /// Per-stage iteration cap.
  std::uint64_t max_iterations = 1'000'000;
  /// Used by theoretical_s_n budgets.
  WstarEstimate wstar;

  void validate(Index train_size) const;
  Index resolved_N(Index train_size) const { return N == 0 ? train_size : N; }
};

struct StageReport {
  Index n = 0;
  std::uint64_t iterations = 0;
  std::uint64_t grad_evals_at_exit = 0;
  double exit_grad_norm = 0.0;
  double threshold = 0.0;
  bool budget_exhausted = false;
  /// Iterate leaving the stage.
  Vector<double> exit_w;
};

struct RunResult {
  Vector<double> w;
  Trace trace;
  std::vector<StageReport> stages;
};

/// Solves the first stage R_{m0} from w = 0 until the certificate
/// ||grad R_{m0}(w)|| <= sqrt(2c) V_{m0} holds. Throws BudgetExhaustedError
/// if the cap is hit first.
std::pair<SolverState<double>, StageReport> bootstrap(
    const RunConfig &config, const RiskSpec &spec, const Dataset &train,
    Trace *trace = nullptr, const Dataset *test = nullptr);

/// Adaptive sample size run: stages m0, 2 m0, ..., N, each warm-started from
/// the previous exit iterate and stopped by the threshold rule or by the
/// theoretical iteration count.
RunResult adaptive_run(const RunConfig &config, const RiskSpec &spec,
                       const Dataset &train, const Dataset *test = nullptr);

/// Baseline on R_N from w = 0 until the threshold or the pass cap.
RunResult fixed_run(const RunConfig &config, const RiskSpec &spec,
                    const Dataset &train, const Dataset *test = nullptr);

/// Dispatches on config.adaptive.
RunResult run(const RunConfig &config, const RiskSpec &spec,
              const Dataset &train, const Dataset *test = nullptr);

}  // namespace adasize

#endif  // ADASIZE_DRIVER_HPP
