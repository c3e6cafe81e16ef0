#ifndef ADASIZE_BENCH_HPP
#define ADASIZE_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adasize/driver.hpp"
#include "adasize/trace.hpp"

namespace adasize {

struct ReferenceOptimum {
  Index n = 0;
  Vector<double> w_star;
  double risk_star = 0.0;
  double grad_norm_at_star = 0.0;
  double tolerance = 0.0;

  /// R_n(w) - R_n(w*_n); accurate to tolerance^2 / (2 c V_n).
  double suboptimality(const RiskSpec &spec, const Vector<double> &w,
                       const DatasetView &view) const;
};

/// High-accuracy minimizer of R_n by AGD with the tight smoothness constant,
/// run until ||grad R_n|| <= tolerance.
ReferenceOptimum reference_optimum(const RiskSpec &spec, const DatasetView &view,
                                   double tolerance = 1e-10,
                                   std::uint64_t max_iterations = 10'000'000,
                                   const Vector<double> *warm_start = nullptr);

/// One pass is N per-sample gradient evaluations.
double effective_passes(std::uint64_t grad_evals, Index N);

/// Header `effective_passes,grad_evals,stage_n,suboptimality,grad_norm,test_error`.
/// Suboptimality and passes are measured against R_N with N = ref.n; no
/// event may come from a stage larger than N.
void emit_csv(const Trace &trace, const ReferenceOptimum &ref, std::ostream &sink);

struct CsvRow {
  double effective_passes;
  std::uint64_t grad_evals;
  Index stage_n;
  double suboptimality;
  double grad_norm;
  std::optional<double> test_error;
};

std::vector<CsvRow> parse_trace_csv(std::istream &in);

struct SummaryRow {
  Method method = Method::gd;
  bool adaptive = false;
  bool diverged = false;
  std::string error;
  std::optional<double> passes_to_VN;
  std::optional<double> passes_to_min_test_error;
  std::optional<double> min_test_error;
  std::optional<double> final_test_error;
  /// passes_to_VN of the fixed run of the same method over this run's.
  std::optional<double> speedup_vs_fixed;
};

struct CompareOutput {
  std::vector<SummaryRow> rows;
  std::vector<RunResult> runs;  // aligned with rows; empty on divergence
  ReferenceOptimum reference;
};

/// First effective pass count at which R_N suboptimality <= target.
std::optional<double> passes_to_suboptimality(const Trace &trace,
                                              const ReferenceOptimum &ref,
                                              Index N, double target);

/// Runs every config (concurrently) and tabulates passes to V_N, passes to
/// the run's minimum test error and adaptive/fixed speedups.
CompareOutput compare_matrix(const std::vector<RunConfig> &configs,
                             const RiskSpec &spec, const Dataset &train,
                             const Dataset *test);

/// Header `method,adaptive,passes_to_VN,passes_to_min_test_error,min_test_error,speedup_vs_fixed`.
void write_summary_csv(const std::vector<SummaryRow> &rows, std::ostream &out);
void write_summary_table(const std::vector<SummaryRow> &rows, std::ostream &out);

}  // namespace adasize

#endif  // ADASIZE_BENCH_HPP
