#ifndef ADASIZE_VERIFY_HPP
#define ADASIZE_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adasize/bench.hpp"
#include "adasize/driver.hpp"

namespace adasize {

/// Outcome of one empirical check. `worst_margin` is the smallest relative
/// slack (bound - observed) / bound over all trials; negative means a
/// violation.
struct CheckReport {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  std::uint64_t allowed_violations = 0;
  double worst_margin = 1.0;
  bool passed = false;
  std::string notes;

  void finish() { passed = violations <= allowed_violations; }
};

/// `name,trials,violations,worst_margin,passed`
void write_report_header(std::ostream &out);
void write_report_line(const CheckReport &report, std::ostream &out);

/// Central differences (h = 1e-6, evaluated in long double) against the
/// analytic gradient at 5 random coordinates of random w in [-1, 1]^dim.
/// Relative tolerance 1e-5 (1e-9 for squared loss); coordinates whose
/// partial is below 1e-4 in magnitude use the absolute tolerance 1e-9.
CheckReport fd_gradient_check(const RiskSpec &spec, const DatasetView &view,
                              std::uint64_t trials, std::uint64_t seed);

/// Exact enumeration: the mean over all n indices of the SVRG inner
/// direction must equal grad R_n(w_hat) to absolute error 1e-12.
CheckReport svrg_direction_check(const RiskSpec &spec, const DatasetView &view,
                                 std::uint64_t trials, std::uint64_t seed);

/// Fixed family of 32 probe points: the origin, 16 signed unit axes and 15
/// uniform draws from [-1, 1]^dim (axes are reused when dim < 8).
Eigen::MatrixXd probe_grid(Index dim, std::uint64_t seed);

/// Monte-Carlo estimate of E sup_w |L(w) - L_k(w)| over the probe grid,
/// with L approximated by the loss over the whole base set.
double estimate_accuracy(LossKind loss, const Dataset &base,
                         const Eigen::MatrixXd &probes, Index k,
                         std::uint64_t draws, std::uint64_t seed);

/// ||w*||^2 from a Newton solve of the nearly unregularized risk
/// (c V = 1e-10) on the whole base set.
WstarEstimate wstar_proxy(LossKind loss, const Dataset &base);

/// E|L_n(w) - L_m(w)| <= ((n - m)/n)(V_{n-m} + V_m) at every probe point,
/// with estimated accuracies and 25% slack.
CheckReport lemma1_check(const RiskSpec &spec, const Dataset &base, Index m,
                         Index n, std::uint64_t draws, std::uint64_t seed);

/// E||w_n*||^2 <= 4/c + ||w*||^2 with 10% slack.
CheckReport lemma2_check(const RiskSpec &spec, const Dataset &base, Index n,
                         std::uint64_t draws, std::uint64_t seed);

/// Warm-start suboptimality of a V_m-accurate solution of R_m on R_{2m},
/// against the bound with estimated accuracies and 25% slack.
CheckReport proposition1_check(const RiskSpec &spec, const Dataset &base, Index m,
                               std::uint64_t draws, std::uint64_t seed);

struct SufficiencyDetails {
  std::vector<Index> stage_sizes;
  std::vector<double> mean_suboptimality;
  std::vector<double> V_n;
  std::vector<std::uint64_t> per_draw_violations;
  std::vector<std::uint64_t> iterations;  // per stage, from the first draw
};

/// Runs adaptive_run with the theoretical iteration counts on `draws`
/// random size-N subsets of `base` and requires the across-draw mean of
/// R_n(w_n) - R_n(w_n*) to stay below V_n at every stage after the first.
CheckReport theorem_sn_sufficiency_check(Method method, const RiskSpec &spec,
                                         const Dataset &base, Index N, Index m0,
                                         std::uint64_t draws, std::uint64_t seed,
                                         const WstarEstimate &wstar,
                                         SufficiencyDetails *details = nullptr);

}  // namespace adasize

#endif  // ADASIZE_VERIFY_HPP
