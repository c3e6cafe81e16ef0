#ifndef ADASIZE_SCHEDULE_HPP
#define ADASIZE_SCHEDULE_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "adasize/risk_spec.hpp"

namespace adasize {

/// Estimate of ||w*||^2, the squared norm of the population minimizer.
struct WstarEstimate {
  enum class Source { user, reference_solve, zero_default };

  double norm_sq = 0.0;
  Source source = Source::zero_default;
};

std::string_view to_string(WstarEstimate::Source source);

Index next_sample_size(Index m, Index N);

/// m0, 2 m0, 4 m0, ..., N (last size clamped to N).
std::vector<Index> stage_sizes(Index m0, Index N);

/// Gradient-norm level sqrt(2c) V_n that certifies R_n(w) - R_n* <= V_n.
double stop_threshold(const RiskSpec &spec, Index n);

struct AgdParams {
  double eta;
  double beta;
};

AgdParams agd_params(const RiskSpec &spec, Index n);

struct SvrgParams {
  Index q;
  double eta;
  double rho;
  /// (M + c V_n) / (n c V_n); the contraction bound needs this <= 0.02.
  double size_ratio;
  bool warning;
};

SvrgParams svrg_params(const RiskSpec &spec, Index n);

/// Linear rate 1 - c V_n / (M + c V_n) of gradient descent with step
/// 1 / (M + c V_n).
double gd_rate(const RiskSpec &spec, Index n);

/// Iterations for any method contracting suboptimality by `rho` per step.
std::uint64_t iterations_generic(double rho, const RiskSpec &spec,
                                 const WstarEstimate &wstar);
std::uint64_t iterations_agd(const RiskSpec &spec, Index n,
                             const WstarEstimate &wstar);
/// Outer loops per stage; independent of n.
std::uint64_t iterations_svrg(const RiskSpec &spec, const WstarEstimate &wstar);

/// Per-sample gradient evaluations to reach V_N. Requires N / m0 to be a
/// power of two.
double total_complexity_agd(const RiskSpec &spec, Index N, Index m0,
                            const WstarEstimate &wstar);
double total_complexity_svrg(const RiskSpec &spec, Index N,
                             const WstarEstimate &wstar);

struct WarmStartBound {
  double general;
  /// delta_m + [2 + (1 - 2^-alpha)(2 + (c/2)||w*||^2)] V_m, set when n = 2m.
  std::optional<double> doubled;
};

/// Expected suboptimality on R_n of a delta_m-accurate solution of R_m.
WarmStartBound warm_start_bound(const RiskSpec &spec, Index m, Index n,
                                double delta_m, const WstarEstimate &wstar);

struct StagePlan {
  Index n;
  double V_n;
  double stop_threshold;
  double agd_eta;
  double agd_beta;
  Index svrg_q;
  double svrg_eta;
  double svrg_rho;
  bool svrg_warning;
  /// Generic count at rate svrg_rho, absent when svrg_rho >= 1.
  std::optional<std::uint64_t> s_n_generic;
  std::uint64_t s_n_gd;
  std::uint64_t s_n_agd;
  std::uint64_t s_n_svrg;
};

StagePlan plan_stage(const RiskSpec &spec, Index n, const WstarEstimate &wstar);
std::vector<StagePlan> plan_stages(const RiskSpec &spec, Index m0, Index N,
                                   const WstarEstimate &wstar);

}  // namespace adasize

#endif  // ADASIZE_SCHEDULE_HPP
