#include "adasize/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace adasize {

namespace {

double pow2(double a) { return std::exp2(a); }

// 3 * 2^a + (2^a - 1)(2 + (c/2) ||w*||^2)
double warm_start_ratio(const RiskSpec &spec, const WstarEstimate &wstar) {
  const double p = pow2(spec.alpha);
  return 3.0 * p + (p - 1.0) * (2.0 + 0.5 * spec.c * wstar.norm_sq);
}

// 6 * 2^a + (2^a - 1)(4 + c ||w*||^2); the AGD bound pays a factor two.
double agd_warm_start_ratio(const RiskSpec &spec, const WstarEstimate &wstar) {
  const double p = pow2(spec.alpha);
  return 6.0 * p + (p - 1.0) * (4.0 + spec.c * wstar.norm_sq);
}

std::uint64_t floor_plus_one(double bound) {
  if (!std::isfinite(bound) ||
      bound >= static_cast<double>(std::numeric_limits<std::uint64_t>::max()))
    throw std::overflow_error("iteration bound is not representable");
  return static_cast<std::uint64_t>(std::floor(bound)) + 1;
}

void check_wstar(const WstarEstimate &wstar) {
  if (!(wstar.norm_sq >= 0.0))
    throw std::invalid_argument("||w*||^2 must be nonnegative");
}

}  // namespace

std::string_view to_string(LossKind kind) {
  return kind == LossKind::logistic ? "logistic" : "squared";
}

LossKind loss_from_string(std::string_view name) {
  if (name == "logistic") return LossKind::logistic;
  if (name == "squared") return LossKind::squared;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

std::string_view to_string(WstarEstimate::Source source) {
  switch (source) {
    case WstarEstimate::Source::user:
      return "user";
    case WstarEstimate::Source::reference_solve:
      return "reference_solve";
    case WstarEstimate::Source::zero_default:
      return "zero_default";
  }
  return "";
}

Index next_sample_size(Index m, Index N) {
  if (m < 1 || m > N) throw std::invalid_argument("need 1 <= m <= N");
  return m > N / 2 ? N : std::min(2 * m, N);
}

std::vector<Index> stage_sizes(Index m0, Index N) {
  if (m0 < 1 || m0 > N) throw std::invalid_argument("need 1 <= m0 <= N");
  std::vector<Index> sizes{m0};
  while (sizes.back() < N) sizes.push_back(next_sample_size(sizes.back(), N));
  return sizes;
}

double stop_threshold(const RiskSpec &spec, Index n) {
  return std::sqrt(2.0 * spec.c) * statistical_accuracy(spec, n);
}

AgdParams agd_params(const RiskSpec &spec, Index n) {
  const double mu = spec.c * statistical_accuracy(spec, n);
  const double L = mu + spec.M;
  return {1.0 / L, (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu))};
}

SvrgParams svrg_params(const RiskSpec &spec, Index n) {
  const double mu = spec.c * statistical_accuracy(spec, n);
  const double L = spec.M + mu;
  const double ratio = L / (static_cast<double>(n) * mu);
  // 1/(mu eta (1 - 2 L eta) q) + 2 L eta / (1 - 2 L eta) at eta = 0.1/L, q = n
  const double rho = ratio / 0.08 + 0.25;
  return {n, 0.1 / L, rho, ratio, ratio > 0.02};
}

double gd_rate(const RiskSpec &spec, Index n) {
  const double mu = spec.c * statistical_accuracy(spec, n);
  return 1.0 - mu / (spec.M + mu);
}

std::uint64_t iterations_generic(double rho, const RiskSpec &spec,
                                 const WstarEstimate &wstar) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("linear rate must lie in (0, 1)");
  check_wstar(wstar);
  // Base-2 logs keep exact powers of two exact.
  return floor_plus_one(std::log2(warm_start_ratio(spec, wstar)) /
                        -std::log2(rho));
}

std::uint64_t iterations_agd(const RiskSpec &spec, Index n,
                             const WstarEstimate &wstar) {
  check_wstar(wstar);
  const double cg = spec.c * spec.gamma;
  const double kappa_sqrt = std::sqrt(
      (std::pow(static_cast<double>(n), spec.alpha) * spec.M + cg) / cg);
  return floor_plus_one(kappa_sqrt * std::log(agd_warm_start_ratio(spec, wstar)));
}

std::uint64_t iterations_svrg(const RiskSpec &spec, const WstarEstimate &wstar) {
  check_wstar(wstar);
  return floor_plus_one(std::log2(warm_start_ratio(spec, wstar)));
}

double total_complexity_agd(const RiskSpec &spec, Index N, Index m0,
                            const WstarEstimate &wstar) {
  check_wstar(wstar);
  if (m0 < 1 || N < m0 || N % m0 != 0)
    throw std::invalid_argument("N / m0 must be a power of two");
  const Index ratio = N / m0;
  if ((ratio & (ratio - 1)) != 0)
    throw std::invalid_argument("N / m0 must be a power of two");
  const double q = std::log2(static_cast<double>(ratio));
  const double root = std::sqrt(pow2(spec.alpha));
  const double geometric = root / (root - 1.0);
  const double kappa_sqrt = std::sqrt(
      std::pow(static_cast<double>(N), spec.alpha) * spec.M / (spec.c * spec.gamma));
  return static_cast<double>(N) * (1.0 + q + geometric * kappa_sqrt) *
         std::log(agd_warm_start_ratio(spec, wstar));
}

double total_complexity_svrg(const RiskSpec &spec, Index N,
                             const WstarEstimate &wstar) {
  check_wstar(wstar);
  return 4.0 * static_cast<double>(N) * std::log2(warm_start_ratio(spec, wstar));
}

WarmStartBound warm_start_bound(const RiskSpec &spec, Index m, Index n,
                                double delta_m, const WstarEstimate &wstar) {
  check_wstar(wstar);
  if (m < 1 || m >= n) throw std::invalid_argument("warm start needs m < n");
  const double Vm = statistical_accuracy(spec, m);
  const double Vn = statistical_accuracy(spec, n);
  const double Vnm = statistical_accuracy(spec, n - m);
  const double frac = static_cast<double>(n - m) / static_cast<double>(n);
  WarmStartBound out{delta_m + 2.0 * frac * (Vnm + Vm) + 2.0 * (Vm - Vn) +
                         0.5 * spec.c * (Vm - Vn) * wstar.norm_sq,
                     std::nullopt};
  if (n == 2 * m) {
    const double coef = 2.0 + (1.0 - pow2(-spec.alpha)) *
                                  (2.0 + 0.5 * spec.c * wstar.norm_sq);
    out.doubled = delta_m + coef * Vm;
  }
  return out;
}

StagePlan plan_stage(const RiskSpec &spec, Index n, const WstarEstimate &wstar) {
  const auto agd = agd_params(spec, n);
  const auto svrg = svrg_params(spec, n);
  StagePlan plan{};
  plan.n = n;
  plan.V_n = statistical_accuracy(spec, n);
  plan.stop_threshold = stop_threshold(spec, n);
  plan.agd_eta = agd.eta;
  plan.agd_beta = agd.beta;
  plan.svrg_q = svrg.q;
  plan.svrg_eta = svrg.eta;
  plan.svrg_rho = svrg.rho;
  plan.svrg_warning = svrg.warning;
  if (svrg.rho < 1.0) plan.s_n_generic = iterations_generic(svrg.rho, spec, wstar);
  plan.s_n_gd = iterations_generic(gd_rate(spec, n), spec, wstar);
  plan.s_n_agd = iterations_agd(spec, n, wstar);
  plan.s_n_svrg = iterations_svrg(spec, wstar);
  return plan;
}

std::vector<StagePlan> plan_stages(const RiskSpec &spec, Index m0, Index N,
                                   const WstarEstimate &wstar) {
  spec.validate();
  std::vector<StagePlan> plans;
  for (const Index n : stage_sizes(m0, N)) plans.push_back(plan_stage(spec, n, wstar));
  return plans;
}

}  // namespace adasize
