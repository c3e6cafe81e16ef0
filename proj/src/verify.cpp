#include "adasize/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace adasize {

namespace {

constexpr double kLemmaSlack = 0.25;
constexpr double kNormSlack = 0.10;

/// Uniform k-subsets of {0..size-1} by partial Fisher-Yates; the first m
/// entries of a k-subset are themselves a uniform m-subset, which gives
/// nested draws for free.
class SubsetSampler {
 public:
  SubsetSampler(Index size, std::uint64_t seed)
      : order_(static_cast<std::size_t>(size)), rng_(seed) {
    std::iota(order_.begin(), order_.end(), Index{0});
  }

  std::span<const Index> draw(Index k) {
    for (Index i = 0; i < k; ++i) {
      std::uniform_int_distribution<Index> pick(i, static_cast<Index>(order_.size()) - 1);
      std::swap(order_[static_cast<std::size_t>(i)],
                order_[static_cast<std::size_t>(pick(rng_))]);
    }
    return {order_.data(), static_cast<std::size_t>(k)};
  }

 private:
  std::vector<Index> order_;
  std::mt19937_64 rng_;
};

/// Per-sample losses at every probe point: rows are samples, columns probes.
Eigen::MatrixXd probe_losses(LossKind loss, const Dataset &base,
                             const Eigen::MatrixXd &probes) {
  Eigen::MatrixXd margins = base.features() * probes;
  for (Index i = 0; i < margins.rows(); ++i)
    for (Index p = 0; p < margins.cols(); ++p)
      margins(i, p) = loss_of_margin(loss, margins(i, p), base.labels()[i]);
  return margins;
}

Eigen::RowVectorXd subset_mean(const Eigen::MatrixXd &losses,
                               std::span<const Index> rows) {
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(losses.cols());
  for (const Index r : rows) sum += losses.row(r);
  return sum / static_cast<double>(rows.size());
}

double mean_accuracy(const Eigen::MatrixXd &losses, const Eigen::RowVectorXd &full,
                     Index k, std::uint64_t draws, SubsetSampler &sampler) {
  double total = 0.0;
  for (std::uint64_t d = 0; d < draws; ++d)
    total += (subset_mean(losses, sampler.draw(k)) - full).cwiseAbs().maxCoeff();
  return total / static_cast<double>(draws);
}

double relative_margin(double bound, double observed) {
  if (bound > 0.0) return (bound - observed) / bound;
  return observed <= 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_report_header(std::ostream &out) {
  out << "name,trials,violations,worst_margin,passed\n";
}

void write_report_line(const CheckReport &r, std::ostream &out) {
  char margin[32];
  std::snprintf(margin, sizeof margin, "%.17g", r.worst_margin);
  out << r.name << ',' << r.trials << ',' << r.violations << ',' << margin << ','
      << (r.passed ? "true" : "false") << '\n';
}

CheckReport fd_gradient_check(const RiskSpec &spec, const DatasetView &view,
                              std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("fd_gradient_check needs trials >= 1");
  using Long = long double;
  const auto long_base = view.base().cast<Long>();
  const BasicDatasetView<Long> long_view(long_base, view.size());
  const double rel_tol = spec.loss == LossKind::squared ? 1e-9 : 1e-5;
  constexpr double kAbsTol = 1e-9;
  constexpr double kAbsSwitch = 1e-4;
  constexpr Long h = 1e-6L;

  CheckReport report{"fd_gradient_" + std::string(to_string(spec.loss))};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Index> coords(static_cast<std::size_t>(view.dim()));
  std::iota(coords.begin(), coords.end(), Index{0});
  const std::size_t per_trial = std::min<std::size_t>(5, coords.size());

  for (std::uint64_t t = 0; t < trials; ++t) {
    Vector<double> w(view.dim());
    for (Index j = 0; j < w.size(); ++j) w[j] = unit(rng);
    const auto analytic = risk_value_and_grad(spec, w, view).grad;
    std::shuffle(coords.begin(), coords.end(), rng);
    Vector<Long> wl = w.cast<Long>();
    for (std::size_t k = 0; k < per_trial; ++k) {
      const Index j = coords[k];
      const Long saved = wl[j];
      wl[j] = saved + h;
      const Long up = risk_value(spec, wl, long_view);
      wl[j] = saved - h;
      const Long down = risk_value(spec, wl, long_view);
      wl[j] = saved;
      const double fd = static_cast<double>((up - down) / (2 * h));
      const double err = std::abs(fd - analytic[j]);
      const double scale = std::max(std::abs(fd), std::abs(analytic[j]));
      const double observed = scale < kAbsSwitch ? err : err / scale;
      const double tol = scale < kAbsSwitch ? kAbsTol : rel_tol;
      ++report.trials;
      if (!(observed < tol)) ++report.violations;
      report.worst_margin = std::min(report.worst_margin, relative_margin(tol, observed));
    }
  }
  report.notes = "relative tolerance " + fmt(rel_tol);
  report.finish();
  return report;
}

CheckReport svrg_direction_check(const RiskSpec &spec, const DatasetView &view,
                                 std::uint64_t trials, std::uint64_t seed) {
  if (view.size() > 50)
    throw std::invalid_argument("svrg_direction_check enumerates at most 50 samples");
  if (trials == 0) throw std::invalid_argument("svrg_direction_check needs trials >= 1");
  constexpr double kTol = 1e-12;
  CheckReport report{"svrg_direction_n" + std::to_string(view.size())};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto draw = [&] {
    Vector<double> v(view.dim());
    for (Index j = 0; j < v.size(); ++j) v[j] = unit(rng);
    return v;
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Vector<double> w_hat = draw();
    const Vector<double> anchor = draw();
    const auto full_grad = risk_value_and_grad(spec, anchor, view).grad;
    Vector<double> mean = Vector<double>::Zero(view.dim());
    for (Index i = 0; i < view.size(); ++i)
      mean += svrg_direction(spec, view, i, w_hat, anchor, full_grad);
    mean /= static_cast<double>(view.size());
    const auto target = risk_value_and_grad(spec, w_hat, view).grad;
    const double err = (mean - target).cwiseAbs().maxCoeff();
    ++report.trials;
    if (!(err < kTol)) ++report.violations;
    report.worst_margin = std::min(report.worst_margin, relative_margin(kTol, err));
  }
  report.finish();
  return report;
}

Eigen::MatrixXd probe_grid(Index dim, std::uint64_t seed) {
  constexpr Index kProbes = 32;
  constexpr Index kAxes = 8;
  Eigen::MatrixXd probes = Eigen::MatrixXd::Zero(dim, kProbes);
  std::mt19937_64 rng(seed);
  std::vector<Index> axes(static_cast<std::size_t>(dim));
  std::iota(axes.begin(), axes.end(), Index{0});
  std::shuffle(axes.begin(), axes.end(), rng);
  for (Index a = 0; a < kAxes; ++a) {
    const Index axis = axes[static_cast<std::size_t>(a % dim)];
    probes(axis, 1 + 2 * a) = 1.0;
    probes(axis, 2 + 2 * a) = -1.0;
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Index p = 1 + 2 * kAxes; p < kProbes; ++p)
    for (Index j = 0; j < dim; ++j) probes(j, p) = unit(rng);
  return probes;
}

double estimate_accuracy(LossKind loss, const Dataset &base,
                         const Eigen::MatrixXd &probes, Index k,
                         std::uint64_t draws, std::uint64_t seed) {
  if (k < 1 || k > base.size()) throw std::invalid_argument("subset size out of range");
  if (draws == 0) throw std::invalid_argument("need at least one draw");
  const auto losses = probe_losses(loss, base, probes);
  const Eigen::RowVectorXd full = losses.colwise().mean();
  SubsetSampler sampler(base.size(), seed);
  return mean_accuracy(losses, full, k, draws, sampler);
}

WstarEstimate wstar_proxy(LossKind loss, const Dataset &base) {
  constexpr Index kMaxDenseDim = 4096;
  if (base.dim() > kMaxDenseDim)
    throw std::invalid_argument("w* proxy solves densely; dimension too large");
  constexpr double kReg = 1e-10;
  const Index N = base.size();
  const auto &X = base.features();
  Vector<double> w = Vector<double>::Zero(base.dim());

  const auto objective = [&](const Vector<double> &v) {
    const Vector<double> z = X * v;
    double total = 0.0;
    for (Index i = 0; i < N; ++i) total += loss_of_margin(loss, z[i], base.labels()[i]);
    return total / static_cast<double>(N) + 0.5 * kReg * v.squaredNorm();
  };

  for (int it = 0; it < 200; ++it) {
    const Vector<double> z = X * w;
    Vector<double> coef(N), curv(N);
    for (Index i = 0; i < N; ++i) {
      const double y = base.labels()[i];
      coef[i] = loss_derivative(loss, z[i], y);
      if (loss == LossKind::logistic) {
        const double s = sigmoid_neg(y * z[i]);
        curv[i] = s * (1.0 - s);
      } else {
        curv[i] = 1.0;
      }
    }
    const Vector<double> grad =
        (X.transpose() * coef) / static_cast<double>(N) + kReg * w;
    if (grad.norm() < 1e-12) break;
    const Dataset::Matrix weighted = curv.asDiagonal() * X;
    Eigen::MatrixXd H = Eigen::MatrixXd(X.transpose() * weighted) / static_cast<double>(N);
    H.diagonal().array() += kReg;
    const Vector<double> step = H.ldlt().solve(grad);
    // Backtracking keeps the damped Newton iteration monotone.
    const double f0 = objective(w);
    double t = 1.0;
    while (t > 1e-12 && objective(w - t * step) > f0 - 1e-4 * t * grad.dot(step))
      t *= 0.5;
    w -= t * step;
  }
  return {w.squaredNorm(), WstarEstimate::Source::reference_solve};
}

CheckReport lemma1_check(const RiskSpec &spec, const Dataset &base, Index m,
                         Index n, std::uint64_t draws, std::uint64_t seed) {
  if (draws < 100) throw std::invalid_argument("lemma1_check needs draws >= 100");
  if (m < 1 || m > n) throw std::invalid_argument("lemma1_check needs 1 <= m <= n");
  if (n > base.size()) throw std::invalid_argument("base too small for n");

  CheckReport report{"lemma1"};
  const auto probes = probe_grid(base.dim(), seed);
  if (m == n) {
    report.trials = static_cast<std::uint64_t>(probes.cols());
    report.notes = "m = n: both sides vanish";
    report.finish();
    return report;
  }
  const auto losses = probe_losses(spec.loss, base, probes);
  const Eigen::RowVectorXd full = losses.colwise().mean();
  SubsetSampler sampler(base.size(), seed ^ 0x5bd1e995ULL);
  const double v_m = mean_accuracy(losses, full, m, draws, sampler);
  const double v_rest = mean_accuracy(losses, full, n - m, draws, sampler);

  Eigen::RowVectorXd gap = Eigen::RowVectorXd::Zero(probes.cols());
  for (std::uint64_t d = 0; d < draws; ++d) {
    const auto rows = sampler.draw(n);
    gap += (subset_mean(losses, rows) - subset_mean(losses, rows.first(m))).cwiseAbs();
  }
  gap /= static_cast<double>(draws);

  const double frac = static_cast<double>(n - m) / static_cast<double>(n);
  const double bound = frac * (v_rest + v_m) * (1.0 + kLemmaSlack);
  for (Index p = 0; p < gap.size(); ++p) {
    ++report.trials;
    if (gap[p] > bound) ++report.violations;
    report.worst_margin = std::min(report.worst_margin, relative_margin(bound, gap[p]));
  }
  report.notes = "V_hat_m=" + fmt(v_m) + " V_hat_n-m=" + fmt(v_rest) +
                 " bound=" + fmt(bound) + " max_mean_gap=" + fmt(gap.maxCoeff());
  report.finish();
  return report;
}

CheckReport lemma2_check(const RiskSpec &spec, const Dataset &base, Index n,
                         std::uint64_t draws, std::uint64_t seed) {
  if (n < 1 || 4 * n > base.size())
    throw std::invalid_argument("lemma2_check needs n <= size(base) / 4");
  if (draws == 0) throw std::invalid_argument("lemma2_check needs draws >= 1");
  CheckReport report{"lemma2"};
  const auto wstar = wstar_proxy(spec.loss, base);
  const double bound = 4.0 / spec.c + wstar.norm_sq;
  SubsetSampler sampler(base.size(), seed);
  double total = 0.0;
  std::uint64_t exceed = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    const auto subset = select_rows(base, sampler.draw(n));
    const auto ref = reference_optimum(spec, DatasetView(subset), 1e-8);
    const double norm_sq = ref.w_star.squaredNorm();
    total += norm_sq;
    if (norm_sq > bound) ++exceed;
  }
  const double mean = total / static_cast<double>(draws);
  const double slack_bound = bound * (1.0 + kNormSlack);
  report.trials = draws;
  report.violations = mean > slack_bound ? 1 : 0;
  report.worst_margin = relative_margin(slack_bound, mean);
  report.notes = "mean_norm_sq=" + fmt(mean) + " bound=" + fmt(bound) +
                 " wstar_norm_sq=" + fmt(wstar.norm_sq) +
                 " per_draw_exceed=" + std::to_string(exceed);
  report.finish();
  return report;
}

CheckReport proposition1_check(const RiskSpec &spec, const Dataset &base, Index m,
                               std::uint64_t draws, std::uint64_t seed) {
  const Index n = 2 * m;
  if (m < 1 || n > base.size()) throw std::invalid_argument("proposition1_check needs 2m <= size(base)");
  if (draws == 0) throw std::invalid_argument("proposition1_check needs draws >= 1");
  CheckReport report{"proposition1"};

  const auto wstar = wstar_proxy(spec.loss, base);
  const auto probes = probe_grid(base.dim(), seed);
  const auto losses = probe_losses(spec.loss, base, probes);
  const Eigen::RowVectorXd full = losses.colwise().mean();
  const std::uint64_t accuracy_draws = std::max<std::uint64_t>(draws, 100);
  SubsetSampler sampler(base.size(), seed ^ 0x5bd1e995ULL);
  const double vh_m = mean_accuracy(losses, full, m, accuracy_draws, sampler);
  const double vh_rest = mean_accuracy(losses, full, n - m, accuracy_draws, sampler);
  const double vh_n = mean_accuracy(losses, full, n, accuracy_draws, sampler);

  const double V_m = statistical_accuracy(spec, m);
  const double V_n = statistical_accuracy(spec, n);
  const double delta_m = V_m;
  // Regularizer terms use the model accuracies; E||w_n*||^2 is bounded by
  // 4 V_hat_n / (c V_n) + ||w*||^2.
  const double frac = static_cast<double>(n - m) / static_cast<double>(n);
  const double bound = delta_m + 2.0 * frac * (vh_rest + vh_m) +
                       0.5 * spec.c * (V_m - V_n) *
                           (4.0 * vh_n / (spec.c * V_n) + wstar.norm_sq);
  const double slack_bound = bound * (1.0 + kLemmaSlack);

  double total = 0.0;
  std::uint64_t exceed = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    const auto subset = select_rows(base, sampler.draw(n));
    auto state = SolverState<double>::start(Method::agd, Vector<double>::Zero(base.dim()), d);
    solve(state, spec, prefix(subset, m), StepBudget::until(stop_threshold(spec, m)));
    const auto view_n = prefix(subset, n);
    const auto ref = reference_optimum(spec, view_n, 1e-10);
    const double gap = ref.suboptimality(spec, state.w, view_n);
    total += gap;
    if (gap > bound) ++exceed;
  }
  const double mean = total / static_cast<double>(draws);
  report.trials = draws;
  report.violations = mean > slack_bound ? 1 : 0;
  report.worst_margin = relative_margin(slack_bound, mean);
  report.notes = "mean_gap=" + fmt(mean) + " bound=" + fmt(bound) + " V_hat_m=" +
                 fmt(vh_m) + " V_hat_n=" + fmt(vh_n) +
                 " per_draw_exceed=" + std::to_string(exceed);
  report.finish();
  return report;
}

CheckReport theorem_sn_sufficiency_check(Method method, const RiskSpec &spec,
                                         const Dataset &base, Index N, Index m0,
                                         std::uint64_t draws, std::uint64_t seed,
                                         const WstarEstimate &wstar,
                                         SufficiencyDetails *details) {
  if (method == Method::gd)
    throw std::invalid_argument("sufficiency check covers agd and svrg");
  if (N > base.size()) throw std::invalid_argument("base too small for N");
  if (draws == 0) throw std::invalid_argument("need at least one draw");

  const auto sizes = stage_sizes(m0, N);
  const std::size_t stages = sizes.size();
  std::vector<double> sums(stages, 0.0);
  std::vector<std::uint64_t> exceed(stages, 0);
  SufficiencyDetails local;
  local.stage_sizes = sizes;
  std::uint64_t count_mismatch = 0;

  RunConfig config;
  config.method = method;
  config.adaptive = true;
  config.m0 = m0;
  config.N = N;
  config.budget_mode = BudgetMode::theoretical_s_n;
  config.eval_every = std::numeric_limits<std::uint64_t>::max();
  config.wstar = wstar;

  SubsetSampler sampler(base.size(), seed);
  for (std::uint64_t d = 0; d < draws; ++d) {
    const auto train = select_rows(base, sampler.draw(N));
    config.seed = seed + d;
    const auto result = adaptive_run(config, spec, train);
    for (std::size_t k = 1; k < stages; ++k) {
      const auto &stage = result.stages[k];
      const auto view = prefix(train, stage.n);
      const auto ref = reference_optimum(spec, view, 1e-10);
      const double gap = ref.suboptimality(spec, stage.exit_w, view);
      sums[k] += gap;
      if (gap > statistical_accuracy(spec, stage.n)) ++exceed[k];
      const std::uint64_t expected = method == Method::svrg
                                         ? iterations_svrg(spec, wstar)
                                         : iterations_agd(spec, stage.n, wstar);
      if (stage.iterations != expected) ++count_mismatch;
      if (d == 0) local.iterations.push_back(stage.iterations);
    }
  }

  CheckReport report{"theorem_sn_" + std::string(to_string(method))};
  std::ostringstream notes;
  for (std::size_t k = 1; k < stages; ++k) {
    const double V = statistical_accuracy(spec, sizes[k]);
    const double mean = sums[k] / static_cast<double>(draws);
    local.mean_suboptimality.push_back(mean);
    local.V_n.push_back(V);
    local.per_draw_violations.push_back(exceed[k]);
    ++report.trials;
    if (mean > V) ++report.violations;
    report.worst_margin = std::min(report.worst_margin, relative_margin(V, mean));
    notes << "n=" << sizes[k] << " mean=" << fmt(mean) << " V=" << fmt(V)
          << " draw_violations=" << exceed[k] << "; ";
  }
  report.violations += count_mismatch;
  if (draws < 2) notes << "low-power: single draw; ";
  report.notes = notes.str();
  report.finish();
  if (details) *details = std::move(local);
  return report;
}

}  // namespace adasize
