#ifndef ADASIZE_SOLVERS_HPP
#define ADASIZE_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "adasize/erm.hpp"
#include "adasize/schedule.hpp"

namespace adasize {

enum class Method { gd, agd, svrg };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// Counter-based generator: draw k is splitmix64(seed + k * golden), so the
/// whole stream is captured by (seed, counter).
struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  std::uint64_t next() {
    std::uint64_t z = seed + (++counter) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, n) by multiply-shift.
  Index uniform_index(Index n) {
    return static_cast<Index>(
        (static_cast<unsigned __int128>(next()) * static_cast<std::uint64_t>(n)) >> 64);
  }
};

/// Iterate plus the auxiliary sequences of the active method. `w` is the
/// AGD sequence w~ and the SVRG outer iterate; `agd_y` is y~; the SVRG
/// fields hold the anchor of the last epoch and its full gradient.
template <typename Scalar>
struct SolverState {
  Method method = Method::gd;
  Vector<Scalar> w;
  std::optional<Vector<Scalar>> agd_y;
  std::optional<Vector<Scalar>> svrg_anchor;
  std::optional<Vector<Scalar>> svrg_full_grad;
  CounterRng rng;
  std::uint64_t grad_evals = 0;

  static SolverState start(Method method, Vector<Scalar> w0, std::uint64_t seed) {
    SolverState s;
    s.method = method;
    s.w = std::move(w0);
    s.rng.seed = seed;
    s.restart();
    return s;
  }

  /// Re-initialises the auxiliary sequences at the current iterate, as done
  /// when a new stage is warm-started.
  void restart() {
    agd_y.reset();
    svrg_anchor.reset();
    svrg_full_grad.reset();
    if (method == Method::agd) agd_y = w;
  }
};

namespace detail {
template <typename Scalar>
void ensure_finite(const Vector<Scalar> &w, Index n) {
  if (!w.allFinite()) throw DivergenceError(n, 0);
}
template <typename Scalar>
void expect_method(const SolverState<Scalar> &state, Method m) {
  if (state.method != m)
    throw std::invalid_argument("solver state is not of kind " +
                                std::string(to_string(m)));
}
}  // namespace detail

/// w <- w - grad / (M + c V_n), with `grad` = grad R_n(w) already computed.
template <typename Scalar>
void gd_step(SolverState<Scalar> &state, const RiskSpec &spec,
             const BasicDatasetView<Scalar> &view, const Vector<Scalar> &grad) {
  detail::expect_method(state, Method::gd);
  const Scalar eta = Scalar(agd_params(spec, view.size()).eta);
  state.w -= eta * grad;
  state.grad_evals += static_cast<std::uint64_t>(view.size());
  detail::ensure_finite(state.w, view.size());
}

template <typename Scalar>
void gd_step(SolverState<Scalar> &state, const RiskSpec &spec,
             const BasicDatasetView<Scalar> &view) {
  const auto eval = risk_value_and_grad(spec, state.w, view);
  gd_step(state, spec, view, eval.grad);
}

/// w_{k+1} = y_k - eta grad R_n(y_k);  y_{k+1} = w_{k+1} + beta (w_{k+1} - w_k).
/// `beta_override` replaces the scheduled momentum (used to reduce to GD).
template <typename Scalar>
void agd_step(SolverState<Scalar> &state, const RiskSpec &spec,
              const BasicDatasetView<Scalar> &view,
              std::optional<double> beta_override = std::nullopt) {
  detail::expect_method(state, Method::agd);
  if (!state.agd_y) state.agd_y = state.w;
  const auto params = agd_params(spec, view.size());
  const Scalar eta = Scalar(params.eta);
  const Scalar beta = Scalar(beta_override.value_or(params.beta));
  auto &y = *state.agd_y;
  const auto eval = risk_value_and_grad(spec, y, view);
  Vector<Scalar> w_next = y - eta * eval.grad;
  y = w_next + beta * (w_next - state.w);
  state.w = std::move(w_next);
  state.grad_evals += static_cast<std::uint64_t>(view.size());
  detail::ensure_finite(state.w, view.size());
  detail::ensure_finite(y, view.size());
}

/// grad f(w_hat, z_i) + cV w_hat - grad f(anchor, z_i) - cV anchor + full_grad,
/// the variance-reduced inner direction for sample i.
template <typename Scalar>
Vector<Scalar> svrg_direction(const RiskSpec &spec,
                              const BasicDatasetView<Scalar> &view, Index i,
                              const Vector<Scalar> &w_hat,
                              const Vector<Scalar> &anchor,
                              const Vector<Scalar> &full_grad) {
  const Scalar reg = Scalar(spec.c * statistical_accuracy(spec, view.size()));
  const auto x = view.row(i);
  const Scalar y = view.label(i);
  const Scalar diff = loss_derivative(spec.loss, Scalar(x.dot(w_hat)), y) -
                      loss_derivative(spec.loss, Scalar(x.dot(anchor)), y);
  Vector<Scalar> dir = full_grad + reg * (w_hat - anchor);
  dir += diff * x.transpose();
  return dir;
}

/// One outer loop: full gradient at the anchor, then q_n = n inner steps
/// with indices drawn uniformly with replacement. The last inner iterate
/// becomes the next anchor.
template <typename Scalar>
void svrg_epoch(SolverState<Scalar> &state, const RiskSpec &spec,
                const BasicDatasetView<Scalar> &view) {
  detail::expect_method(state, Method::svrg);
  const Index n = view.size();
  const auto params = svrg_params(spec, n);
  const Scalar eta = Scalar(params.eta);
  const Scalar reg = Scalar(spec.c * statistical_accuracy(spec, n));

  state.svrg_anchor = state.w;
  state.svrg_full_grad = risk_value_and_grad(spec, state.w, view).grad;
  const auto &anchor = *state.svrg_anchor;
  const auto &full_grad = *state.svrg_full_grad;

  // Anchor margins are fixed for the epoch.
  const Vector<Scalar> anchor_margins = view.features() * anchor;
  Vector<Scalar> w_hat = anchor;
  for (Index t = 0; t < params.q; ++t) {
    const Index i = state.rng.uniform_index(n);
    const auto x = view.row(i);
    const Scalar y = view.label(i);
    const Scalar diff = loss_derivative(spec.loss, Scalar(x.dot(w_hat)), y) -
                        loss_derivative(spec.loss, anchor_margins[i], y);
    w_hat -= eta * (full_grad + reg * (w_hat - anchor));
    w_hat -= (eta * diff) * x.transpose();
  }
  state.w = std::move(w_hat);
  state.grad_evals += 2 * static_cast<std::uint64_t>(n);
  detail::ensure_finite(state.w, n);
}

/// Stopping rule of one stage.
struct StepBudget {
  enum class Mode { until_threshold, fixed_iterations };

  Mode mode = Mode::until_threshold;
  std::optional<double> threshold;
  std::optional<std::uint64_t> iterations;
  std::uint64_t max_iterations = 1'000'000;

  static StepBudget until(double threshold, std::uint64_t cap = 1'000'000) {
    return {Mode::until_threshold, threshold, std::nullopt, cap};
  }
  static StepBudget fixed(std::uint64_t iterations, std::uint64_t cap = 1'000'000) {
    return {Mode::fixed_iterations, std::nullopt, iterations, cap};
  }

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (mode == Mode::until_threshold && (!threshold || iterations))
      throw std::invalid_argument("until_threshold budget needs only a threshold");
    if (mode == Mode::fixed_iterations && (!iterations || threshold))
      throw std::invalid_argument("fixed_iterations budget needs only an iteration count");
  }
};

template <typename Scalar>
struct SolveResult {
  std::uint64_t iterations = 0;
  bool budget_exhausted = false;
  /// ||grad R_n(w)|| at exit.
  Scalar exit_grad_norm = Scalar(0);
};

/// Called after every iteration with the iteration count, the state and the
/// stage risk evaluated at the new iterate.
template <typename Scalar>
using IterationObserver = std::function<void(
    std::uint64_t iteration, const SolverState<Scalar> &, const RiskEval<Scalar> &)>;

/// Runs the active method on R_n. One SVRG iteration is one epoch. Gradient
/// norms evaluated for the stopping test are monitoring work and are not
/// added to grad_evals.
template <typename Scalar>
SolveResult<Scalar> solve(SolverState<Scalar> &state, const RiskSpec &spec,
                          const BasicDatasetView<Scalar> &view,
                          const StepBudget &budget,
                          const IterationObserver<Scalar> &observer = {}) {
  budget.validate();
  const bool fixed = budget.mode == StepBudget::Mode::fixed_iterations;
  const std::uint64_t target = fixed ? *budget.iterations : budget.max_iterations;
  const std::uint64_t limit = std::min(target, budget.max_iterations);

  SolveResult<Scalar> result;
  auto eval = risk_value_and_grad(spec, state.w, view);
  try {
    while (true) {
      if (!fixed && eval.grad_norm <= Scalar(*budget.threshold)) break;
      if (result.iterations >= limit) {
        result.budget_exhausted = !fixed || limit < target;
        break;
      }
      switch (state.method) {
        case Method::gd:
          gd_step(state, spec, view, eval.grad);
          break;
        case Method::agd:
          agd_step(state, spec, view);
          break;
        case Method::svrg:
          svrg_epoch(state, spec, view);
          break;
      }
      ++result.iterations;
      eval = risk_value_and_grad(spec, state.w, view);
      if (observer) observer(result.iterations, state, eval);
    }
  } catch (const DivergenceError &) {
    throw DivergenceError(view.size(), result.iterations + 1);
  }
  result.exit_grad_norm = eval.grad_norm;
  return result;
}

}  // namespace adasize

#endif  // ADASIZE_SOLVERS_HPP
