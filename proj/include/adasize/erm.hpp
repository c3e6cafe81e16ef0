#ifndef ADASIZE_ERM_HPP
#define ADASIZE_ERM_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adasize/data.hpp"
#include "adasize/risk_spec.hpp"

namespace adasize {

// Per-sample losses are written in terms of the margin z = w'x.

/// log(1 + exp(-t)) without overflow or cancellation.
template <typename Scalar>
Scalar softplus_neg(Scalar t) {
  using std::exp;
  using std::log1p;
  return t > Scalar(0) ? log1p(exp(-t)) : -t + log1p(exp(t));
}

/// 1 / (1 + exp(t)).
template <typename Scalar>
Scalar sigmoid_neg(Scalar t) {
  using std::exp;
  if (t >= Scalar(0)) {
    const Scalar e = exp(-t);
    return e / (Scalar(1) + e);
  }
  return Scalar(1) / (Scalar(1) + exp(t));
}

template <typename Scalar>
Scalar loss_of_margin(LossKind loss, Scalar z, Scalar y) {
  switch (loss) {
    case LossKind::logistic:
      return softplus_neg(y * z);
    case LossKind::squared:
      return Scalar(0.5) * (z - y) * (z - y);
  }
  return Scalar(0);
}

/// d f / d z, so that the per-sample gradient is loss_derivative * x.
template <typename Scalar>
Scalar loss_derivative(LossKind loss, Scalar z, Scalar y) {
  switch (loss) {
    case LossKind::logistic:
      return -y * sigmoid_neg(y * z);
    case LossKind::squared:
      return z - y;
  }
  return Scalar(0);
}

namespace detail {
template <typename Scalar>
void check_dim(const Vector<Scalar> &w, Index dim) {
  if (w.size() != dim)
    throw std::invalid_argument("weight dimension " + std::to_string(w.size()) +
                                " does not match data dimension " +
                                std::to_string(dim));
}
}  // namespace detail

/// f(w, z_i) for row i of the dataset.
template <typename Scalar>
Scalar loss_value(LossKind loss, const Vector<Scalar> &w,
                  const BasicDataset<Scalar> &d, Index i) {
  detail::check_dim(w, d.dim());
  const Scalar z = d.features().row(i).dot(w);
  return loss_of_margin(loss, z, d.labels()[i]);
}

template <typename Scalar>
struct LossEval {
  Scalar value;
  Vector<Scalar> grad;
};

/// L_n(w) = (1/n) sum_i f(w, z_i) and its gradient over the view.
template <typename Scalar>
LossEval<Scalar> empirical_loss_and_grad(LossKind loss, const Vector<Scalar> &w,
                                         const BasicDatasetView<Scalar> &view) {
  detail::check_dim(w, view.dim());
  const Index n = view.size();
  const Vector<Scalar> margins = view.features() * w;
  Vector<Scalar> coef(n);
  Scalar total(0);
  for (Index i = 0; i < n; ++i) {
    const Scalar y = view.label(i);
    total += loss_of_margin(loss, margins[i], y);
    coef[i] = loss_derivative(loss, margins[i], y);
  }
  const Scalar inv_n = Scalar(1) / Scalar(n);
  Vector<Scalar> grad = (view.features().transpose() * coef) * inv_n;
  return {total * inv_n, std::move(grad)};
}

template <typename Scalar>
Scalar empirical_loss(LossKind loss, const Vector<Scalar> &w,
                      const BasicDatasetView<Scalar> &view) {
  detail::check_dim(w, view.dim());
  const Vector<Scalar> margins = view.features() * w;
  Scalar total(0);
  for (Index i = 0; i < view.size(); ++i)
    total += loss_of_margin(loss, margins[i], view.label(i));
  return total / Scalar(view.size());
}

template <typename Scalar>
struct RiskEval {
  Scalar value;
  Vector<Scalar> grad;
  Scalar grad_norm;
};

/// R_n(w) = L_n(w) + (c V_n / 2) ||w||^2 with n = view.size().
template <typename Scalar>
RiskEval<Scalar> risk_value_and_grad(const RiskSpec &spec,
                                     const Vector<Scalar> &w,
                                     const BasicDatasetView<Scalar> &view) {
  const Scalar reg = Scalar(spec.c * statistical_accuracy(spec, view.size()));
  auto [value, grad] = empirical_loss_and_grad(spec.loss, w, view);
  value += Scalar(0.5) * reg * w.squaredNorm();
  grad += reg * w;
  const Scalar norm = grad.norm();
  return {value, std::move(grad), norm};
}

template <typename Scalar>
Scalar risk_value(const RiskSpec &spec, const Vector<Scalar> &w,
                  const BasicDatasetView<Scalar> &view) {
  const Scalar reg = Scalar(spec.c * statistical_accuracy(spec, view.size()));
  return empirical_loss(spec.loss, w, view) +
         Scalar(0.5) * reg * w.squaredNorm();
}

enum class SmoothnessMode { paper_conservative, tight };

/// Gradient Lipschitz constant of L_n. `paper_conservative` is the constant
/// 1 assumed for unit-norm samples; `tight` uses max ||x_i||^2 scaled by
/// the curvature bound of the loss (1/4 for logistic).
template <typename Scalar>
Scalar smoothness_constant(LossKind loss, const BasicDatasetView<Scalar> &view,
                           SmoothnessMode mode) {
  if (mode == SmoothnessMode::paper_conservative) return Scalar(1);
  Scalar max_sq(0);
  for (Index i = 0; i < view.size(); ++i)
    max_sq = std::max(max_sq, view.row(i).squaredNorm());
  return loss == LossKind::logistic ? max_sq / Scalar(4) : max_sq;
}

template <typename Scalar>
Scalar smoothness_constant(LossKind loss, const BasicDataset<Scalar> &d,
                           SmoothnessMode mode) {
  return smoothness_constant(loss, BasicDatasetView<Scalar>(d), mode);
}

/// Fraction of samples with sign(w'x) != y, where sign(0) = +1.
template <typename Scalar>
Scalar test_error(const Vector<Scalar> &w, const BasicDataset<Scalar> &test) {
  detail::check_dim(w, test.dim());
  const Vector<Scalar> margins = test.features() * w;
  Index wrong = 0;
  for (Index i = 0; i < test.size(); ++i) {
    const Scalar predicted = margins[i] >= Scalar(0) ? Scalar(1) : Scalar(-1);
    if (predicted != test.labels()[i]) ++wrong;
  }
  return Scalar(wrong) / Scalar(test.size());
}

}  // namespace adasize

#endif  // ADASIZE_ERM_HPP
