#ifndef ADASIZE_RISK_SPEC_HPP
#define ADASIZE_RISK_SPEC_HPP

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "adasize/common.hpp"

namespace adasize {

enum class LossKind { logistic, squared };

std::string_view to_string(LossKind kind);
LossKind loss_from_string(std::string_view name);

/// Defines the regularized risk R_n(w) = L_n(w) + (c V_n / 2) ||w||^2 for
/// every sample size n, with statistical accuracy V_n = gamma / n^alpha.
/// `M` is the gradient Lipschitz constant assumed for the loss.
struct RiskSpec {
  LossKind loss = LossKind::logistic;
  double c = 1.0;
  double alpha = 0.5;
  double gamma = 1.0;
  double M = 1.0;

  void validate() const {
    if (!(alpha >= 0.5 && alpha <= 1.0))
      throw std::invalid_argument("alpha must lie in [0.5, 1]");
    if (!(c > 0.0) || !(gamma > 0.0) || !(M > 0.0))
      throw std::invalid_argument("c, gamma and M must be positive");
  }
};

/// V_n = gamma / n^alpha.
inline double statistical_accuracy(const RiskSpec &spec, Index n) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  return spec.gamma / std::pow(static_cast<double>(n), spec.alpha);
}

}  // namespace adasize

#endif  // ADASIZE_RISK_SPEC_HPP
