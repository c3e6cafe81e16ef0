#include <gtest/gtest.h>

#include <cmath>

#include "adasize/erm.hpp"

using namespace adasize;

namespace {

Dataset tiny() {
  const std::vector<Sample> s{{{{1, 1.0}, {2, 2.0}}, 1.0},
                              {{{2, -1.0}}, -1.0},
                              {{{1, 0.5}, {3, 1.5}}, 1.0}};
  return from_samples(s);
}

}  // namespace

TEST(Loss, LogisticAtOrigin) {
  const auto d = tiny();
  const Vector<double> w = Vector<double>::Zero(3);
  for (Index i = 0; i < d.size(); ++i)
    EXPECT_NEAR(loss_value(LossKind::logistic, w, d, i), std::log(2.0), 1e-15);
}

TEST(Loss, LogisticLargeMargin) {
  // log1p(exp(-50)) from an extended-precision evaluation.
  const double v = loss_of_margin(LossKind::logistic, 50.0, 1.0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1e-20);
  EXPECT_NEAR(v, 1.928749847963918e-22, 1e-34);
  EXPECT_NEAR(loss_of_margin(LossKind::logistic, -800.0, 1.0), 800.0, 1e-9);
}

TEST(Loss, SquaredExactFit) {
  EXPECT_EQ(loss_of_margin(LossKind::squared, -1.0, -1.0), 0.0);
  EXPECT_EQ(loss_of_margin(LossKind::squared, 1.0, -1.0), 2.0);
}

TEST(Empirical, GradientAtOrigin) {
  const auto d = tiny();
  const DatasetView v(d);
  const auto eval = empirical_loss_and_grad(LossKind::logistic, Vector<double>::Zero(3).eval(), v);
  EXPECT_NEAR(eval.value, std::log(2.0), 1e-15);
  Vector<double> expected = Vector<double>::Zero(3);
  for (Index i = 0; i < d.size(); ++i)
    expected -= d.labels()[i] * Vector<double>(d.features().row(i).transpose()) / 2.0;
  expected /= 3.0;
  EXPECT_LT((eval.grad - expected).norm(), 1e-15);
}

TEST(Empirical, SingleSampleView) {
  const auto d = tiny();
  Vector<double> w(3);
  w << 0.3, -0.2, 0.7;
  const auto one = empirical_loss_and_grad(LossKind::logistic, w, prefix(d, 1));
  EXPECT_DOUBLE_EQ(one.value, loss_value(LossKind::logistic, w, d, 0));
  const double z = d.features().row(0).dot(w);
  const Vector<double> g =
      loss_derivative(LossKind::logistic, z, 1.0) * Vector<double>(d.features().row(0).transpose());
  EXPECT_LT((one.grad - g).norm(), 1e-15);
}

TEST(Empirical, DimensionMismatch) {
  const auto d = tiny();
  EXPECT_THROW(empirical_loss(LossKind::logistic, Vector<double>::Zero(2).eval(), DatasetView(d)),
               std::invalid_argument);
}

TEST(Risk, OriginHasNoRegularizer) {
  const auto d = tiny();
  RiskSpec spec;
  const DatasetView v(d);
  const Vector<double> w = Vector<double>::Zero(3);
  const auto r = risk_value_and_grad(spec, w, v);
  const auto l = empirical_loss_and_grad(spec.loss, w, v);
  EXPECT_EQ(r.value, l.value);
  EXPECT_EQ(r.grad, l.grad);
}

TEST(Risk, RegularizerScale) {
  // c = 1, alpha = 0.5, gamma = 2, n = 400: term is 0.05 ||w||^2.
  std::vector<Sample> s(400, Sample{{}, 1.0});
  s[0].features = {{1, 0.0}};
  const auto d = from_samples(s, Index{2});
  RiskSpec spec{LossKind::logistic, 1.0, 0.5, 2.0, 1.0};
  Vector<double> w(2);
  w << 1.0, 2.0;
  const DatasetView v(d);
  const double reg = risk_value(spec, w, v) - empirical_loss(spec.loss, w, v);
  EXPECT_NEAR(reg, 0.05 * 5.0, 1e-15);
  const double reg3 = risk_value(spec, Vector<double>(3.0 * w), v) - std::log(2.0);
  EXPECT_NEAR(reg3, 9.0 * reg, 1e-13);
}

TEST(Risk, GradientMatchesDifferences) {
  const auto d = tiny();
  RiskSpec spec;
  Vector<double> w(3);
  w << 0.1, -0.4, 0.25;
  const DatasetView v(d);
  for (const auto loss : {LossKind::logistic, LossKind::squared}) {
    spec.loss = loss;
    const auto g = risk_value_and_grad(spec, w, v).grad;
    for (Index j = 0; j < 3; ++j) {
      Vector<double> up = w, down = w;
      up[j] += 1e-6;
      down[j] -= 1e-6;
      const double fd = (risk_value(spec, up, v) - risk_value(spec, down, v)) / 2e-6;
      EXPECT_NEAR(fd, g[j], 1e-8 * std::max(1.0, std::abs(g[j])));
    }
  }
}

TEST(Smoothness, Modes) {
  const auto raw = tiny();
  const auto d = normalize(raw);
  EXPECT_EQ(smoothness_constant(LossKind::logistic, d, SmoothnessMode::paper_conservative), 1.0);
  EXPECT_NEAR(smoothness_constant(LossKind::logistic, d, SmoothnessMode::tight), 0.25, 1e-15);

  const std::vector<Sample> s{{{{1, 2.0}}, 1.0}, {{{2, 3.0}}, -1.0}};
  EXPECT_EQ(smoothness_constant(LossKind::squared, from_samples(s), SmoothnessMode::tight), 9.0);
}

TEST(TestError, TieBreakAndPerfect) {
  const auto d = tiny();
  const double neg = (d.labels().array() < 0).cast<double>().mean();
  EXPECT_DOUBLE_EQ(test_error(Vector<double>::Zero(3).eval(), d), neg);
  Vector<double> w(3);
  w << 1.0, 1.0, 1.0;  // margins 3, -1 (label -1), 2
  EXPECT_EQ(test_error(w, d), 0.0);
}

TEST(TestError, TrueWeightsBeatChance) {
  const auto synth = generate_synthetic(2000, 5, 1.0, 12, 8.0);
  EXPECT_LT(test_error(synth.w_true, synth.data), 0.5);
}
