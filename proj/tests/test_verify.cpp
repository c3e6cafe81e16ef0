#include <gtest/gtest.h>

#include <sstream>

#include "adasize/verify.hpp"

using namespace adasize;

namespace {

const Dataset &base() {
  static const Dataset d = normalize(generate_synthetic(4096, 10, 1.0, 21).data);
  return d;
}

}  // namespace

TEST(Report, CsvLine) {
  CheckReport r{"x", 10, 0, 0, 0.25};
  r.finish();
  std::ostringstream out;
  write_report_header(out);
  write_report_line(r, out);
  EXPECT_EQ(out.str(), "name,trials,violations,worst_margin,passed\nx,10,0,0.25,true\n");
  r.violations = 1;
  r.finish();
  EXPECT_FALSE(r.passed);
}

TEST(FdCheck, BothLossesPass) {
  const DatasetView view(base(), 300);
  for (const auto loss : {LossKind::logistic, LossKind::squared}) {
    RiskSpec spec;
    spec.loss = loss;
    const auto r = fd_gradient_check(spec, view, 40, 3);
    EXPECT_TRUE(r.passed) << r.name << " " << r.worst_margin;
    EXPECT_EQ(r.trials, 200u);  // five coordinates per trial
  }
  EXPECT_THROW(fd_gradient_check(RiskSpec{}, view, 0, 1), std::invalid_argument);
}

TEST(FdCheck, ZeroGradientCoordinateUsesAbsoluteRule) {
  // Feature 2 never appears, so its partial is c V_n w_2 only; with a tiny
  // regularizer it sits below the switch and is judged absolutely.
  const std::vector<Sample> s{{{{1, 0.6}, {3, 0.8}}, 1.0}, {{{1, -1.0}}, -1.0}};
  const auto d = from_samples(s);
  RiskSpec spec;
  spec.gamma = 1e-8;
  const auto r = fd_gradient_check(spec, DatasetView(d), 30, 5);
  EXPECT_TRUE(r.passed);
}

TEST(SvrgCheck, Enumeration) {
  for (const Index n : {1, 5, 17, 50}) {
    const auto r = svrg_direction_check(RiskSpec{}, prefix(base(), n), 20, 7);
    EXPECT_TRUE(r.passed) << n;
    EXPECT_EQ(r.trials, 20u);
  }
  EXPECT_THROW(svrg_direction_check(RiskSpec{}, prefix(base(), 51), 1, 1), std::invalid_argument);
}

TEST(Probes, Shape) {
  const auto p = probe_grid(10, 1);
  EXPECT_EQ(p.rows(), 10);
  EXPECT_EQ(p.cols(), 32);
  EXPECT_EQ(p.col(0).norm(), 0.0);
  EXPECT_EQ(p.col(1), -p.col(2));
  EXPECT_EQ(p.col(1).norm(), 1.0);
  EXPECT_LE(p.cwiseAbs().maxCoeff(), 1.0);
  const auto tiny = probe_grid(3, 1);  // axes reused when dim < 8
  EXPECT_EQ(tiny.cols(), 32);
}

TEST(Accuracy, ShrinksWithSampleSize) {
  const auto probes = probe_grid(base().dim(), 2);
  const double small = estimate_accuracy(LossKind::logistic, base(), probes, 64, 200, 3);
  const double large = estimate_accuracy(LossKind::logistic, base(), probes, 1024, 200, 3);
  EXPECT_GT(small, large);
  EXPECT_NEAR(estimate_accuracy(LossKind::logistic, base(), probes, base().size(), 3, 3), 0.0, 1e-12);
}

TEST(Wstar, ProxyFitsData) {
  const auto w = wstar_proxy(LossKind::logistic, base());
  EXPECT_EQ(w.source, WstarEstimate::Source::reference_solve);
  EXPECT_GT(w.norm_sq, 1.0);
  EXPECT_TRUE(std::isfinite(w.norm_sq));
}

TEST(Lemma1, EqualSizesAreTrivial) {
  const auto r = lemma1_check(RiskSpec{}, base(), 300, 300, 100, 1);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_THROW(lemma1_check(RiskSpec{}, base(), 10, 20, 99, 1), std::invalid_argument);
}

TEST(Lemma1, Holds) {
  const auto r = lemma1_check(RiskSpec{}, base(), 128, 256, 300, 4);
  EXPECT_TRUE(r.passed) << r.notes;
  EXPECT_EQ(r.trials, 32u);
}

TEST(Lemma2, HoldsAndHeavyRegularizationIsTrivial) {
  const auto r = lemma2_check(RiskSpec{}, base(), 512, 20, 5);
  EXPECT_TRUE(r.passed) << r.notes;
  RiskSpec heavy;
  heavy.c = 1e4;
  EXPECT_TRUE(lemma2_check(heavy, base(), 512, 5, 5).passed);
  EXPECT_THROW(lemma2_check(RiskSpec{}, base(), 2000, 5, 5), std::invalid_argument);
}

TEST(Proposition1, Holds) {
  const auto r = proposition1_check(RiskSpec{}, base(), 256, 20, 6);
  EXPECT_TRUE(r.passed) << r.notes;
}

TEST(TheoremSn, SvrgSmallRun) {
  SufficiencyDetails details;
  const auto w = wstar_proxy(LossKind::logistic, base());
  const auto r = theorem_sn_sufficiency_check(Method::svrg, RiskSpec{}, base(), 2048, 256, 1,
                                              9, w, &details);
  EXPECT_EQ(details.stage_sizes, (std::vector<Index>{256, 512, 1024, 2048}));
  EXPECT_EQ(details.mean_suboptimality.size(), 3u);
  for (const auto it : details.iterations) EXPECT_EQ(it, iterations_svrg(RiskSpec{}, w));
  EXPECT_NE(r.notes.find("low-power"), std::string::npos);
  EXPECT_THROW(theorem_sn_sufficiency_check(Method::gd, RiskSpec{}, base(), 2048, 256, 1, 9, w),
               std::invalid_argument);
}
