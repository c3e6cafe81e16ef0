#include <gtest/gtest.h>

#include <cmath>

#include "adasize/schedule.hpp"

using namespace adasize;

// Reference values below were computed with mpmath at 30 digits and frozen.

namespace {

RiskSpec base_spec(double alpha = 0.5, double gamma = 1.0) {
  return RiskSpec{LossKind::logistic, 1.0, alpha, gamma, 1.0};
}

const WstarEstimate kZero{};

}  // namespace

TEST(Accuracy, PowerLaw) {
  EXPECT_DOUBLE_EQ(statistical_accuracy(base_spec(), 400), 0.05);
  EXPECT_NEAR(statistical_accuracy(base_spec(1.0), 1000), 0.001, 1e-18);
  for (const double alpha : {0.5, 0.75, 1.0})
    for (const Index n : {1, 7, 400, 12345})
      EXPECT_NEAR(statistical_accuracy(base_spec(alpha), 2 * n) /
                      statistical_accuracy(base_spec(alpha), n),
                  std::pow(2.0, -alpha), 1e-14);
  EXPECT_THROW(statistical_accuracy(base_spec(), 0), std::invalid_argument);
}

TEST(Spec, Validate) {
  EXPECT_THROW(base_spec(0.4).validate(), std::invalid_argument);
  EXPECT_THROW(base_spec(1.1).validate(), std::invalid_argument);
  RiskSpec s = base_spec();
  s.c = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Stages, Doubling) {
  EXPECT_EQ(next_sample_size(400, 10000), 800);
  EXPECT_EQ(next_sample_size(6000, 10000), 10000);
  EXPECT_EQ(next_sample_size(10000, 10000), 10000);
  EXPECT_EQ(stage_sizes(400, 10000),
            (std::vector<Index>{400, 800, 1600, 3200, 6400, 10000}));
  EXPECT_EQ(stage_sizes(500, 500), (std::vector<Index>{500}));
}

TEST(Threshold, Values) {
  EXPECT_NEAR(stop_threshold(base_spec(), 400), 0.0707106781186548, 1e-15);
  RiskSpec s{LossKind::logistic, 4.0, 1.0, 10.0, 1.0};  // V_100 = 0.1
  EXPECT_NEAR(stop_threshold(s, 100), 0.282842712474619, 1e-15);
  EXPECT_NEAR(stop_threshold(s, 50) / stop_threshold(s, 100), 2.0, 1e-14);
}

TEST(Agd, Params) {
  const auto p = agd_params(base_spec(), 400);
  EXPECT_NEAR(p.eta, 0.952380952380952, 1e-12);
  EXPECT_NEAR(p.beta, 0.641742430504416, 1e-12);
  // c V_n = M.
  RiskSpec s = base_spec(1.0);
  s.gamma = 100.0;
  EXPECT_NEAR(agd_params(s, 100).beta, 0.1715728752538099, 1e-14);
  // kappa = 1 + 1e4: beta = (sqrt(10001) - 1) / (sqrt(10001) + 1)
  EXPECT_NEAR(agd_params(base_spec(), 100'000'000).beta, 0.9801990000249987, 1e-12);
}

TEST(Svrg, Params) {
  const auto p = svrg_params(base_spec(), 10000);
  EXPECT_EQ(p.q, 10000);
  EXPECT_NEAR(p.rho, 0.37625, 1e-14);
  EXPECT_NEAR(p.size_ratio, 0.0101, 1e-14);
  EXPECT_FALSE(p.warning);
  EXPECT_NEAR(p.eta, 0.1 / 1.01, 1e-15);
  const auto small = svrg_params(base_spec(), 100);
  EXPECT_NEAR(small.size_ratio, 0.11, 1e-14);
  EXPECT_TRUE(small.warning);
}

TEST(Iterations, Generic) {
  EXPECT_EQ(iterations_generic(0.5, base_spec(), kZero), 3u);  // bound 2.3422895666916539
  EXPECT_EQ(iterations_generic(0.5, base_spec(1.0), kZero), 4u);  // log2 8 = 3 exactly
  std::uint64_t last = 0;
  for (const double rho : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
    const auto s = iterations_generic(rho, base_spec(), kZero);
    EXPECT_GE(s, last);
    last = s;
  }
  EXPECT_GT(last, 1000u);
  EXPECT_LE(iterations_generic(0.5, base_spec(), kZero),
            iterations_generic(0.5, base_spec(), WstarEstimate{10.0, WstarEstimate::Source::user}));
  EXPECT_THROW(iterations_generic(1.0, base_spec(), kZero), std::invalid_argument);
  EXPECT_THROW(iterations_generic(0.0, base_spec(), kZero), std::invalid_argument);
}

TEST(Iterations, Agd) {
  // sqrt(101) ln(6 sqrt2 + 4 (sqrt2 - 1)) = 23.282532678786944
  EXPECT_EQ(iterations_agd(base_spec(), 10000, kZero), 24u);
  const auto big = iterations_agd(base_spec(), 1'000'000, kZero);
  EXPECT_NEAR(static_cast<double>(big) / 24.0, std::sqrt(10.0), 0.2);
}

TEST(Iterations, Svrg) {
  EXPECT_EQ(iterations_svrg(base_spec(), kZero), 3u);
  EXPECT_EQ(iterations_svrg(base_spec(1.0), kZero), 4u);
  // log2(3 sqrt2 + (sqrt2 - 1) * 4) = 2.560591448773592
  EXPECT_EQ(iterations_svrg(base_spec(), WstarEstimate{4.0, WstarEstimate::Source::user}), 3u);
}

TEST(Complexity, Agd) {
  EXPECT_NEAR(total_complexity_agd(base_spec(), 10000, 625, kZero), 1571929.456498275,
              1e-6);
  EXPECT_THROW(total_complexity_agd(base_spec(), 10000, 400, kZero), std::invalid_argument);
  // Doubling m0 only removes one log2(N/m0) unit: N ln(arg6).
  const double a = total_complexity_agd(base_spec(), 10000, 625, kZero);
  const double b = total_complexity_agd(base_spec(), 10000, 1250, kZero);
  EXPECT_NEAR(a - b, 10000 * std::log(6 * std::sqrt(2.0) + 4 * (std::sqrt(2.0) - 1)), 1e-6);
}

TEST(Complexity, Svrg) {
  EXPECT_NEAR(total_complexity_svrg(base_spec(), 10000, kZero), 93691.58266766616, 1e-7);
  EXPECT_NEAR(total_complexity_svrg(base_spec(), 20000, kZero),
              2.0 * total_complexity_svrg(base_spec(), 10000, kZero), 1e-8);
}

TEST(WarmStart, DoubledForm) {
  const double Vm = statistical_accuracy(base_spec(), 400);
  const auto b = warm_start_bound(base_spec(), 400, 800, Vm, kZero);
  ASSERT_TRUE(b.doubled.has_value());
  EXPECT_NEAR(*b.doubled, 3.585786437626905 * Vm, 1e-15);
  EXPECT_NEAR(b.general, *b.doubled, 1e-12 * *b.doubled);

  const double Vm1 = statistical_accuracy(base_spec(1.0), 400);
  const auto one = warm_start_bound(base_spec(1.0), 400, 800, 0.0, kZero);
  EXPECT_NEAR(*one.doubled, 3.0 * Vm1, 1e-15);

  const WstarEstimate w{2.5, WstarEstimate::Source::user};
  for (const Index m : {3, 400, 9999}) {
    const auto g = warm_start_bound(base_spec(0.7, 1.3), m, 2 * m, 0.01, w);
    EXPECT_NEAR(g.general, *g.doubled, 1e-12 * g.general);
  }
}

TEST(WarmStart, ContinuityAndErrors) {
  const auto b = warm_start_bound(base_spec(), 100000, 100001, 0.004, kZero);
  EXPECT_NEAR(b.general, 0.004, 1e-4);  // the (n-m)/n term is O(1/n)
  EXPECT_FALSE(b.doubled.has_value());
  EXPECT_THROW(warm_start_bound(base_spec(), 10, 10, 0.0, kZero), std::invalid_argument);
}

TEST(Plan, Table) {
  const auto plans = plan_stages(base_spec(), 400, 10000, kZero);
  ASSERT_EQ(plans.size(), 6u);
  EXPECT_EQ(plans.back().n, 10000);
  EXPECT_EQ(plans.back().s_n_agd, 24u);
  EXPECT_EQ(plans.back().s_n_svrg, 3u);
  EXPECT_NEAR(plans.back().svrg_rho, 0.37625, 1e-14);
  EXPECT_NEAR(plans.front().agd_beta, 0.641742430504416, 1e-12);
  for (const auto &p : plans) {
    EXPECT_EQ(p.svrg_q, p.n);
    EXPECT_EQ(p.s_n_generic.has_value(), p.svrg_rho < 1.0);
  }
}
