#include <gtest/gtest.h>

#include "adasize/driver.hpp"

using namespace adasize;

namespace {

Dataset suite(Index n, Index dim, std::uint64_t seed) {
  return normalize(generate_synthetic(n, dim, 1.0, seed).data);
}

RunConfig config(Method m, bool adaptive, Index m0) {
  RunConfig c;
  c.method = m;
  c.adaptive = adaptive;
  c.m0 = m0;
  return c;
}

}  // namespace

TEST(Bootstrap, LooseAccuracyNeedsNoIterations) {
  const auto d = suite(100, 4, 1);
  RiskSpec spec;
  spec.gamma = 1e6;
  Trace trace;
  auto [state, report] = bootstrap(config(Method::agd, true, 50), spec, d, &trace);
  EXPECT_EQ(report.iterations, 0u);
  EXPECT_EQ(state.grad_evals, 0u);
  EXPECT_TRUE(trace.empty());
}

TEST(Bootstrap, ExitCertified) {
  const auto d = suite(512, 10, 1);
  RiskSpec spec;
  auto [state, report] = bootstrap(config(Method::agd, true, 64), spec, d, nullptr);
  EXPECT_LE(report.exit_grad_norm, report.threshold);
  EXPECT_EQ(report.n, 64);
  EXPECT_LE(risk_value_and_grad(spec, state.w, prefix(d, 64)).grad_norm, stop_threshold(spec, 64));
}

TEST(Bootstrap, CapIsAnError) {
  const auto d = suite(512, 10, 1);
  RiskSpec spec;
  spec.gamma = 1e-4;
  auto c = config(Method::gd, true, 512);
  c.max_iterations = 2;
  EXPECT_THROW(bootstrap(c, spec, d, nullptr), BudgetExhaustedError);
}

TEST(Adaptive, StagesAndCertificates) {
  const auto d = suite(2000, 8, 3);
  RiskSpec spec;
  spec.gamma = 0.5;
  for (const auto m : {Method::gd, Method::agd, Method::svrg}) {
    auto c = config(m, true, 100);
    const auto r = adaptive_run(c, spec, d);
    ASSERT_EQ(r.stages.size(), 6u);  // 100 .. 1600, 2000
    EXPECT_EQ(r.stages.back().n, 2000);
    for (const auto &s : r.stages) {
      EXPECT_FALSE(s.budget_exhausted);
      EXPECT_LE(s.exit_grad_norm, s.threshold) << to_string(m) << " n=" << s.n;
    }
    EXPECT_EQ(r.w, r.stages.back().exit_w);
  }
}

TEST(Adaptive, SingleStageWhenM0IsN) {
  const auto d = suite(300, 5, 2);
  const auto r = adaptive_run(config(Method::agd, true, 300), RiskSpec{}, d);
  EXPECT_EQ(r.stages.size(), 1u);
}

TEST(Adaptive, TheoryBudgetRunsExactCounts) {
  const auto d = suite(1024, 6, 4);
  RiskSpec spec;
  auto c = config(Method::svrg, true, 128);
  c.budget_mode = BudgetMode::theoretical_s_n;
  const auto r = adaptive_run(c, spec, d);
  for (std::size_t k = 1; k < r.stages.size(); ++k) EXPECT_EQ(r.stages[k].iterations, 3u);
  c.method = Method::agd;
  const auto a = adaptive_run(c, spec, d);
  for (std::size_t k = 1; k < a.stages.size(); ++k)
    EXPECT_EQ(a.stages[k].iterations, iterations_agd(spec, a.stages[k].n, WstarEstimate{}));
}

TEST(Adaptive, TraceInvariants) {
  const auto d = suite(1500, 6, 5);
  const auto split = shuffle_and_split(d, 1000, 1);
  RiskSpec spec;
  spec.gamma = 0.5;
  const auto r = adaptive_run(config(Method::agd, true, 125), spec, split.train, &*split.test);
  ASSERT_FALSE(r.trace.empty());
  std::uint64_t last = 0;
  Index last_n = 0;
  for (const auto &e : r.trace.events()) {
    EXPECT_GT(e.grad_evals, last);
    EXPECT_GE(e.stage_n, last_n);
    EXPECT_TRUE(e.test_error.has_value());
    EXPECT_NEAR(e.risk_value,
                e.stage_n == 1000 ? e.stage_risk_value : e.risk_value, 0.0);
    last = e.grad_evals;
    last_n = e.stage_n;
  }
  EXPECT_EQ(r.trace.meta.at("method"), "agd");
  EXPECT_EQ(r.trace.meta.at("N"), "1000");
}

TEST(Adaptive, Deterministic) {
  const auto d = suite(800, 5, 6);
  RiskSpec spec;
  auto c = config(Method::svrg, true, 100);
  c.seed = 77;
  const auto a = adaptive_run(c, spec, d);
  const auto b = adaptive_run(c, spec, d);
  EXPECT_EQ(a.w, b.w);
  ASSERT_EQ(a.trace.events().size(), b.trace.events().size());
  for (std::size_t k = 0; k < a.trace.events().size(); ++k)
    EXPECT_EQ(a.trace.events()[k].risk_value, b.trace.events()[k].risk_value);
}

TEST(Fixed, PassCap) {
  const auto d = suite(400, 5, 7);
  RiskSpec spec;
  spec.gamma = 1e-3;  // hard to certify; the cap binds
  auto c = config(Method::gd, false, 1);
  c.pass_cap = 5;
  auto r = fixed_run(c, spec, d);
  EXPECT_EQ(r.stages.size(), 1u);
  EXPECT_EQ(r.stages[0].iterations, 5u);
  EXPECT_EQ(r.trace.events().back().grad_evals, 5u * 400u);

  c.method = Method::svrg;
  r = fixed_run(c, spec, d);
  EXPECT_EQ(r.stages[0].iterations, 3u);  // ceil(5 / 2) epochs

  c.pass_cap = 0;
  r = fixed_run(c, spec, d);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.w, Vector<double>::Zero(5));
}

TEST(Fixed, UsesPrefixN) {
  const auto d = suite(400, 5, 7);
  auto c = config(Method::agd, false, 1);
  c.N = 300;
  const auto r = run(c, RiskSpec{}, d);
  EXPECT_EQ(r.stages[0].n, 300);
}

TEST(Config, Validation) {
  const auto d = suite(100, 3, 1);
  auto c = config(Method::agd, true, 200);
  EXPECT_THROW(run(c, RiskSpec{}, d), std::invalid_argument);
  c.m0 = 10;
  c.N = 101;
  EXPECT_THROW(run(c, RiskSpec{}, d), std::invalid_argument);
  c.N = 0;
  c.eval_every = 0;
  EXPECT_THROW(run(c, RiskSpec{}, d), std::invalid_argument);
  EXPECT_THROW(adaptive_run(config(Method::agd, false, 10), RiskSpec{}, d), std::invalid_argument);
  EXPECT_THROW(method_from_string("sgd"), std::invalid_argument);
}

TEST(Trace, AppendRejectsDisorder) {
  Trace t;
  t.append({10, 100, 0.5, 0.1, std::nullopt, 0.5});
  EXPECT_THROW(t.append({10, 100, 0.4, 0.1, std::nullopt, 0.4}), std::logic_error);
  EXPECT_THROW(t.append({11, 50, 0.4, 0.1, std::nullopt, 0.4}), std::logic_error);
  t.append({11, 200, 0.4, 0.1, std::nullopt, 0.4});
  EXPECT_EQ(t.last_grad_evals(), 11u);
}
