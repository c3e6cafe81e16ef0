#include "adasize/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace adasize {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double> &v, int digits = 17) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, *v);
  return buf;
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

constexpr const char *kTraceHeader =
    "effective_passes,grad_evals,stage_n,suboptimality,grad_norm,test_error";

}  // namespace

double ReferenceOptimum::suboptimality(const RiskSpec &spec,
                                       const Vector<double> &w,
                                       const DatasetView &view) const {
  if (view.size() != n) throw std::invalid_argument("reference built for another n");
  return risk_value(spec, w, view) - risk_star;
}

ReferenceOptimum reference_optimum(const RiskSpec &spec, const DatasetView &view,
                                   double tolerance, std::uint64_t max_iterations,
                                   const Vector<double> *warm_start) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  RiskSpec tight = spec;
  tight.M = std::max(smoothness_constant(spec.loss, view, SmoothnessMode::tight),
                     std::numeric_limits<double>::min());
  const auto params = agd_params(tight, view.size());

  Vector<double> w = warm_start ? *warm_start : Vector<double>::Zero(view.dim());
  Vector<double> y = w;
  auto at_w = risk_value_and_grad(spec, w, view);
  constexpr std::uint64_t kCheckEvery = 4;
  std::uint64_t it = 0;
  while (at_w.grad_norm > tolerance) {
    if (it >= max_iterations)
      throw BudgetExhaustedError("reference optimum at n=" + std::to_string(view.size()) +
                                 " did not reach tolerance");
    const auto at_y = risk_value_and_grad(spec, y, view);
    Vector<double> w_next = y - params.eta * at_y.grad;
    y = w_next + params.beta * (w_next - w);
    w = std::move(w_next);
    ++it;
    if (!w.allFinite()) throw DivergenceError(view.size(), it);
    if (it % kCheckEvery == 0 || at_y.grad_norm <= tolerance)
      at_w = risk_value_and_grad(spec, w, view);
  }
  return {view.size(), std::move(w), at_w.value, at_w.grad_norm, tolerance};
}

double effective_passes(std::uint64_t grad_evals, Index N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  return static_cast<double>(grad_evals) / static_cast<double>(N);
}

void emit_csv(const Trace &trace, const ReferenceOptimum &ref, std::ostream &sink) {
  // The last stage may need no iterations, so its n need not appear.
  if (!trace.empty() && trace.events().back().stage_n > ref.n)
    throw std::invalid_argument("trace stages exceed the reference size");
  sink << kTraceHeader << '\n';
  for (const auto &e : trace.events()) {
    sink << fmt17(effective_passes(e.grad_evals, ref.n)) << ',' << e.grad_evals
         << ',' << e.stage_n << ',' << fmt17(std::max(0.0, e.risk_value - ref.risk_star))
         << ',' << fmt17(e.grad_norm) << ',' << fmt_opt(e.test_error) << '\n';
  }
  if (!sink) throw Error("trace CSV write failure");
}

std::vector<CsvRow> parse_trace_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader)
    throw ParseError(1, "unexpected trace CSV header");
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 6) throw ParseError(line_no, "expected 6 columns");
    try {
      CsvRow row{std::stod(cells[0]), std::stoull(cells[1]),
                 static_cast<Index>(std::stoll(cells[2])), std::stod(cells[3]),
                 std::stod(cells[4]), std::nullopt};
      if (!cells[5].empty()) row.test_error = std::stod(cells[5]);
      rows.push_back(row);
    } catch (const std::logic_error &) {
      throw ParseError(line_no, "bad number");
    }
  }
  return rows;
}

std::optional<double> passes_to_suboptimality(const Trace &trace,
                                              const ReferenceOptimum &ref,
                                              Index N, double target) {
  for (const auto &e : trace.events())
    if (e.risk_value - ref.risk_star <= target) return effective_passes(e.grad_evals, N);
  return std::nullopt;
}

CompareOutput compare_matrix(const std::vector<RunConfig> &configs,
                             const RiskSpec &spec, const Dataset &train,
                             const Dataset *test) {
  if (configs.empty()) throw std::invalid_argument("no configurations to compare");
  const Index N = configs.front().resolved_N(train.size());
  for (const auto &c : configs)
    if (c.resolved_N(train.size()) != N)
      throw std::invalid_argument("compared runs must share N");

  CompareOutput out;
  const auto full = prefix(train, N);
  out.reference = reference_optimum(spec, full);

  std::vector<std::future<RunResult>> futures;
  for (const auto &c : configs)
    futures.push_back(std::async(std::launch::async,
                                 [&, c] { return run(c, spec, train, test); }));

  const double V_N = statistical_accuracy(spec, N);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    SummaryRow row;
    row.method = configs[k].method;
    row.adaptive = configs[k].adaptive;
    try {
      RunResult result = futures[k].get();
      row.passes_to_VN = passes_to_suboptimality(result.trace, out.reference, N, V_N);
      for (const auto &e : result.trace.events()) {
        if (!e.test_error) continue;
        if (!row.min_test_error || *e.test_error < *row.min_test_error) {
          row.min_test_error = e.test_error;
          row.passes_to_min_test_error = effective_passes(e.grad_evals, N);
        }
        row.final_test_error = e.test_error;
      }
      out.runs.push_back(std::move(result));
    } catch (const Error &err) {
      row.diverged = true;
      row.error = err.what();
      out.runs.emplace_back();
    }
    out.rows.push_back(std::move(row));
  }

  const bool any_diverged = std::any_of(out.rows.begin(), out.rows.end(),
                                        [](const SummaryRow &r) { return r.diverged; });
  if (!any_diverged) {
    for (std::size_t k = 0; k < out.rows.size(); ++k) {
      auto &row = out.rows[k];
      for (std::size_t b = 0; b < out.rows.size(); ++b) {
        const auto &base = out.rows[b];
        if (b == k || base.adaptive || base.method != row.method) continue;
        if (base.passes_to_VN && row.passes_to_VN && *row.passes_to_VN > 0.0)
          row.speedup_vs_fixed = *base.passes_to_VN / *row.passes_to_VN;
        break;
      }
    }
  }
  return out;
}

void write_summary_csv(const std::vector<SummaryRow> &rows, std::ostream &out) {
  out << "method,adaptive,passes_to_VN,passes_to_min_test_error,min_test_error,"
         "speedup_vs_fixed\n";
  for (const auto &r : rows) {
    out << to_string(r.method) << ',' << (r.adaptive ? "true" : "false") << ','
        << fmt_opt(r.passes_to_VN) << ',' << fmt_opt(r.passes_to_min_test_error)
        << ',' << fmt_opt(r.min_test_error) << ',' << fmt_opt(r.speedup_vs_fixed)
        << '\n';
  }
}

void write_summary_table(const std::vector<SummaryRow> &rows, std::ostream &out) {
  const auto cell = [](const std::optional<double> &v) {
    return v ? fmt_opt(v, 6) : std::string("-");
  };
  out << std::left << std::setw(8) << "method" << std::setw(10) << "adaptive"
      << std::setw(16) << "passes_to_VN" << std::setw(18) << "passes_to_min_err"
      << std::setw(14) << "min_test_err" << std::setw(12) << "final_err"
      << "speedup" << '\n';
  for (const auto &r : rows) {
    out << std::left << std::setw(8) << to_string(r.method) << std::setw(10)
        << (r.adaptive ? "yes" : "no");
    if (r.diverged) {
      out << "diverged: " << r.error << '\n';
      continue;
    }
    out << std::setw(16) << cell(r.passes_to_VN) << std::setw(18)
        << cell(r.passes_to_min_test_error) << std::setw(14) << cell(r.min_test_error)
        << std::setw(12) << cell(r.final_test_error) << cell(r.speedup_vs_fixed)
        << '\n';
  }
}

}  // namespace adasize
