#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "adasize/bench.hpp"
#include "adasize/data.hpp"
#include "adasize/driver.hpp"
#include "adasize/schedule.hpp"
#include "adasize/verify.hpp"

namespace adasize::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string dataset;
  std::string test_path;
  std::string gen;
  std::string label_map;
  std::string loss = "logistic";
  std::string method = "agd";
  bool adaptive = false;
  Index m0 = 400;
  Index N = 0;
  double alpha = 0.5;
  double c = 1.0;
  double gamma = 1.0;
  std::string m_mode = "paper";
  std::string budget = "threshold";
  std::uint64_t seed = 1;
  double pass_cap = 100.0;
  std::uint64_t eval_every = 1;
  std::uint64_t max_iterations = 1'000'000;
  std::optional<double> wstar_norm_sq;
  bool estimate_wstar = false;
  std::optional<double> rho;
  bool csv = false;
  std::uint64_t draws = 500;
  std::uint64_t trials = 200;
  std::string checks = "fd,svrg,lemma1,lemma2,proposition1,theorem";
  std::string out = "adasize_out";
};

std::string num(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) parts.push_back(part);
  return parts;
}

double parse_double(const std::string &s, const char *what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error &) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw UsageError(std::string("bad ") + what + " '" + s + "'");
  return v;
}

/// Files are staged in memory and renamed into place only once every output
/// of the command has been produced.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string contents) {
    files_.emplace_back(std::move(name), std::move(contents));
  }

  std::vector<fs::path> commit() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
    std::vector<fs::path> staged;
    const auto discard = [&] {
      for (const auto &p : staged) fs::remove(p, ec);
    };
    for (const auto &[name, contents] : files_) {
      fs::path tmp = dir_ / (name + ".tmp");
      std::ofstream f(tmp, std::ios::binary);
      staged.push_back(tmp);
      f << contents;
      f.close();
      if (!f) {
        discard();
        throw Error("cannot write " + tmp.string());
      }
    }
    std::vector<fs::path> written;
    for (std::size_t k = 0; k < files_.size(); ++k) {
      const fs::path target = dir_ / files_[k].first;
      fs::rename(staged[k], target, ec);
      if (ec) {
        discard();
        throw Error("cannot rename into " + target.string() + ": " + ec.message());
      }
      written.push_back(target);
    }
    return written;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

LabelMap parse_label_map(const std::string &text) {
  if (text.empty()) return binary_label_map();
  LabelMap map;
  for (const auto &entry : split(text, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw UsageError("label map entries look like raw:mapped");
    const double mapped = parse_double(entry.substr(colon + 1), "label map value");
    if (mapped != 1.0 && mapped != -1.0) throw UsageError("labels must map to +1 or -1");
    map[parse_double(entry.substr(0, colon), "label map key")] = mapped;
  }
  return map;
}

struct Loaded {
  Dataset train;
  std::optional<Dataset> test;
  std::uint64_t hash;
  std::string source;
};

Loaded load_data(const Options &o) {
  const bool has_file = !o.dataset.empty();
  const bool has_gen = !o.gen.empty();
  if (!has_file && !has_gen) throw UsageError("missing dataset: pass --dataset or --gen");

  std::optional<Dataset> raw;
  std::string source;
  if (has_gen) {
    const auto parts = split(o.gen, ',');
    if (parts.size() != 3 && parts.size() != 4)
      throw UsageError("--gen expects n,dim,sparsity[,signal]");
    const double signal = parts.size() == 4 ? parse_double(parts[3], "--gen signal") : 4.0;
    if (!(signal > 0.0)) throw UsageError("--gen signal must be positive");
    const double n = parse_double(parts[0], "--gen n");
    const double dim = parse_double(parts[1], "--gen dim");
    const double sparsity = parse_double(parts[2], "--gen sparsity");
    if (n < 1 || dim < 1 || n != std::floor(n) || dim != std::floor(dim))
      throw UsageError("--gen n and dim must be positive integers");
    if (!(sparsity > 0.0 && sparsity <= 1.0)) throw UsageError("--gen sparsity must be in (0, 1]");
    raw = generate_synthetic(static_cast<Index>(n), static_cast<Index>(dim), sparsity, o.seed,
                             signal).data;
    source = "gen " + o.gen;
  } else {
    raw = read_sparse_file(o.dataset, parse_label_map(o.label_map));
    source = o.dataset;
  }
  const std::uint64_t hash = content_hash(*raw);
  const Index N = o.N == 0 ? raw->size() : o.N;
  if (N < 1 || N > raw->size())
    throw UsageError("--N " + std::to_string(o.N) + " exceeds the dataset size " +
                     std::to_string(raw->size()));

  auto parts = shuffle_and_split(normalize(*raw), N, o.seed);
  Loaded out{std::move(parts.train), std::move(parts.test), hash, source};
  if (!o.test_path.empty()) {
    out.test = normalize(read_sparse_file(o.test_path, parse_label_map(o.label_map),
                                          out.train.dim()));
  }
  return out;
}

RiskSpec make_spec(const Options &o, const Dataset *train) {
  RiskSpec spec;
  spec.loss = loss_from_string(o.loss);
  spec.c = o.c;
  spec.alpha = o.alpha;
  spec.gamma = o.gamma;
  if (o.m_mode == "tight") {
    if (train == nullptr) throw UsageError("--m-mode tight needs a dataset");
    spec.M = smoothness_constant(spec.loss, *train, SmoothnessMode::tight);
  } else {
    spec.M = 1.0;
  }
  spec.validate();
  return spec;
}

WstarEstimate make_wstar(const Options &o, const RiskSpec &spec, const Dataset *train) {
  if (o.wstar_norm_sq) {
    if (*o.wstar_norm_sq < 0.0) throw UsageError("--wstar-norm-sq must be >= 0");
    return {*o.wstar_norm_sq, WstarEstimate::Source::user};
  }
  if (o.estimate_wstar) {
    if (train == nullptr) throw UsageError("--estimate-wstar needs a dataset");
    return wstar_proxy(spec.loss, *train);
  }
  return {};
}

RunConfig make_config(const Options &o, const RiskSpec &spec, const Dataset &train) {
  RunConfig config;
  config.method = method_from_string(o.method);
  config.adaptive = o.adaptive;
  config.m0 = o.m0;
  config.N = train.size();
  config.budget_mode = o.budget == "theory" ? BudgetMode::theoretical_s_n
                                            : BudgetMode::until_threshold;
  config.seed = o.seed;
  config.eval_every = o.eval_every;
  config.pass_cap = o.pass_cap;
  config.max_iterations = o.max_iterations;
  config.wstar = make_wstar(o, spec, &train);
  config.validate(train.size());
  return config;
}

/// Flat `key = value` text that --config accepts, so a manifest reproduces
/// the run it describes.
std::string manifest(const Options &o, const Loaded *data) {
  std::ostringstream m;
  m << "# adasize manifest\n";
  m << "# command = " << o.command << "\n";
  m << "# version = " << ADASIZE_VERSION << "\n";
  if (data) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(data->hash));
    m << "# dataset_hash = " << hash << "\n";
    m << "# dataset_source = " << data->source << "\n";
    m << "# train_size = " << data->train.size() << "\n";
    m << "# test_size = " << (data->test ? data->test->size() : 0) << "\n";
    m << "# dim = " << data->train.dim() << "\n";
  }
  if (!o.dataset.empty()) m << "dataset = \"" << o.dataset << "\"\n";
  if (!o.gen.empty()) m << "gen = \"" << o.gen << "\"\n";
  if (!o.test_path.empty()) m << "test = \"" << o.test_path << "\"\n";
  if (!o.label_map.empty()) m << "label-map = \"" << o.label_map << "\"\n";
  m << "loss = " << o.loss << "\n";
  m << "method = " << o.method << "\n";
  m << "adaptive = " << (o.adaptive ? "true" : "false") << "\n";
  m << "m0 = " << o.m0 << "\n";
  m << "N = " << o.N << "\n";
  m << "alpha = " << num(o.alpha) << "\n";
  m << "c = " << num(o.c) << "\n";
  m << "gamma = " << num(o.gamma) << "\n";
  m << "m-mode = " << o.m_mode << "\n";
  m << "budget = " << o.budget << "\n";
  m << "seed = " << o.seed << "\n";
  m << "pass-cap = " << num(o.pass_cap) << "\n";
  m << "eval-every = " << o.eval_every << "\n";
  m << "max-iterations = " << o.max_iterations << "\n";
  if (o.wstar_norm_sq) m << "wstar-norm-sq = " << num(*o.wstar_norm_sq) << "\n";
  if (o.estimate_wstar) m << "estimate-wstar = true\n";
  m << "draws = " << o.draws << "\n";
  m << "trials = " << o.trials << "\n";
  m << "checks = \"" << o.checks << "\"\n";
  return m.str();
}

std::string trace_name(const RunConfig &c) {
  return "trace_" + std::string(to_string(c.method)) + (c.adaptive ? "_ada" : "_fixed") +
         "_seed" + std::to_string(c.seed) + ".csv";
}

void report_written(const std::vector<fs::path> &files, std::ostream &out) {
  for (const auto &f : files) out << "wrote " << f.string() << '\n';
}

int cmd_gen(const Options &o, std::ostream &out) {
  if (o.gen.empty()) throw UsageError("gen needs --gen n,dim,sparsity[,signal]");
  const auto parts = split(o.gen, ',');
  if (parts.size() != 3 && parts.size() != 4)
    throw UsageError("--gen expects n,dim,sparsity[,signal]");
  const auto synth = generate_synthetic(
      static_cast<Index>(parse_double(parts[0], "n")),
      static_cast<Index>(parse_double(parts[1], "dim")), parse_double(parts[2], "sparsity"),
      o.seed, parts.size() == 4 ? parse_double(parts[3], "signal") : 4.0);
  std::ostringstream text;
  write_sparse_text(text, synth.data);
  std::ostringstream w;
  for (Index j = 0; j < synth.w_true.size(); ++j) w << num(synth.w_true[j]) << '\n';
  OutputSet files(o.out);
  files.add("synthetic.svm", text.str());
  files.add("w_true.txt", w.str());
  files.add("manifest.txt", manifest(o, nullptr));
  report_written(files.commit(), out);
  return 0;
}

int cmd_run(const Options &o, std::ostream &out) {
  const auto data = load_data(o);
  const auto spec = make_spec(o, &data.train);
  const auto config = make_config(o, spec, data.train);
  const auto result = run(config, spec, data.train, data.test ? &*data.test : nullptr);
  const Index N = data.train.size();
  const auto ref = reference_optimum(spec, prefix(data.train, N));

  std::ostringstream csv;
  emit_csv(result.trace, ref, csv);
  OutputSet files(o.out);
  files.add(trace_name(config), csv.str());
  files.add("manifest.txt", manifest(o, &data));

  out << "stage_n,iterations,grad_evals,exit_grad_norm,threshold,exhausted\n";
  for (const auto &s : result.stages)
    out << s.n << ',' << s.iterations << ',' << s.grad_evals_at_exit << ','
        << num(s.exit_grad_norm, 6) << ',' << num(s.threshold, 6) << ','
        << (s.budget_exhausted ? "yes" : "no") << '\n';
  out << "final suboptimality " << num(ref.suboptimality(spec, result.w, prefix(data.train, N)), 6)
      << " (V_N = " << num(statistical_accuracy(spec, N), 6) << ")\n";
  report_written(files.commit(), out);
  return 0;
}

int cmd_compare(const Options &o, std::ostream &out) {
  const auto data = load_data(o);
  const auto spec = make_spec(o, &data.train);
  std::vector<RunConfig> configs;
  for (const char *m : {"gd", "agd", "svrg"}) {
    for (const bool adaptive : {false, true}) {
      Options each = o;
      each.method = m;
      each.adaptive = adaptive;
      configs.push_back(make_config(each, spec, data.train));
    }
  }
  const auto cmp = compare_matrix(configs, spec, data.train, data.test ? &*data.test : nullptr);

  OutputSet files(o.out);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (cmp.rows[k].diverged) continue;
    std::ostringstream csv;
    emit_csv(cmp.runs[k].trace, cmp.reference, csv);
    files.add(trace_name(configs[k]), csv.str());
  }
  std::ostringstream summary;
  write_summary_csv(cmp.rows, summary);
  files.add("summary.csv", summary.str());
  files.add("manifest.txt", manifest(o, &data));
  write_summary_table(cmp.rows, out);
  report_written(files.commit(), out);
  return 0;
}

int cmd_bounds(const Options &o, std::ostream &out) {
  if (o.N < 1) throw UsageError("bounds needs --N");
  std::optional<Loaded> data;
  if (o.m_mode == "tight" || o.estimate_wstar) data = load_data(o);
  const Dataset *train = data ? &data->train : nullptr;
  const auto spec = make_spec(o, train);
  const auto wstar = make_wstar(o, spec, train);
  if (o.m0 < 1 || o.m0 > o.N) throw UsageError("need 1 <= m0 <= N");
  const auto plans = plan_stages(spec, o.m0, o.N, wstar);

  std::optional<double> tc_agd;
  try {
    tc_agd = total_complexity_agd(spec, o.N, o.m0, wstar);
  } catch (const std::invalid_argument &) {
  }
  const double tc_svrg = total_complexity_svrg(spec, o.N, wstar);

  std::ostringstream csv;
  csv << "n,V_n,stop_threshold,agd_eta,agd_beta,svrg_q,svrg_eta,svrg_rho,svrg_warning,"
         "s_n_generic,s_n_gd,s_n_agd,s_n_svrg\n";
  char line[512];
  std::snprintf(line, sizeof line, "%8s %12s %12s %12s %12s %8s %12s %12s %5s %8s %8s %8s %8s\n",
                "n", "V_n", "threshold", "agd_eta", "agd_beta", "svrg_q", "svrg_eta",
                "svrg_rho", "warn", "s_gen", "s_gd", "s_agd", "s_svrg");
  out << line;
  for (const auto &p : plans) {
    const std::string generic = p.s_n_generic ? std::to_string(*p.s_n_generic) : "n/a";
    std::snprintf(line, sizeof line,
                  "%8lld %12.6g %12.6g %12.6g %12.6g %8lld %12.6g %12.6g %5s %8s %8llu %8llu %8llu\n",
                  static_cast<long long>(p.n), p.V_n, p.stop_threshold, p.agd_eta, p.agd_beta,
                  static_cast<long long>(p.svrg_q), p.svrg_eta, p.svrg_rho,
                  p.svrg_warning ? "yes" : "no", generic.c_str(),
                  static_cast<unsigned long long>(p.s_n_gd),
                  static_cast<unsigned long long>(p.s_n_agd),
                  static_cast<unsigned long long>(p.s_n_svrg));
    out << line;
    csv << p.n << ',' << num(p.V_n) << ',' << num(p.stop_threshold) << ',' << num(p.agd_eta)
        << ',' << num(p.agd_beta) << ',' << p.svrg_q << ',' << num(p.svrg_eta) << ','
        << num(p.svrg_rho) << ',' << (p.svrg_warning ? "true" : "false") << ','
        << (p.s_n_generic ? std::to_string(*p.s_n_generic) : "") << ',' << p.s_n_gd << ','
        << p.s_n_agd << ',' << p.s_n_svrg << '\n';
  }
  if (plans.size() > 1 && plans.back().n != 2 * plans[plans.size() - 2].n)
    out << "note: last stage clamped to N=" << o.N << " (N/m0 is not a power of two)\n";
  out << "wstar_norm_sq " << num(wstar.norm_sq, 10) << " (" << to_string(wstar.source) << ")\n";
  out << "total_complexity_agd " << (tc_agd ? num(*tc_agd, 10) : std::string("n/a")) << '\n';
  out << "total_complexity_svrg " << num(tc_svrg, 10) << '\n';
  if (o.rho) {
    out << "s_n_generic(rho=" << num(*o.rho, 6) << ") "
        << iterations_generic(*o.rho, spec, wstar) << '\n';
  }
  if (o.csv) {
    OutputSet files(o.out);
    files.add("bounds.csv", csv.str());
    report_written(files.commit(), out);
  }
  return 0;
}

int cmd_verify(const Options &o, std::ostream &out) {
  const auto data = load_data(o);
  const Dataset &base = data.train;
  const auto spec = make_spec(o, &base);
  const Index B = base.size();
  std::vector<CheckReport> reports;
  const auto wanted = split(o.checks, ',');
  const auto want = [&](const std::string &name) {
    return std::find(wanted.begin(), wanted.end(), name) != wanted.end();
  };
  for (const auto &w : wanted) {
    static const std::vector<std::string> known{"fd", "svrg", "lemma1", "lemma2",
                                                "proposition1", "theorem"};
    if (std::find(known.begin(), known.end(), w) == known.end())
      throw UsageError("unknown check '" + w + "'");
  }

  if (want("fd")) {
    const auto view = prefix(base, std::min<Index>(B, 512));
    for (const auto loss : {LossKind::logistic, LossKind::squared}) {
      RiskSpec s = spec;
      s.loss = loss;
      reports.push_back(fd_gradient_check(s, view, o.trials, o.seed));
    }
  }
  if (want("svrg")) {
    for (const Index n : {1, 5, 17, 50})
      if (n <= B) reports.push_back(svrg_direction_check(spec, prefix(base, n), o.trials, o.seed));
  }
  const Index m = std::max<Index>(1, std::min<Index>(256, B / 8));
  if (want("lemma1")) reports.push_back(lemma1_check(spec, base, m, 2 * m, o.draws, o.seed));
  if (want("lemma2")) reports.push_back(lemma2_check(spec, base, 2 * m, o.draws, o.seed));
  if (want("proposition1")) reports.push_back(proposition1_check(spec, base, m, o.draws, o.seed));
  if (want("theorem")) {
    const Index N = B / 2;
    const Index m0 = std::min<Index>(o.m0, std::max<Index>(1, N / 8));
    const auto wstar = o.wstar_norm_sq || o.estimate_wstar ? make_wstar(o, spec, &base)
                                                           : wstar_proxy(spec.loss, base);
    for (const auto method : {Method::agd, Method::svrg})
      reports.push_back(
          theorem_sn_sufficiency_check(method, spec, base, N, m0, o.draws, o.seed, wstar));
  }

  std::ostringstream csv;
  write_report_header(csv);
  for (const auto &r : reports) write_report_line(r, csv);
  out << csv.str();
  for (const auto &r : reports)
    if (!r.notes.empty()) out << "# " << r.name << ": " << r.notes << '\n';
  OutputSet files(o.out);
  files.add("checks.csv", csv.str());
  files.add("manifest.txt", manifest(o, &data));
  report_written(files.commit(), out);
  return 0;
}

void build_app(CLI::App &app, Options &o) {
  app.description("Adaptive sample size first-order methods for regularized ERM");
  app.set_version_flag("--version", std::string(ADASIZE_VERSION));
  app.set_config("--config", "", "flat key = value file; flags override it");
  app.add_option("command", o.command, "gen | run | compare | bounds | verify")
      ->required()
      ->check(CLI::IsMember({"gen", "run", "compare", "bounds", "verify"}));

  auto *dataset = app.add_option("--dataset", o.dataset, "sparse text dataset (label idx:val ...)");
  auto *gen = app.add_option("--gen", o.gen, "synthetic data n,dim,sparsity[,signal]");
  dataset->excludes(gen);
  app.add_option("--test", o.test_path, "separate test set; otherwise rows beyond N are held out");
  app.add_option("--label-map", o.label_map, "raw:mapped pairs, e.g. 0:-1,1:1");
  app.add_option("--loss", o.loss)->check(CLI::IsMember({"logistic", "squared"}));
  app.add_option("--method", o.method)->check(CLI::IsMember({"gd", "agd", "svrg"}));
  app.add_flag("--adaptive", o.adaptive, "adaptive sample size instead of fixed N");
  app.add_option("--m0", o.m0, "initial sample size")->check(CLI::PositiveNumber);
  app.add_option("--N", o.N, "training size (0: whole dataset)")->check(CLI::NonNegativeNumber);
  app.add_option("--alpha", o.alpha)->check(CLI::Range(0.5, 1.0));
  app.add_option("--c", o.c)->check(CLI::PositiveNumber);
  app.add_option("--gamma", o.gamma)->check(CLI::PositiveNumber);
  app.add_option("--m-mode", o.m_mode, "smoothness constant: paper (1) or tight")
      ->check(CLI::IsMember({"paper", "tight"}));
  app.add_option("--budget", o.budget, "stage budget: threshold or theory")
      ->check(CLI::IsMember({"threshold", "theory"}));
  app.add_option("--seed", o.seed);
  app.add_option("--pass-cap", o.pass_cap, "effective passes for fixed runs")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--eval-every", o.eval_every)->check(CLI::PositiveNumber);
  app.add_option("--max-iterations", o.max_iterations)->check(CLI::PositiveNumber);
  auto *wstar = app.add_option("--wstar-norm-sq", o.wstar_norm_sq, "||w*||^2 for the bounds");
  app.add_flag("--estimate-wstar", o.estimate_wstar, "estimate ||w*||^2 from the data")
      ->excludes(wstar);
  app.add_option("--rho", o.rho, "also print the generic s_n at this rate");
  app.add_flag("--csv", o.csv, "bounds: also write bounds.csv");
  app.add_option("--draws", o.draws)->check(CLI::PositiveNumber);
  app.add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  app.add_option("--checks", o.checks, "comma list of fd,svrg,lemma1,lemma2,proposition1,theorem");
  app.add_option("--out", o.out, "output directory")->envname("ADASIZE_OUT");
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app("", "adasize");
  Options o;
  build_app(app, o);
  if (argc <= 1) {
    err << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (o.command == "gen") return cmd_gen(o, out);
    if (o.command == "run") return cmd_run(o, out);
    if (o.command == "compare") return cmd_compare(o, out);
    if (o.command == "bounds") return cmd_bounds(o, out);
    return cmd_verify(o, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return 1;
  } catch (const std::invalid_argument &e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace adasize::cli
