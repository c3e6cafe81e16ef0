#include "adasize/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace adasize {

namespace {

using Triplet = Eigen::Triplet<double>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view token, double &out) {
  // from_chars rejects a leading '+', which the format allows for labels.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char *end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_index(std::string_view token, Index &out) {
  const char *end = token.data() + token.size();
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 1) return false;
  out = static_cast<Index>(v);
  return true;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset from_samples(std::span<const Sample> samples, std::optional<Index> dim,
                     std::string name) {
  if (samples.empty()) throw EmptyDatasetError();
  Index max_index = 0;
  std::size_t nnz = 0;
  for (const auto &s : samples) {
    Index prev = 0;
    for (const auto &[idx, val] : s.features) {
      if (idx <= prev)
        throw std::invalid_argument("feature indices must be strictly increasing and >= 1");
      prev = idx;
    }
    max_index = std::max(max_index, prev);
    nnz += s.features.size();
  }
  const Index cols = dim.value_or(max_index);
  if (cols < max_index)
    throw std::invalid_argument("dim " + std::to_string(cols) +
                                " below largest feature index " +
                                std::to_string(max_index));
  if (cols < 1) throw std::invalid_argument("dim must be positive");

  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  Vector<double> labels(static_cast<Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const auto &[idx, val] : samples[i].features)
      if (val != 0.0) triplets.emplace_back(static_cast<Index>(i), idx - 1, val);
    labels[static_cast<Index>(i)] = samples[i].label;
  }
  Dataset::Matrix x(static_cast<Index>(samples.size()), cols);
  x.setFromTriplets(triplets.begin(), triplets.end());
  return Dataset(std::move(x), std::move(labels), std::move(name));
}

Sample sample_at(const Dataset &d, Index i) {
  Sample s;
  s.label = d.labels()[i];
  for (Dataset::Matrix::InnerIterator it(d.features(), i); it; ++it)
    s.features.emplace_back(it.col() + 1, it.value());
  return s;
}

LabelMap binary_label_map() { return {{-1.0, -1.0}, {1.0, 1.0}}; }

Dataset parse_sparse_text(std::istream &in, const LabelMap &label_map,
                          std::optional<Index> dim, std::string name) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    Sample sample;
    bool first = true;
    Index prev = 0;
    while (!view.empty()) {
      const auto stop = view.find_first_of(" \t");
      const auto token = view.substr(0, stop);
      view = stop == std::string_view::npos ? std::string_view{}
                                            : trim(view.substr(stop));
      if (first) {
        double raw = 0;
        if (!parse_double(token, raw))
          throw ParseError(line_no, "bad label '" + std::string(token) + "'");
        const auto it = label_map.find(raw);
        if (it == label_map.end())
          throw ParseError(line_no, "unmapped label '" + std::string(token) + "'");
        sample.label = it->second;
        first = false;
        continue;
      }
      const auto colon = token.find(':');
      Index idx = 0;
      double val = 0;
      if (colon == std::string_view::npos ||
          !parse_index(token.substr(0, colon), idx) ||
          !parse_double(token.substr(colon + 1), val))
        throw ParseError(line_no, "bad feature '" + std::string(token) + "'");
      if (idx <= prev)
        throw ParseError(line_no, "feature indices not strictly increasing");
      prev = idx;
      if (val != 0.0) sample.features.emplace_back(idx, val);
    }
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) throw EmptyDatasetError();
  return from_samples(samples, dim, std::move(name));
}

Dataset read_sparse_file(const std::string &path, const LabelMap &label_map,
                         std::optional<Index> dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  return parse_sparse_text(in, label_map, dim, path);
}

void write_sparse_text(std::ostream &out, const Dataset &d) {
  for (Index i = 0; i < d.size(); ++i) {
    out << (d.labels()[i] > 0 ? "+1" : "-1");
    for (Dataset::Matrix::InnerIterator it(d.features(), i); it; ++it)
      out << ' ' << it.col() + 1 << ':' << format_double(it.value());
    out << '\n';
  }
  if (!out) throw Error("write failure");
}

SyntheticData generate_synthetic(Index n, Index dim, double sparsity,
                                 std::uint64_t seed, double signal) {
  if (n < 1 || dim < 1)
    throw std::invalid_argument("synthetic data needs n >= 1 and dim >= 1");
  if (!(sparsity > 0.0 && sparsity <= 1.0))
    throw std::invalid_argument("sparsity must lie in (0, 1]");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (!(signal > 0.0)) throw std::invalid_argument("signal must be positive");
  Vector<double> w_true(dim);
  for (Index j = 0; j < dim; ++j) w_true[j] = signal * normal(rng);

  const double scale = 1.0 / std::sqrt(sparsity * static_cast<double>(dim));
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(
      std::ceil(static_cast<double>(n * dim) * sparsity)));
  Vector<double> labels(n);
  for (Index i = 0; i < n; ++i) {
    double margin = 0.0;
    for (Index j = 0; j < dim; ++j) {
      if (sparsity < 1.0 && unit(rng) >= sparsity) continue;
      const double v = scale * normal(rng);
      triplets.emplace_back(i, j, v);
      margin += w_true[j] * v;
    }
    const double p_pos = 1.0 / (1.0 + std::exp(-margin));
    labels[i] = unit(rng) < p_pos ? 1.0 : -1.0;
  }
  Dataset::Matrix x(n, dim);
  x.setFromTriplets(triplets.begin(), triplets.end());
  std::ostringstream name;
  name << "synthetic_n" << n << "_d" << dim << "_s" << sparsity << "_seed"
       << seed;
  return {Dataset(std::move(x), std::move(labels), name.str()),
          std::move(w_true)};
}

Dataset select_rows(const Dataset &d, std::span<const Index> rows,
                    std::string name) {
  if (rows.empty()) throw EmptyDatasetError();
  std::vector<Triplet> triplets;
  Vector<double> labels(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index src = rows[r];
    if (src < 0 || src >= d.size()) throw std::out_of_range("row index");
    for (Dataset::Matrix::InnerIterator it(d.features(), src); it; ++it)
      triplets.emplace_back(static_cast<Index>(r), it.col(), it.value());
    labels[static_cast<Index>(r)] = d.labels()[src];
  }
  Dataset::Matrix x(static_cast<Index>(rows.size()), d.dim());
  x.setFromTriplets(triplets.begin(), triplets.end());
  return Dataset(std::move(x), std::move(labels),
                 name.empty() ? d.name() : std::move(name));
}

Split shuffle_and_split(const Dataset &d, Index train_count,
                        std::uint64_t seed) {
  if (train_count < 1 || train_count > d.size())
    throw std::invalid_argument("train_count " + std::to_string(train_count) +
                            " outside [1, " + std::to_string(d.size()) + "]");
  std::vector<Index> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto cut = order.begin() + train_count;
  Split split{select_rows(d, std::span<const Index>(order.begin(), cut),
                          d.name() + ":train"),
              std::nullopt};
  if (cut != order.end())
    split.test = select_rows(d, std::span<const Index>(cut, order.end()),
                             d.name() + ":test");
  return split;
}

std::uint64_t content_hash(const Dataset &d) {
  std::ostringstream text;
  write_sparse_text(text, d);
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : text.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace adasize
