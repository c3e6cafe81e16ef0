#ifndef ADASIZE_DATA_HPP
#define ADASIZE_DATA_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "adasize/common.hpp"

namespace adasize {

/// One labelled example. Feature indices are 1-based and strictly
/// increasing; explicit zeros are not stored.
struct Sample {
  std::vector<std::pair<Index, double>> features;
  double label = 1.0;

  bool operator==(const Sample &) const = default;
};

/// Immutable labelled design matrix. Rows are samples, stored row-major so
/// that prefix views and single-row access stay contiguous.
template <typename Scalar>
class BasicDataset {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  using Labels = Vector<Scalar>;

  BasicDataset() = default;

  BasicDataset(Matrix features, Labels labels, std::string name)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        name_(std::move(name)) {
    if (features_.rows() != labels_.size())
      throw std::invalid_argument("feature rows and labels differ in size");
    if (features_.rows() == 0) throw EmptyDatasetError();
    for (Index i = 0; i < labels_.size(); ++i) {
      if (labels_[i] != Scalar(1) && labels_[i] != Scalar(-1))
        throw std::invalid_argument("labels must be -1 or +1");
    }
    features_.makeCompressed();
  }

  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }
  const Matrix &features() const { return features_; }
  const Labels &labels() const { return labels_; }
  const std::string &name() const { return name_; }

  template <typename Other>
  BasicDataset<Other> cast() const {
    return BasicDataset<Other>(features_.template cast<Other>(),
                               labels_.template cast<Other>(), name_);
  }

  bool operator==(const BasicDataset &other) const {
    if (size() != other.size() || dim() != other.dim() ||
        labels_ != other.labels_)
      return false;
    return Matrix(features_ - other.features_).norm() == Scalar(0) &&
           features_.nonZeros() == other.features_.nonZeros();
  }

 private:
  Matrix features_;
  Labels labels_;
  std::string name_;
};

/// The first `count` samples of a dataset. Views of the same base nest:
/// a view of m samples is a prefix of any view of n >= m samples.
template <typename Scalar>
class BasicDatasetView {
 public:
  BasicDatasetView(const BasicDataset<Scalar> &base, Index count)
      : base_(&base), count_(count) {
    if (count < 1 || count > base.size())
      throw std::out_of_range("view size " + std::to_string(count) +
                              " outside [1, " + std::to_string(base.size()) +
                              "]");
  }

  /// Full view.
  explicit BasicDatasetView(const BasicDataset<Scalar> &base)
      : BasicDatasetView(base, base.size()) {}

  Index size() const { return count_; }
  Index dim() const { return base_->dim(); }
  const BasicDataset<Scalar> &base() const { return *base_; }

  auto features() const { return base_->features().topRows(count_); }
  auto labels() const { return base_->labels().head(count_); }
  auto row(Index i) const { return base_->features().row(i); }
  Scalar label(Index i) const { return base_->labels()[i]; }

 private:
  const BasicDataset<Scalar> *base_;
  Index count_;
};

using Dataset = BasicDataset<double>;
using DatasetView = BasicDatasetView<double>;

template <typename Scalar>
BasicDatasetView<Scalar> prefix(const BasicDataset<Scalar> &d, Index n) {
  return BasicDatasetView<Scalar>(d, n);
}

/// Scales every nonzero row to unit Euclidean norm. All-zero rows are kept.
template <typename Scalar>
BasicDataset<Scalar> normalize(const BasicDataset<Scalar> &d) {
  typename BasicDataset<Scalar>::Matrix x = d.features();
  for (Index i = 0; i < x.outerSize(); ++i) {
    const Scalar norm = x.row(i).norm();
    if (norm > Scalar(0)) x.row(i) /= norm;
  }
  return BasicDataset<Scalar>(std::move(x), d.labels(), d.name());
}

/// Builds a dataset from samples. `dim` defaults to the largest index seen.
Dataset from_samples(std::span<const Sample> samples,
                     std::optional<Index> dim = std::nullopt,
                     std::string name = {});

Sample sample_at(const Dataset &d, Index i);

/// Raw label value -> {-1, +1}.
using LabelMap = std::map<double, double>;

/// {-1 -> -1, +1 -> +1}.
LabelMap binary_label_map();

/// Parses `<label> <idx>:<val> ...` lines; `#` starts a comment.
Dataset parse_sparse_text(std::istream &in, const LabelMap &label_map,
                          std::optional<Index> dim = std::nullopt,
                          std::string name = {});

Dataset read_sparse_file(const std::string &path, const LabelMap &label_map,
                         std::optional<Index> dim = std::nullopt);

/// Writes the text format; values are printed with 17 significant digits so
/// that reparsing reproduces the dataset exactly.
void write_sparse_text(std::ostream &out, const Dataset &d);

struct SyntheticData {
  Dataset data;
  Vector<double> w_true;
};

/// Draws w_true ~ N(0, signal^2 I), then `n` samples whose coordinates are present
/// with probability `sparsity` and Gaussian with E||x||^2 = 1, labelled by
/// the logistic model P(y = +1 | x) = 1 / (1 + exp(-w_true' x)).
/// Margins w_true'x have standard deviation about `signal`.
SyntheticData generate_synthetic(Index n, Index dim, double sparsity,
                                 std::uint64_t seed, double signal = 4.0);

struct Split {
  Dataset train;
  std::optional<Dataset> test;  // empty when train_count == size
};

/// Applies one seeded uniform permutation, then cuts at `train_count`.
Split shuffle_and_split(const Dataset &d, Index train_count,
                        std::uint64_t seed);

/// Rows of `d` in the given order.
Dataset select_rows(const Dataset &d, std::span<const Index> rows,
                    std::string name = {});

/// FNV-1a over the serialized text form.
std::uint64_t content_hash(const Dataset &d);

}  // namespace adasize

#endif  // ADASIZE_DATA_HPP
