#ifndef ADASIZE_COMMON_HPP
#define ADASIZE_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace adasize {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed sparse text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public Error {
 public:
  EmptyDatasetError() : Error("dataset is empty") {}
};

/// A solver produced a non-finite iterate.
class DivergenceError : public Error {
 public:
  DivergenceError(Index stage_n, std::uint64_t iteration)
      : Error("non-finite iterate at stage n=" + std::to_string(stage_n) +
              ", iteration " + std::to_string(iteration)),
        stage_n_(stage_n),
        iteration_(iteration) {}
  Index stage_n() const { return stage_n_; }
  std::uint64_t iteration() const { return iteration_; }

 private:
  Index stage_n_;
  std::uint64_t iteration_;
};

/// An iteration cap was hit where reaching the target is mandatory.
class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};

}  // namespace adasize

#endif  // ADASIZE_COMMON_HPP
