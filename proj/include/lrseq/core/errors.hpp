#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrseq {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter outside the mathematical domain of an operation (k <= 1,
// nonpositive hazard ratio, non-finite theta, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Likelihood requested on a dataset without a single observed event.
class NoEventsError : public Error {
 public:
  NoEventsError() : Error("no events") {}
};

// The partial likelihood is monotone, so the MLE sits at +/- infinity.
// direction() is +1 or -1 for the divergence side, 0 when flat.
class MleDivergenceError : public Error {
 public:
  explicit MleDivergenceError(int direction, const std::string& detail = "")
      : Error(detail.empty() ? "MLE diverges" : "MLE diverges: " + detail),
        direction_(direction) {}

  int direction() const noexcept { return direction_; }

 private:
  int direction_;
};

// Invalid simulation / monitor configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. row() is the 1-based line number in the source file,
// 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(std::size_t row, const std::string& what)
      : Error(row == 0 ? what : "row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace lrseq
