#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stigmergy {

// Dense row-major matrix of doubles indexed by (observation, action). Backs
// Q-values, eligibility traces, exploration traces and gradients.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double value = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  void fill(double value);
  // this += scale * other; shapes must agree.
  void add_scaled(const Table& other, double scale);
  Table& operator*=(double scale);

  bool same_shape(const Table& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Max |a - b| over all entries; shapes must agree.
double max_abs_diff(const Table& a, const Table& b);
double max_abs(const Table& t);

}  // namespace stigmergy
