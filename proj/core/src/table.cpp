#include "stigmergy/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stigmergy {

Table::Table(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), values_(rows * cols, value) {}

void Table::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

void Table::add_scaled(const Table& other, double scale) {
  if (!same_shape(other)) throw std::invalid_argument("Table::add_scaled: shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += scale * other.values_[i];
}

Table& Table::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

double max_abs_diff(const Table& a, const Table& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

double max_abs(const Table& t) {
  double worst = 0.0;
  for (double v : t.values()) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace stigmergy
