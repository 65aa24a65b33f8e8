#include "pks/core/interaction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pks {

InteractionMatrix::InteractionMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), a_(std::move(row_major)) {
  if (n_ == 0) throw std::invalid_argument("interaction matrix: empty");
  if (a_.size() != n_ * n_) {
    throw std::invalid_argument("interaction matrix: expected " + std::to_string(n_ * n_) +
                                " entries, got " + std::to_string(a_.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      double v = a_[i * n_ + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("interaction matrix: entry (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") must be finite and >= 0");
      }
      if (v != a_[j * n_ + i]) {
        throw std::invalid_argument("interaction matrix: not symmetric at (" +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
    }
  }
}

InteractionMatrix InteractionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("interaction matrix: rows must have length n");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return InteractionMatrix(n, std::move(flat));
}

InteractionMatrix InteractionMatrix::zero(std::size_t n) {
  return InteractionMatrix(n, std::vector<double>(n * n, 0.0));
}

bool InteractionMatrix::is_zero() const {
  for (double v : a_)
    if (v != 0.0) return false;
  return true;
}

std::vector<std::vector<double>> InteractionMatrix::rows() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = a_[i * n_ + j];
  return out;
}

}  // namespace pks
