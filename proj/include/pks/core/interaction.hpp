#pragma once

#include <cstddef>
#include <vector>

namespace pks {

// Symmetric, entrywise nonnegative n x n interaction matrix (a_ij).
class InteractionMatrix {
 public:
  InteractionMatrix(std::size_t n, std::vector<double> row_major);
  static InteractionMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static InteractionMatrix zero(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  bool is_zero() const;
  std::vector<std::vector<double>> rows() const;

  bool operator==(const InteractionMatrix& other) const = default;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

}  // namespace pks
