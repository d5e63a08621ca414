#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <vector>

namespace sns {

using Triplet = Eigen::Triplet<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Finalized sparse matrix. Duplicate (row, col) contributions are summed on
/// construction, so the stored pattern has no duplicates.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(int rows, int cols, const std::vector<Triplet>& entries);
  explicit SparseOperator(SparseMatrix matrix);

  int rows() const { return static_cast<int>(matrix_.rows()); }
  int cols() const { return static_cast<int>(matrix_.cols()); }
  Eigen::Index nonzeros() const { return matrix_.nonZeros(); }

  const SparseMatrix& matrix() const { return matrix_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;
  /// y^T M x
  double bilinear(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const;

  double max_abs() const;
  /// max |M - M^T|
  double asymmetry() const;

  SparseOperator operator+(const SparseOperator& other) const;
  SparseOperator operator*(double s) const;

  /// Coordinate text format: one "row col value" line per stored entry.
  void write_coo(std::ostream& out) const;

 private:
  SparseMatrix matrix_;
};

}  // namespace sns
