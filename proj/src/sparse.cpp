#include "sns/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace sns {

SparseOperator::SparseOperator(int rows, int cols, const std::vector<Triplet>& entries)
    : matrix_(rows, cols) {
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();
}

SparseOperator::SparseOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {
  matrix_.makeCompressed();
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != matrix_.cols()) throw std::invalid_argument("SparseOperator::apply: size mismatch");
  return matrix_ * x;
}

Eigen::VectorXd SparseOperator::apply_transpose(const Eigen::VectorXd& x) const {
  if (x.size() != matrix_.rows()) {
    throw std::invalid_argument("SparseOperator::apply_transpose: size mismatch");
  }
  return matrix_.transpose() * x;
}

double SparseOperator::bilinear(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const {
  return y.dot(apply(x));
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double SparseOperator::asymmetry() const {
  if (rows() != cols()) throw std::invalid_argument("SparseOperator::asymmetry: not square");
  const SparseMatrix diff = matrix_ - SparseMatrix(matrix_.transpose());
  return SparseOperator(diff).max_abs();
}

SparseOperator SparseOperator::operator+(const SparseOperator& other) const {
  if (rows() != other.rows() || cols() != other.cols()) {
    throw std::invalid_argument("SparseOperator: dimension mismatch in sum");
  }
  return SparseOperator(SparseMatrix(matrix_ + other.matrix_));
}

SparseOperator SparseOperator::operator*(double s) const { return SparseOperator(SparseMatrix(s * matrix_)); }

void SparseOperator::write_coo(std::ostream& out) const {
  out.precision(17);
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace sns
