#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace lwshrink {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an input is well-formed but outside an operation's domain
/// (too few samples, degrees of freedom too low, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// p x n block of observations: rows are dimensions, columns are samples.
class ObservationMatrix {
 public:
  explicit ObservationMatrix(Matrix data);

  Index dim() const noexcept { return data_.rows(); }
  Index samples() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }

 private:
  Matrix data_;
};

/// Dense symmetric p x p matrix.
///
/// Construction symmetrizes the input as (A + A^T) / 2. Inputs whose
/// asymmetry exceeds 1e-10 (relative to max(1, max|a_ij|)) are rejected.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Matrix& a);

  static SymmetricMatrix identity(Index p);
  static SymmetricMatrix zero(Index p);
  static SymmetricMatrix diagonal(const Vector& d);

  Index dim() const noexcept { return data_.rows(); }
  const Matrix& data() const noexcept { return data_; }
  double operator()(Index i, Index j) const { return data_(i, j); }

  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator*(double s, const SymmetricMatrix& a);

 private:
  struct Trusted {};
  SymmetricMatrix(Matrix a, Trusted) : data_(std::move(a)) {}

  Matrix data_;
};

/// Normalized squared Frobenius norm tr(A A^T) / p, so that |I_p|^2 = 1.
double frob_norm_sq(const SymmetricMatrix& a);

/// Inner product tr(A B^T) / p associated with frob_norm_sq.
double inner(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Removes the arithmetic row mean from every row.
ObservationMatrix demean(const ObservationMatrix& x);

/// Unbiased empirical covariance of demeaned data, X~ X~^T / (n - 1).
SymmetricMatrix sample_covariance(const ObservationMatrix& x);

/// Same as sample_covariance, for data that is already demeaned.
SymmetricMatrix covariance_of_demeaned(const ObservationMatrix& demeaned);

}  // namespace lwshrink
