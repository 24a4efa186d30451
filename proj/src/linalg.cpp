#include "lwshrink/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lwshrink {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

void require_same_dim(const SymmetricMatrix& a, const SymmetricMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

void require_two_samples(const ObservationMatrix& x, const char* what) {
  if (x.samples() < 2) {
    throw PreconditionError(std::string(what) + ": need n >= 2 samples, got n=" +
                            std::to_string(x.samples()));
  }
}

}  // namespace

ObservationMatrix::ObservationMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("ObservationMatrix: need p >= 1 and n >= 1, got " +
                                std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
  }
  if (!data_.allFinite()) {
    throw std::invalid_argument("ObservationMatrix: non-finite entry");
  }
}

SymmetricMatrix::SymmetricMatrix(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw std::invalid_argument("SymmetricMatrix: need a non-empty square matrix, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("SymmetricMatrix: non-finite entry");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw std::invalid_argument("SymmetricMatrix: input is not symmetric (max |a_ij - a_ji| = " +
                                std::to_string(asym) + ")");
  }
  data_ = 0.5 * (a + a.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Index p) {
  if (p < 1) throw std::invalid_argument("SymmetricMatrix::identity: p must be >= 1");
  return SymmetricMatrix(Matrix::Identity(p, p), Trusted{});
}

SymmetricMatrix SymmetricMatrix::zero(Index p) {
  if (p < 1) throw std::invalid_argument("SymmetricMatrix::zero: p must be >= 1");
  return SymmetricMatrix(Matrix::Zero(p, p), Trusted{});
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  if (d.size() < 1) throw std::invalid_argument("SymmetricMatrix::diagonal: empty diagonal");
  if (!d.allFinite()) throw std::invalid_argument("SymmetricMatrix::diagonal: non-finite entry");
  return SymmetricMatrix(Matrix(d.asDiagonal()), Trusted{});
}

SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require_same_dim(a, b, "operator+");
  return SymmetricMatrix(a.data_ + b.data_, SymmetricMatrix::Trusted{});
}

SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require_same_dim(a, b, "operator-");
  return SymmetricMatrix(a.data_ - b.data_, SymmetricMatrix::Trusted{});
}

SymmetricMatrix operator*(double s, const SymmetricMatrix& a) {
  return SymmetricMatrix(s * a.data_, SymmetricMatrix::Trusted{});
}

double frob_norm_sq(const SymmetricMatrix& a) {
  return a.data().squaredNorm() / static_cast<double>(a.dim());
}

double inner(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require_same_dim(a, b, "inner");
  return a.data().cwiseProduct(b.data()).sum() / static_cast<double>(a.dim());
}

ObservationMatrix demean(const ObservationMatrix& x) {
  require_two_samples(x, "demean");
  const Vector mean = x.data().rowwise().mean();
  return ObservationMatrix(x.data().colwise() - mean);
}

SymmetricMatrix covariance_of_demeaned(const ObservationMatrix& demeaned) {
  require_two_samples(demeaned, "sample_covariance");
  const Index p = demeaned.dim();
  Matrix s = Matrix::Zero(p, p);
  s.selfadjointView<Eigen::Lower>().rankUpdate(demeaned.data(),
                                               1.0 / static_cast<double>(demeaned.samples() - 1));
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return SymmetricMatrix(s);
}

SymmetricMatrix sample_covariance(const ObservationMatrix& x) {
  return covariance_of_demeaned(demean(x));
}

}  // namespace lwshrink
