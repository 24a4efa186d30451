#include "lwshrink/population.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lwshrink {

namespace {

std::string format_nu(double nu) {
  std::ostringstream os;
  os << nu;
  return os.str();
}

void check_distribution(const Distribution& d) {
  if (const auto* t = std::get_if<Student>(&d)) {
    if (!(t->nu > 4.0)) {
      throw PreconditionError("student distribution: infinite fourth moment regime (nu=" +
                              format_nu(t->nu) + ", need nu > 4)");
    }
  } else if (const auto* mix = std::get_if<MixedStudent>(&d)) {
    if (!(mix->nu_first > 2.0) || !(mix->nu_second > 2.0)) {
      throw PreconditionError("mixed student distribution: need nu > 2 on both blocks");
    }
  }
}

}  // namespace

std::string distribution_label(const Distribution& d) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return "gaussian";
        } else if constexpr (std::is_same_v<T, Student>) {
          return "t" + format_nu(v.nu);
        } else {
          return "mixed_t" + format_nu(v.nu_first) + "_t" + format_nu(v.nu_second);
        }
      },
      d);
}

bool assumption_compliant(const Distribution& d) {
  if (const auto* t = std::get_if<Student>(&d)) return t->nu > 8.0;
  if (const auto* mix = std::get_if<MixedStudent>(&d)) {
    return mix->nu_first > 8.0 && mix->nu_second > 8.0;
  }
  return true;
}

Matrix psd_sqrt(const SymmetricMatrix& sigma) {
  const Matrix& a = sigma.data();
  if (a.isDiagonal(0.0)) {
    const Vector d = a.diagonal();
    const double largest = std::max(d.maxCoeff(), 0.0);
    if (d.minCoeff() < -1e-8 * largest) {
      throw std::invalid_argument("covariance is not positive semidefinite (min eigenvalue " +
                                  std::to_string(d.minCoeff()) + ")");
    }
    return Matrix(d.cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  }
  Vector values = eig.eigenvalues();
  const double largest = std::max(values.maxCoeff(), 0.0);
  if (values.minCoeff() < -1e-8 * largest) {
    throw std::invalid_argument("covariance is not positive semidefinite (min eigenvalue " +
                                std::to_string(values.minCoeff()) + ")");
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  const Matrix& vectors = eig.eigenvectors();
  Matrix root = vectors * values.asDiagonal() * vectors.transpose();
  return 0.5 * (root + root.transpose());
}

PopulationModel::PopulationModel(SymmetricMatrix sigma, Distribution distribution)
    : PopulationModel(sigma, distribution, Vector::Zero(sigma.dim())) {}

PopulationModel::PopulationModel(SymmetricMatrix sigma, Distribution distribution, Vector mean)
    : sigma_(std::move(sigma)), distribution_(distribution), mean_(std::move(mean)) {
  check_distribution(distribution_);
  if (mean_.size() != sigma_.dim()) {
    throw std::invalid_argument("PopulationModel: mean has length " + std::to_string(mean_.size()) +
                                ", expected " + std::to_string(sigma_.dim()));
  }
  if (!mean_.allFinite()) throw std::invalid_argument("PopulationModel: non-finite mean");
  sqrt_sigma_ = psd_sqrt(sigma_);
}

}  // namespace lwshrink
