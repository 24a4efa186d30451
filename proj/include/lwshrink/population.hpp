#pragma once

#include "lwshrink/linalg.hpp"

#include <string>
#include <variant>

namespace lwshrink {

struct Gaussian {};

/// Multivariate t with covariance (not scale) equal to the model's sigma.
struct Student {
  double nu;
};

/// Independent t blocks: the first ceil(p/2) coordinates use nu_first,
/// the rest nu_second.
struct MixedStudent {
  double nu_first;
  double nu_second;
};

using Distribution = std::variant<Gaussian, Student, MixedStudent>;

/// Short label used in CSV output: "gaussian", "t10", "mixed_t15_t8.5".
std::string distribution_label(const Distribution& d);

/// True when every tail parameter is above 8, the eighth-moment regime the
/// convergence results are stated for. Gaussian is always compliant.
bool assumption_compliant(const Distribution& d);

/// True covariance, law and mean of the data-generating process.
///
/// Construction checks sigma is PSD (min eigenvalue >= -1e-8 * max) and
/// caches a symmetric square root with negative eigenvalues clamped to 0.
class PopulationModel {
 public:
  PopulationModel(SymmetricMatrix sigma, Distribution distribution);
  PopulationModel(SymmetricMatrix sigma, Distribution distribution, Vector mean);

  Index dim() const noexcept { return sigma_.dim(); }
  const SymmetricMatrix& sigma() const noexcept { return sigma_; }
  const Distribution& distribution() const noexcept { return distribution_; }
  const Vector& mean() const noexcept { return mean_; }

  /// Symmetric F with F F^T = sigma (up to the eigenvalue clamp).
  const Matrix& sqrt_sigma() const noexcept { return sqrt_sigma_; }

 private:
  SymmetricMatrix sigma_;
  Distribution distribution_;
  Vector mean_;
  Matrix sqrt_sigma_;
};

/// Symmetric PSD square root via eigendecomposition. Eigenvalues below
/// -1e-8 * lambda_max raise; the remaining negatives are clamped to 0.
Matrix psd_sqrt(const SymmetricMatrix& sigma);

}  // namespace lwshrink
