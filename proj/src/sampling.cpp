#include "lwshrink/sampling.hpp"

#include <cmath>
#include <string>

namespace lwshrink {

namespace {

Matrix standard_normals(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) z(i, j) = normal(rng);
  }
  return z;
}

// sqrt((nu - 2) / U) for U ~ chi^2_nu, one per column. The factor gives a
// unit-covariance t column when multiplied with a standard normal vector.
Vector t_column_scales(double nu, Index n, Rng& rng) {
  std::chi_squared_distribution<double> chi2(nu);
  Vector scales(n);
  for (Index k = 0; k < n; ++k) scales(k) = std::sqrt((nu - 2.0) / chi2(rng));
  return scales;
}

void require_nu_above_two(double nu, const char* what) {
  if (!(nu > 2.0)) {
    throw PreconditionError(std::string(what) + ": need nu > 2 for a finite covariance, got " +
                            std::to_string(nu));
  }
}

void require_positive_n(Index n) {
  if (n < 1) throw std::invalid_argument("sampler: n must be >= 1");
}

Matrix mixed_student_columns(const Matrix& root, double nu_first, double nu_second, Index n,
                             std::uint64_t seed) {
  require_nu_above_two(nu_first, "sample_mixed_student");
  require_nu_above_two(nu_second, "sample_mixed_student");
  require_positive_n(n);
  const Index p = root.rows();
  if (p < 2) throw std::invalid_argument("sample_mixed_student: need p >= 2");
  const Index split = (p + 1) / 2;

  Rng rng(seed);
  Matrix y = standard_normals(p, n, rng);
  const Vector first = t_column_scales(nu_first, n, rng);
  const Vector second = t_column_scales(nu_second, n, rng);
  y.topRows(split) = y.topRows(split) * first.asDiagonal();
  y.bottomRows(p - split) = y.bottomRows(p - split) * second.asDiagonal();
  return root * y;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ObservationMatrix sample_gaussian(const PopulationModel& model, Index n, std::uint64_t seed) {
  if (!std::holds_alternative<Gaussian>(model.distribution())) {
    throw std::invalid_argument("sample_gaussian: model is not Gaussian");
  }
  require_positive_n(n);
  Rng rng(seed);
  const Matrix z = standard_normals(model.dim(), n, rng);
  Matrix x = model.sqrt_sigma() * z;
  x.colwise() += model.mean();
  return ObservationMatrix(std::move(x));
}

ObservationMatrix sample_student(const PopulationModel& model, Index n, std::uint64_t seed) {
  const auto* t = std::get_if<Student>(&model.distribution());
  if (t == nullptr) throw std::invalid_argument("sample_student: model is not a t distribution");
  require_nu_above_two(t->nu, "sample_student");
  require_positive_n(n);
  Rng rng(seed);
  const Matrix z = standard_normals(model.dim(), n, rng);
  const Vector scales = t_column_scales(t->nu, n, rng);
  Matrix x = model.sqrt_sigma() * (z * scales.asDiagonal());
  x.colwise() += model.mean();
  return ObservationMatrix(std::move(x));
}

ObservationMatrix sample_mixed_student(const SymmetricMatrix& sigma, double nu_first,
                                       double nu_second, Index n, std::uint64_t seed) {
  return ObservationMatrix(mixed_student_columns(psd_sqrt(sigma), nu_first, nu_second, n, seed));
}

ObservationMatrix sample(const PopulationModel& model, Index n, std::uint64_t seed) {
  if (std::holds_alternative<Gaussian>(model.distribution())) {
    return sample_gaussian(model, n, seed);
  }
  if (std::holds_alternative<Student>(model.distribution())) {
    return sample_student(model, n, seed);
  }
  const auto& mix = std::get<MixedStudent>(model.distribution());
  Matrix x = mixed_student_columns(model.sqrt_sigma(), mix.nu_first, mix.nu_second, n, seed);
  x.colwise() += model.mean();
  return ObservationMatrix(std::move(x));
}

SymmetricMatrix random_wishart_sigma(Index p, std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("random_wishart_sigma: p must be >= 1");
  Rng rng(seed);
  const Matrix g = standard_normals(p, p, rng);
  Matrix w = Matrix::Zero(p, p);
  w.selfadjointView<Eigen::Lower>().rankUpdate(g);
  w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
  const double pd = static_cast<double>(p);
  // |W W^T| = sqrt(tr(W^4) / p); dividing W by its square root makes it 1.
  const Matrix w2 = w * w;
  const double norm_ww = std::sqrt(w2.squaredNorm() / pd);
  return SymmetricMatrix(w / std::sqrt(norm_ww));
}

double eighth_moment_constant(const PopulationModel& model) {
  const Matrix& s = model.sigma().data();
  const Matrix s2 = s * s;
  const double norm_sq = s2.squaredNorm() / static_cast<double>(model.dim());

  if (std::holds_alternative<Gaussian>(model.distribution())) {
    return 105.0 * norm_sq;
  }
  if (const auto* t = std::get_if<Student>(&model.distribution())) {
    const double nu = t->nu;
    if (!(nu > 8.0)) {
      throw PreconditionError("eighth-moment condition violated: moment is infinite for nu <= 8 (nu=" +
                              std::to_string(nu) + ")");
    }
    // y = sqrt(nu/U) z with z ~ N(0, (nu-2)/nu lambda) and
    // E[U^-4] = 1 / ((nu-8)(nu-6)(nu-4)(nu-2)).
    return 105.0 * std::pow(nu - 2.0, 3) / ((nu - 8.0) * (nu - 6.0) * (nu - 4.0)) * norm_sq;
  }
  throw std::invalid_argument("eighth_moment_constant: not defined for mixed t laws");
}

}  // namespace lwshrink
