#include "lwshrink/oracle.hpp"

#include "lwshrink/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lwshrink {

namespace {

void require_nu_above_four(double nu) {
  if (!(nu > 4.0)) {
    throw PreconditionError("infinite fourth moment regime: student_beta2 needs nu > 4, got " +
                            std::to_string(nu));
  }
}

void require_two_samples(Index n) {
  if (n < 2) throw PreconditionError("oracle scalars need n >= 2, got n=" + std::to_string(n));
}

}  // namespace

MuAlpha population_mu_alpha2(const SymmetricMatrix& sigma) {
  const double p = static_cast<double>(sigma.dim());
  const double mu = sigma.data().trace() / p;
  const double alpha2 = std::max(0.0, frob_norm_sq(sigma) - mu * mu);
  return {mu, alpha2};
}

OracleScalars gaussian_beta2(const SymmetricMatrix& sigma, Index n) {
  require_two_samples(n);
  const auto [mu, alpha2] = population_mu_alpha2(sigma);
  const double p = static_cast<double>(sigma.dim());
  const double nm1 = static_cast<double>(n) - 1.0;

  OracleScalars o;
  o.mu = mu;
  o.alpha2 = alpha2;
  o.beta2 = (p + 1.0) / nm1 * mu * mu + alpha2 / nm1;
  o.delta2 = o.alpha2 + o.beta2;
  // Decorrelated Gaussian coordinates y_i ~ N(0, lambda_i) are independent,
  // so V[(1/p) sum y_i^2] = (1/p^2) sum 2 lambda_i^2 = (2/p) |Sigma|^2.
  o.theta2 = 2.0 / p * frob_norm_sq(sigma);
  return o;
}

double student_beta2_closed_form(double mu, double alpha2, Index p, Index n, double nu) {
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  return (1.0 / nd) * (nu / (nu - 4.0) + 1.0 / (nd - 1.0)) * (alpha2 + (pd + 1.0) * mu * mu) -
         2.0 * pd / (nd * (nu - 4.0)) * mu * mu;
}

double student_beta2_expanded_form(double mu, double alpha2, Index p, Index n, double nu) {
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  return ((nu - 2.0) / ((nu - 4.0) * nd) + 1.0 / (nd * (nd - 1.0))) * pd * mu * mu +
         (1.0 / nd) * (nu / (nu - 4.0) + 1.0 / (nd - 1.0)) * (alpha2 + mu * mu);
}

OracleScalars student_beta2(const SymmetricMatrix& sigma, Index n, double nu) {
  require_nu_above_four(nu);
  require_two_samples(n);
  const auto [mu, alpha2] = population_mu_alpha2(sigma);
  const Index p = sigma.dim();
  const double closed = student_beta2_closed_form(mu, alpha2, p, n, nu);
  const double expanded = student_beta2_expanded_form(mu, alpha2, p, n, nu);
  const double scale = std::max(std::abs(closed), std::abs(expanded));
  if (std::abs(closed - expanded) > 1e-12 * scale) {
    throw std::logic_error("student_beta2: closed and expanded forms disagree");
  }

  OracleScalars o;
  o.mu = mu;
  o.alpha2 = alpha2;
  o.beta2 = closed;
  o.delta2 = o.alpha2 + o.beta2;
  return o;
}

std::optional<OracleScalars> analytic_oracle(const PopulationModel& model, Index n) {
  if (std::holds_alternative<Gaussian>(model.distribution())) {
    return gaussian_beta2(model.sigma(), n);
  }
  if (const auto* t = std::get_if<Student>(&model.distribution())) {
    return student_beta2(model.sigma(), n, t->nu);
  }
  return std::nullopt;
}

SymmetricMatrix oracle_sigma_star(const OracleScalars& scalars, const SymmetricMatrix& s) {
  if (!(scalars.delta2 > 0.0)) {
    throw PreconditionError("oracle_sigma_star: delta2 must be positive");
  }
  Matrix out = (scalars.alpha2 / scalars.delta2) * s.data();
  out.diagonal().array() += scalars.beta2 / scalars.delta2 * scalars.mu;
  return SymmetricMatrix(out);
}

double oracle_expected_loss(const OracleScalars& scalars) {
  if (!(scalars.delta2 > 0.0)) return 0.0;
  return scalars.alpha2 * scalars.beta2 / scalars.delta2;
}

OptimalProjection optimal_sigma_starstar(const SymmetricMatrix& sigma, const SymmetricMatrix& s) {
  const double mu = sigma.data().trace() / static_cast<double>(sigma.dim());
  const double m = s.data().trace() / static_cast<double>(s.dim());
  const double alpha_tilde2 = inner(s, sigma) - m * mu;
  const Matrix centered = s.data() - m * Matrix::Identity(s.dim(), s.dim());
  const double d2 = centered.squaredNorm() / static_cast<double>(s.dim());

  const Index p = sigma.dim();
  if (d2 == 0.0) {
    return OptimalProjection{0.0, mu * SymmetricMatrix::identity(p)};
  }
  const double slope = alpha_tilde2 / d2;
  Matrix out = slope * s.data();
  out.diagonal().array() += mu - slope * m;
  return OptimalProjection{alpha_tilde2, SymmetricMatrix(out)};
}

double loss(const SymmetricMatrix& a, const SymmetricMatrix& sigma) {
  if (a.dim() != sigma.dim()) {
    throw std::invalid_argument("loss: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                                std::to_string(sigma.dim()) + ")");
  }
  return (a.data() - sigma.data()).squaredNorm() / static_cast<double>(a.dim());
}

double expected_sample_loss(const OracleScalars& scalars, Index p, Index n) {
  if (!scalars.theta2) {
    throw std::invalid_argument("expected_sample_loss: theta2 is not available for this law");
  }
  return static_cast<double>(p) / static_cast<double>(n) * (scalars.mu * scalars.mu + *scalars.theta2);
}

double theta2_monte_carlo(const PopulationModel& model, Index draws, std::uint64_t seed) {
  if (draws < 2) throw std::invalid_argument("theta2_monte_carlo: need at least 2 draws");
  const ObservationMatrix x = sample(model, draws, seed);
  const double p = static_cast<double>(model.dim());
  const Vector radius =
      (x.data().colwise() - model.mean()).colwise().squaredNorm().transpose() / p;
  const double mean = radius.mean();
  return (radius.array() - mean).square().sum() / static_cast<double>(draws - 1);
}

}  // namespace lwshrink
