#pragma once

#include "lwshrink/linalg.hpp"
#include "lwshrink/population.hpp"

#include <cstdint>
#include <optional>

namespace lwshrink {

/// Population scalars of a (sigma, law, n) triple.
///
/// mu is the mean eigenvalue, alpha2 = |Sigma - mu I|^2,
/// beta2 = E|S - Sigma|^2 and delta2 = alpha2 + beta2. theta2 is the
/// variance of (1/p) sum_i y_i^2 for the decorrelated coordinates y, known
/// in closed form only for Gaussian data.
struct OracleScalars {
  double mu = 0.0;
  double alpha2 = 0.0;
  double beta2 = 0.0;
  double delta2 = 0.0;
  std::optional<double> theta2;
};

struct MuAlpha {
  double mu = 0.0;
  double alpha2 = 0.0;
};

MuAlpha population_mu_alpha2(const SymmetricMatrix& sigma);

/// Exact scalars for Gaussian samples:
/// beta2 = ((p+1) mu^2 + alpha2) / (n-1), theta2 = (2/p)|Sigma|^2.
OracleScalars gaussian_beta2(const SymmetricMatrix& sigma, Index n);

/// beta2 for t_nu samples with covariance sigma, in the two algebraically
/// equivalent forms. Exposed separately so the equivalence can be checked.
double student_beta2_closed_form(double mu, double alpha2, Index p, Index n, double nu);
double student_beta2_expanded_form(double mu, double alpha2, Index p, Index n, double nu);

/// Exact scalars for t_nu samples. Both forms are evaluated and required to
/// agree to 1e-12 relative. theta2 is left empty. Throws PreconditionError
/// for nu <= 4.
OracleScalars student_beta2(const SymmetricMatrix& sigma, Index n, double nu);

/// Closed-form scalars for the model's law, or nullopt when none is
/// available (mixed t blocks).
std::optional<OracleScalars> analytic_oracle(const PopulationModel& model, Index n);

/// Best combination rho1 I + rho2 S with non-random coefficients:
/// (beta2/delta2) mu I + (alpha2/delta2) S. Throws when delta2 == 0.
SymmetricMatrix oracle_sigma_star(const OracleScalars& scalars, const SymmetricMatrix& s);

/// alpha2 beta2 / delta2, the expected loss of oracle_sigma_star.
double oracle_expected_loss(const OracleScalars& scalars);

struct OptimalProjection {
  double alpha_tilde2 = 0.0;  ///< <S, Sigma> - m mu
  SymmetricMatrix sigma_starstar;
};

/// Per-sample projection of Sigma onto span{I, S}:
/// mu I + (alpha_tilde2 / d2)(S - m I). Falls back to mu I when d2 == 0.
OptimalProjection optimal_sigma_starstar(const SymmetricMatrix& sigma, const SymmetricMatrix& s);

/// |A - Sigma|^2 in the normalized Frobenius norm.
double loss(const SymmetricMatrix& a, const SymmetricMatrix& sigma);

/// (p/n)(mu^2 + theta2), the large-sample approximation of E|S - Sigma|^2.
/// Throws std::invalid_argument when theta2 is absent.
double expected_sample_loss(const OracleScalars& scalars, Index p, Index n);

/// Monte-Carlo estimate of theta2 = V[|x - mean|^2 / p] from `draws`
/// independent samples of the model. Works for every law, which makes it
/// the only theta2 source for t populations.
double theta2_monte_carlo(const PopulationModel& model, Index draws, std::uint64_t seed);

}  // namespace lwshrink
