#pragma once

#include "lwshrink/linalg.hpp"
#include "lwshrink/population.hpp"

#include <cstdint>
#include <random>

namespace lwshrink {

using Rng = std::mt19937_64;

/// splitmix64 finalizer applied to (base, stream); used to give every
/// Monte-Carlo iteration its own generator regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Columns iid N(mean, Sigma), generated as mean + Sigma^{1/2} z.
ObservationMatrix sample_gaussian(const PopulationModel& model, Index n, std::uint64_t seed);

/// Columns iid multivariate t_nu with covariance Sigma: each column is
/// mean + sqrt((nu - 2) / U_k) Sigma^{1/2} z_k with U_k ~ chi^2_nu, i.e. a
/// Gaussian with covariance ((nu-2)/nu) Sigma scaled by sqrt(nu / U_k).
ObservationMatrix sample_student(const PopulationModel& model, Index n, std::uint64_t seed);

/// Two independent unit-covariance t blocks (coordinates [0, ceil(p/2))
/// with nu_first, the rest with nu_second) mapped through Sigma^{1/2}.
/// For block-diagonal Sigma each block is scaled by its own diagonal block.
/// Zero mean.
ObservationMatrix sample_mixed_student(const SymmetricMatrix& sigma, double nu_first,
                                       double nu_second, Index n, std::uint64_t seed);

/// Dispatches on the model's law and adds the model's mean.
ObservationMatrix sample(const PopulationModel& model, Index n, std::uint64_t seed);

/// Wishart(I_p, p) draw W = G G^T normalised so that |W W^T| = 1.
SymmetricMatrix random_wishart_sigma(Index p, std::uint64_t seed);

/// Average eighth moment (1/p) sum_i E[y_i^8] of the decorrelated
/// coordinates: 105 |Sigma Sigma^T|^2 for Gaussians and
/// 105 (nu-2)^3 / ((nu-8)(nu-6)(nu-4)) |Sigma Sigma^T|^2 for t_nu.
/// Throws PreconditionError for t with nu <= 8 and std::invalid_argument
/// for mixed laws.
double eighth_moment_constant(const PopulationModel& model);

}  // namespace lwshrink
