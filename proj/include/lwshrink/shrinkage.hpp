#pragma once

#include "lwshrink/linalg.hpp"

#include <string_view>

namespace lwshrink {

/// The four translation-invariant linear shrinkage estimators.
///
///   u  unbiased beta^2 estimate built from bbar^2, d^2 and m^2
///   r  Ledoit-Wolf recommended form, 1/(n-1)^2 normalisation
///   m  "natural" form, thresholded bbar^2
///   s  scikit-learn 1.2.2 form, (n-1)/n times variant m
enum class Variant { u, r, m, s };

std::string_view to_string(Variant v) noexcept;

/// Parses "u", "r", "m", "s" (also accepts an "LW_" prefix).
Variant parse_variant(std::string_view text);

/// Smallest sample count the variant is defined for: 4 for u, 2 otherwise.
Index minimum_samples(Variant v) noexcept;

/// Deterministic (p, n)-dependent constants relating E[bbar^2] and V[m]
/// to the population scalars.
struct CoefficientSet {
  Index p = 0;
  Index n = 0;
  double gamma_n = 0.0;
  double lambda_n = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double c0f = 0.0;
  double c1f = 0.0;
  double c2f = 0.0;
};

/// Throws PreconditionError for n < 4 and std::invalid_argument for p < 1.
CoefficientSet coefficient_set(Index p, Index n);

struct ShrinkageScalars {
  Variant variant = Variant::u;
  double m = 0.0;       ///< the variant's target scale m_v
  double d2 = 0.0;
  double bbar2 = 0.0;   ///< bbar^2 for u, m, s; the 1/(n-1)^2 form for r
  double b2_raw = 0.0;  ///< pre-threshold beta^2 estimate, may be negative
  double b2 = 0.0;      ///< thresholded into [0, d2]
  double a2 = 0.0;
};

struct ShrinkageResult {
  ShrinkageScalars scalars;
  SymmetricMatrix estimate;
  double shrinkage_intensity = 0.0;  ///< b2 / d2, or 1 when d2 == 0
};

/// tr(S) / p.
double scalar_m(const SymmetricMatrix& s);

/// |S - m I|^2, clamped at 0.
double scalar_d2(const SymmetricMatrix& s, double m);

/// (1/n^2) sum_k |(n/(n-1)) x_k x_k^T - S|^2 over the columns of the
/// demeaned data.
double scalar_bbar2(const ObservationMatrix& demeaned, const SymmetricMatrix& s);

/// (1/(n-1)^2) sum_k |x_k x_k^T - S|^2, the recommended-form dispersion.
double scalar_bbar2_recommended(const ObservationMatrix& demeaned, const SymmetricMatrix& s);

struct BetaEstimate {
  double raw = 0.0;
  double clamped = 0.0;
};

/// Unbiased beta^2 estimate (bbar2 - c1f d2 - c2f m^2) / c0f and its
/// threshold min(max(raw, 0), d2).
BetaEstimate scalar_b2_variant_u(double bbar2, double d2, double m, const CoefficientSet& coeffs);

/// Shrinks the sample covariance of `x` towards m_v I.
///
/// Throws PreconditionError when n is below minimum_samples(variant).
/// When d2 == 0 the estimate is m_v I and the intensity is reported as 1.
ShrinkageResult estimate(const ObservationMatrix& x, Variant variant);

}  // namespace lwshrink
