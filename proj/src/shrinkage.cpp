#include "lwshrink/shrinkage.hpp"

#include <algorithm>
#include <string>

namespace lwshrink {

namespace {

// Sum over columns of |scale * x_k x_k^T - S|_F^2, unnormalized.
double column_dispersion(const ObservationMatrix& demeaned, const SymmetricMatrix& s, double scale) {
  const Index p = demeaned.dim();
  if (s.dim() != p) {
    throw std::invalid_argument("bbar2: covariance is " + std::to_string(s.dim()) +
                                "-dimensional, data is " + std::to_string(p) + "-dimensional");
  }
  Matrix work(p, p);
  double total = 0.0;
  for (Index k = 0; k < demeaned.samples(); ++k) {
    const auto x = demeaned.data().col(k);
    work.noalias() = scale * x * x.transpose();
    work -= s.data();
    total += work.squaredNorm();
  }
  return total;
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::u: return "u";
    case Variant::r: return "r";
    case Variant::m: return "m";
    case Variant::s: return "s";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  if (text.starts_with("LW_")) text.remove_prefix(3);
  if (text == "u") return Variant::u;
  if (text == "r") return Variant::r;
  if (text == "m") return Variant::m;
  if (text == "s") return Variant::s;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "' (expected u, r, m or s)");
}

Index minimum_samples(Variant v) noexcept { return v == Variant::u ? 4 : 2; }

CoefficientSet coefficient_set(Index p, Index n) {
  if (p < 1) throw std::invalid_argument("coefficient_set: p must be >= 1");
  if (n < 4) {
    throw PreconditionError("variant u undefined for n < 4 (got n=" + std::to_string(n) + ")");
  }
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  const double quad = nd * nd - 3.0 * nd + 3.0;

  CoefficientSet c;
  c.p = p;
  c.n = n;
  c.gamma_n = nd * (nd - 1.0) / quad;
  c.lambda_n = nd * nd * (nd - 2.0) / ((nd - 1.0) * quad);
  c.c1 = c.lambda_n / (c.gamma_n * nd * nd);
  c.c0 = 1.0 / c.gamma_n - 1.0 / nd - c.c1;
  c.c2 = (pd + 1.0) * c.c1;

  c.q0 = (nd - 2.0) / (pd * (nd - 1.0));
  c.q1 = 1.0 / (pd * (nd - 1.0));
  c.q2 = (pd - 1.0) / (pd * (nd - 1.0));

  const double spread = (c.c1 - c.c2) / (1.0 - c.q1 - c.q2);
  c.c0f = c.c0 + spread * c.q0;
  c.c1f = c.c1 + spread * c.q1;
  c.c2f = c.c2 - spread * c.q2;
  return c;
}

double scalar_m(const SymmetricMatrix& s) {
  return s.data().trace() / static_cast<double>(s.dim());
}

double scalar_d2(const SymmetricMatrix& s, double m) {
  const Matrix centered = s.data() - m * Matrix::Identity(s.dim(), s.dim());
  return std::max(0.0, centered.squaredNorm() / static_cast<double>(s.dim()));
}

double scalar_bbar2(const ObservationMatrix& demeaned, const SymmetricMatrix& s) {
  const double n = static_cast<double>(demeaned.samples());
  if (demeaned.samples() < 2) throw PreconditionError("bbar2: need n >= 2");
  const double total = column_dispersion(demeaned, s, n / (n - 1.0));
  return total / (n * n * static_cast<double>(s.dim()));
}

double scalar_bbar2_recommended(const ObservationMatrix& demeaned, const SymmetricMatrix& s) {
  const double n = static_cast<double>(demeaned.samples());
  if (demeaned.samples() < 2) throw PreconditionError("bbar2: need n >= 2");
  const double total = column_dispersion(demeaned, s, 1.0);
  return total / ((n - 1.0) * (n - 1.0) * static_cast<double>(s.dim()));
}

BetaEstimate scalar_b2_variant_u(double bbar2, double d2, double m, const CoefficientSet& coeffs) {
  BetaEstimate b;
  b.raw = (bbar2 - coeffs.c1f * d2 - coeffs.c2f * m * m) / coeffs.c0f;
  b.clamped = std::min(std::max(b.raw, 0.0), d2);
  return b;
}

ShrinkageResult estimate(const ObservationMatrix& x, Variant variant) {
  const Index n = x.samples();
  if (n < minimum_samples(variant)) {
    throw PreconditionError("variant " + std::string(to_string(variant)) + " needs n >= " +
                            std::to_string(minimum_samples(variant)) + " samples, got n=" +
                            std::to_string(n));
  }
  const ObservationMatrix demeaned = demean(x);
  const SymmetricMatrix s = covariance_of_demeaned(demeaned);
  const double nd = static_cast<double>(n);

  ShrinkageScalars sc;
  sc.variant = variant;
  sc.m = scalar_m(s);
  sc.d2 = scalar_d2(s, sc.m);

  switch (variant) {
    case Variant::u: {
      sc.bbar2 = scalar_bbar2(demeaned, s);
      const BetaEstimate b = scalar_b2_variant_u(sc.bbar2, sc.d2, sc.m, coefficient_set(x.dim(), n));
      sc.b2_raw = b.raw;
      sc.b2 = b.clamped;
      sc.a2 = sc.d2 - sc.b2;
      break;
    }
    case Variant::r:
      sc.bbar2 = scalar_bbar2_recommended(demeaned, s);
      sc.b2_raw = sc.bbar2;
      sc.b2 = std::min(std::max(sc.bbar2, 0.0), sc.d2);
      sc.a2 = sc.d2 - sc.b2;
      break;
    case Variant::m:
      sc.bbar2 = scalar_bbar2(demeaned, s);
      sc.b2_raw = sc.bbar2;
      sc.b2 = std::min(std::max(sc.bbar2, 0.0), sc.d2);
      sc.a2 = sc.d2 - sc.b2;
      break;
    case Variant::s:
      sc.bbar2 = scalar_bbar2(demeaned, s);
      sc.m *= (nd - 1.0) / nd;
      sc.b2_raw = sc.bbar2;
      sc.b2 = std::min(std::max(sc.bbar2, 0.0), sc.d2);
      sc.a2 = (nd - 1.0) / nd * (sc.d2 - sc.b2);
      break;
  }

  const Index p = x.dim();
  if (sc.d2 == 0.0) {
    return ShrinkageResult{sc, sc.m * SymmetricMatrix::identity(p), 1.0};
  }
  const double target_weight = sc.b2 / sc.d2;
  const double sample_weight = sc.a2 / sc.d2;
  Matrix out = sample_weight * s.data();
  out.diagonal().array() += target_weight * sc.m;
  return ShrinkageResult{sc, SymmetricMatrix(out), target_weight};
}

}  // namespace lwshrink
