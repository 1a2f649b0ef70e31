#include "hopfnet/lyapunov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hopfnet/error.hpp"

namespace hopfnet {

std::string_view to_string(Criticality c) {
  switch (c) {
    case Criticality::Supercritical: return "Supercritical";
    case Criticality::Subcritical: return "Subcritical";
    case Criticality::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

double l1_general(const HopfDerivs& d) {
  const double cubic = d.f_xxx + d.f_xyy + d.g_xxy + d.g_yyy;
  const double quadratic = d.f_xy * (d.f_xx + d.f_yy) - d.g_xy * (d.g_xx + d.g_yy) -
                           d.f_xx * d.g_xx + d.f_yy * d.g_yy;
  return cubic / 16.0 + quadratic / 16.0;
}

double l1_subunit(double b) {
  // f = a x^2 + b x^3; the a-dependence drops out because f_xy = 0.
  HopfDerivs d;
  d.f_xxx = 6.0 * b;
  return l1_general(d);
}

namespace {

double term_b(double b, int n, const GammaSet& g) { return 0.375 * b * n * g.gamma_quartic; }
double term_a(double a, int n, const GammaSet& g) { return a * a * n * g.weighted_sum; }

}  // namespace

double l1_full(double a, double b, int n, const GammaSet& g) {
  return term_b(b, n, g) + term_a(a, n, g);
}

double gamma_threshold(const GammaSet& g) {
  if (!(g.weighted_sum > kDegenerateSumTol))
    throw Error(ErrorCode::DegenerateDenominator,
                "weighted_sum = " + std::to_string(g.weighted_sum) +
                    "; the network is effectively uncoupled");
  return std::sqrt(0.375 * g.gamma_quartic / g.weighted_sum);
}

Criticality classify_sign(double l1, double band_value) {
  if (l1 > band_value) return Criticality::Subcritical;
  if (l1 < -band_value) return Criticality::Supercritical;
  return Criticality::Degenerate;
}

BifurcationReport classify_analytic(double a, double b, int n, const GammaSet& g) {
  if (n < 1) throw Error(ErrorCode::InvalidSize, "n must be positive");

  BifurcationReport r;
  r.l1_subunit = l1_subunit(b);
  r.term_b = term_b(b, n, g);
  r.term_a = term_a(a, n, g);
  r.l1_full = r.term_b + r.term_a;
  const double band_value = kDegeneracyTol * (std::abs(r.term_b) + std::abs(r.term_a));

  if (!(g.weighted_sum > kDegenerateSumTol)) {
    // Uncoupled limit: only the subunit term survives.
    r.classification = classify_sign(r.l1_subunit, kDegeneracyTol * std::abs(r.l1_subunit));
    return r;
  }

  r.gamma = gamma_threshold(g);
  r.classification = classify_sign(r.l1_full, band_value);

  if (b < 0.0) {
    r.threshold = *r.gamma * std::sqrt(-b);
    // |l1| <= tol (|tb| + ta) with ta = |tb| (a / threshold)^2 gives the band in |a|.
    const double lo = std::sqrt((1.0 - kDegeneracyTol) / (1.0 + kDegeneracyTol));
    const double hi = std::sqrt((1.0 + kDegeneracyTol) / (1.0 - kDegeneracyTol));
    r.degeneracy_band = 0.5 * (hi - lo) * *r.threshold;

    if (r.classification != Criticality::Degenerate) {
      const double margin = std::abs(a) - *r.threshold;
      const bool sub_by_threshold = margin > 0.0;
      if (sub_by_threshold != (r.classification == Criticality::Subcritical))
        throw std::logic_error("l1_full sign disagrees with the |a| > gamma sqrt(-b) rule");
    }
  }
  return r;
}

}  // namespace hopfnet
