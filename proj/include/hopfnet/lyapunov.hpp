#pragma once

#include <optional>
#include <string_view>

#include "hopfnet/spectral.hpp"

namespace hopfnet {

/// Relative half-width of the band around l1 = 0 reported as Degenerate.
inline constexpr double kDegeneracyTol = 1e-6;
/// weighted_sum at or below this is treated as an uncoupled network.
inline constexpr double kDegenerateSumTol = 1e-14;

/// Partial derivatives at the origin of the nonlinear parts f, g of
///   x' = y + f(x, y),  y' = -x + g(x, y).
struct HopfDerivs {
  double f_xx = 0, f_xy = 0, f_yy = 0, f_xxx = 0, f_xxy = 0, f_xyy = 0, f_yyy = 0;
  double g_xx = 0, g_xy = 0, g_yy = 0, g_xxx = 0, g_xxy = 0, g_xyy = 0, g_yyy = 0;
};

enum class Criticality { Supercritical, Subcritical, Degenerate };

std::string_view to_string(Criticality c);

struct BifurcationReport {
  double l1_subunit = 0.0;
  double l1_full = 0.0;
  double term_b = 0.0;  // (3/8) b n gamma_quartic
  double term_a = 0.0;  // a^2 n weighted_sum
  std::optional<double> gamma;
  std::optional<double> threshold;  // gamma * sqrt(-b), b < 0 only
  Criticality classification = Criticality::Degenerate;
  double degeneracy_band = 0.0;  // half-width in |a| units around the threshold
};

double l1_general(const HopfDerivs& d);

/// Subunit x' = y + a x^2 + b x^3, y' = -x run through l1_general: (3/8) b.
double l1_subunit(double b);

double l1_full(double a, double b, int n, const GammaSet& g);

/// sqrt((3/8) gamma_quartic / weighted_sum); independent of n.
double gamma_threshold(const GammaSet& g);

BifurcationReport classify_analytic(double a, double b, int n, const GammaSet& g);

/// Sign rule with the relative degeneracy band.
Criticality classify_sign(double l1, double band_value);

}  // namespace hopfnet
