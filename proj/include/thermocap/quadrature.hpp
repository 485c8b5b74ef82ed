#pragma once

#include <complex>
#include <vector>

namespace thermocap {

/// Discretization of the Gaussian displacement average over the plane:
/// Gauss-Legendre in radius on [0, cutoff sqrt(N)], trapezoid in angle.
struct QuadratureSpec {
  int radial = 24;
  int angular = 32;
  double cutoff = 6.0;  ///< radial cutoff in units of sqrt(N)

  /// Throws InvalidInput unless both counts are >= 4 and cutoff >= 5.
  void validate() const;
};

struct QuadratureNode {
  std::complex<double> alpha;
  double weight;
};

struct QuadratureRule {
  std::vector<QuadratureNode> nodes;  ///< weights normalized to sum 1
  double raw_mass = 1.0;              ///< sum of weights before normalizing
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Nodes for the density (1 / pi N) exp(-|alpha|^2 / N) d^2 alpha.
QuadratureRule thermal_noise_quadrature(double noise,
                                        const QuadratureSpec& spec = {});

}  // namespace thermocap
