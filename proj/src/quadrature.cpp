#include "thermocap/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "thermocap/errors.hpp"

namespace thermocap {

void QuadratureSpec::validate() const {
  if (radial < 4 || angular < 4) {
    throw InvalidInput("quadrature node counts must be >= 4");
  }
  if (!(cutoff >= 5.0) || !std::isfinite(cutoff)) {
    throw InvalidInput("quadrature radial cutoff must be >= 5");
  }
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw InvalidInput("Gauss-Legendre needs n >= 1");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Golub-Welsch eigen-solver failed");
  }
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    w[i] = 2.0 * v0 * v0;
  }
}

QuadratureRule thermal_noise_quadrature(double noise,
                                        const QuadratureSpec& spec) {
  spec.validate();
  if (!(noise > 0.0)) throw DomainError("quadrature needs N > 0");
  std::vector<double> gx, gw;
  gauss_legendre(spec.radial, gx, gw);

  // (1 / pi N) e^{-r^2/N} r dr dtheta = [(2r/N) e^{-r^2/N} dr] [dtheta / 2 pi]
  const double rmax = spec.cutoff * std::sqrt(noise);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(spec.radial) * spec.angular);
  double mass = 0.0;
  for (int i = 0; i < spec.radial; ++i) {
    const double r = 0.5 * rmax * (gx[i] + 1.0);
    const double wr =
        0.5 * rmax * gw[i] * (2.0 * r / noise) * std::exp(-r * r / noise);
    for (int j = 0; j < spec.angular; ++j) {
      const double th = 2.0 * std::numbers::pi * j / spec.angular;
      const double w = wr / spec.angular;
      rule.nodes.push_back({std::polar(r, th), w});
      mass += w;
    }
  }
  rule.raw_mass = mass;
  for (auto& node : rule.nodes) node.weight /= mass;
  return rule;
}

}  // namespace thermocap
