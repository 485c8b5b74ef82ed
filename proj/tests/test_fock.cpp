#include "doctest.h"

#include <cmath>
#include <complex>

#include <unsupported/Eigen/MatrixFunctions>

#include "thermocap/channel.hpp"
#include "thermocap/errors.hpp"
#include "thermocap/fock.hpp"

using namespace thermocap;
using cd = std::complex<double>;

namespace {

double mean_photons(const FockDensity& f) {
  double m = 0.0;
  for (int n = 0; n < f.d; ++n) m += n * f.rho(n, n).real();
  return m;
}

double trace_norm(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return es.eigenvalues().cwiseAbs().sum();
}

// Partial trace over the second (reference) factor of a d^2 x d^2 matrix.
Eigen::MatrixXcd trace_reference(const Eigen::MatrixXcd& rho, int d) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int r = 0; r < d; ++r) out(a, b) += rho(a * d + r, b * d + r);
  return out;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("displacement matrix") {
  const int d = 40;
  CHECK((displacement_matrix(0.0, d) - Eigen::MatrixXcd::Identity(d, d)).norm() < 1e-14);
  const cd alpha(0.7, 0.4);
  const Eigen::MatrixXcd dm = displacement_matrix(alpha, d);
  CHECK(std::abs(dm(0, 0) - std::exp(-0.5 * std::norm(alpha))) < 1e-14);

  // Against the exponential of the generator in a much larger space.
  const int big = 160;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(big, big);
  for (int n = 1; n < big; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXcd gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const Eigen::MatrixXcd exact = gen.exp();
  CHECK((dm - exact.topLeftCorner(d, d)).cwiseAbs().maxCoeff() < 1e-10);

  // D(alpha) D(-alpha) = I on the low-number block, where no amplitude
  // reaches the truncation edge.  Rows near d lose weight past the edge.
  for (const cd al : {cd(1.0, 0.0), cd(0.6, -0.8), cd(0.2, 0.3)}) {
    const Eigen::MatrixXcd prod = displacement_matrix(al, d) * displacement_matrix(-al, d);
    const Eigen::MatrixXcd low = prod.topLeftCorner(d / 2, d / 2);
    CHECK((low - Eigen::MatrixXcd::Identity(d / 2, d / 2)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("thermal states in the number basis") {
  const auto vac = thermal_fock(0.0, 10);
  CHECK(std::abs(vac.rho(0, 0) - 1.0) < 1e-15);
  CHECK(vac.trace() == doctest::Approx(1.0));

  const auto t = thermal_fock(1.0, 60);
  CHECK(t.truncation_deficit == doctest::Approx(std::pow(0.5, 60)));
  CHECK(mean_photons(t) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(t) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(von_neumann_entropy(number_state(3, 10)) == doctest::Approx(0.0));

  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  CHECK(von_neumann_entropy(diagonal_density(half, 2, 1)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(thermal_fock(-1.0, 10), DomainError);
}

TEST_CASE("channel calibration and composition") {
  const int d = 40;
  const auto vac = apply_thermal_channel(number_state(0, d), 0.5);
  CHECK(std::abs(mean_photons(vac) - 0.5) < 1e-4);
  CHECK(std::abs(mean_photons(apply_thermal_channel(number_state(0, d), 0.1)) - 0.1) < 1e-4);

  const auto th = apply_thermal_channel(thermal_fock(1.0, d), 0.1);
  CHECK(std::abs(mean_photons(th) - 1.1) < 1e-4);
  // Output is thermal with mean 1.1, as in the CM picture.
  const auto ref = thermal_fock(1.1, d);
  CHECK((th.rho - ref.rho).topLeftCorner(20, 20).cwiseAbs().maxCoeff() < 1e-6);

  const int dc = 30;
  const auto in = thermal_fock(0.4, dc);
  const auto two_step = apply_thermal_channel(apply_thermal_channel(in, 0.05), 0.1);
  const auto one_step = apply_thermal_channel(in, 0.15);
  CHECK(trace_norm(two_step.rho - one_step.rho) < 1e-6);

  const auto same = apply_thermal_channel(in, 0.0);
  CHECK((same.rho - in.rho).norm() == 0.0);
  const auto tiny = apply_thermal_channel(in, 1e-7);
  CHECK(trace_norm(tiny.rho - in.rho) < 1e-5);
}

TEST_CASE("joint state after the channel") {
  const int d = 24;
  const auto in = thermal_fock(0.8, d);
  const auto pure = joint_after_channel_fock(in, 0.0);
  CHECK(von_neumann_entropy(pure) < 1e-6);

  const double noise = 0.1;
  const auto joint = joint_after_channel_fock(in, noise);
  const auto out = apply_thermal_channel(in, noise);
  CHECK((trace_reference(joint.rho, d) - out.rho).cwiseAbs().maxCoeff() < 1e-10);

  // The environment Gram matrix carries the same spectrum.
  CHECK(exchange_entropy_fock(in, noise) ==
        doctest::Approx(von_neumann_entropy(joint)).epsilon(1e-9));

  const double gauss = gaussian_entropy(joint_after_channel(thermal_cm(0.8, 1), ThermalChannel(noise)));
  CHECK(std::abs(von_neumann_entropy(joint) - gauss) < 1e-3);
}

TEST_CASE("coherent information in the number basis") {
  const int d = 30;
  const auto in = thermal_fock(1.0, d);
  CHECK(coherent_information_fock(in, 0.0) == doctest::Approx(von_neumann_entropy(in)).epsilon(1e-9));
  const double thermal = coherent_information_fock(in, 0.1);
  CHECK(std::abs(thermal - coherent_information(thermal_cm(1.0, 1), ThermalChannel(0.1))) < 1e-3);
  // A number state with the same mean energy does worse.
  const double fock1 = coherent_information_fock(number_state(1, d), 0.1);
  CHECK(std::isfinite(fock1));
  CHECK(fock1 < thermal);
}

TEST_CASE("perturbed thermal states") {
  const double ns = 1.5, eps = 1e-3;
  const int d = 80;
  PerturbationSpec one{Eigen::MatrixXd::Constant(1, 1, 1.0), eps};
  const auto p = perturbed_state(one, ns, d);
  for (int k : {0, 1, 5, 20}) {
    const double lam = std::pow(ns, k) / std::pow(ns + 1.0, k + 1);
    CHECK(p.rho(k, k).real() == doctest::Approx(lam + eps * phi_k(ns, k)).epsilon(1e-13));
  }
  CHECK(p.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean_photons(p) == doctest::Approx(ns).epsilon(1e-10));

  PerturbationSpec pair{Eigen::MatrixXd::Zero(2, 2), eps};
  pair.c(0, 1) = pair.c(1, 0) = 1.0;
  const auto q = perturbed_state(pair, ns, 20);
  CHECK(q.modes == 2);
  CHECK(q.rho.rows() == 400);
  q.validate();

  PerturbationSpec big{Eigen::MatrixXd::Constant(1, 1, 1.0), 50.0};
  CHECK_THROWS_AS(perturbed_state(big, ns, d), EpsilonTooLarge);
}

TEST_CASE("pair-raising identity") {
  const auto r1 = check_pair_identity(1, 1.0, 0.1, 30);
  CHECK(r1.residual < 1e-6);
  CHECK(r1.lhs_norm > 0.1);
  const auto r2 = check_pair_identity(2, 1.0, 0.1, 30);
  CHECK(r2.residual < 1e-5);
  CHECK(check_pair_identity(1, 1.0, 0.0, 30).residual < 1e-8);
  CHECK(check_pair_identity(2, 1.0, 0.0, 30).residual < 1e-8);
  // With the number operator on the channel mode the identity fails.
  CHECK(check_pair_identity(1, 1.0, 0.1, 30, PairIdentityPlacement::channel).residual > 1e-2);
  CHECK_THROWS_AS(check_pair_identity(3, 1.0, 0.1, 30), InvalidInput);
}

TEST_CASE("odd perturbations have no first-order effect") {
  // Off-diagonal perturbation changing the photon number by one, the
  // number-basis image of a cubic characteristic-function term.
  const int d = 24;
  const double ns = 1.0, noise = 0.1, eps = 0.05;
  const auto base = thermal_fock(ns, d);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) {
    const double lam = base.rho(k, k).real();
    x(k + 1, k) = x(k, k + 1) = 0.5 * std::sqrt(k + 1.0) * lam;
  }
  auto ci = [&](double e) {
    FockDensity f = base;
    f.rho = base.rho + e * x;
    return coherent_information_fock(f, noise);
  };
  const double c0 = ci(0.0), cp = ci(eps), cm = ci(-eps);
  const double slope = (cp - cm) / (2.0 * eps);
  const double curvature = (cp + cm - 2.0 * c0) / (eps * eps);
  CHECK(std::abs(slope) < 1e-8);
  CHECK(std::abs(curvature) > 1e-3);
}

TEST_CASE("validation and truncation bounds") {
  FockDensity bad;
  bad.d = 2;
  bad.rho = Eigen::MatrixXcd::Zero(2, 2);
  bad.rho(0, 1) = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  CHECK_THROWS_AS(displacement_matrix(0.1, 1), InvalidInput);

  // A coarse quadrature with a tight trace limit is rejected.
  ChannelOptions strict;
  strict.quadrature.radial = 4;
  strict.quadrature.angular = 4;
  strict.max_trace_error = 1e-14;
  CHECK_THROWS_AS(apply_thermal_channel(thermal_fock(3.0, 12), 0.3, strict), QuadratureError);
  QuadratureSpec q;
  q.radial = 2;
  CHECK_THROWS_AS(q.validate(), InvalidInput);
}

}
