#include "doctest.h"
#include "helpers.hpp"

#include <chrono>
#include <numbers>

#include "thermocap/channel.hpp"
#include "thermocap/errors.hpp"

using namespace thermocap;

TEST_SUITE("channel") {

TEST_CASE("thermal channel action") {
  const CovMatrix out = apply_channel(vacuum_cm(1), ThermalChannel(0.5));
  CHECK(out.gamma().isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
  std::mt19937_64 rng(1);
  const CovMatrix cm = testutil::random_cm(2, rng);
  CHECK(apply_channel(cm, ThermalChannel(0.0)).gamma().isApprox(cm.gamma()));
  CHECK(apply_channel(thermal_cm(1.0, 1), ThermalChannel(0.1))
            .gamma()
            .isApprox(3.2 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(ThermalChannel(-0.1), DomainError);
}

TEST_CASE("general Gaussian channel and complete positivity") {
  const int n = 1;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  // Pure loss with transmissivity eta needs noise (1 - eta) I.
  const double eta = 0.6;
  const GaussianChannel loss(std::sqrt(eta) * id, (1.0 - eta) * id);
  const CovMatrix out = apply_channel(thermal_cm(1.0, 1), loss);
  CHECK(out.gamma()(0, 0) == doctest::Approx(eta * 3.0 + 1.0 - eta));
  CHECK_THROWS_AS(GaussianChannel(std::sqrt(eta) * id, 0.1 * id), DomainError);
  CHECK_THROWS_AS(GaussianChannel(id, Eigen::MatrixXd::Identity(3, 3)), InvalidInput);

  // The thermal channel and its Gaussian form give the same joint state.
  const CovMatrix cm = thermal_cm(0.8, 1);
  const auto a = joint_after_channel(cm, ThermalChannel(0.2));
  const auto b = joint_after_channel(cm, ThermalChannel(0.2).as_gaussian(1));
  CHECK((a.gamma() - b.gamma()).norm() < 1e-12);
}

TEST_CASE("joint state after the channel") {
  const CovMatrix cm = thermal_cm(1.3, 1);
  const auto p = joint_after_channel(cm, ThermalChannel(0.0));
  CHECK((p.gamma() - purify(cm).gamma()).norm() < 1e-12);
  CHECK(gaussian_entropy(p) == doctest::Approx(0.0).epsilon(1e-7));

  // Vacuum input: joint entropy is that of the output thermal state.
  const auto v = joint_after_channel(vacuum_cm(1), ThermalChannel(0.5));
  CHECK(gaussian_entropy(v) == doctest::Approx(g_entropy(0.5)).epsilon(1e-10));

  for (double ns : {0.1, 1.0, 7.0}) {
    for (double noise : {0.05, 0.1, 0.3}) {
      const auto sd = squeeze_diagonalization(ns, noise);
      const auto nu = symplectic_eigenvalues(
          joint_after_channel(thermal_cm(ns, 1), ThermalChannel(noise)));
      REQUIRE(nu.size() == 2);
      CHECK(nu[0] == doctest::Approx(sd.nu_A).epsilon(1e-10));
      CHECK(nu[1] == doctest::Approx(sd.nu_B).epsilon(1e-10));
    }
  }
}

TEST_CASE("squeeze diagonalization") {
  const auto z = squeeze_diagonalization(0.0, 0.3);
  CHECK(z.r == 0.0);
  CHECK(z.nu_A == doctest::Approx(1.6));
  CHECK(z.nu_B == doctest::Approx(1.0));
  const auto d = squeeze_diagonalization(0.0, 0.0);
  CHECK(d.nu_A == 1.0);
  CHECK(d.nu_B == 1.0);

  for (double ns : {0.01, 0.5, 3.0, 100.0}) {
    for (double noise : {0.0, 0.05, 0.2, 1.0}) {
      CHECK(tanh2r_energy_form(ns, noise) ==
            doctest::Approx(tanh2r_photon_form(ns, noise)).epsilon(1e-13));
      const auto sd = squeeze_diagonalization(ns, noise);
      if (noise > 0.0) {
        CHECK(sd.v_A > 0.0);
        CHECK(sd.v_A < 1.0);
        CHECK(sd.v_B > 0.0);
        CHECK(sd.v_B < 1.0);
      }
    }
  }

  // The squeezer maps the joint CM to a diagonal one.
  const double ns = 1.4, noise = 0.15;
  const auto sd = squeeze_diagonalization(ns, noise);
  const Eigen::Matrix4d s = squeeze_matrix_single(sd.r);
  const Eigen::MatrixXd g =
      joint_after_channel(thermal_cm(ns, 1), ThermalChannel(noise)).gamma();
  const Eigen::MatrixXd dg = s * g * s.transpose();
  Eigen::MatrixXd off = dg;
  off.diagonal().setZero();
  CHECK(off.norm() < 1e-10 * dg.norm());

  const auto one = squeeze_diagonalization(1.0, 0.1);
  const double exchange_cm = gaussian_entropy(
      joint_after_channel(thermal_cm(1.0, 1), ThermalChannel(0.1)));
  CHECK(exchange_entropy(one) == doctest::Approx(exchange_cm).epsilon(1e-10));
}

TEST_CASE("coherent and mutual information") {
  for (double ns : {0.2, 1.0, 5.0}) {
    CHECK(coherent_information(thermal_cm(ns, 1), ThermalChannel(0.0)) ==
          doctest::Approx(g_entropy(ns)).epsilon(1e-12));
    CHECK(mutual_information(thermal_cm(ns, 1), ThermalChannel(0.0)) ==
          doctest::Approx(2.0 * g_entropy(ns)).epsilon(1e-12));
  }
  CHECK(mutual_information(vacuum_cm(1), ThermalChannel(0.2)) ==
        doctest::Approx(0.0).epsilon(1e-9));
  const CovMatrix cm = thermal_cm(1.0, 1);
  CHECK(mutual_information(cm, ThermalChannel(0.1)) >=
        coherent_information(cm, ThermalChannel(0.1)));

  // Exchange entropy through the squeeze data equals the joint-CM route.
  for (double ns : {0.3, 2.0, 40.0}) {
    for (double noise : {0.05, 0.1, 0.175}) {
      const double via_joint = gaussian_entropy(
          joint_after_channel(thermal_cm(ns, 1), ThermalChannel(noise)));
      CHECK(exchange_entropy(squeeze_diagonalization(ns, noise)) ==
            doctest::Approx(via_joint).epsilon(1e-10));
    }
  }
}

TEST_CASE("coherent information is increasing in N_s and approaches the bound") {
  const auto t0 = std::chrono::steady_clock::now();
  for (double noise : {0.05, 0.1, 0.175}) {
    double prev = -1e300;
    for (double ns = 0.1; ns <= 100.0; ns *= 1.25) {
      const double ic = coherent_information(thermal_cm(ns, 1), ThermalChannel(noise));
      CHECK(ic > prev);
      prev = ic;
    }
    const double ic = coherent_information(thermal_cm(1e4, 1), ThermalChannel(noise));
    const double limit = -std::log2(std::numbers::e * noise);
    CHECK(std::abs(ic - limit) < 1e-3);
  }
  CHECK(testutil::elapsed_since(t0) < 1.0);
}

TEST_CASE("directional derivative") {
  const ThermalChannel ch(0.1);
  const double ns = 1.5;
  CHECK(directional_derivative(thermal_cm(ns, 1), ns, ch) == doctest::Approx(0.0));

  // Squeezed thermal probe at equal trace.
  const double a = 1.8;
  Eigen::MatrixXd g(2, 2);
  g << a, 0, 0, 1.0 / a;
  g *= 2.0 * ns + 1.0;
  g *= 2.0 * (2.0 * ns + 1.0) / g.trace();
  const double d = directional_derivative(CovMatrix(g), ns, ch);
  CHECK(d < 0.0);

  CHECK_THROWS_AS(directional_derivative(thermal_cm(ns + 0.1, 1), ns, ch),
                  ConstraintError);

  // Two-mode product of unequal thermal states at the same total energy.
  const double ns_probe = 2.0;
  Eigen::MatrixXd gp = Eigen::MatrixXd::Identity(4, 4);
  gp.block(0, 0, 2, 2) *= 2.0 * ns_probe + 1.0;
  gp.block(2, 2, 2, 2) *= 2.0 * (2.0 * ns - ns_probe) + 1.0;
  const double dp = directional_derivative(CovMatrix(gp), ns, ch);
  CHECK(dp < 0.0);
}

TEST_CASE("asymptotic capacity") {
  CHECK(asymptotic_capacity(0.1) == doctest::Approx(1.879233).epsilon(1e-6));
  CHECK(asymptotic_capacity(std::exp(-1.0)) == 0.0);
  CHECK(asymptotic_capacity(0.5) == 0.0);
  CHECK(std::isinf(asymptotic_capacity(0.0)));
  CHECK_THROWS_AS(asymptotic_capacity(-0.1), DomainError);
}

}
