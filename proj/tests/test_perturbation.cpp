#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "thermocap/errors.hpp"
#include "thermocap/perturbation.hpp"

using namespace thermocap;

namespace {

double lambda(double ns, long k) {
  return std::pow(ns, static_cast<double>(k)) / std::pow(ns + 1.0, k + 1.0);
}

ShiftOptions with(SeriesMethod m) {
  ShiftOptions o;
  o.method = m;
  return o;
}

}  // namespace

TEST_SUITE("perturbation") {

TEST_CASE("phi_k is the second N_s derivative of the thermal spectrum") {
  for (double ns : {0.3, 2.0, 9.0}) {
    const double h = 1e-4 * ns;
    for (long k : {0L, 1L, 3L, 10L}) {
      const double fd = (lambda(ns + h, k) - 2.0 * lambda(ns, k) + lambda(ns - h, k)) / (h * h);
      CHECK(phi_k(ns, k) == doctest::Approx(fd).epsilon(1e-5));
      const double fd1 = (lambda(ns + h, k) - lambda(ns - h, k)) / (2.0 * h);
      CHECK(dlambda_k(ns, k) == doctest::Approx(fd1).epsilon(1e-7));
    }
    const double v = ns / (ns + 1.0);
    CHECK(phi_k(ns, 0) == doctest::Approx(2.0 * std::pow(1.0 - v, 3)));
  }
  CHECK_THROWS_AS(phi_k(0.0, 1), DomainError);
}

TEST_CASE("phi_k has vanishing trace and first moment") {
  for (double ns : {0.5, 3.0}) {
    double s0 = 0.0, s1 = 0.0;
    for (long k = 0; k < 4000; ++k) {
      s0 += phi_k(ns, k);
      s1 += k * phi_k(ns, k);
    }
    CHECK(std::abs(s0) < 1e-13);
    CHECK(std::abs(s1) < 1e-12);
  }
}

TEST_CASE("input entropy shift") {
  for (double ns : {0.01, 0.3, 2.0, 25.0, 100.0}) {
    const auto s = input_entropy_shift(ns);
    CHECK(s.value < 0.0);
    const auto d = input_entropy_shift(ns, with(SeriesMethod::direct));
    const auto m = input_entropy_shift(ns, with(SeriesMethod::moments));
    CHECK(d.value == doctest::Approx(m.value).epsilon(1e-10));
  }
  const double a = std::pow(1e3, 4) * input_entropy_shift(1e3).value;
  const double b = std::pow(1e4, 4) * input_entropy_shift(1e4).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-2));

  // Two-mode input shift from the first-derivative spectrum.
  const double ns = 1.5;
  double q = 0.0;
  for (long k = 0; k < 400; ++k) q += dlambda_k(ns, k) * dlambda_k(ns, k) / lambda(ns, k);
  CHECK(input_entropy_shift_two_mode(ns) == doctest::Approx(-0.5 * q * q).epsilon(1e-12));
}

TEST_CASE("output entropy shifts") {
  CHECK(output_entropy_shift_single(0.9, 0.1) == doctest::Approx(-0.5));
  CHECK(output_entropy_shift_two_mode(0.9, 0.1) == doctest::Approx(-0.125));
  for (double np : {0.5, 3.0, 40.0}) {
    CHECK(output_entropy_shift_two_mode(np, 0.0) ==
          doctest::Approx(0.25 * output_entropy_shift_single(np, 0.0)));
  }
  const double big = 1e5;
  CHECK(std::pow(big, 4) * output_entropy_shift_single(big, 0.0) ==
        doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("joint spectrum and its correction") {
  const double ns = 2.0, noise = 0.1;
  double tot = 0.0, s0 = 0.0, sk = 0.0, sm = 0.0;
  for (long k = 0; k < 700; ++k) {
    for (long m = 0; m < 700; ++m) {
      const double lam = lambda_km(ns, noise, k, m);
      if (lam < 1e-300) continue;
      tot += lam;
      const double p = phi_prime_km(ns, noise, k, m);
      s0 += p;
      sk += k * p;
      sm += m * p;
    }
  }
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(s0) < 1e-12);
  CHECK(std::abs(sk) < 1e-11);
  CHECK(std::abs(sm) < 1e-11);
  // Symmetric in k and m only through the labels: swapping the labeling
  // swaps the roles of the two thermal parameters.
  CHECK(lambda_km(ns, noise, 3, 1, Labeling::reference) ==
        doctest::Approx(lambda_km(ns, noise, 1, 3, Labeling::channel)));
}

TEST_CASE("exchange entropy shifts") {
  for (double ns : {0.05, 0.5, 2.0, 20.0}) {
    for (double noise : {0.05, 0.1, 0.2}) {
      const auto d = exchange_entropy_shift_single(ns, noise, with(SeriesMethod::direct));
      const auto m = exchange_entropy_shift_single(ns, noise, with(SeriesMethod::moments));
      CHECK(d.value < 0.0);
      CHECK(d.value == doctest::Approx(m.value).epsilon(1e-9));
    }
  }
  for (double ns : {1e3, 1e4}) {
    const double ratio =
        exchange_entropy_shift_single(ns, 0.1).value / output_entropy_shift_single(ns, 0.1);
    CHECK(ratio == doctest::Approx(3.0 / 8.0).epsilon(1e-2));
  }
}

TEST_CASE("two-mode degenerate blocks") {
  const double ns = 0.7, noise = 0.1;
  const Eigen::MatrixXd b = degenerate_block(ns, noise, 3, 2);
  CHECK(b.rows() == 12);
  CHECK((b - b.transpose()).norm() < 1e-15);
  CHECK_THROWS_AS(degenerate_block(ns, noise, -1, 0), InvalidInput);

  for (double n2 : {0.2, 1.5, 6.0}) {
    const auto d = exchange_entropy_shift_two_mode(n2, noise, with(SeriesMethod::direct));
    const auto m = exchange_entropy_shift_two_mode(n2, noise, with(SeriesMethod::moments));
    CHECK(d.value < 0.0);
    CHECK(d.value == doctest::Approx(m.value).epsilon(1e-9));
  }
  const double big = 1e3;
  CHECK(std::pow(big, 4) * exchange_entropy_shift_two_mode(big, noise).value ==
        doctest::Approx(-3.0 / 16.0).epsilon(1e-2));
  CHECK(exchange_entropy_shift_two_mode(big, noise).value /
            output_entropy_shift_two_mode(big, noise) ==
        doctest::Approx(3.0 / 8.0).epsilon(1e-2));
}

TEST_CASE("CI difference") {
  const double big = 1e4;
  const auto s = delta_ci_single(big, 0.1);
  CHECK(s.delta_ci == doctest::Approx(s.output_shift - s.exchange_shift));
  CHECK(std::pow(big, 4) * s.delta_ci == doctest::Approx(-1.25).epsilon(1e-2));
  CHECK(std::pow(big, 4) * delta_ci_two_mode(big, 0.1).delta_ci ==
        doctest::Approx(-5.0 / 16.0).epsilon(1e-2));
  CHECK(delta_ci_two_mode(0.005, 0.1).delta_ci > 0.0);
  CHECK(delta_ci(PerturbationOrder::two_mode, 0.3, 0.1).delta_ci ==
        delta_ci_two_mode(0.3, 0.1).delta_ci);
}

TEST_CASE("general coefficient matrices") {
  PerturbationSpec one{Eigen::MatrixXd::Constant(1, 1, 1.0), 1e-3};
  CHECK(delta_ci_general(one, 2.0, 0.1).delta_ci ==
        doctest::Approx(delta_ci_single(2.0, 0.1).delta_ci));

  PerturbationSpec full{Eigen::MatrixXd::Constant(2, 2, 1.0), 1e-3};
  CHECK(asymptotic_delta_ci(full.c) == doctest::Approx(-45.0 / 16.0));
  CHECK(std::pow(1e4, 4) * delta_ci_general(full, 1e4, 0.1).delta_ci ==
        doctest::Approx(-45.0 / 16.0).epsilon(1e-2));

  PerturbationSpec zero{Eigen::MatrixXd::Zero(2, 2), 1e-3};
  CHECK_THROWS_AS(zero.validate(), InvalidInput);
  CHECK_THROWS_AS(delta_ci_general(zero, 1.0, 0.1), InvalidInput);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) c(i, j) = c(j, i) = g(rng);
    CHECK(asymptotic_delta_ci(c) == doctest::Approx(asymptotic_delta_ci_closed_form(c)).epsilon(1e-14));
  }
}

TEST_CASE("zero crossing N_s0") {
  const auto r = find_ns0(0.1);
  CHECK(r.ns0 > 0.0);
  CHECK(r.sign_changes == 1);
  CHECK(r.shape_ok);
  CHECK(std::abs(r.residual) < 1e-8);
  CHECK(delta_ci_two_mode(0.9 * r.ns0, 0.1).delta_ci > 0.0);
  CHECK(delta_ci_two_mode(1.1 * r.ns0, 0.1).delta_ci < 0.0);

  const auto c = find_ns0(0.1756);
  CHECK(c.ns0 > 0.0);
  CHECK(std::isfinite(c.ns0));
  CHECK_THROWS_AS(find_ns0(0.0), DomainError);
}

TEST_CASE("critical noise") {
  const auto r = solve_nc();
  CHECK(std::abs(r.residual) < 1e-4);
  CHECK(r.nc > 0.01);
  CHECK(r.nc < std::exp(-1.0));
  for (double noise : {0.05, 0.1, 0.15}) {
    const double ns0 = find_ns0(noise).ns0;
    CHECK(mutual_information(thermal_cm(ns0, 1), ThermalChannel(noise)) <
          -std::log2(std::numbers::e * noise));
  }
}

TEST_CASE("capacity certificates") {
  const auto a = certify_capacity(0.1);
  CHECK(a.q == doctest::Approx(1.879233).epsilon(1e-6));
  CHECK(a.certified);
  CHECK_FALSE(a.caveat.empty());
  for (double noise : {0.2, 0.3}) {
    const auto c = certify_capacity(noise);
    CHECK(c.certified == (noise <= c.nc));
  }
  const auto z = certify_capacity(0.4);
  CHECK(z.q == 0.0);
  CHECK(z.certified);
  const auto inf = certify_capacity(0.0);
  CHECK(inf.unbounded);
  CHECK(std::isnan(inf.ns0));
}

TEST_CASE("option parsing") {
  CHECK(parse_labeling("channel") == Labeling::channel);
  CHECK(parse_series_method("direct") == SeriesMethod::direct);
  CHECK(parse_order("two-mode") == PerturbationOrder::two_mode);
  CHECK(to_string(PerturbationOrder::single) == "single");
  CHECK_THROWS_AS(parse_order("three"), InvalidInput);
}

}
