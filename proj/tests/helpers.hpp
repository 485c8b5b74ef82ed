#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "thermocap/symplectic.hpp"

namespace testutil {

inline Eigen::MatrixXd rotation(int n, int mode, double theta) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double c = std::cos(theta), si = std::sin(theta);
  s.block(2 * mode, 2 * mode, 2, 2) << c, -si, si, c;
  return s;
}

inline Eigen::MatrixXd squeezer(int n, int mode, double z) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  s(2 * mode, 2 * mode) = z;
  s(2 * mode + 1, 2 * mode + 1) = 1.0 / z;
  return s;
}

// Beam splitter mixing modes i and j with the same angle on x and p.
inline Eigen::MatrixXd beam_splitter(int n, int i, int j, double theta) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double c = std::cos(theta), si = std::sin(theta);
  for (int q = 0; q < 2; ++q) {
    s(2 * i + q, 2 * i + q) = c;
    s(2 * i + q, 2 * j + q) = si;
    s(2 * j + q, 2 * i + q) = -si;
    s(2 * j + q, 2 * j + q) = c;
  }
  return s;
}

inline Eigen::MatrixXd random_symplectic(int n, std::mt19937_64& rng,
                                         double max_log_squeeze = 0.7) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> lz(-max_log_squeeze, max_log_squeeze);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int layer = 0; layer < 3; ++layer) {
    for (int m = 0; m < n; ++m) {
      s = rotation(n, m, angle(rng)) * squeezer(n, m, std::exp(lz(rng))) * s;
    }
    for (int m = 0; m + 1 < n; ++m) s = beam_splitter(n, m, m + 1, angle(rng)) * s;
  }
  return s;
}

/// S diag(nu) S^T with nu in [1, 1 + spread].
inline thermocap::CovMatrix random_cm(int n, std::mt19937_64& rng,
                                      double spread = 3.0) {
  std::uniform_real_distribution<double> u(0.0, spread);
  Eigen::VectorXd d(2 * n);
  for (int m = 0; m < n; ++m) d(2 * m) = d(2 * m + 1) = 1.0 + u(rng);
  const Eigen::MatrixXd s = random_symplectic(n, rng);
  return thermocap::CovMatrix(s * d.asDiagonal() * s.transpose());
}

/// Symplectic spectrum from the Hermitian matrix i g^{1/2} J g^{1/2}, whose
/// eigenvalues are +-nu.  Descending.
inline std::vector<double> symplectic_spectrum_svd(const Eigen::MatrixXd& gamma) {
  const int n = static_cast<int>(gamma.rows()) / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma);
  const Eigen::MatrixXd root = es.operatorSqrt();
  const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) *
                             (root * thermocap::standard_form_matrix(n) * root)
                                 .cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h);
  std::vector<double> out;
  for (int i = 0; i < 2 * n; ++i) {
    if (hs.eigenvalues()(i) > 0) out.push_back(hs.eigenvalues()(i));
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

/// Thermal-spectrum entropy -sum lambda_k log2 lambda_k, summed until the
/// terms stop changing the total.
inline double geometric_entropy_bits(double nbar) {
  if (nbar == 0.0) return 0.0;
  const double v = nbar / (nbar + 1.0);
  double total = 0.0;
  for (long k = 0; k < 100000000; ++k) {
    const double lam = (1.0 - v) * std::pow(v, static_cast<double>(k));
    if (lam <= 0.0) break;
    const double term = -lam * std::log2(lam);
    total += term;
    if (term < 1e-18 * total && k > 10) break;
  }
  return total;
}

inline double elapsed_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace testutil
