#include "thermocap/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "thermocap/errors.hpp"

namespace thermocap {

GaussianChannel::GaussianChannel(Eigen::MatrixXd m, Eigen::MatrixXd noise)
    : m_(std::move(m)), noise_(std::move(noise)) {
  if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0 ||
      noise_.rows() != m_.rows() || noise_.cols() != m_.cols()) {
    throw InvalidInput("channel matrices must both be 2n x 2n");
  }
  if ((noise_ - noise_.transpose()).cwiseAbs().maxCoeff() >
      kSymmetryTolerance * std::max(1.0, noise_.cwiseAbs().maxCoeff())) {
    throw InvalidInput("channel noise matrix is not symmetric");
  }
  noise_ = 0.5 * (noise_ + noise_.transpose());
  modes_ = static_cast<int>(m_.rows() / 2);

  const Eigen::MatrixXd j = standard_form_matrix(modes_);
  const Eigen::MatrixXd anti = j - m_.transpose() * j * m_;
  Eigen::MatrixXcd h(noise_.rows(), noise_.cols());
  h.real() = noise_;
  h.imag() = anti;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-solver failed in complete-positivity check");
  }
  const double lo = solver.eigenvalues().minCoeff();
  if (lo < -kCompletePositivityTolerance) {
    throw DomainError("channel is not completely positive (min eigenvalue " +
                      std::to_string(lo) + ")");
  }
}

ThermalChannel::ThermalChannel(double noise) : noise_(noise) {
  if (!std::isfinite(noise) || noise < 0.0) {
    throw DomainError("noise photon number must be finite and >= 0");
  }
}

GaussianChannel ThermalChannel::as_gaussian(int modes) const {
  const auto id = Eigen::MatrixXd::Identity(2 * modes, 2 * modes);
  return GaussianChannel(id, 2.0 * noise_ * id);
}

CovMatrix apply_channel(const CovMatrix& cm, const GaussianChannel& ch) {
  if (cm.modes() != ch.modes()) {
    throw InvalidInput("channel and state have different mode counts");
  }
  return CovMatrix(ch.m().transpose() * cm.gamma() * ch.m() + ch.noise());
}

CovMatrix apply_channel(const CovMatrix& cm, const ThermalChannel& ch) {
  const int d = 2 * cm.modes();
  return CovMatrix(cm.gamma() +
                   2.0 * ch.noise() * Eigen::MatrixXd::Identity(d, d));
}

JointCovMatrix joint_after_channel(const CovMatrix& cm,
                                   const GaussianChannel& ch) {
  if (cm.modes() != ch.modes()) {
    throw InvalidInput("channel and state have different mode counts");
  }
  const JointCovMatrix pure = purify(cm);
  const int d = 2 * cm.modes();
  Eigen::MatrixXd g = pure.gamma();
  g.topLeftCorner(d, d) =
      ch.m().transpose() * cm.gamma() * ch.m() + ch.noise();
  g.topRightCorner(d, d) = ch.m().transpose() * pure.cross_block();
  g.bottomLeftCorner(d, d) = g.topRightCorner(d, d).transpose();
  return JointCovMatrix(cm.modes(), std::move(g));
}

JointCovMatrix joint_after_channel(const CovMatrix& cm,
                                   const ThermalChannel& ch) {
  const JointCovMatrix pure = purify(cm);
  if (ch.noise() == 0.0) return pure;
  const int d = 2 * cm.modes();
  Eigen::MatrixXd g = pure.gamma();
  g.topLeftCorner(d, d).diagonal().array() += 2.0 * ch.noise();
  return JointCovMatrix(cm.modes(), std::move(g));
}

double coherent_information(const CovMatrix& cm, const ThermalChannel& ch) {
  if (ch.noise() == 0.0) return gaussian_entropy(cm);
  return gaussian_entropy(apply_channel(cm, ch)) -
         gaussian_entropy(joint_after_channel(cm, ch));
}

double mutual_information(const CovMatrix& cm, const ThermalChannel& ch) {
  return gaussian_entropy(cm) + coherent_information(cm, ch);
}

double tanh2r_energy_form(double ns, double noise) {
  const double e = ns + 0.5;
  return std::sqrt(4.0 * e * e - 1.0) / (2.0 * e + noise);
}

double tanh2r_photon_form(double ns, double noise) {
  const double nprime = ns + noise;
  return 2.0 * std::sqrt(ns * (ns + 1.0)) / (ns + nprime + 1.0);
}

SqueezeDiagonalization squeeze_diagonalization(double ns, double noise) {
  if (!(ns >= 0.0) || !(noise >= 0.0) || !std::isfinite(ns) ||
      !std::isfinite(noise)) {
    throw DomainError("squeeze_diagonalization needs finite N_s, N >= 0");
  }
  SqueezeDiagonalization sd;
  sd.ns = ns;
  sd.noise = noise;
  if (ns == 0.0 && noise == 0.0) return sd;

  // Joint CM of the thermal purification after noise has the 2x2 block
  // structure [[x I, z J], [z J^T, y I]] with x = a + 2N, y = a,
  // z = sqrt(a^2 - 1).  Its two flipped-form eigenvalues are
  // (sq +- (x - y)) / 2 with sq^2 = (x + y)^2 - 4 z^2.
  const double a = 2.0 * ns + 1.0;
  const double sq = 2.0 * std::sqrt(2.0 * a * noise + noise * noise + 1.0);
  sd.nu_A = 0.5 * sq + noise;
  // sq/2 - N = (1 + 2aN + N^2 - N^2) / (sq/2 + N), without cancellation
  sd.nu_B = (1.0 + 2.0 * a * noise) / sd.nu_A;
  sd.v_A = (sd.nu_A - 1.0) / (sd.nu_A + 1.0);
  sd.v_B = (sd.nu_B - 1.0) / (sd.nu_B + 1.0);
  sd.r = 0.5 * std::atanh(tanh2r_photon_form(ns, noise));
  return sd;
}

Eigen::Matrix4d squeeze_matrix_single(double r) {
  const double c = std::cosh(r);
  const double s = std::sinh(r);
  Eigen::Matrix2d j;
  j << 0.0, -1.0, 1.0, 0.0;
  Eigen::Matrix4d sm;
  sm.topLeftCorner<2, 2>() = c * Eigen::Matrix2d::Identity();
  sm.bottomRightCorner<2, 2>() = c * Eigen::Matrix2d::Identity();
  sm.topRightCorner<2, 2>() = -s * j;
  sm.bottomLeftCorner<2, 2>() = s * j;
  return sm;
}

double exchange_entropy(const SqueezeDiagonalization& sd) {
  return g_entropy(std::max(0.0, sd.mean_A())) +
         g_entropy(std::max(0.0, sd.mean_B()));
}

double directional_derivative(const CovMatrix& probe, double ns,
                              const ThermalChannel& ch) {
  if (!(ns >= 0.0)) throw DomainError("N_s must be >= 0");
  const int n = probe.modes();
  const double e = ns + 0.5;
  const double target = n * e;
  const double got = energy(probe);
  if (std::abs(got - target) > kEnergyTolerance * std::max(1.0, target)) {
    throw ConstraintError("probe energy " + std::to_string(got) +
                          " differs from thermal reference " +
                          std::to_string(target));
  }
  const double t = trace_functional(probe);
  if (ch.noise() == 0.0 || ns == 0.0) return 0.0;

  const auto sd = squeeze_diagonalization(ns, ch.noise());
  const double bound = 2.0 * n * std::sqrt(4.0 * e * e - 1.0);
  const double log_vv = std::log2(sd.v_A) + std::log2(sd.v_B);
  return -0.25 * log_vv * std::sinh(2.0 * sd.r) * (t - bound);
}

double asymptotic_capacity(double noise) {
  if (!(noise >= 0.0)) throw DomainError("noise must be >= 0");
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  if (noise >= std::exp(-1.0)) return 0.0;
  // -log2(e N) = -(1 + ln N) / ln 2
  return std::max(0.0, -(1.0 + std::log(noise)) / std::numbers::ln2);
}

}  // namespace thermocap
