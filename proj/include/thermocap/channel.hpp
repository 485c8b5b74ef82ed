#pragma once

// Gaussian channels acting on covariance matrices, and the entropic
// quantities of the thermal-noise channel gamma -> gamma + 2N I.

#include <Eigen/Dense>

#include "thermocap/symplectic.hpp"

namespace thermocap {

inline constexpr double kCompletePositivityTolerance = 1e-9;
inline constexpr double kEnergyTolerance = 1e-9;

/// gamma -> M^T gamma M + Nmat.  Construction checks complete positivity,
/// Nmat + i (J - M^T J M) >= 0.
class GaussianChannel {
 public:
  GaussianChannel(Eigen::MatrixXd m, Eigen::MatrixXd noise);

  int modes() const { return modes_; }
  const Eigen::MatrixXd& m() const { return m_; }
  const Eigen::MatrixXd& noise() const { return noise_; }

 private:
  int modes_;
  Eigen::MatrixXd m_;
  Eigen::MatrixXd noise_;
};

/// Classical additive noise: mean photon number N added to every mode.
class ThermalChannel {
 public:
  explicit ThermalChannel(double noise);

  double noise() const { return noise_; }
  GaussianChannel as_gaussian(int modes) const;

 private:
  double noise_;
};

CovMatrix apply_channel(const CovMatrix& cm, const GaussianChannel& ch);
CovMatrix apply_channel(const CovMatrix& cm, const ThermalChannel& ch);

/// Purify, then act with the channel on the system block only:
/// [[M^T gamma M + Nmat, M^T beta], [beta^T M, gamma]].
JointCovMatrix joint_after_channel(const CovMatrix& cm,
                                   const GaussianChannel& ch);
JointCovMatrix joint_after_channel(const CovMatrix& cm,
                                   const ThermalChannel& ch);

/// S(output) - S(reference + output), in bits.  May be negative.
double coherent_information(const CovMatrix& cm, const ThermalChannel& ch);

/// S(input) + S(output) - S(reference + output), in bits.
double mutual_information(const CovMatrix& cm, const ThermalChannel& ch);

/// Normal-mode data of the single-mode joint state for a thermal input of
/// mean N_s sent through noise N.  nu_A >= nu_B; nu_A is continuously
/// connected to the noisy output (nu_A = 2N + 1 at N_s = 0).
struct SqueezeDiagonalization {
  double ns = 0.0;
  double noise = 0.0;
  double r = 0.0;
  double nu_A = 1.0;
  double nu_B = 1.0;
  double v_A = 0.0;
  double v_B = 0.0;

  double mean_A() const { return 0.5 * (nu_A - 1.0); }
  double mean_B() const { return 0.5 * (nu_B - 1.0); }
};

SqueezeDiagonalization squeeze_diagonalization(double ns, double noise);

/// tanh 2r written with the per-mode energy E = N_s + 1/2.
double tanh2r_energy_form(double ns, double noise);
/// tanh 2r written with photon numbers, N' = N_s + N.
double tanh2r_photon_form(double ns, double noise);

/// Two-mode squeezer [[c I, -s J], [s J, c I]] on (Q, R) quadratures.
Eigen::Matrix4d squeeze_matrix_single(double r);

/// g(mean_A) + g(mean_B), in bits.
double exchange_entropy(const SqueezeDiagonalization& sd);

/// Left-hand side of the extremality inequality for the mixture direction
/// from the n-mode thermal state of mean N_s towards the probe:
///   -1/4 log2(v_A v_B) sinh 2r (T(probe) - 2n sqrt(4E^2 - 1)).
/// Requires energy(probe) = n (N_s + 1/2); throws ConstraintError otherwise.
double directional_derivative(const CovMatrix& probe, double ns,
                              const ThermalChannel& ch);

/// max{0, -log2(e N)}; +infinity at N = 0.
double asymptotic_capacity(double noise);

}  // namespace thermocap
