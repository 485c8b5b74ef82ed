#pragma once

// Truncated number-basis simulation of the additive-noise channel, used as an
// independent check of the covariance-matrix results.  Two-mode operators are
// indexed (first, second) -> first * d + second; the channel acts on the
// first factor when the second one is a reference.

#include <complex>

#include <Eigen/Dense>

#include "thermocap/perturbation.hpp"
#include "thermocap/quadrature.hpp"

namespace thermocap {

struct FockDensity {
  int d = 0;      ///< per-mode truncation
  int modes = 1;  ///< 1 or 2; two-mode matrices are d^2 x d^2
  Eigen::MatrixXcd rho;
  /// Probability mass known to lie outside the truncated space.
  double truncation_deficit = 0.0;

  int dimension() const { return modes == 1 ? d : d * d; }
  double trace() const { return rho.trace().real(); }

  /// Hermitian within 1e-12 and eigenvalues >= -1e-10; throws InvalidInput.
  void validate() const;
};

struct ChannelOptions {
  QuadratureSpec quadrature;
  /// Largest accepted |Tr(output) - Tr(input)|; leakage through the
  /// truncation edge counts against it.
  double max_trace_error = 1e-6;
};

/// <m|D(alpha)|n> for m, n < d, from associated Laguerre polynomials.
Eigen::MatrixXcd displacement_matrix(std::complex<double> alpha, int d);

FockDensity thermal_fock(double ns, int d);
FockDensity number_state(int n, int d);
/// Diagonal density from occupation probabilities (length d or d^2).
FockDensity diagonal_density(const Eigen::VectorXd& p, int d, int modes);

/// Noise N on every mode (both modes for a two-mode density).  N = 0
/// returns the input.  Throws QuadratureError when the trace moves by more
/// than opts.max_trace_error.
FockDensity apply_thermal_channel(const FockDensity& rho, double noise,
                                  const ChannelOptions& opts = {});

/// d x d matrix Psi with |psi> = sum_{q,r} Psi(q, r) |q>|r> purifying a
/// single-mode rho.  Diagonal rho gives Psi = diag(sqrt(p)).
Eigen::MatrixXcd schmidt_matrix(const FockDensity& rho);

/// Purify a single-mode rho and send its first factor through the channel.
FockDensity joint_after_channel_fock(const FockDensity& rho, double noise,
                                     const ChannelOptions& opts = {});

/// G_st = Tr(K_s X K_t^dag) for the quadrature Kraus operators
/// K_s = sqrt(w_s) D(alpha_s).  For a density X this is the environment
/// output, isospectral with the reference + output state.
Eigen::MatrixXcd environment_gram(const Eigen::MatrixXcd& x, double noise,
                                  int d, const ChannelOptions& opts = {});

/// Nonzero spectrum entropy -sum p ln p over eigenvalues > 1e-14 of a
/// Hermitian matrix, optionally after dividing by the trace.  Nats.
double entropy_nats(const Eigen::MatrixXcd& h, bool renormalize = true);
double entropy_nats(const Eigen::VectorXd& eigenvalues,
                    bool renormalize = true);

/// Bits.
double von_neumann_entropy(const FockDensity& rho, bool renormalize = true);

/// S(reference + output) through the environment Gram matrix, bits.
double exchange_entropy_fock(const FockDensity& rho, double noise,
                             const ChannelOptions& opts = {});

/// S(E(rho)) - S(reference + output), bits.  Single-mode rho.
double coherent_information_fock(const FockDensity& rho, double noise,
                                 const ChannelOptions& opts = {});

/// Diagonal density of the perturbed thermal state: c must be 1x1 (single
/// mode, eps c_11 d^2/dN_s^2) or 2x2 (two modes, adding the mixed term
/// eps c_21 d/dN_1 d/dN_2).  Throws EpsilonTooLarge on a negative eigenvalue.
FockDensity perturbed_state(const PerturbationSpec& spec, double ns, int d);

/// Which mode carries the number operator on the right-hand side.
enum class PairIdentityPlacement { reference, channel };

struct PairIdentityReport {
  int j = 1;
  double residual = 0.0;        ///< Frobenius norm of LHS - RHS
  double lhs_norm = 0.0;
  PairIdentityPlacement placement = PairIdentityPlacement::reference;
};

/// Compares (E (x) I)[(a^dag b^dag)^j |psi><psi|] with
/// v^{-j/2} n_j |psi'><psi'| where n_j = c^{dag j} c^j on the chosen mode,
/// psi the thermal purification and psi' its channel output.
PairIdentityReport check_pair_identity(
    int j, double ns, double noise, int d,
    PairIdentityPlacement placement = PairIdentityPlacement::reference,
    const ChannelOptions& opts = {});

}  // namespace thermocap
