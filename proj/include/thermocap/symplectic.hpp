#pragma once

// Covariance-matrix algebra for n-mode Gaussian states.
//
// Conventions: quadratures are ordered (x1, p1, x2, p2, ...), the covariance
// matrix is gamma = 2 Tr[(R - eta) rho (R - eta)^T] + iJ with first moments
// dropped, so the vacuum is the identity and a thermal mode with mean photon
// number n has gamma = (2n + 1) I.  All public entropies are in bits.

#include <Eigen/Dense>
#include <vector>

namespace thermocap {

inline constexpr double kPhysicalityTolerance = 1e-9;
inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kPairingTolerance = 1e-10;

enum class FormKind {
  standard,       ///< J_n = J ⊕ ... ⊕ J
  flipped_joint,  ///< J_n ⊕ (-J_n), used for system-reference pairs
};

struct SymplecticForm {
  int modes = 1;  ///< total number of modes the form acts on
  FormKind kind = FormKind::standard;

  static SymplecticForm standard(int n) { return {n, FormKind::standard}; }
  /// Form for a joint state of two n-mode blocks (total 2n modes).
  static SymplecticForm flipped_joint(int n) {
    return {2 * n, FormKind::flipped_joint};
  }

  Eigen::MatrixXd matrix() const;
  int dimension() const { return 2 * modes; }
};

/// Single-mode J = [[0, -1], [1, 0]] repeated n times on the diagonal.
Eigen::MatrixXd standard_form_matrix(int n);

class CovMatrix {
 public:
  /// Symmetrizes gamma; throws InvalidInput if it is not 2n x 2n or is
  /// asymmetric beyond kSymmetryTolerance (relative to its largest entry).
  explicit CovMatrix(Eigen::MatrixXd gamma);

  int modes() const { return modes_; }
  const Eigen::MatrixXd& gamma() const { return gamma_; }

 private:
  int modes_;
  Eigen::MatrixXd gamma_;
};

/// Covariance matrix of a system block Q followed by a reference block R.
/// Entropies of this object are evaluated with the flipped-joint form.
class JointCovMatrix {
 public:
  JointCovMatrix(int block_modes, Eigen::MatrixXd gamma);

  int block_modes() const { return block_modes_; }
  const Eigen::MatrixXd& gamma() const { return gamma_; }
  SymplecticForm form() const {
    return SymplecticForm::flipped_joint(block_modes_);
  }

  Eigen::MatrixXd system_block() const;
  Eigen::MatrixXd reference_block() const;
  /// Upper-right (system x reference) correlation block.
  Eigen::MatrixXd cross_block() const;

 private:
  int block_modes_;
  Eigen::MatrixXd gamma_;
};

struct ValidityReport {
  double min_nu = 0.0;
  bool pass = false;
};

/// Williamson values from the eigenvalues of form^{-1} gamma, which come in
/// pairs ±i nu.  Returned in descending order.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& gamma,
                                           const SymplecticForm& form);
std::vector<double> symplectic_eigenvalues(const CovMatrix& cm);
std::vector<double> symplectic_eigenvalues(const JointCovMatrix& cm);

ValidityReport validate_cm(const Eigen::MatrixXd& gamma,
                           const SymplecticForm& form);
ValidityReport validate_cm(const CovMatrix& cm);

CovMatrix thermal_cm(double mean_photons, int modes);
CovMatrix vacuum_cm(int modes);

/// Direct sum of two covariance matrices (mode blocks concatenated).
CovMatrix direct_sum(const CovMatrix& a, const CovMatrix& b);

/// Entropy in bits of a thermal mode with mean photon number nbar:
/// g(x) = (x + 1) log2(x + 1) - x log2(x).
double g_entropy(double nbar);

/// Sum of g((nu_k - 1) / 2) over the symplectic spectrum, in bits.
double gaussian_entropy(const Eigen::MatrixXd& gamma,
                        const SymplecticForm& form);
double gaussian_entropy(const CovMatrix& cm);
double gaussian_entropy(const JointCovMatrix& cm);

/// Schmidt purification [[gamma, beta], [beta^T, gamma]] with
/// beta = J sqrt(-(J^{-1} gamma)^2 - I).  Pure under the flipped-joint form.
JointCovMatrix purify(const CovMatrix& cm);

/// Tr sqrt(-(J^{-1} gamma)^2 - I) = 2 sum_k sqrt(nu_k^2 - 1).
double trace_functional(const CovMatrix& cm);

/// Mean energy Tr(gamma) / 4 in units of hbar*omega (vacuum mode = 1/2).
double energy(const CovMatrix& cm);

}  // namespace thermocap
