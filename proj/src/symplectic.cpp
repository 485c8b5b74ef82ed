#include "thermocap/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "thermocap/errors.hpp"

namespace thermocap {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_symmetric(const Eigen::MatrixXd& gamma) {
  const double asym = max_abs(gamma - gamma.transpose());
  if (asym > kSymmetryTolerance * std::max(1.0, max_abs(gamma))) {
    throw InvalidInput("covariance matrix is not symmetric (max asymmetry " +
                       std::to_string(asym) + ")");
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& gamma) {
  return 0.5 * (gamma + gamma.transpose());
}

}  // namespace

Eigen::MatrixXd standard_form_matrix(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = -1.0;
    j(2 * k + 1, 2 * k) = 1.0;
  }
  return j;
}

Eigen::MatrixXd SymplecticForm::matrix() const {
  Eigen::MatrixXd omega = standard_form_matrix(modes);
  if (kind == FormKind::flipped_joint) {
    const int half = modes;  // 2 * (modes / 2) quadratures per block
    omega.bottomRightCorner(half, half) *= -1.0;
  }
  return omega;
}

CovMatrix::CovMatrix(Eigen::MatrixXd gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0 ||
      gamma.rows() % 2 != 0) {
    throw InvalidInput("covariance matrix must be square with even dimension");
  }
  require_symmetric(gamma);
  modes_ = static_cast<int>(gamma.rows() / 2);
  gamma_ = symmetrized(gamma);
}

JointCovMatrix::JointCovMatrix(int block_modes, Eigen::MatrixXd gamma)
    : block_modes_(block_modes) {
  if (block_modes <= 0 || gamma.rows() != 4 * block_modes ||
      gamma.cols() != 4 * block_modes) {
    throw InvalidInput("joint covariance matrix must be 4n x 4n");
  }
  require_symmetric(gamma);
  gamma_ = symmetrized(gamma);
}

Eigen::MatrixXd JointCovMatrix::system_block() const {
  const int d = 2 * block_modes_;
  return gamma_.topLeftCorner(d, d);
}

Eigen::MatrixXd JointCovMatrix::reference_block() const {
  const int d = 2 * block_modes_;
  return gamma_.bottomRightCorner(d, d);
}

Eigen::MatrixXd JointCovMatrix::cross_block() const {
  const int d = 2 * block_modes_;
  return gamma_.topRightCorner(d, d);
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& gamma,
                                           const SymplecticForm& form) {
  const int dim = form.dimension();
  if (gamma.rows() != dim || gamma.cols() != dim) {
    throw InvalidInput("matrix dimension does not match symplectic form");
  }
  require_symmetric(gamma);

  // Omega^{-1} = -Omega because Omega^2 = -I.
  const Eigen::MatrixXd a = -form.matrix() * symmetrized(gamma);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-solver failed on form^{-1} gamma");
  }

  const double scale = std::max(1.0, max_abs(gamma));
  std::vector<double> imag;
  imag.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    const auto ev = solver.eigenvalues()(i);
    if (std::abs(ev.real()) > 1e-6 * scale) {
      throw NumericError("form^{-1} gamma has a real eigenvalue; "
                         "matrix is not positive definite");
    }
    imag.push_back(std::abs(ev.imag()));
  }
  std::sort(imag.begin(), imag.end(), std::greater<>());

  std::vector<double> nu;
  nu.reserve(dim / 2);
  for (int i = 0; i < dim; i += 2) {
    const double a0 = imag[i];
    const double a1 = imag[i + 1];
    if (std::abs(a0 - a1) > kPairingTolerance * std::max(1.0, a0)) {
      throw NumericError("unpaired eigenvalues of form^{-1} gamma: " +
                         std::to_string(a0) + " vs " + std::to_string(a1));
    }
    nu.push_back(0.5 * (a0 + a1));
  }
  return nu;
}

std::vector<double> symplectic_eigenvalues(const CovMatrix& cm) {
  return symplectic_eigenvalues(cm.gamma(),
                                SymplecticForm::standard(cm.modes()));
}

std::vector<double> symplectic_eigenvalues(const JointCovMatrix& cm) {
  return symplectic_eigenvalues(cm.gamma(), cm.form());
}

ValidityReport validate_cm(const Eigen::MatrixXd& gamma,
                           const SymplecticForm& form) {
  ValidityReport report;
  try {
    const auto nu = symplectic_eigenvalues(gamma, form);
    report.min_nu = nu.back();
    report.pass = report.min_nu >= 1.0 - kPhysicalityTolerance;
  } catch (const NumericError&) {
    report.min_nu = 0.0;
    report.pass = false;
  }
  return report;
}

ValidityReport validate_cm(const CovMatrix& cm) {
  return validate_cm(cm.gamma(), SymplecticForm::standard(cm.modes()));
}

CovMatrix thermal_cm(double mean_photons, int modes) {
  if (!(mean_photons >= 0.0)) {
    throw DomainError("thermal mean photon number must be >= 0");
  }
  if (modes <= 0) throw InvalidInput("mode count must be positive");
  return CovMatrix((2.0 * mean_photons + 1.0) *
                   Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
}

CovMatrix vacuum_cm(int modes) { return thermal_cm(0.0, modes); }

CovMatrix direct_sum(const CovMatrix& a, const CovMatrix& b) {
  const auto da = a.gamma().rows();
  const auto db = b.gamma().rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(da + db, da + db);
  g.topLeftCorner(da, da) = a.gamma();
  g.bottomRightCorner(db, db) = b.gamma();
  return CovMatrix(std::move(g));
}

double g_entropy(double nbar) {
  if (!(nbar >= 0.0)) throw DomainError("g_entropy requires nbar >= 0");
  if (nbar == 0.0) return 0.0;
  // (x+1) ln(x+1) - x ln x = ln(1+x) + x ln(1 + 1/x)
  const double nats = std::log1p(nbar) + nbar * std::log1p(1.0 / nbar);
  return nats / std::numbers::ln2;
}

namespace {

double entropy_from_spectrum(const std::vector<double>& nu) {
  double bits = 0.0;
  for (double v : nu) {
    if (v < 1.0 - kPhysicalityTolerance) {
      throw DomainError("covariance matrix violates the uncertainty relation "
                        "(nu = " + std::to_string(v) + ")");
    }
    bits += g_entropy(std::max(0.0, 0.5 * (v - 1.0)));
  }
  return bits;
}

}  // namespace

double gaussian_entropy(const Eigen::MatrixXd& gamma,
                        const SymplecticForm& form) {
  return entropy_from_spectrum(symplectic_eigenvalues(gamma, form));
}

double gaussian_entropy(const CovMatrix& cm) {
  return entropy_from_spectrum(symplectic_eigenvalues(cm));
}

double gaussian_entropy(const JointCovMatrix& cm) {
  return entropy_from_spectrum(symplectic_eigenvalues(cm));
}

JointCovMatrix purify(const CovMatrix& cm) {
  const int n = cm.modes();
  const auto report = validate_cm(cm);
  if (!report.pass) {
    throw DomainError("cannot purify an unphysical covariance matrix "
                      "(min nu = " + std::to_string(report.min_nu) + ")");
  }
  const Eigen::MatrixXd j = standard_form_matrix(n);
  const Eigen::MatrixXd a = -j * cm.gamma();  // J^{-1} gamma
  const Eigen::MatrixXd m =
      -(a * a) - Eigen::MatrixXd::Identity(2 * n, 2 * n);

  // m is diagonalizable with spectrum nu_k^2 - 1 >= 0 (each twice).
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-solver failed in purification");
  }
  Eigen::VectorXcd root = solver.eigenvalues();
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    double mu = root(i).real();
    if (mu < 0.0) {
      if (mu < -1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw DomainError("negative eigenvalue under the purification root");
      }
      mu = 0.0;
    }
    root(i) = std::sqrt(mu);
  }
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  const Eigen::MatrixXd sqrt_m =
      (v * root.asDiagonal() * v.inverse()).real();
  const Eigen::MatrixXd beta = j * sqrt_m;

  Eigen::MatrixXd psi(4 * n, 4 * n);
  psi.topLeftCorner(2 * n, 2 * n) = cm.gamma();
  psi.bottomRightCorner(2 * n, 2 * n) = cm.gamma();
  psi.topRightCorner(2 * n, 2 * n) = beta;
  psi.bottomLeftCorner(2 * n, 2 * n) = beta.transpose();
  // beta^T vs beta: the joint matrix is symmetric by construction, but the
  // numerically computed root carries rounding asymmetry of order 1e-15.
  return JointCovMatrix(n, 0.5 * (psi + psi.transpose()));
}

double trace_functional(const CovMatrix& cm) {
  double t = 0.0;
  for (double v : symplectic_eigenvalues(cm)) {
    t += std::sqrt(std::max(0.0, v * v - 1.0));
  }
  return 2.0 * t;
}

double energy(const CovMatrix& cm) { return cm.gamma().trace() / 4.0; }

}  // namespace thermocap
