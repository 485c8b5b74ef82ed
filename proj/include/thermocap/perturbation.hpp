#pragma once

// Second-order entropy shifts for quartic perturbations of the thermal
// characteristic function, chi -> chi (1 + eps f), f = sum_{i>=j} c_ij
// |mu_i mu_j|^2.  The diagonal term |mu|^4 perturbs a single-mode thermal
// state by eps d^2/dN_s^2; the cross term |mu_1 mu_2|^2 by the mixed
// derivative d^2/dN_1 dN_2.  All shifts are coefficients of eps^2 in
// natural-log units.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermocap/channel.hpp"

namespace thermocap {

/// Which normal mode of the noisy joint state carries the index k of the
/// perturbation polynomial.  `reference`: k counts quanta of the mode with
/// the smaller symplectic eigenvalue nu_B (the mode that coincides with the
/// reference at N = 0); this is the assignment that matches the Fock
/// oracle.  `channel`: k counts quanta of the nu_A mode.
enum class Labeling { reference, channel };

/// `moments` evaluates sums in closed form from geometric moments;
/// `direct` sums the series term by term; `automatic` picks direct when it
/// is affordable.
enum class SeriesMethod { automatic, moments, direct };

enum class PerturbationOrder { single, two_mode };

std::string to_string(Labeling l);
std::string to_string(SeriesMethod m);
std::string to_string(PerturbationOrder o);
Labeling parse_labeling(const std::string& s);
SeriesMethod parse_series_method(const std::string& s);
PerturbationOrder parse_order(const std::string& s);

struct PerturbationSpec {
  Eigen::MatrixXd c;  ///< symmetric; c(i, j) for i > j is the pair weight
  double epsilon = 1e-3;

  /// Throws InvalidInput unless c is square, symmetric, finite and nonzero.
  void validate() const;
};

struct ShiftOptions {
  Labeling labeling = Labeling::reference;
  SeriesMethod method = SeriesMethod::automatic;
  double rel_tol = 1e-12;
  long max_terms = 4'000'000;
};

struct ShiftValue {
  double value = 0.0;
  double truncation_error_bound = 0.0;
  long terms = 0;
  SeriesMethod method_used = SeriesMethod::moments;
};

/// First-order eigenvalue correction of the single-mode input,
/// lambda_k (1 - v)^2 [2 - 4k/N_s + k(k-1)/N_s^2], lambda_k = (1 - v) v^k,
/// v = N_s / (N_s + 1).  This is d^2 lambda_k / dN_s^2.
double phi_k(double ns, long k);
/// First derivative d lambda_k / dN_s = lambda_k (1 - v)(k/N_s - 1).
double dlambda_k(double ns, long k);

/// -1/2 sum_k phi_k^2 / lambda_k.
ShiftValue input_entropy_shift(double ns, const ShiftOptions& opts = {});
/// -1/2 [1 / (N_s (N_s + 1))]^2.
double input_entropy_shift_two_mode(double ns);

/// -1/2 [2 / (N'(N' + 1))]^2, N' = N_s + N.
double output_entropy_shift_single(double ns, double noise);
/// -1 / (2 N'^2 (N' + 1)^2).
double output_entropy_shift_two_mode(double ns, double noise);

/// Diagonal first-order correction of the joint-state eigenvalue (k, m):
/// lambda_km (1 - v)^2 {2 - 4[k c^2 + (m + 1) s^2]/N_s
///   + [k(k-1) c^4 + (m+1)(m+2) s^4 + 4k(m+1) s^2 c^2]/N_s^2},
/// c = cosh r, s = sinh r.
double phi_prime_km(double ns, double noise, long k, long m,
                    Labeling labeling = Labeling::reference);

/// Unperturbed joint eigenvalue (1 - v_k) v_k^k (1 - v_m) v_m^m under the
/// chosen labeling.
double lambda_km(double ns, double noise, long k, long m,
                 Labeling labeling = Labeling::reference);

/// -1/2 sum_km Phi'_km^2 / lambda_km.
ShiftValue exchange_entropy_shift_single(double ns, double noise,
                                         const ShiftOptions& opts = {});

/// First-order operator of the |mu_1 mu_2|^2 perturbation restricted to the
/// degenerate block with k_1 + k_2 = K and m_1 + m_2 = M.  Basis states are
/// ordered (k_1, m_1) lexicographically, k_1 in [0, K], m_1 in [0, M].
/// Entries include the block eigenvalue and the (1 - v)^2 prefactor.
Eigen::MatrixXd degenerate_block(double ns, double noise, int big_k,
                                 int big_m,
                                 Labeling labeling = Labeling::reference);

/// -1/2 sum_blocks Tr(M_block^2) / lambda_block.
ShiftValue exchange_entropy_shift_two_mode(double ns, double noise,
                                           const ShiftOptions& opts = {});

struct DeltaCiReport {
  double ns = 0.0;
  double noise = 0.0;
  double input_shift = 0.0;
  double output_shift = 0.0;
  double exchange_shift = 0.0;
  double delta_ci = 0.0;  ///< output_shift - exchange_shift
  double truncation_error_bound = 0.0;
  std::string order;
};

DeltaCiReport delta_ci_single(double ns, double noise,
                              const ShiftOptions& opts = {});
DeltaCiReport delta_ci_two_mode(double ns, double noise,
                                const ShiftOptions& opts = {});
/// sum_i c_ii^2 (single terms) + sum_{i>j} c_ij^2 (pair terms).
DeltaCiReport delta_ci_general(const PerturbationSpec& spec, double ns,
                               double noise, const ShiftOptions& opts = {});
DeltaCiReport delta_ci(PerturbationOrder order, double ns, double noise,
                       const ShiftOptions& opts = {});

/// Large-N_s limits of N_s^4 times each per-eps^2 shift.
struct AsymptoticConstants {
  static constexpr double single_output = -2.0;
  static constexpr double single_exchange = -0.75;
  static constexpr double two_mode_output = -0.5;
  static constexpr double two_mode_exchange = -3.0 / 16.0;
};

/// Limit of N_s^4 delta_ci / eps^2 assembled term by term from the single
/// and pair constants.
double asymptotic_delta_ci(const Eigen::MatrixXd& c);
/// Closed form -(5/16)(4 sum_i c_ii^2 + sum_{i>j} c_ij^2).
double asymptotic_delta_ci_closed_form(const Eigen::MatrixXd& c);

struct Ns0Options {
  PerturbationOrder order = PerturbationOrder::two_mode;
  ShiftOptions shift{Labeling::reference, SeriesMethod::moments};
  double grid_lo = 1e-3;
  double grid_hi = 1e3;
  int grid_points = 200;
  double rel_tol = 1e-12;
};

struct Ns0Result {
  double ns0 = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;  ///< delta_ci at ns0
  int sign_changes = 0;
  bool shape_ok = true;  ///< positive below the root, negative above it
  std::vector<std::string> warnings;
};

/// Smallest sign change of delta_ci in N_s on a log grid, refined by
/// bisection.  Throws NoRootError if the grid shows no sign change.
Ns0Result find_ns0(double noise, const Ns0Options& opts = {});

struct NcOptions {
  Ns0Options ns0;
  double noise_lo = 0.01;
  double noise_hi = 0.36;
  int scan_points = 71;
  double tol = 1e-9;
};

struct NcResult {
  double nc = 0.0;
  double ns0 = 0.0;
  double mutual_information = 0.0;  ///< bits
  double bound = 0.0;               ///< -log2(e N_c)
  double residual = 0.0;            ///< mutual_information - bound
  int iterations = 0;
  std::vector<double> skipped_noise;  ///< scan points with no N_s0
};

/// I(thermal(N_s0(N)), N) + log2(e N), in bits.
double nc_equation(double noise, const Ns0Options& opts = {});

/// Root of nc_equation on [noise_lo, noise_hi] by scan and bisection.
NcResult solve_nc(const NcOptions& opts = {});

struct CapacityCertificate {
  double noise = 0.0;
  double q = 0.0;  ///< asymptotic_capacity(noise); +inf when noise = 0
  bool unbounded = false;
  bool certified = false;
  double nc = 0.0;
  double ns0 = 0.0;        ///< NaN when no zero crossing exists at this N
  double mi_bound = 0.0;   ///< I(thermal(N_s0), N) in bits, NaN as above
  std::string caveat;
};

/// Certification uses a cached solve_nc per option set.
CapacityCertificate certify_capacity(double noise, const NcOptions& opts = {});

/// Qualifier attached to every certificate.
const std::string& certification_caveat();

}  // namespace thermocap
