#pragma once

// Seeded checks of the extremal properties of thermal inputs under the
// energy constraint Tr gamma = 4 n E.

#include <cstdint>
#include <string>
#include <vector>

#include "thermocap/channel.hpp"
#include "thermocap/perturbation.hpp"

namespace thermocap {

enum class GeneratorKind { squeeze_rotate, correlated_two_mode };

std::string to_string(GeneratorKind k);
GeneratorKind parse_generator(const std::string& s);

struct ProbeEnsemble {
  int modes = 1;
  double e_bar = 1.5;  ///< energy per mode, >= 1/2
  int count = 1000;
  std::uint64_t seed = 7;
  GeneratorKind kind = GeneratorKind::squeeze_rotate;
  double max_squeeze = 2.0;  ///< 10 for the wide-squeeze stress mode

  void validate() const;
};

/// gamma = S diag(nu) S^T with S = O_1 Z O_2 (passive O_i, local squeezes
/// Z in [1, max_squeeze], plus a two-mode squeezer for the correlated
/// kind), nu rescaled so that energy(gamma) = n E exactly.  Squeezes are
/// shrunk when the target energy cannot accommodate them.  Deterministic in
/// (seed, index).
CovMatrix random_energy_constrained_cm(const ProbeEnsemble& ens,
                                       std::uint64_t index);

struct TraceBoundReport {
  int samples = 0;
  int violations = 0;
  double bound = 0.0;
  double max_t = 0.0;
  // Diagonal (per-mode thermal) grid over the energy split, n = 2 only.
  int grid_points = 0;
  int grid_violations = 0;
  double grid_max_t = 0.0;
  double grid_argmax_fraction = 0.0;  ///< fraction of the split; 0.5 = equal
  bool grid_max_at_equal_split = false;
  bool pass = false;
};

TraceBoundReport verify_trace_bound(const ProbeEnsemble& ens,
                                    double grid_step = 0.01);

struct DirectionalReport {
  int samples = 0;
  int violations = 0;
  double max_derivative = 0.0;
  double thermal_derivative = 0.0;
  double tolerance = 1e-12;
  bool pass = false;
};

/// directional_derivative at N_s = E - 1/2 for every probe.
DirectionalReport verify_directional(const ProbeEnsemble& ens, double noise);

struct LocalMaxReport {
  double ns = 0.0;
  double noise = 0.0;
  std::vector<double> blend;
  int samples = 0;       ///< probes x blend values
  int positives = 0;     ///< I_c(blend) - I_c(thermal) > tolerance
  double max_difference = 0.0;
  double tolerance = 1e-9;
  double ns0 = 0.0;      ///< NaN if no crossing at this noise
  std::string regime;    ///< "above-ns0", "below-ns0" or "no-ns0"
  double max_directional = 0.0;
  bool pass = false;     ///< positives above N_s0 fail; below are recorded
};

/// Blends gamma(t) = (1 - t) gamma_thermal + t gamma_probe; the ensemble
/// energy must be N_s + 1/2 per mode.
LocalMaxReport verify_local_max(double ns, double noise,
                                const ProbeEnsemble& ens,
                                const std::vector<double>& blend = {0.01, 0.05,
                                                                    0.1},
                                const Ns0Options& ns0_opts = {});

struct ScanRow {
  double ns = 0.0;
  double delta_ci = 0.0;
  int sign = 0;
};

struct DeltaCiScan {
  double noise = 0.0;
  std::string order;
  std::vector<ScanRow> rows;
  int sign_changes = 0;
  bool shape_ok = false;  ///< one change, positive before, negative after
  double tail_scaled = 0.0;       ///< N_s^4 delta_ci at the last grid point
  double tail_asymptote = 0.0;    ///< limiting constant for the order
};

DeltaCiScan scan_delta_ci(double noise, const std::vector<double>& ns_grid,
                          PerturbationOrder order = PerturbationOrder::two_mode,
                          const ShiftOptions& opts = {Labeling::reference,
                                                      SeriesMethod::moments});

/// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace thermocap
