#include "thermocap/extremality.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <Eigen/QR>

#include "thermocap/errors.hpp"
#include "thermocap/parallel.hpp"

namespace thermocap {

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

// Haar unitary from the QR decomposition of a complex Ginibre matrix, as an
// orthogonal symplectic on interleaved quadratures.
Eigen::MatrixXd random_passive(int n, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = {gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  Eigen::MatrixXd o(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = q(i, j).real();
      const double y = q(i, j).imag();
      o(2 * i, 2 * j) = x;
      o(2 * i, 2 * j + 1) = -y;
      o(2 * i + 1, 2 * j) = y;
      o(2 * i + 1, 2 * j + 1) = x;
    }
  }
  return o;
}

// Local squeezes diag(z, 1/z) scaled in log space by `shrink`, plus a
// two-mode squeezer on the first pair for the correlated kind.
Eigen::MatrixXd active_part(const std::vector<double>& log_z, double log_tms,
                            double shrink, int n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const double z = std::exp(shrink * log_z[i]);
    s(2 * i, 2 * i) = z;
    s(2 * i + 1, 2 * i + 1) = 1.0 / z;
  }
  if (n >= 2 && log_tms != 0.0) {
    const double r = shrink * log_tms;
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double c = std::cosh(r), sh = std::sinh(r);
    t.block(0, 0, 4, 4) << c, 0, sh, 0,
                           0, c, 0, -sh,
                           sh, 0, c, 0,
                           0, -sh, 0, c;
    s = t * s;
  }
  return s;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::string to_string(GeneratorKind k) {
  return k == GeneratorKind::squeeze_rotate ? "squeeze-rotate"
                                            : "correlated-two-mode";
}

GeneratorKind parse_generator(const std::string& s) {
  if (s == "squeeze-rotate") return GeneratorKind::squeeze_rotate;
  if (s == "correlated-two-mode") return GeneratorKind::correlated_two_mode;
  throw InvalidInput("unknown generator '" + s + "'");
}

void ProbeEnsemble::validate() const {
  if (modes < 1) throw InvalidInput("ensemble needs at least one mode");
  if (count < 1) throw InvalidInput("ensemble count must be >= 1");
  if (!(e_bar >= 0.5)) {
    throw DomainError("energy per mode must be >= 1/2 (vacuum)");
  }
  if (!(max_squeeze >= 1.0)) throw InvalidInput("max_squeeze must be >= 1");
  if (kind == GeneratorKind::correlated_two_mode && modes < 2) {
    throw InvalidInput("correlated-two-mode generator needs >= 2 modes");
  }
}

CovMatrix random_energy_constrained_cm(const ProbeEnsemble& ens,
                                       std::uint64_t index) {
  ens.validate();
  const int n = ens.modes;
  const double target = 4.0 * n * ens.e_bar;  // Tr gamma
  // Only the vacuum has energy n/2.
  if (ens.e_bar - 0.5 <= 1e-15) return vacuum_cm(n);

  Rng rng = make_rng(ens.seed, index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_max = std::log(ens.max_squeeze);

  const Eigen::MatrixXd o1 = random_passive(n, rng);
  const Eigen::MatrixXd o2 = random_passive(n, rng);
  std::vector<double> log_z(n);
  for (auto& lz : log_z) lz = log_max * unit(rng);
  double log_tms = 0.0;
  if (ens.kind == GeneratorKind::correlated_two_mode) {
    log_tms = log_max * unit(rng);
  }
  // Williamson spectrum before rescaling; strictly mixed so the rescale is
  // well defined.
  Eigen::VectorXd nu0(n);
  for (int i = 0; i < n; ++i) nu0(i) = 1.0 + (0.05 + unit(rng)) * 2.0 * ens.e_bar;

  double shrink = 1.0;
  for (int attempt = 0; attempt < 80; ++attempt, shrink *= 0.5) {
    const Eigen::MatrixXd s = o1 * active_part(log_z, log_tms, shrink, n) * o2;
    const Eigen::MatrixXd sts = s.transpose() * s;
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = sts(2 * i, 2 * i) + sts(2 * i + 1, 2 * i + 1);
    const double base = w.sum();  // Tr gamma with nu = 1
    if (base >= target) continue;
    const double slope = (nu0.array() - 1.0).matrix().dot(w);
    const double scale = (target - base) / slope;
    Eigen::VectorXd diag(2 * n);
    for (int i = 0; i < n; ++i) {
      const double nu = 1.0 + scale * (nu0(i) - 1.0);
      diag(2 * i) = nu;
      diag(2 * i + 1) = nu;
    }
    return CovMatrix(s * diag.asDiagonal() * s.transpose());
  }
  throw NumericError("could not fit the squeezes into the energy budget");
}

TraceBoundReport verify_trace_bound(const ProbeEnsemble& ens,
                                    double grid_step) {
  ens.validate();
  TraceBoundReport rep;
  const int n = ens.modes;
  const double e = ens.e_bar;
  rep.bound = 2.0 * n * std::sqrt(4.0 * e * e - 1.0);
  const double tol = 1e-9 * std::max(1.0, rep.bound);

  std::vector<double> t(static_cast<std::size_t>(ens.count));
  parallel_for(t.size(), [&](std::size_t i) {
    t[i] = trace_functional(random_energy_constrained_cm(ens, i));
  });
  rep.samples = ens.count;
  rep.max_t = -std::numeric_limits<double>::infinity();
  for (double x : t) {
    rep.max_t = std::max(rep.max_t, x);
    if (x > rep.bound + tol) ++rep.violations;
  }

  if (n == 2) {
    if (!(grid_step > 0.0 && grid_step <= 0.5)) {
      throw InvalidInput("grid step must lie in (0, 0.5]");
    }
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));
    rep.grid_max_t = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= steps; ++k) {
      const double f = static_cast<double>(k) / steps;
      // Mode energies from 1/2 up to 2E - 1/2, summing to 2E.
      const double e1 = 0.5 + f * (2.0 * e - 1.0);
      const double e2 = 2.0 * e - e1;
      const double tg = 2.0 * (std::sqrt(std::max(0.0, 4.0 * e1 * e1 - 1.0)) +
                               std::sqrt(std::max(0.0, 4.0 * e2 * e2 - 1.0)));
      ++rep.grid_points;
      if (tg > rep.bound + tol) ++rep.grid_violations;
      if (tg > rep.grid_max_t) {
        rep.grid_max_t = tg;
        rep.grid_argmax_fraction = f;
      }
    }
    rep.grid_max_at_equal_split =
        std::abs(rep.grid_argmax_fraction - 0.5) <= 0.5 * grid_step &&
        std::abs(rep.grid_max_t - rep.bound) <= tol;
  }
  rep.pass = rep.violations == 0 && rep.grid_violations == 0 &&
             (n != 2 || rep.grid_max_at_equal_split);
  return rep;
}

DirectionalReport verify_directional(const ProbeEnsemble& ens, double noise) {
  ens.validate();
  const ThermalChannel ch(noise);
  const double ns = ens.e_bar - 0.5;
  DirectionalReport rep;
  rep.thermal_derivative =
      directional_derivative(thermal_cm(ns, ens.modes), ns, ch);
  std::vector<double> dv(static_cast<std::size_t>(ens.count));
  parallel_for(dv.size(), [&](std::size_t i) {
    dv[i] = directional_derivative(random_energy_constrained_cm(ens, i), ns, ch);
  });
  rep.samples = ens.count;
  rep.max_derivative = -std::numeric_limits<double>::infinity();
  for (double x : dv) {
    rep.max_derivative = std::max(rep.max_derivative, x);
    if (x > rep.tolerance) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

LocalMaxReport verify_local_max(double ns, double noise,
                                const ProbeEnsemble& ens,
                                const std::vector<double>& blend,
                                const Ns0Options& ns0_opts) {
  ens.validate();
  if (!(ns > 0.0)) throw DomainError("local-max check needs N_s > 0");
  if (std::abs(ens.e_bar - (ns + 0.5)) > 1e-12 * (ns + 1.0)) {
    throw ConstraintError("ensemble energy must equal N_s + 1/2 per mode");
  }
  for (double t : blend) {
    if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("blend values must lie in (0, 1]");
  }
  const ThermalChannel ch(noise);
  LocalMaxReport rep;
  rep.ns = ns;
  rep.noise = noise;
  rep.blend = blend;

  try {
    rep.ns0 = find_ns0(noise, ns0_opts).ns0;
    rep.regime = ns > rep.ns0 ? "above-ns0" : "below-ns0";
  } catch (const NoRootError&) {
    rep.ns0 = std::numeric_limits<double>::quiet_NaN();
    rep.regime = "no-ns0";
  }

  const CovMatrix thermal = thermal_cm(ns, ens.modes);
  const double ic0 = coherent_information(thermal, ch);
  const std::size_t nb = blend.size();
  std::vector<double> diff(static_cast<std::size_t>(ens.count) * nb);
  std::vector<double> dir(static_cast<std::size_t>(ens.count));
  parallel_for(dir.size(), [&](std::size_t i) {
    const CovMatrix probe = random_energy_constrained_cm(ens, i);
    dir[i] = directional_derivative(probe, ns, ch);
    for (std::size_t b = 0; b < nb; ++b) {
      const double t = blend[b];
      const CovMatrix mixed((1.0 - t) * thermal.gamma() + t * probe.gamma());
      diff[i * nb + b] = coherent_information(mixed, ch) - ic0;
    }
  });
  rep.samples = static_cast<int>(diff.size());
  rep.max_difference = -std::numeric_limits<double>::infinity();
  for (double x : diff) {
    rep.max_difference = std::max(rep.max_difference, x);
    if (x > rep.tolerance) ++rep.positives;
  }
  rep.max_directional = -std::numeric_limits<double>::infinity();
  for (double x : dir) rep.max_directional = std::max(rep.max_directional, x);
  rep.pass = rep.regime != "above-ns0" || rep.positives == 0;
  return rep;
}

DeltaCiScan scan_delta_ci(double noise, const std::vector<double>& ns_grid,
                          PerturbationOrder order, const ShiftOptions& opts) {
  if (ns_grid.empty()) throw InvalidInput("empty N_s grid");
  DeltaCiScan scan;
  scan.noise = noise;
  scan.order = to_string(order);
  scan.rows.resize(ns_grid.size());
  parallel_for(ns_grid.size(), [&](std::size_t i) {
    const double ns = ns_grid[i];
    const double d = delta_ci(order, ns, noise, opts).delta_ci;
    scan.rows[i] = {ns, d, sign_of(d)};
  });
  int first = 0, last = 0;
  for (const auto& r : scan.rows) {
    if (r.sign == 0) continue;
    if (first == 0) first = r.sign;
    if (last != 0 && r.sign != last) ++scan.sign_changes;
    last = r.sign;
  }
  scan.shape_ok = scan.sign_changes == 1 && first > 0 && last < 0;
  const double ns_last = scan.rows.back().ns;
  scan.tail_scaled = std::pow(ns_last, 4) * scan.rows.back().delta_ci;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  if (order == PerturbationOrder::single) {
    c.resize(1, 1);
    c(0, 0) = 1.0;
  } else {
    c(1, 0) = 1.0;
  }
  scan.tail_asymptote = asymptotic_delta_ci(c);
  return scan;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) {
    throw InvalidInput("log grid needs 0 < lo < hi and n >= 2");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace thermocap
