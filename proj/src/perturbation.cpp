#include "thermocap/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "thermocap/errors.hpp"
#include "thermocap/series.hpp"

namespace thermocap {

std::string to_string(Labeling l) {
  return l == Labeling::reference ? "reference" : "channel";
}

std::string to_string(SeriesMethod m) {
  switch (m) {
    case SeriesMethod::automatic: return "automatic";
    case SeriesMethod::moments: return "moments";
    case SeriesMethod::direct: return "direct";
  }
  return "?";
}

std::string to_string(PerturbationOrder o) {
  return o == PerturbationOrder::single ? "single" : "two-mode";
}

Labeling parse_labeling(const std::string& s) {
  if (s == "reference") return Labeling::reference;
  if (s == "channel") return Labeling::channel;
  throw InvalidInput("unknown labeling '" + s + "'");
}

SeriesMethod parse_series_method(const std::string& s) {
  if (s == "automatic") return SeriesMethod::automatic;
  if (s == "moments") return SeriesMethod::moments;
  if (s == "direct") return SeriesMethod::direct;
  throw InvalidInput("unknown series method '" + s + "'");
}

PerturbationOrder parse_order(const std::string& s) {
  if (s == "single") return PerturbationOrder::single;
  if (s == "two-mode" || s == "two_mode") return PerturbationOrder::two_mode;
  throw InvalidInput("unknown perturbation order '" + s + "'");
}

void PerturbationSpec::validate() const {
  if (c.rows() == 0 || c.rows() != c.cols()) {
    throw InvalidInput("coefficient matrix must be square and non-empty");
  }
  if (!c.allFinite() || !std::isfinite(epsilon)) {
    throw InvalidInput("perturbation coefficients must be finite");
  }
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw InvalidInput("coefficient matrix must be symmetric");
  }
  if (c.cwiseAbs().maxCoeff() == 0.0) {
    throw InvalidInput("at least one coefficient must be nonzero");
  }
}

namespace {

void require_positive_ns(double ns) {
  if (!(ns > 0.0) || !std::isfinite(ns)) {
    throw DomainError("perturbation formulas need finite N_s > 0");
  }
}

double geometric_weight(double v, long k) {
  return (1.0 - v) * std::pow(v, static_cast<double>(k));
}

long estimated_cutoff(double nbar) {
  return static_cast<long>(40.0 * (nbar + 1.0)) + 50;
}

// Normal-mode data of the noisy joint state, arranged so that k indexes the
// mode multiplying cosh^2 r in the perturbation polynomial.
struct JointModes {
  double ns;
  double one_minus_vs;
  double c2, s2, cs;
  double nbar_k, nbar_m;
  double v_k, v_m;
};

JointModes joint_modes(double ns, double noise, Labeling labeling) {
  require_positive_ns(ns);
  const auto sd = squeeze_diagonalization(ns, noise);
  JointModes jm{};
  jm.ns = ns;
  jm.one_minus_vs = 1.0 / (ns + 1.0);
  const double c = std::cosh(sd.r);
  const double s = std::sinh(sd.r);
  jm.c2 = c * c;
  jm.s2 = s * s;
  jm.cs = c * s;
  if (labeling == Labeling::reference) {
    jm.nbar_k = sd.mean_B();
    jm.nbar_m = sd.mean_A();
    jm.v_k = sd.v_B;
    jm.v_m = sd.v_A;
  } else {
    jm.nbar_k = sd.mean_A();
    jm.nbar_m = sd.mean_B();
    jm.v_k = sd.v_A;
    jm.v_m = sd.v_B;
  }
  jm.nbar_k = std::max(0.0, jm.nbar_k);
  jm.nbar_m = std::max(0.0, jm.nbar_m);
  jm.v_k = std::max(0.0, jm.v_k);
  jm.v_m = std::max(0.0, jm.v_m);
  return jm;
}

// Diagonal of the rotated reference number operator: c^2 k + s^2 (m + 1).
Poly2 rotated_number(const JointModes& jm) {
  return jm.c2 * Poly2::k() + jm.s2 * Poly2::m() + Poly2::constant(jm.s2);
}

// Bracketed polynomial of the single-mode joint correction, without the
// (1 - v)^2 lambda prefactor.
Poly2 single_polynomial(const JointModes& jm) {
  const Poly2 d = rotated_number(jm);
  const Poly2 k = Poly2::k();
  const Poly2 m = Poly2::m();
  const Poly2 one = Poly2::constant(1.0);
  const double ns = jm.ns;
  const Poly2 quad = (jm.c2 * jm.c2) * (k * (k - one)) +
                     (jm.s2 * jm.s2) * ((m + one) * (m + 2.0 * one)) +
                     (4.0 * jm.c2 * jm.s2) * (k * (m + one));
  return Poly2::constant(2.0) - (4.0 / ns) * d + (1.0 / (ns * ns)) * quad;
}

// Per-mode first-derivative factor c^2 k + s^2 (m + 1) over N_s, minus one.
Poly2 first_derivative_polynomial(const JointModes& jm) {
  return (1.0 / jm.ns) * rotated_number(jm) - Poly2::constant(1.0);
}

bool use_direct(const ShiftOptions& opts, double cost) {
  switch (opts.method) {
    case SeriesMethod::direct: return true;
    case SeriesMethod::moments: return false;
    case SeriesMethod::automatic:
      return cost <= static_cast<double>(opts.max_terms);
  }
  return false;
}

}  // namespace

double phi_k(double ns, long k) {
  require_positive_ns(ns);
  if (k < 0) throw InvalidInput("photon number must be >= 0");
  const double v = ns / (ns + 1.0);
  const double omv = 1.0 / (ns + 1.0);
  const double kd = static_cast<double>(k);
  return geometric_weight(v, k) * omv * omv *
         (2.0 - 4.0 * kd / ns + kd * (kd - 1.0) / (ns * ns));
}

double dlambda_k(double ns, long k) {
  require_positive_ns(ns);
  if (k < 0) throw InvalidInput("photon number must be >= 0");
  const double v = ns / (ns + 1.0);
  return geometric_weight(v, k) / (ns + 1.0) *
         (static_cast<double>(k) / ns - 1.0);
}

ShiftValue input_entropy_shift(double ns, const ShiftOptions& opts) {
  require_positive_ns(ns);
  const double v = ns / (ns + 1.0);
  const double omv = 1.0 / (ns + 1.0);
  const double pref = omv * omv * omv * omv;
  ShiftValue out;
  if (use_direct(opts, static_cast<double>(estimated_cutoff(ns)))) {
    auto term = [&](long k) {
      const double kd = static_cast<double>(k);
      const double p = 2.0 - 4.0 * kd / ns + kd * (kd - 1.0) / (ns * ns);
      return geometric_weight(v, k) * p * p;
    };
    const auto s = sum_geometric(term, v, 4, opts.rel_tol,
                                 static_cast<long>(5.0 * (ns + 1.0)) + 10,
                                 opts.max_terms);
    out.value = -0.5 * pref * s.value;
    out.truncation_error_bound = 0.5 * pref * s.tail_bound;
    out.terms = s.terms;
    out.method_used = SeriesMethod::direct;
  } else {
    const Poly2 k = Poly2::k();
    const Poly2 p = Poly2::constant(2.0) - (4.0 / ns) * k +
                    (1.0 / (ns * ns)) * (k * (k - Poly2::constant(1.0)));
    out.value = -0.5 * pref * (p * p).expectation(ns, 0.0);
    out.method_used = SeriesMethod::moments;
  }
  return out;
}

double input_entropy_shift_two_mode(double ns) {
  require_positive_ns(ns);
  const double x = 1.0 / (ns * (ns + 1.0));
  return -0.5 * x * x;
}

double output_entropy_shift_single(double ns, double noise) {
  const double np = ns + noise;
  if (!(np > 0.0)) throw DomainError("output shift needs N_s + N > 0");
  const double x = 2.0 / (np * (np + 1.0));
  return -0.5 * x * x;
}

double output_entropy_shift_two_mode(double ns, double noise) {
  const double np = ns + noise;
  if (!(np > 0.0)) throw DomainError("output shift needs N_s + N > 0");
  return -1.0 / (2.0 * np * np * (np + 1.0) * (np + 1.0));
}

double lambda_km(double ns, double noise, long k, long m, Labeling labeling) {
  const auto jm = joint_modes(ns, noise, labeling);
  return geometric_weight(jm.v_k, k) * geometric_weight(jm.v_m, m);
}

double phi_prime_km(double ns, double noise, long k, long m,
                    Labeling labeling) {
  if (k < 0 || m < 0) throw InvalidInput("photon numbers must be >= 0");
  const auto jm = joint_modes(ns, noise, labeling);
  const double kd = static_cast<double>(k);
  const double md = static_cast<double>(m);
  const double bracket =
      2.0 - 4.0 * (kd * jm.c2 + (md + 1.0) * jm.s2) / ns +
      (kd * (kd - 1.0) * jm.c2 * jm.c2 +
       (md + 1.0) * (md + 2.0) * jm.s2 * jm.s2 +
       4.0 * kd * (md + 1.0) * jm.s2 * jm.c2) /
          (ns * ns);
  const double lam = geometric_weight(jm.v_k, k) * geometric_weight(jm.v_m, m);
  return lam * jm.one_minus_vs * jm.one_minus_vs * bracket;
}

ShiftValue exchange_entropy_shift_single(double ns, double noise,
                                         const ShiftOptions& opts) {
  const auto jm = joint_modes(ns, noise, opts.labeling);
  const double omv = jm.one_minus_vs;
  const double pref = omv * omv * omv * omv;
  const Poly2 p = single_polynomial(jm);
  const double cost = static_cast<double>(estimated_cutoff(jm.nbar_k)) *
                      static_cast<double>(estimated_cutoff(jm.nbar_m));
  ShiftValue out;
  if (use_direct(opts, cost)) {
    long terms = 0;
    double inner_tail = 0.0;
    auto row = [&](long k) {
      const double kd = static_cast<double>(k);
      auto term = [&](long m) {
        const double val = p(kd, static_cast<double>(m));
        return geometric_weight(jm.v_m, m) * val * val;
      };
      const auto s = sum_geometric(
          term, jm.v_m, 4, opts.rel_tol,
          static_cast<long>(5.0 * (jm.nbar_m + 1.0)) + 10, opts.max_terms);
      terms += s.terms;
      if (terms > opts.max_terms) {
        throw TruncationError("exchange series exceeded term budget");
      }
      const double w = geometric_weight(jm.v_k, k);
      inner_tail += w * s.tail_bound;
      return w * s.value;
    };
    const auto s = sum_geometric(
        row, jm.v_k, 4, opts.rel_tol,
        static_cast<long>(5.0 * (jm.nbar_k + 1.0)) + 10, opts.max_terms);
    out.value = -0.5 * pref * s.value;
    out.truncation_error_bound = 0.5 * pref * (s.tail_bound + inner_tail);
    out.terms = terms;
    out.method_used = SeriesMethod::direct;
  } else {
    out.value = -0.5 * pref * (p * p).expectation(jm.nbar_k, jm.nbar_m);
    out.method_used = SeriesMethod::moments;
  }
  return out;
}

Eigen::MatrixXd degenerate_block(double ns, double noise, int big_k,
                                 int big_m, Labeling labeling) {
  if (big_k < 0 || big_m < 0) throw InvalidInput("block labels must be >= 0");
  const auto jm = joint_modes(ns, noise, labeling);
  const Poly2 dpoly = first_derivative_polynomial(jm);
  const int nk = big_k + 1;
  const int nm = big_m + 1;
  auto index = [nm](int k1, int m1) { return k1 * nm + m1; };
  const double lam =
      std::pow(1.0 - jm.v_k, 2) * std::pow(jm.v_k, big_k) *
      std::pow(1.0 - jm.v_m, 2) * std::pow(jm.v_m, big_m);
  const double omv = jm.one_minus_vs;
  const double scale = lam * omv * omv;
  const double hop = jm.cs * jm.cs / (ns * ns);

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nk * nm, nk * nm);
  for (int k1 = 0; k1 <= big_k; ++k1) {
    for (int m1 = 0; m1 <= big_m; ++m1) {
      const int k2 = big_k - k1;
      const int m2 = big_m - m1;
      const int i = index(k1, m1);
      block(i, i) = scale * dpoly(k1, m1) * dpoly(k2, m2);
      // Mode 1 gains a (k, m) pair while mode 2 loses one.
      if (k1 < big_k && m1 < big_m) {
        const int j = index(k1 + 1, m1 + 1);
        const double e =
            scale * hop *
            std::sqrt(static_cast<double>(k1 + 1) * (m1 + 1) * k2 * m2);
        block(i, j) = e;
        block(j, i) = e;
      }
    }
  }
  return block;
}

ShiftValue exchange_entropy_shift_two_mode(double ns, double noise,
                                           const ShiftOptions& opts) {
  const auto jm = joint_modes(ns, noise, opts.labeling);
  const double omv = jm.one_minus_vs;
  const double pref = omv * omv * omv * omv;
  const Poly2 dpoly = first_derivative_polynomial(jm);
  const double hop = jm.cs * jm.cs / (ns * ns);
  const double ck = static_cast<double>(estimated_cutoff(jm.nbar_k));
  const double cm = static_cast<double>(estimated_cutoff(jm.nbar_m));
  ShiftValue out;
  if (use_direct(opts, 0.25 * ck * ck * cm * cm)) {
    // Sum over degenerate blocks of lambda_block * ||P_block||_F^2.  Block
    // weights are (1 - v)^2 v^K per mode; the Frobenius norm collects the
    // diagonal products and both orientations of each in-block hop.
    long terms = 0;
    double inner_tail = 0.0;
    auto block_row = [&](long big_k) {
      auto block_term = [&](long big_m) {
        double frob = 0.0;
        for (long k1 = 0; k1 <= big_k; ++k1) {
          const long k2 = big_k - k1;
          for (long m1 = 0; m1 <= big_m; ++m1) {
            const long m2 = big_m - m1;
            const double d = dpoly(k1, m1) * dpoly(k2, m2);
            frob += d * d;
            if (k2 > 0 && m2 > 0) {
              const double e2 = hop * hop * static_cast<double>(k1 + 1) *
                                (m1 + 1) * k2 * m2;
              frob += 2.0 * e2;
            }
          }
        }
        terms += (big_k + 1) * (big_m + 1);
        if (terms > opts.max_terms) {
          throw TruncationError("two-mode block sum exceeded term budget");
        }
        const double w = (1.0 - jm.v_m) * (1.0 - jm.v_m) *
                         std::pow(jm.v_m, static_cast<double>(big_m));
        return w * frob;
      };
      const auto s = sum_geometric(
          block_term, jm.v_m, 6, opts.rel_tol,
          static_cast<long>(10.0 * (jm.nbar_m + 1.0)) + 10, opts.max_terms);
      const double w = (1.0 - jm.v_k) * (1.0 - jm.v_k) *
                       std::pow(jm.v_k, static_cast<double>(big_k));
      inner_tail += w * s.tail_bound;
      return w * s.value;
    };
    const auto s = sum_geometric(
        block_row, jm.v_k, 6, opts.rel_tol,
        static_cast<long>(10.0 * (jm.nbar_k + 1.0)) + 10, opts.max_terms);
    out.value = -0.5 * pref * s.value;
    out.truncation_error_bound = 0.5 * pref * (s.tail_bound + inner_tail);
    out.terms = terms;
    out.method_used = SeriesMethod::direct;
  } else {
    // Diagonal products factorize over the two modes; the hop term pairs
    // E[(k+1)(m+1)] of one mode with E[k m] of the other.
    const double ed2 = (dpoly * dpoly).expectation(jm.nbar_k, jm.nbar_m);
    const double nk = jm.nbar_k;
    const double nm = jm.nbar_m;
    const double hops =
        2.0 * hop * hop * nk * nm * (nk + 1.0) * (nm + 1.0);
    out.value = -0.5 * pref * (ed2 * ed2 + hops);
    out.method_used = SeriesMethod::moments;
  }
  return out;
}

DeltaCiReport delta_ci_single(double ns, double noise,
                              const ShiftOptions& opts) {
  DeltaCiReport r;
  r.ns = ns;
  r.noise = noise;
  r.order = "single";
  const auto in = input_entropy_shift(ns, opts);
  const auto ex = exchange_entropy_shift_single(ns, noise, opts);
  r.input_shift = in.value;
  r.output_shift = output_entropy_shift_single(ns, noise);
  r.exchange_shift = ex.value;
  r.delta_ci = r.output_shift - r.exchange_shift;
  r.truncation_error_bound = ex.truncation_error_bound;
  return r;
}

DeltaCiReport delta_ci_two_mode(double ns, double noise,
                                const ShiftOptions& opts) {
  DeltaCiReport r;
  r.ns = ns;
  r.noise = noise;
  r.order = "two-mode";
  const auto ex = exchange_entropy_shift_two_mode(ns, noise, opts);
  r.input_shift = input_entropy_shift_two_mode(ns);
  r.output_shift = output_entropy_shift_two_mode(ns, noise);
  r.exchange_shift = ex.value;
  r.delta_ci = r.output_shift - r.exchange_shift;
  r.truncation_error_bound = ex.truncation_error_bound;
  return r;
}

DeltaCiReport delta_ci(PerturbationOrder order, double ns, double noise,
                       const ShiftOptions& opts) {
  return order == PerturbationOrder::single
             ? delta_ci_single(ns, noise, opts)
             : delta_ci_two_mode(ns, noise, opts);
}

DeltaCiReport delta_ci_general(const PerturbationSpec& spec, double ns,
                               double noise, const ShiftOptions& opts) {
  spec.validate();
  DeltaCiReport r;
  r.ns = ns;
  r.noise = noise;
  r.order = "general";
  double wd = 0.0;
  double wo = 0.0;
  const auto n = spec.c.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    wd += spec.c(i, i) * spec.c(i, i);
    for (Eigen::Index j = 0; j < i; ++j) wo += spec.c(i, j) * spec.c(i, j);
  }
  auto add = [&r](const DeltaCiReport& part, double w) {
    r.input_shift += w * part.input_shift;
    r.output_shift += w * part.output_shift;
    r.exchange_shift += w * part.exchange_shift;
    r.truncation_error_bound += w * part.truncation_error_bound;
  };
  if (wd > 0.0) add(delta_ci_single(ns, noise, opts), wd);
  if (wo > 0.0) add(delta_ci_two_mode(ns, noise, opts), wo);
  r.delta_ci = r.output_shift - r.exchange_shift;
  return r;
}

double asymptotic_delta_ci(const Eigen::MatrixXd& c) {
  constexpr double single = AsymptoticConstants::single_output -
                            AsymptoticConstants::single_exchange;
  constexpr double pair = AsymptoticConstants::two_mode_output -
                          AsymptoticConstants::two_mode_exchange;
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    total += single * c(i, i) * c(i, i);
    for (Eigen::Index j = 0; j < i; ++j) total += pair * c(i, j) * c(i, j);
  }
  return total;
}

double asymptotic_delta_ci_closed_form(const Eigen::MatrixXd& c) {
  double diag = 0.0;
  double off = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    diag += c(i, i) * c(i, i);
    for (Eigen::Index j = 0; j < i; ++j) off += c(i, j) * c(i, j);
  }
  return -(5.0 / 16.0) * (4.0 * diag + off);
}

Ns0Result find_ns0(double noise, const Ns0Options& opts) {
  if (!(noise > 0.0)) throw DomainError("find_ns0 needs N > 0");
  if (opts.grid_points < 2 || !(opts.grid_lo > 0.0) ||
      !(opts.grid_hi > opts.grid_lo)) {
    throw InvalidInput("bad N_s scan grid");
  }
  auto f = [&](double ns) {
    return delta_ci(opts.order, ns, noise, opts.shift).delta_ci;
  };
  const int n = opts.grid_points;
  const double step = std::log(opts.grid_hi / opts.grid_lo) / (n - 1);
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = opts.grid_lo * std::exp(step * i);
    ys[i] = f(xs[i]);
  }
  Ns0Result res;
  int first = -1;
  for (int i = 0; i + 1 < n; ++i) {
    if ((ys[i] > 0.0) != (ys[i + 1] > 0.0)) {
      ++res.sign_changes;
      if (first < 0) first = i;
    }
  }
  if (first < 0) {
    std::ostringstream os;
    os << "no sign change of delta_ci on [" << opts.grid_lo << ", "
       << opts.grid_hi << "] at N = " << noise;
    throw NoRootError(os.str());
  }
  if (res.sign_changes > 1) {
    res.warnings.push_back("delta_ci changes sign " +
                           std::to_string(res.sign_changes) +
                           " times on the scan grid; smallest root taken");
  }
  for (int i = 0; i < n; ++i) {
    const bool below = i <= first;
    if (below != (ys[i] > 0.0)) {
      res.shape_ok = false;
      break;
    }
  }
  if (!res.shape_ok) {
    res.warnings.push_back(
        "delta_ci is not positive below and negative above the root");
  }

  double lo = xs[first];
  double hi = xs[first + 1];
  double flo = ys[first];
  while (hi / lo - 1.0 > opts.rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.ns0 = std::sqrt(lo * hi);
  res.residual = f(res.ns0);
  return res;
}

double nc_equation(double noise, const Ns0Options& opts) {
  const double ns0 = find_ns0(noise, opts).ns0;
  const double mi = mutual_information(thermal_cm(ns0, 1), ThermalChannel(noise));
  return mi + (1.0 + std::log(noise)) / std::numbers::ln2;
}

NcResult solve_nc(const NcOptions& opts) {
  if (!(opts.noise_lo > 0.0) || !(opts.noise_hi > opts.noise_lo) ||
      opts.scan_points < 2) {
    throw InvalidInput("bad noise scan for N_c");
  }
  NcResult res;
  const int n = opts.scan_points;
  const double step = (opts.noise_hi - opts.noise_lo) / (n - 1);
  double prev_x = std::numeric_limits<double>::quiet_NaN();
  double prev_f = 0.0;
  double lo = 0.0, hi = 0.0, flo = 0.0;
  bool found = false;
  for (int i = 0; i < n && !found; ++i) {
    const double x = opts.noise_lo + step * i;
    double fx;
    try {
      fx = nc_equation(x, opts.ns0);
    } catch (const NoRootError&) {
      res.skipped_noise.push_back(x);
      continue;
    }
    if (!std::isnan(prev_x) && ((prev_f > 0.0) != (fx > 0.0))) {
      lo = prev_x;
      hi = x;
      flo = prev_f;
      found = true;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (!found) {
    throw NoRootError("N_c equation has no sign change on the noise scan");
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = nc_equation(mid, opts.ns0);
    ++res.iterations;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  res.nc = 0.5 * (lo + hi);
  res.ns0 = find_ns0(res.nc, opts.ns0).ns0;
  res.mutual_information =
      mutual_information(thermal_cm(res.ns0, 1), ThermalChannel(res.nc));
  res.bound = asymptotic_capacity(res.nc);
  res.residual = res.mutual_information - res.bound;
  return res;
}

const std::string& certification_caveat() {
  static const std::string text =
      "valid to the lowest non-vanishing order in 1/N_s of the perturbation "
      "expansion; assumes higher-order terms do not remove the maximality of "
      "the thermal input";
  return text;
}

namespace {

std::string options_key(const NcOptions& o) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(o.ns0.order) << '|' << to_string(o.ns0.shift.labeling)
     << '|' << to_string(o.ns0.shift.method) << '|' << o.ns0.shift.rel_tol
     << '|' << o.ns0.grid_lo << '|' << o.ns0.grid_hi << '|'
     << o.ns0.grid_points << '|' << o.ns0.rel_tol << '|' << o.noise_lo << '|'
     << o.noise_hi << '|' << o.scan_points << '|' << o.tol;
  return os.str();
}

double cached_nc(const NcOptions& opts) {
  static std::mutex mu;
  static std::map<std::string, double> cache;
  const std::string key = options_key(opts);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double nc = solve_nc(opts).nc;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, nc);
  return nc;
}

}  // namespace

CapacityCertificate certify_capacity(double noise, const NcOptions& opts) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw DomainError("noise must be finite and >= 0");
  }
  CapacityCertificate cert;
  cert.noise = noise;
  cert.q = asymptotic_capacity(noise);
  cert.unbounded = std::isinf(cert.q);
  cert.nc = cached_nc(opts);
  cert.caveat = certification_caveat();
  cert.ns0 = std::numeric_limits<double>::quiet_NaN();
  cert.mi_bound = std::numeric_limits<double>::quiet_NaN();
  if (noise > 0.0) {
    try {
      cert.ns0 = find_ns0(noise, opts.ns0).ns0;
      cert.mi_bound =
          mutual_information(thermal_cm(cert.ns0, 1), ThermalChannel(noise));
    } catch (const NoRootError&) {
      // no zero crossing at this noise; evidence fields stay NaN
    }
  }
  cert.certified = cert.q == 0.0 || noise <= cert.nc;
  return cert;
}

}  // namespace thermocap
