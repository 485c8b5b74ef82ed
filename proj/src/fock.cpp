#include "thermocap/fock.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "thermocap/errors.hpp"
#include "thermocap/parallel.hpp"

namespace thermocap {

namespace {

constexpr std::size_t kNodeChunk = 16;
constexpr double kEigenFloor = 1e-14;

// Sums add(i, acc) over i in [0, n) in fixed chunks, then reduces the chunk
// partials in index order so the result does not depend on thread count.
template <class Add>
Eigen::MatrixXcd chunked_sum(std::size_t n, Eigen::Index rows,
                             Eigen::Index cols, Add&& add) {
  const std::size_t chunks = (n + kNodeChunk - 1) / kNodeChunk;
  std::vector<Eigen::MatrixXcd> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rows, cols);
    const std::size_t end = std::min(n, (c + 1) * kNodeChunk);
    for (std::size_t i = c * kNodeChunk; i < end; ++i) add(i, acc);
    partial[c] = std::move(acc);
  });
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(rows, cols);
  for (const auto& p : partial) total += p;
  return total;
}

void require_dimension(int d) {
  if (d < 2) throw InvalidInput("truncation dimension must be >= 2");
}

// Row-major flattening: element (q, r) -> q * d + r.
Eigen::VectorXcd flatten_row_major(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd t = m.transpose();
  return Eigen::Map<const Eigen::VectorXcd>(t.data(), t.size());
}

Eigen::VectorXd thermal_probabilities(double ns, int d) {
  Eigen::VectorXd p(d);
  if (ns == 0.0) {
    p.setZero();
    p(0) = 1.0;
    return p;
  }
  const double v = ns / (ns + 1.0);
  for (int k = 0; k < d; ++k) p(k) = (1.0 - v) * std::pow(v, k);
  return p;
}

// Columns sqrt(w_s) vec_rm(D_s Psi) over the quadrature nodes.
Eigen::MatrixXcd purified_columns(const Eigen::MatrixXcd& psi, double noise,
                                  const ChannelOptions& opts) {
  const int d = static_cast<int>(psi.rows());
  if (noise == 0.0) {
    Eigen::MatrixXcd a(d * d, 1);
    a.col(0) = flatten_row_major(psi);
    return a;
  }
  const auto rule = thermal_noise_quadrature(noise, opts.quadrature);
  Eigen::MatrixXcd a(d * d, static_cast<Eigen::Index>(rule.nodes.size()));
  parallel_for(rule.nodes.size(), [&](std::size_t s) {
    const auto& node = rule.nodes[s];
    a.col(static_cast<Eigen::Index>(s)) =
        std::sqrt(node.weight) *
        flatten_row_major(displacement_matrix(node.alpha, d) * psi);
  });
  return a;
}

double trace_mass(const FockDensity& rho) { return rho.trace(); }

void check_trace(double before, double after, const ChannelOptions& opts) {
  const double err = std::abs(after - before);
  if (err > opts.max_trace_error) {
    throw QuadratureError("channel changed the trace by " +
                          std::to_string(err) + " (limit " +
                          std::to_string(opts.max_trace_error) +
                          "); raise d or adjust the quadrature");
  }
}

// vec(D X D^dag) = (conj(D) (x) D) vec(X) in column-major vec.
Eigen::MatrixXcd channel_superoperator(double noise, int d,
                                       const ChannelOptions& opts) {
  const auto rule = thermal_noise_quadrature(noise, opts.quadrature);
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  return chunked_sum(rule.nodes.size(), dd, dd,
                     [&](std::size_t s, Eigen::MatrixXcd& acc) {
                       const auto& node = rule.nodes[s];
                       const Eigen::MatrixXcd dm =
                           displacement_matrix(node.alpha, d);
                       const Eigen::MatrixXcd dc = dm.conjugate();
                       for (int b = 0; b < d; ++b) {
                         for (int a = 0; a < d; ++a) {
                           acc.block(a * d, b * d, d, d) +=
                               node.weight * dc(a, b) * dm;
                         }
                       }
                     });
}

}  // namespace

void FockDensity::validate() const {
  if (modes != 1 && modes != 2) throw InvalidInput("modes must be 1 or 2");
  if (rho.rows() != dimension() || rho.cols() != dimension()) {
    throw InvalidInput("density matrix size does not match d and modes");
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    throw InvalidInput("density matrix is not Hermitian (" +
                       std::to_string(herm) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      rho, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidInput("density matrix has a negative eigenvalue");
  }
}

Eigen::MatrixXcd displacement_matrix(std::complex<double> alpha, int d) {
  require_dimension(d);
  const double x = std::norm(alpha);
  if (x == 0.0) return Eigen::MatrixXcd::Identity(d, d);
  const double lr = 0.5 * std::log(x);
  const std::complex<double> phase = alpha / std::sqrt(x);
  std::vector<double> lf(d);
  for (int n = 0; n < d; ++n) lf[n] = std::lgamma(n + 1.0);

  Eigen::MatrixXcd out(d, d);
  std::complex<double> lower_phase = 1.0;   // phase^a
  std::complex<double> upper_phase = 1.0;   // (-conj(phase))^a
  std::vector<double> lag(d);
  for (int a = 0; a < d; ++a) {
    // L_n^{(a)}(x), n = 0 .. d-1-a, by upward recurrence in n.
    const int count = d - a;
    lag[0] = 1.0;
    if (count > 1) lag[1] = 1.0 + a - x;
    for (int k = 1; k + 1 < count; ++k) {
      lag[k + 1] =
          ((2.0 * k + 1.0 + a - x) * lag[k] - (k + a) * lag[k - 1]) / (k + 1);
    }
    for (int n = 0; n < count; ++n) {
      const int m = n + a;
      const double mag =
          std::exp(0.5 * (lf[n] - lf[m]) + a * lr - 0.5 * x) * lag[n];
      out(m, n) = mag * lower_phase;
      if (a > 0) out(n, m) = mag * upper_phase;
    }
    lower_phase *= phase;
    upper_phase *= -std::conj(phase);
  }
  return out;
}

FockDensity thermal_fock(double ns, int d) {
  if (!(ns >= 0.0) || !std::isfinite(ns)) {
    throw DomainError("thermal mean photon number must be >= 0");
  }
  require_dimension(d);
  FockDensity f = diagonal_density(thermal_probabilities(ns, d), d, 1);
  f.truncation_deficit = ns == 0.0 ? 0.0 : std::pow(ns / (ns + 1.0), d);
  return f;
}

FockDensity number_state(int n, int d) {
  require_dimension(d);
  if (n < 0 || n >= d) throw InvalidInput("number state outside truncation");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  p(n) = 1.0;
  return diagonal_density(p, d, 1);
}

FockDensity diagonal_density(const Eigen::VectorXd& p, int d, int modes) {
  require_dimension(d);
  FockDensity f;
  f.d = d;
  f.modes = modes;
  if (p.size() != f.dimension()) {
    throw InvalidInput("probability vector length does not match d, modes");
  }
  f.rho = p.cast<std::complex<double>>().asDiagonal();
  f.truncation_deficit = std::max(0.0, 1.0 - p.sum());
  return f;
}

FockDensity apply_thermal_channel(const FockDensity& rho, double noise,
                                  const ChannelOptions& opts) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw DomainError("noise must be finite and >= 0");
  }
  if (noise == 0.0) return rho;
  const int d = rho.d;
  FockDensity out;
  out.d = d;
  out.modes = rho.modes;
  if (rho.modes == 1) {
    const auto rule = thermal_noise_quadrature(noise, opts.quadrature);
    out.rho = chunked_sum(rule.nodes.size(), d, d,
                          [&](std::size_t s, Eigen::MatrixXcd& acc) {
                            const auto& node = rule.nodes[s];
                            const Eigen::MatrixXcd dm =
                                displacement_matrix(node.alpha, d);
                            acc += node.weight * dm * rho.rho * dm.adjoint();
                          });
  } else if (rho.modes == 2) {
    const Eigen::MatrixXcd sup = channel_superoperator(noise, d, opts);
    const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
    // Element (q1 q2, r1 r2) of rho -> slices over one mode.
    Eigen::MatrixXcd cur = rho.rho;
    for (int mode = 0; mode < 2; ++mode) {
      Eigen::MatrixXcd slices(dd, dd);  // column = vec of one d x d slice
      for (int q = 0; q < d; ++q)
        for (int r = 0; r < d; ++r)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
              const Eigen::Index row = mode == 0 ? a * d + q : q * d + a;
              const Eigen::Index col = mode == 0 ? b * d + r : r * d + b;
              slices(b * d + a, q * d + r) = cur(row, col);
            }
      const Eigen::MatrixXcd mapped = sup * slices;
      for (int q = 0; q < d; ++q)
        for (int r = 0; r < d; ++r)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
              const Eigen::Index row = mode == 0 ? a * d + q : q * d + a;
              const Eigen::Index col = mode == 0 ? b * d + r : r * d + b;
              cur(row, col) = mapped(b * d + a, q * d + r);
            }
    }
    out.rho = std::move(cur);
  } else {
    throw InvalidInput("modes must be 1 or 2");
  }
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  const double before = trace_mass(rho);
  const double after = trace_mass(out);
  check_trace(before, after, opts);
  out.truncation_deficit = rho.truncation_deficit + (before - after);
  return out;
}

Eigen::MatrixXcd schmidt_matrix(const FockDensity& rho) {
  if (rho.modes != 1) throw InvalidInput("purification needs one mode");
  const int d = rho.d;
  Eigen::MatrixXcd off = rho.rho;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() <= 1e-15) {
    Eigen::VectorXd p = rho.rho.diagonal().real().cwiseMax(0.0);
    return p.cwiseSqrt().cast<std::complex<double>>().asDiagonal();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.rho);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-solver failed in purification");
  }
  const Eigen::VectorXd p = solver.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd psi = solver.eigenvectors();
  for (int i = 0; i < d; ++i) psi.col(i) *= std::sqrt(p(i));
  return psi;
}

FockDensity joint_after_channel_fock(const FockDensity& rho, double noise,
                                     const ChannelOptions& opts) {
  const Eigen::MatrixXcd a = purified_columns(schmidt_matrix(rho), noise, opts);
  FockDensity out;
  out.d = rho.d;
  out.modes = 2;
  out.rho = a * a.adjoint();
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  const double before = trace_mass(rho);
  const double after = trace_mass(out);
  check_trace(before, after, opts);
  out.truncation_deficit = rho.truncation_deficit + (before - after);
  return out;
}

Eigen::MatrixXcd environment_gram(const Eigen::MatrixXcd& x, double noise,
                                  int d, const ChannelOptions& opts) {
  require_dimension(d);
  if (x.rows() != d || x.cols() != d) {
    throw InvalidInput("environment_gram needs a single-mode operator");
  }
  if (noise == 0.0) {
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = x.trace();
    return g;
  }
  const auto rule = thermal_noise_quadrature(noise, opts.quadrature);
  const auto n = static_cast<Eigen::Index>(rule.nodes.size());
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  Eigen::MatrixXcd v(dd, n), y(dd, n);
  parallel_for(rule.nodes.size(), [&](std::size_t s) {
    const auto& node = rule.nodes[s];
    const Eigen::MatrixXcd k =
        std::sqrt(node.weight) * displacement_matrix(node.alpha, d);
    const Eigen::MatrixXcd kx = k * x;
    const auto col = static_cast<Eigen::Index>(s);
    v.col(col) = Eigen::Map<const Eigen::VectorXcd>(k.data(), dd);
    y.col(col) = Eigen::Map<const Eigen::VectorXcd>(kx.data(), dd);
  });
  // G_st = <vec K_t, vec(K_s X)>
  Eigen::MatrixXcd g = (v.adjoint() * y).transpose();
  return 0.5 * (g + g.adjoint());
}

double entropy_nats(const Eigen::VectorXd& eigenvalues, bool renormalize) {
  double total = 1.0;
  if (renormalize) {
    total = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
      if (eigenvalues(i) > 0.0) total += eigenvalues(i);
    }
    if (!(total > 0.0)) throw NumericError("density has zero trace");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double p = eigenvalues(i) / total;
    if (p > kEigenFloor) s -= p * std::log(p);
  }
  return s;
}

double entropy_nats(const Eigen::MatrixXcd& h, bool renormalize) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-solver failed in entropy");
  }
  return entropy_nats(Eigen::VectorXd(solver.eigenvalues()), renormalize);
}

double von_neumann_entropy(const FockDensity& rho, bool renormalize) {
  return entropy_nats(rho.rho, renormalize) / std::numbers::ln2;
}

double exchange_entropy_fock(const FockDensity& rho, double noise,
                             const ChannelOptions& opts) {
  if (rho.modes != 1) throw InvalidInput("exchange entropy needs one mode");
  const Eigen::MatrixXcd g = environment_gram(rho.rho, noise, rho.d, opts);
  check_trace(rho.trace(), g.trace().real(), opts);
  return entropy_nats(g) / std::numbers::ln2;
}

double coherent_information_fock(const FockDensity& rho, double noise,
                                 const ChannelOptions& opts) {
  if (noise == 0.0) return von_neumann_entropy(rho);
  return von_neumann_entropy(apply_thermal_channel(rho, noise, opts)) -
         exchange_entropy_fock(rho, noise, opts);
}

FockDensity perturbed_state(const PerturbationSpec& spec, double ns, int d) {
  spec.validate();
  require_dimension(d);
  if (!(ns > 0.0)) throw DomainError("perturbed_state needs N_s > 0");
  const auto n = spec.c.rows();
  if (n != 1 && n != 2) {
    throw InvalidInput("perturbed_state supports one or two modes");
  }
  const double eps = spec.epsilon;
  Eigen::VectorXd lam(d), phi(d), dl(d);
  for (int k = 0; k < d; ++k) {
    lam(k) = (1.0 / (ns + 1.0)) * std::pow(ns / (ns + 1.0), k);
    phi(k) = phi_k(ns, k);
    dl(k) = dlambda_k(ns, k);
  }
  Eigen::VectorXd p;
  if (n == 1) {
    p = lam + eps * spec.c(0, 0) * phi;
  } else {
    p.resize(d * d);
    for (int k1 = 0; k1 < d; ++k1) {
      for (int k2 = 0; k2 < d; ++k2) {
        p(k1 * d + k2) =
            lam(k1) * lam(k2) +
            eps * (spec.c(0, 0) * phi(k1) * lam(k2) +
                   spec.c(1, 1) * lam(k1) * phi(k2) +
                   spec.c(1, 0) * dl(k1) * dl(k2));
      }
    }
  }
  const double lo = p.minCoeff();
  if (lo < -1e-15) {
    throw EpsilonTooLarge("perturbed eigenvalue " + std::to_string(lo) +
                          " is negative; reduce epsilon");
  }
  FockDensity f = diagonal_density(p.cwiseMax(0.0), d, static_cast<int>(n));
  const double tail = std::pow(ns / (ns + 1.0), d);
  f.truncation_deficit = n == 1 ? tail : 1.0 - (1.0 - tail) * (1.0 - tail);
  return f;
}

PairIdentityReport check_pair_identity(int j, double ns, double noise, int d,
                                       PairIdentityPlacement placement,
                                       const ChannelOptions& opts) {
  if (j != 1 && j != 2) throw InvalidInput("j must be 1 or 2");
  if (!(ns > 0.0)) throw DomainError("check_pair_identity needs N_s > 0");
  require_dimension(d);
  const Eigen::VectorXd lam = thermal_probabilities(ns, d);
  const double v = ns / (ns + 1.0);

  // (a^dag b^dag)^j |k k> = (k+j)!/k! |k+j, k+j>
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd raised = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    psi(k, k) = std::sqrt(lam(k));
    if (k + j < d) {
      double f = 1.0;
      for (int i = 1; i <= j; ++i) f *= k + i;
      raised(k + j, k + j) = std::sqrt(lam(k)) * f;
    }
  }
  const Eigen::MatrixXcd a_psi = purified_columns(psi, noise, opts);
  const Eigen::MatrixXcd a_up = purified_columns(raised, noise, opts);
  const Eigen::MatrixXcd lhs = a_up * a_psi.adjoint();
  Eigen::MatrixXcd rhs = a_psi * a_psi.adjoint();

  const double scale = std::pow(v, -0.5 * j);
  for (int q = 0; q < d; ++q) {
    for (int r = 0; r < d; ++r) {
      const int n = placement == PairIdentityPlacement::reference ? r : q;
      double f = 1.0;
      for (int i = 0; i < j; ++i) f *= std::max(0, n - i);
      rhs.row(q * d + r) *= scale * f;
    }
  }
  PairIdentityReport rep;
  rep.j = j;
  rep.placement = placement;
  rep.residual = (lhs - rhs).norm();
  rep.lhs_norm = lhs.norm();
  return rep;
}

}  // namespace thermocap
