#include "thermocap/fock_perturbation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "thermocap/errors.hpp"
#include "thermocap/parallel.hpp"

namespace thermocap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// (ln x - ln y) / (x - y), with the confluent limit 1/x.
double log_divided_difference(double x, double lx, double y, double ly) {
  const double diff = x - y;
  if (std::abs(diff) <= 1e-9 * std::max(x, y)) return 2.0 / (x + y);
  return (lx - ly) / diff;
}

struct Eigenbasis {
  Eigen::VectorXd mu;
  Eigen::VectorXd log_mu;
  Eigen::MatrixXd weight;  // |U^dag h1 U|^2 restricted to kept eigenvalues
};

Eigenbasis project(const Eigen::MatrixXcd& h0, const Eigen::MatrixXcd& h1,
                   double rank_tol) {
  if (h0.rows() != h0.cols() || h1.rows() != h0.rows() ||
      h1.cols() != h0.cols()) {
    throw InvalidInput("entropy expansion needs equal square matrices");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h0);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigen-solver failed in entropy expansion");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double top = ev.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rank_tol * top) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXcd u(h0.rows(), r);
  Eigenbasis eb;
  eb.mu.resize(r);
  eb.log_mu.resize(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    u.col(i) = solver.eigenvectors().col(keep[i]);
    eb.mu(i) = ev(keep[i]);
    eb.log_mu(i) = std::log(eb.mu(i));
  }
  const Eigen::MatrixXcd g = u.adjoint() * h1 * u;
  eb.weight = g.cwiseAbs2();
  return eb;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double central_second_difference(double sp, double sm, double s0,
                                 double eps) {
  return (sp + sm - 2.0 * s0) / (2.0 * eps * eps);
}

ShiftComparison compare(std::string name, double analytic, double fd,
                        double coef, double tol) {
  ShiftComparison c;
  c.name = std::move(name);
  c.analytic = analytic;
  c.oracle_fd = fd;
  c.oracle_coefficient = coef;
  c.oracle = std::isnan(fd) ? coef : fd;
  c.rel_diff = std::abs(analytic - c.oracle) / std::abs(c.oracle);
  c.within_tolerance = c.rel_diff <= tol;
  return c;
}

FockDensity diagonal_operator(const Eigen::VectorXd& p, int d) {
  FockDensity f;
  f.d = d;
  f.modes = 1;
  f.rho = p.cast<std::complex<double>>().asDiagonal();
  return f;
}

}  // namespace

double entropy_second_order(const Eigen::MatrixXcd& h0,
                            const Eigen::MatrixXcd& h1, double rank_tol,
                            int* rank) {
  const Eigenbasis eb = project(h0, h1, rank_tol);
  const auto r = eb.mu.size();
  if (rank) *rank = static_cast<int>(r);
  double total = 0.0;
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      total += eb.weight(a, b) * log_divided_difference(
                                     eb.mu(a), eb.log_mu(a), eb.mu(b),
                                     eb.log_mu(b));
    }
  }
  return -0.5 * total;
}

double entropy_second_order_product(const Eigen::MatrixXcd& h0,
                                    const Eigen::MatrixXcd& h1,
                                    double rank_tol, int* rank) {
  const Eigenbasis eb = project(h0, h1, rank_tol);
  const auto r = eb.mu.size();
  if (rank) *rank = static_cast<int>(r);
  // Eigenvalues of h0 (x) h0 are mu_a mu_b; the perturbation element between
  // (a, b) and (c, d) is g_ac g_bd.
  std::vector<double> partial(static_cast<std::size_t>(r), 0.0);
  parallel_for(static_cast<std::size_t>(r), [&](std::size_t ai) {
    const auto a = static_cast<Eigen::Index>(ai);
    double acc = 0.0;
    for (Eigen::Index b = 0; b < r; ++b) {
      const double x = eb.mu(a) * eb.mu(b);
      const double lx = eb.log_mu(a) + eb.log_mu(b);
      for (Eigen::Index c = 0; c < r; ++c) {
        const double wac = eb.weight(a, c);
        if (wac == 0.0) continue;
        for (Eigen::Index d = 0; d < r; ++d) {
          const double y = eb.mu(c) * eb.mu(d);
          const double ly = eb.log_mu(c) + eb.log_mu(d);
          acc += wac * eb.weight(b, d) * log_divided_difference(x, lx, y, ly);
        }
      }
    }
    partial[ai] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return -0.5 * total;
}

PerturbCompareReport perturb_compare(const PerturbCompareConfig& cfg) {
  if (!(cfg.ns > 0.0) || !(cfg.noise > 0.0)) {
    throw DomainError("perturb_compare needs N_s > 0 and N > 0");
  }
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("epsilon must be > 0");
  if (cfg.dim < 2 || cfg.input_dim < 2) {
    throw InvalidInput("truncation dimensions must be >= 2");
  }
  PerturbCompareReport rep;
  rep.config = cfg;
  rep.quadrature_raw_mass =
      thermal_noise_quadrature(cfg.noise, cfg.channel.quadrature).raw_mass;
  const double eps = cfg.epsilon;
  const double ns = cfg.ns;
  const bool two = cfg.order == PerturbationOrder::two_mode;

  // Input-state quantities at the input truncation.
  {
    const int d = cfg.input_dim;
    Eigen::VectorXd lam(d), pert(d);
    for (int k = 0; k < d; ++k) {
      lam(k) = (1.0 / (ns + 1.0)) * std::pow(ns / (ns + 1.0), k);
      pert(k) = two ? dlambda_k(ns, k) : phi_k(ns, k);
    }
    double fd;
    double coef = 0.0;
    for (int k = 0; k < d; ++k) coef += pert(k) * pert(k) / lam(k);
    if (two) {
      coef = -0.5 * coef * coef;
      Eigen::VectorXd l2(d * d), p2(d * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          l2(i * d + j) = lam(i) * lam(j);
          p2(i * d + j) = pert(i) * pert(j);
        }
      fd = central_second_difference(entropy_nats(Eigen::VectorXd(l2 + eps * p2)),
                                     entropy_nats(Eigen::VectorXd(l2 - eps * p2)),
                                     entropy_nats(l2), eps);
    } else {
      coef = -0.5 * coef;
      fd = central_second_difference(entropy_nats(Eigen::VectorXd(lam + eps * pert)),
                                     entropy_nats(Eigen::VectorXd(lam - eps * pert)),
                                     entropy_nats(lam), eps);
    }
    const double analytic = two ? input_entropy_shift_two_mode(ns)
                                : input_entropy_shift(ns, cfg.shift).value;
    rep.shifts.push_back(compare("input", analytic, fd, coef, cfg.rel_tol));
  }

  const int d = cfg.dim;
  Eigen::VectorXd lam(d), pert(d);
  for (int k = 0; k < d; ++k) {
    lam(k) = (1.0 / (ns + 1.0)) * std::pow(ns / (ns + 1.0), k);
    pert(k) = two ? dlambda_k(ns, k) : phi_k(ns, k);
  }
  const FockDensity rho0 = diagonal_operator(lam, d);
  const FockDensity rho1 = diagonal_operator(pert, d);

  // Output state: the channel is linear, so E(rho0 + eps rho1) splits.
  {
    const FockDensity e0 = apply_thermal_channel(rho0, cfg.noise, cfg.channel);
    const FockDensity e1 = apply_thermal_channel(rho1, cfg.noise, cfg.channel);
    rep.channel_trace_error =
        std::max(rep.channel_trace_error, std::abs(e0.trace() - rho0.trace()));
    double fd, coef;
    if (two) {
      const Eigen::MatrixXcd a = kron(e0.rho, e0.rho);
      const Eigen::MatrixXcd b = kron(e1.rho, e1.rho);
      fd = central_second_difference(
          entropy_nats(Eigen::MatrixXcd(a + eps * b)),
          entropy_nats(Eigen::MatrixXcd(a - eps * b)), entropy_nats(a), eps);
      coef = entropy_second_order_product(e0.rho, e1.rho, cfg.rank_tol);
    } else {
      fd = central_second_difference(
          entropy_nats(Eigen::MatrixXcd(e0.rho + eps * e1.rho)),
          entropy_nats(Eigen::MatrixXcd(e0.rho - eps * e1.rho)),
          entropy_nats(e0.rho), eps);
      coef = entropy_second_order(e0.rho, e1.rho, cfg.rank_tol);
    }
    const double analytic = two ? output_entropy_shift_two_mode(ns, cfg.noise)
                                : output_entropy_shift_single(ns, cfg.noise);
    rep.shifts.push_back(compare("output", analytic, fd, coef, cfg.rel_tol));
  }

  // Reference + output state through the environment Gram matrix, which is
  // linear in the input.
  {
    const Eigen::MatrixXcd g0 =
        environment_gram(rho0.rho, cfg.noise, d, cfg.channel);
    const Eigen::MatrixXcd g1 =
        environment_gram(rho1.rho, cfg.noise, d, cfg.channel);
    rep.channel_trace_error = std::max(
        rep.channel_trace_error, std::abs(g0.trace().real() - rho0.trace()));
    double fd = kNaN;
    double coef;
    int rank = 0;
    if (two) {
      coef = entropy_second_order_product(g0, g1, cfg.rank_tol, &rank);
    } else {
      fd = central_second_difference(
          entropy_nats(Eigen::MatrixXcd(g0 + eps * g1)),
          entropy_nats(Eigen::MatrixXcd(g0 - eps * g1)), entropy_nats(g0),
          eps);
      coef = entropy_second_order(g0, g1, cfg.rank_tol, &rank);
    }
    rep.gram_rank = rank;
    const double analytic =
        two ? exchange_entropy_shift_two_mode(ns, cfg.noise, cfg.shift).value
            : exchange_entropy_shift_single(ns, cfg.noise, cfg.shift).value;
    rep.shifts.push_back(compare("exchange", analytic, fd, coef, cfg.rel_tol));
  }

  if (rep.channel_trace_error > cfg.channel.max_trace_error) {
    throw QuadratureError("channel trace error " +
                          std::to_string(rep.channel_trace_error) +
                          " exceeds the configured limit");
  }
  rep.all_within = true;
  for (const auto& s : rep.shifts) rep.all_within &= s.within_tolerance;
  return rep;
}

}  // namespace thermocap
