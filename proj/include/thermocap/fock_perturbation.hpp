#pragma once

// Oracle values for the per-eps^2 entropy shifts: central finite differences
// of truncated-Fock entropies, and the exact eps^2 coefficient of
// S(A + eps B) = S(A) + eps (..) - (eps^2 / 2) sum_ab |B_ab|^2 L(a, b) + ...,
// with B in the eigenbasis of A and L(x, y) = (ln x - ln y) / (x - y).

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermocap/fock.hpp"

namespace thermocap {

/// eps^2 coefficient of the entropy (nats) of h0 + eps h1.  Eigenvalues of
/// h0 below rank_tol times the largest are dropped.
double entropy_second_order(const Eigen::MatrixXcd& h0,
                            const Eigen::MatrixXcd& h1,
                            double rank_tol = 1e-14, int* rank = nullptr);

/// Same for (h0 (x) h0) + eps (h1 (x) h1) without forming the products.
double entropy_second_order_product(const Eigen::MatrixXcd& h0,
                                    const Eigen::MatrixXcd& h1,
                                    double rank_tol = 1e-14,
                                    int* rank = nullptr);

struct PerturbCompareConfig {
  PerturbationOrder order = PerturbationOrder::single;
  double ns = 2.0;
  double noise = 0.1;
  double epsilon = 1e-3;
  int dim = 40;          ///< channel and joint-state truncation
  int input_dim = 60;    ///< truncation for the input-entropy difference
  double rel_tol = 0.05;
  double rank_tol = 1e-14;
  ChannelOptions channel;
  ShiftOptions shift;
};

struct ShiftComparison {
  std::string name;
  double analytic = 0.0;
  double oracle_fd = 0.0;           ///< NaN when not computed
  double oracle_coefficient = 0.0;  ///< NaN when not computed
  double oracle = 0.0;              ///< value compared against
  double rel_diff = 0.0;
  bool within_tolerance = false;
};

struct PerturbCompareReport {
  PerturbCompareConfig config;
  std::vector<ShiftComparison> shifts;
  double quadrature_raw_mass = 1.0;
  double channel_trace_error = 0.0;
  int gram_rank = 0;
  bool all_within = false;
};

/// Single order: input, output and exchange shifts of the |mu|^4 term.
/// Two-mode order: the |mu_1 mu_2|^2 term; its exchange oracle is the exact
/// coefficient of the product environment Gram matrix (a finite difference
/// would need the (d^2)^2-dimensional joint state).
PerturbCompareReport perturb_compare(const PerturbCompareConfig& cfg);

}  // namespace thermocap
