#pragma once

// Sums over geometric (thermal) photon-number distributions: exact moment
// expectations of low-degree polynomials, and adaptive direct summation with
// an extrapolated tail estimate.

#include <array>
#include <cmath>
#include <string>

#include "thermocap/errors.hpp"

namespace thermocap {

inline constexpr int kPolyDegree = 4;

/// Raw moments E[k^j], j = 0..4, of P(k) = (1 - v) v^k with mean nbar.
std::array<double, kPolyDegree + 1> geometric_raw_moments(double nbar);

/// Polynomial in two integer variables, sum_{a,b <= 4} c[a][b] k^a m^b.
struct Poly2 {
  std::array<std::array<double, kPolyDegree + 1>, kPolyDegree + 1> c{};

  static Poly2 constant(double value);
  static Poly2 k();
  static Poly2 m();

  double operator()(double k, double m) const;
  /// Expectation under independent geometric k and m.
  double expectation(double nbar_k, double nbar_m) const;
};

Poly2 operator+(const Poly2& a, const Poly2& b);
Poly2 operator-(const Poly2& a, const Poly2& b);
Poly2 operator*(double s, const Poly2& a);
/// Throws InvalidInput if the product exceeds degree 4 in either variable.
Poly2 operator*(const Poly2& a, const Poly2& b);

struct SeriesSum {
  double value = 0.0;
  double tail_bound = 0.0;  ///< extrapolated, not rigorous
  long terms = 0;
};

/// Sums term(k) for k = 0, 1, ... where |term(k)| behaves like
/// v^k (k + 1)^degree.  Stops after k >= min_terms once the geometric tail
/// extrapolated from the current term drops below rel_tol * |sum|.
template <class Term>
SeriesSum sum_geometric(Term&& term, double v, int degree, double rel_tol,
                        long min_terms, long max_terms) {
  SeriesSum out;
  for (long k = 0; k < max_terms; ++k) {
    const double t = term(k);
    out.value += t;
    ++out.terms;
    if (k + 1 < min_terms) continue;
    const double q =
        v * std::pow(static_cast<double>(k + 2) / static_cast<double>(k + 1),
                     degree);
    if (q >= 1.0) continue;
    const double tail = std::abs(t) * q / (1.0 - q);
    if (tail <= rel_tol * std::abs(out.value) || t == 0.0) {
      out.tail_bound = tail;
      return out;
    }
  }
  throw TruncationError("geometric series did not converge within " +
                        std::to_string(max_terms) + " terms");
}

}  // namespace thermocap
