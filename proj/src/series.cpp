#include "thermocap/series.hpp"

#include <string>

namespace thermocap {

std::array<double, kPolyDegree + 1> geometric_raw_moments(double nbar) {
  // Factorial moments of the geometric law are j! nbar^j; raw moments follow
  // from Stirling numbers of the second kind.
  const double f1 = nbar;
  const double f2 = 2.0 * nbar * nbar;
  const double f3 = 6.0 * nbar * nbar * nbar;
  const double f4 = 24.0 * nbar * nbar * nbar * nbar;
  return {1.0, f1, f2 + f1, f3 + 3.0 * f2 + f1, f4 + 6.0 * f3 + 7.0 * f2 + f1};
}

Poly2 Poly2::constant(double value) {
  Poly2 p;
  p.c[0][0] = value;
  return p;
}

Poly2 Poly2::k() {
  Poly2 p;
  p.c[1][0] = 1.0;
  return p;
}

Poly2 Poly2::m() {
  Poly2 p;
  p.c[0][1] = 1.0;
  return p;
}

double Poly2::operator()(double k, double m) const {
  double total = 0.0;
  double kp = 1.0;
  for (int a = 0; a <= kPolyDegree; ++a) {
    double mp = 1.0;
    for (int b = 0; b <= kPolyDegree; ++b) {
      total += c[a][b] * kp * mp;
      mp *= m;
    }
    kp *= k;
  }
  return total;
}

double Poly2::expectation(double nbar_k, double nbar_m) const {
  const auto mk = geometric_raw_moments(nbar_k);
  const auto mm = geometric_raw_moments(nbar_m);
  double total = 0.0;
  for (int a = 0; a <= kPolyDegree; ++a) {
    for (int b = 0; b <= kPolyDegree; ++b) total += c[a][b] * mk[a] * mm[b];
  }
  return total;
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (int i = 0; i <= kPolyDegree; ++i)
    for (int j = 0; j <= kPolyDegree; ++j) r.c[i][j] = a.c[i][j] + b.c[i][j];
  return r;
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-1.0) * b; }

Poly2 operator*(double s, const Poly2& a) {
  Poly2 r;
  for (int i = 0; i <= kPolyDegree; ++i)
    for (int j = 0; j <= kPolyDegree; ++j) r.c[i][j] = s * a.c[i][j];
  return r;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (int i = 0; i <= kPolyDegree; ++i) {
    for (int j = 0; j <= kPolyDegree; ++j) {
      if (a.c[i][j] == 0.0) continue;
      for (int p = 0; p <= kPolyDegree; ++p) {
        for (int q = 0; q <= kPolyDegree; ++q) {
          if (b.c[p][q] == 0.0) continue;
          if (i + p > kPolyDegree || j + q > kPolyDegree) {
            throw InvalidInput("Poly2 product exceeds degree " +
                               std::to_string(kPolyDegree));
          }
          r.c[i + p][j + q] += a.c[i][j] * b.c[p][q];
        }
      }
    }
  }
  return r;
}

}  // namespace thermocap
