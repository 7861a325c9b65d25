#pragma once

#include <array>

#include "arqpc/composite_h.hpp"
#include "arqpc/types.hpp"

/// Exact minimization of univariate "polynomial + h(polynomials) + r|d|^P"
/// objectives on an interval. The objective is a polynomial on every piece
/// between breakpoints of h (and 0 for the radial term), so the global
/// minimum is among the breakpoints, the interval ends, and the real roots of
/// each piece's derivative.
namespace arqpc::poly1d {

inline constexpr int kCap = 2 * kMaxOrder + 2;

struct Poly {
  std::array<double, kCap> c{};
  int deg = 0;  // c[deg+1..] are zero

  double operator()(double x) const {
    double acc = c[deg];
    for (int i = deg - 1; i >= 0; --i) acc = acc * x + c[i];
    return acc;
  }
};

Poly derivative(const Poly& p);
Poly add(const Poly& a, const Poly& b, double sb = 1.0);

/// Sorted real roots of p in the open interval (a, b); a and b must be finite.
void real_roots(const Poly& p, double a, double b, boost::container::small_vector<double, 16>& out);

inline constexpr int kMaxInner = 4;

struct Composite {
  Poly smooth;
  boost::container::small_vector<Poly, kMaxInner> inner;
  const HFunction* h = nullptr;  // null or zero kind: no composite part
  double radial = 0.0;
  int radial_power = 0;

  double operator()(double d) const;
};

/// Whether `minimize` handles this h exactly.
bool supports(const HFunction& h);

struct Result {
  double argmin = 0.0;
  double value = 0.0;
  double gap = 0.0;  // round-off allowance
};

/// Global minimum of a plain polynomial over [lo, hi] (lo <= 0 <= hi).
Result minimize_poly(const Poly& p, double lo, double hi);
/// Global minimum over [lo, hi] (finite, lo <= 0 <= hi); d = 0 is the first candidate.
Result minimize(const Composite& obj, double lo, double hi);

}  // namespace arqpc::poly1d
