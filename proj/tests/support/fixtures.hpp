#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "arqpc/problem.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace arqpc;

/// f(x) = Σ_i a_i sin(b_i·x + c_i): every derivative tensor is a_i sin^{(ℓ)}(·) b_i^{⊗ℓ},
/// so ‖∇^{ℓ+1} f‖ <= Σ_i |a_i| ‖b_i‖^{ℓ+1} gives the declared constants exactly.
struct Sines {
  int n = 1;
  std::vector<double> a, c;
  std::vector<std::vector<double>> b;

  double value(std::span<const double> x, int order_shift = 0) const {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double t = c[i];
      for (int k = 0; k < n; ++k) t += b[i][k] * x[k];
      v += a[i] * std::sin(t + order_shift * std::numbers::pi / 2);
    }
    return v;
  }

  TaylorPoly taylor(std::span<const double> x, int degree) const {
    TaylorPoly t(x, degree);
    for (int l = 0; l <= degree; ++l) {
      SymTensor& T = t.terms[l];
      const auto& tab = T.table();
      for (int pos = 0; pos < tab.size(); ++pos) {
        double e = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          double arg = c[i];
          for (int k = 0; k < n; ++k) arg += b[i][k] * x[k];
          double mono = 1.0;
          for (int k = 0; k < n; ++k) mono *= std::pow(b[i][k], tab.alpha[pos][k]);
          e += a[i] * std::sin(arg + l * std::numbers::pi / 2) * mono;
        }
        T.entry(pos) = e;
      }
    }
    return t;
  }

  /// Bound on ‖∇^{order+1} f‖ (floored at 1, as declared constants must be).
  double lipschitz(int order) const {
    double L = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double nb = 0.0;
      for (double v : b[i]) nb += v * v;
      L += std::abs(a[i]) * std::pow(std::sqrt(nb), order + 1);
    }
    return std::max(1.0, L);
  }
};

inline Sines random_sines(oracle::Rng& rng, int n, int terms) {
  Sines s;
  s.n = n;
  for (int i = 0; i < terms; ++i) {
    s.a.push_back(rng.uniform(0.2, 1.0) * (rng.integer(0, 1) ? 1 : -1));
    s.c.push_back(rng.uniform(-3, 3));
    s.b.push_back(rng.vec(n, -1.5, 1.5));
  }
  return s;
}

inline Problem sines_problem(const Sines& s, int p, std::vector<double> x0) {
  Problem prob;
  prob.name = "sines";
  prob.n = s.n;
  prob.p = p;
  prob.h = HFunction::zero();
  prob.f_oracle = [s](std::span<const double> x, int degree) { return s.taylor(x, degree); };
  for (int j = 0; j <= p; ++j) prob.lipschitz_f.push_back(s.lipschitz(j));
  double lo = 0.0;
  for (double v : s.a) lo -= std::abs(v);
  prob.w_low = lo;
  prob.x0 = Vector(x0.begin(), x0.end());
  return prob;
}

/// Univariate polynomial with monomial coefficients a_0..a_d.
struct Poly1 {
  std::vector<double> a;
  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
  }
  double derivative(double x, int l) const {
    double acc = 0.0;
    for (std::size_t i = a.size(); i-- > static_cast<std::size_t>(l);)
      acc = acc * x + a[i] * oracle::fact(static_cast<int>(i)) / oracle::fact(static_cast<int>(i) - l);
    return acc;
  }
  TaylorPoly taylor(double x, int degree) const {
    double b[1] = {x};
    TaylorPoly t(b, degree);
    for (int l = 0; l <= degree; ++l) t.terms[l].entry(0) = derivative(x, l);
    return t;
  }
};

/// w(x) = f(x) + |c(x)| in one variable.
inline Problem abs_composite(const Poly1& f, const Poly1& c, int p, double x0) {
  Problem prob;
  prob.name = "poly-abs";
  prob.n = 1;
  prob.m = 1;
  prob.p = p;
  prob.h = HFunction::abs();
  prob.f_oracle = [f](std::span<const double> x, int degree) { return f.taylor(x[0], degree); };
  prob.c_oracle = [c](std::span<const double> x, int degree) {
    VecTaylorPoly v;
    v.components.push_back(c.taylor(x[0], degree));
    return v;
  };
  prob.x0 = Vector{x0};
  return prob;
}

}  // namespace fixture
