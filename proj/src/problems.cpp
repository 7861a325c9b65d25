#include "arqpc/problems.hpp"

#include <cmath>
#include <limits>

namespace arqpc {

TaylorPoly poly_taylor_1d(const std::vector<double>& coeffs, double x, int degree) {
  double b[1] = {x};
  TaylorPoly t(b, degree);
  for (int l = 0; l <= degree; ++l) {
    double acc = 0.0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= l; --i)
      acc = acc * x + coeffs[i] * factorial(i) / factorial(i - l);
    t.terms[l].entry(0) = acc;
  }
  return t;
}

Problem figure1_problem(int p) {
  Problem prob;
  prob.name = "figure1";
  prob.n = 1;
  prob.m = 1;
  prob.p = p;
  prob.h = HFunction::abs();
  prob.f_oracle = [](std::span<const double> x, int degree) { return poly_taylor_1d({0.0, -0.4}, x[0], degree); };
  prob.c_oracle = [](std::span<const double> x, int degree) {
    VecTaylorPoly v;
    v.components.push_back(poly_taylor_1d({0.0, 1.0, -1.0, 2.0}, x[0], degree));
    return v;
  };
  prob.x0 = Vector{0.5};
  return prob;
}

Problem quadratic_problem(int p) {
  // f(x) = ½ xᵀAx + bᵀx on [-2, 2]²; minimizer (-0.6, 0.8).
  static constexpr double A[2][2] = {{3.0, 1.0}, {1.0, 2.0}};
  static constexpr double bvec[2] = {1.0, -1.0};
  Problem prob;
  prob.name = "quadratic";
  prob.n = 2;
  prob.m = 0;
  prob.p = p;
  prob.h = HFunction::zero();
  prob.feasible = FeasibleSet::box(Vector{-2.0, -2.0}, Vector{2.0, 2.0});
  prob.f_oracle = [](std::span<const double> x, int degree) {
    TaylorPoly t(x, degree);
    double g[2];
    double v = 0.0;
    for (int i = 0; i < 2; ++i) {
      g[i] = bvec[i];
      for (int j = 0; j < 2; ++j) g[i] += A[i][j] * x[j];
      v += bvec[i] * x[i];
      for (int j = 0; j < 2; ++j) v += 0.5 * x[i] * A[i][j] * x[j];
    }
    t.terms[0].entry(0) = v;
    if (degree >= 1)
      for (int i = 0; i < 2; ++i) {
        int idx[1] = {i};
        t.terms[1].set(idx, g[i]);
      }
    if (degree >= 2)
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
          int idx[2] = {i, j};
          t.terms[2].set(idx, A[i][j]);
        }
    return t;
  };
  // Over the box: ‖∇f‖ <= ‖A‖·2√2 + ‖b‖ < 12, ‖A‖ < 3.7, higher derivatives vanish.
  prob.lipschitz_f.assign(p + 1, 1.0);
  prob.lipschitz_f[0] = 12.0;
  if (p >= 1) prob.lipschitz_f[1] = 3.7;
  prob.w_low = -10.0;
  prob.x0 = Vector{1.5, -1.5};
  return prob;
}

Problem rosenbrock_problem(int p) {
  Problem prob;
  prob.name = "rosenbrock2d";
  prob.n = 2;
  prob.m = 0;
  prob.p = p;
  prob.h = HFunction::zero();
  prob.f_oracle = [](std::span<const double> xv, int degree) {
    const double x = xv[0], y = xv[1];
    TaylorPoly t(xv, degree);
    const double r = y - x * x;
    t.terms[0].entry(0) = (1 - x) * (1 - x) + 100 * r * r;
    auto put = [&](std::initializer_list<int> idx, double v) {
      if (static_cast<int>(idx.size()) <= degree) t.terms[idx.size()].set(std::span<const int>(idx.begin(), idx.size()), v);
    };
    put({0}, -2 * (1 - x) - 400 * x * r);
    put({1}, 200 * r);
    put({0, 0}, 2 - 400 * y + 1200 * x * x);
    put({0, 1}, -400 * x);
    put({1, 1}, 200);
    put({0, 0, 0}, 2400 * x);
    put({0, 0, 1}, -400);
    put({0, 0, 0, 0}, 2400);
    return t;
  };
  prob.w_low = 0.0;
  prob.x0 = Vector{-1.2, 1.0};
  return prob;
}

Problem make_problem(const std::string& name, const ProblemOptions& opts) {
  if (name == "figure1") return figure1_problem(opts.p);
  if (name == "quadratic") return quadratic_problem(opts.p);
  if (name == "rosenbrock2d") return rosenbrock_problem(opts.p);
  if (name == "wc-thm61" || name == "wc-thm63" || name == "wc-cor64") {
    WorstCaseInstance inst = build_worstcase(worstcase_kind_from_name(name), opts.p, opts.q, opts.eps);
    return worstcase_problem(inst, opts.mode);
  }
  throw UnknownProblem("unknown problem: " + name);
}

std::vector<std::string> problem_names() {
  return {"figure1", "quadratic", "rosenbrock2d", "wc-thm61", "wc-thm63", "wc-cor64"};
}

}  // namespace arqpc
