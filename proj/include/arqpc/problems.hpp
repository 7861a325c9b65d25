#pragma once

#include <string>
#include <vector>

#include "arqpc/worstcase.hpp"

namespace arqpc {

struct UnknownProblem : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

struct ProblemOptions {
  int p = 2;
  int q = 1;
  double eps = 0.25;  // only used by the worst-case instances
  ReplayMode mode = ReplayMode::interpolant;
};

/// figure1 | quadratic | rosenbrock2d | wc-thm61 | wc-thm63 | wc-cor64.
Problem make_problem(const std::string& name, const ProblemOptions& opts = {});
std::vector<std::string> problem_names();

/// w(x) = -(2/5)x + |x - x² + 2x³|.
Problem figure1_problem(int p);
Problem quadratic_problem(int p);
Problem rosenbrock_problem(int p);

/// Univariate polynomial f with coefficients a_0..a_d (monomial basis), as Taylor data.
TaylorPoly poly_taylor_1d(const std::vector<double>& coeffs, double x, int degree);

}  // namespace arqpc
