#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arqpc/problems.hpp"

namespace arqpc {

struct SweepSpec {
  std::string target;  // a registered problem name; wc-* names replay worst-case instances
  int p = 2;
  int q = 1;
  std::vector<double> eps;  // strictly decreasing, inside (0,1), at least four values
  AlgoParams base;          // eps/q fields are overwritten per row
  ReplayMode mode = ReplayMode::node;
  int threads = 0;  // 0: hardware concurrency capped by ARQPC_THREADS

  void validate() const;
};

struct SweepRow {
  double eps = 0.0;
  long long iterations = 0;
  long long successes = 0;
  long long w_evals = 0;
  long long deriv_evals = 0;
  Termination termination = Termination::budget;
  double wall_seconds = 0.0;
  bool flagged = false;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // in the order of spec.eps
  double slope = 0.0;          // NaN when fewer than two rows are usable
  double target = 0.0;
  int fitted = 0;
  bool any_flagged = false;
};

/// Worst-case order exponent for the (p, q, h, F) cell of the complexity table.
double target_exponent(int p, int q, bool h_zero, bool h_convex, bool f_convex);
double target_exponent(const Problem& prob, int q);

/// Least-squares slope of log(max(1, y)) against log(1/ε).
double fit_slope(const std::vector<double>& eps, const std::vector<double>& counts);

/// Worker count: ARQPC_THREADS when set and positive, otherwise hardware concurrency.
int sweep_threads(int requested = 0);

SweepResult sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace arqpc
