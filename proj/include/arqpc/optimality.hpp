#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "arqpc/poly1d.hpp"
#include "arqpc/problem.hpp"

namespace arqpc {

/// Resolution of the ball-constrained global minimization.
struct GridSpec {
  int points_per_axis = 0;  // 0: 2048 / 128 / 48 for n = 1 / 2 / 3
  int polish_iters = 200;
  int refine = 1;  // multiplies the per-axis count
  /// Skip the exact univariate path and always use grid + polish.
  bool force_grid = false;

  int points_for(int n) const;
  GridSpec doubled() const;
};

struct BallMin {
  Vector argmin;
  double value = 0.0;
  double gap = 0.0;
  bool exact = false;
};

/// d -> T_smooth(d) + h(T_inner(d)) + radial·‖d‖^power, with polynomial pieces
/// given as Taylor data at d = 0.
struct LocalModel {
  TaylorPoly smooth;
  VecTaylorPoly inner;
  const HFunction* h = nullptr;
  double radial = 0.0;
  int radial_power = 0;

  int dim() const { return smooth.dim(); }
  double operator()(std::span<const double> d) const;
  /// Coefficient form for n = 1.
  poly1d::Composite to_1d() const;
};

using Objective = std::function<double(std::span<const double>)>;

/// Global minimum of objective(d) over ‖d‖ <= δ with center + d in F, by grid
/// search with local polish. d = 0 is evaluated first.
BallMin global_min_ball(const Objective& objective, std::span<const double> center, double delta,
                        const FeasibleSet& feasible, const GridSpec& grid);

/// Same for a local model; n = 1 with a supported h is solved exactly unless the
/// grid is forced.
BallMin global_min_ball(const LocalModel& model, std::span<const double> center, double delta,
                        const FeasibleSet& feasible, const GridSpec& grid);

struct PhiValue {
  double value = 0.0;
  double gap = 0.0;
  Vector argmin;
  bool exact = false;
};

/// φ for a smooth univariate f (h = 0) from f^{(0..j)} at x; exact.
PhiValue phi_smooth_1d(const double* derivs, int j, const FeasibleSet& feasible, double x, double delta);

/// φ of order j and radius δ at x, from Taylor data already fetched at x.
PhiValue phi_w(const Problem& prob, const TaylorBundle& at_x, std::span<const double> x, int j, double delta,
               const GridSpec& grid = {});
/// Convenience form that fetches the Taylor data itself (counted in `counters` when given).
PhiValue phi_w(const Problem& prob, std::span<const double> x, int j, double delta, const GridSpec& grid = {},
               EvalCounters* counters = nullptr);

struct OrderCheck {
  int j = 0;
  double delta = 0.0;
  double phi = 0.0;
  double threshold = 0.0;
  double gap = 0.0;
  bool pass = false;
};

struct Certificate {
  Vector x;
  InlineVec<OrderCheck, kMaxOrder> orders;
  bool pass = false;
  std::string source;  // "step1" | "step2-termination" | "recheck"
};

/// ε_j δ_j^j / j!.
inline double strong_threshold(double eps, double delta, int j) { return eps * ipow(delta, j) / factorial(j); }

/// Strong check of orders 1..q with per-order ε and δ. When `stop_early`, the
/// certificate ends at the first failing order.
Certificate strong_check(const Problem& prob, const TaylorBundle& at_x, std::span<const double> x,
                         std::span<const double> eps, std::span<const double> delta, const GridSpec& grid = {},
                         bool stop_early = false);
Certificate strong_check(const Problem& prob, std::span<const double> x, std::span<const double> eps,
                         std::span<const double> delta, const GridSpec& grid = {});

/// Σ_{ℓ=1}^q δ^ℓ/ℓ!.
double chi(int q, double delta);
bool weak_check(const Problem& prob, std::span<const double> x, int q, double eps_q, double delta_q,
                const GridSpec& grid = {});

}  // namespace arqpc
