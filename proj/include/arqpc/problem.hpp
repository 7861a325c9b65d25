#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arqpc/composite_h.hpp"
#include "arqpc/tensor.hpp"

namespace arqpc {

enum class FeasibleKind { all_space, box, l2_ball };

class FeasibleSet {
 public:
  FeasibleSet() = default;
  static FeasibleSet all();
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet l2_ball(Vector center, double radius);

  FeasibleKind kind() const { return kind_; }
  /// Every supported set is convex.
  bool convex() const { return true; }
  bool member(std::span<const double> x, double tol = 1e-12) const;
  Vector project(std::span<const double> x) const;
  /// For n = 1: the offsets d with x + d in the set, as [lo, hi] (may be infinite).
  std::pair<double, double> interval_1d(double x) const;

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  FeasibleKind kind_ = FeasibleKind::all_space;
  Vector lower_, upper_, center_;
  double radius_ = 0.0;
};

struct EvalCounters {
  long long w_evals = 0;
  long long deriv_evals = 0;
};

/// Taylor data of f and c at one point.
struct TaylorBundle {
  TaylorPoly f;
  VecTaylorPoly c;
};

struct Problem {
  using FOracle = std::function<TaylorPoly(std::span<const double> x, int degree)>;
  using COracle = std::function<VecTaylorPoly(std::span<const double> x, int degree)>;

  std::string name;
  int n = 1;
  int m = 0;
  int p = 1;
  FOracle f_oracle;
  COracle c_oracle;  // may be empty when m = 0
  HFunction h;
  FeasibleSet feasible;
  /// Per-order constants indexed 0..p; NaN (or a short vector) means "not declared".
  std::vector<double> lipschitz_f;
  std::vector<double> lipschitz_c;
  std::optional<double> w_low;
  Vector x0;
  /// Optional n = 1, h = 0 shortcut: writes f^{(0..degree)} at x into out.
  std::function<void(double x, int degree, double* out)> f_jet_1d;

  void validate() const;
};

/// f(x) + h(c(x)); counts one objective evaluation.
double eval_w(const Problem& prob, std::span<const double> x, EvalCounters& counters);

/// Oracle output at x up to `degree`; counts one derivative evaluation when degree >= 1.
TaylorBundle taylor_at(const Problem& prob, std::span<const double> x, int degree, EvalCounters& counters);

/// Smooth univariate forms of eval_w / taylor_at writing f^{(0..degree)} into
/// `out`; they use f_jet_1d when present and count evaluations the same way.
double eval_w_1d(const Problem& prob, double x, EvalCounters& counters);
void taylor_at_1d(const Problem& prob, double x, int degree, double* out, EvalCounters& counters);

/// w(x) from already fetched Taylor data (no evaluation counted).
double bundle_value(const Problem& prob, const TaylorBundle& b);

/// max_j (L_{f,j-1} + L_h L_{c,j-1}) over j = 1..p, when every needed constant is declared.
std::optional<double> lw_constant(const Problem& prob);
/// L_{f,p} + L_h L_{c,p}, when declared.
std::optional<double> lwp_constant(const Problem& prob);

}  // namespace arqpc
