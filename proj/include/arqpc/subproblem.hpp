#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "arqpc/optimality.hpp"

namespace arqpc {

/// m(s) = T_{f,p}(x_k,s) + h(T_{c,p}(x_k,s)) + σ/(p+1)!‖s‖^{p+1}.
/// Views the Taylor data it is built from; it must not outlive it.
struct RegModel {
  const TaylorPoly& tf;
  const VecTaylorPoly& tc;
  const HFunction* h = nullptr;
  double sigma = 1.0;
  int p = 1;

  RegModel(const TaylorPoly& tf_, const VecTaylorPoly& tc_, const HFunction& h_, double sigma_);
  RegModel(TaylorPoly&&, const VecTaylorPoly&, const HFunction&, double) = delete;
  RegModel(const TaylorPoly&, VecTaylorPoly&&, const HFunction&, double) = delete;
  RegModel(const TaylorPoly&, const VecTaylorPoly&, HFunction&&, double) = delete;
  int dim() const { return tf.dim(); }
};

double model_eval(const RegModel& mdl, std::span<const double> s);
/// T_{w,p}(x_k, s): the model without the regularization term.
double model_taylor_w(const RegModel& mdl, std::span<const double> s);

/// Model optimality measure of order j and radius δ at s (offsets d with
/// x_k + s + d feasible).
PhiValue model_phi(const RegModel& mdl, std::span<const double> x_k, std::span<const double> s, int j, double delta,
                   const FeasibleSet& feasible, const GridSpec& grid = {});

enum class DeltaPolicy { unit, scaled, auto_ };

struct PolicyInputs {
  bool h_zero = true;
  bool h_convex = true;
  bool f_convex = true;  // convexity of the feasible set
  int q = 1;
  int p = 1;

  /// F convex and (h = 0 with q <= 2, or h convex with q = 1).
  bool good_case() const { return f_convex && ((h_zero && q <= 2) || (h_convex && q == 1)); }
};

struct StepParams {
  double theta = 0.5;
  DeltaPolicy delta_policy = DeltaPolicy::auto_;
  GridSpec grid;
  std::uint64_t seed = 1;
  double lw_hat = 1.0;  // declared L_w or a running surrogate, floored at 1
  std::optional<double> shortcut_varpi;
  int multistart = 32;
  int max_halvings = 40;
  double xi = 0.5;
};

struct HookStep {
  Vector s;
  Vector delta;
};

/// Scripted Step 2 (worst-case replays). Returning nullopt falls back to the solver.
using StepHook = std::function<std::optional<HookStep>(long long k, const RegModel& mdl, std::span<const double> x_k)>;

enum class StepStatus { found, step2_terminate };

struct StepResult {
  StepStatus status = StepStatus::found;
  Vector s;
  Vector delta;
  double m0 = 0.0;
  double model_value = 0.0;
  std::optional<double> taylor_value;  // T_w(x_k, s) when already computed
  InlineVec<PhiValue, kMaxOrder> phi;  // per order, at the accepted δ
  InlineVec<bool, kMaxOrder> floor_met;
  int halvings = 0;
  double kappa_delta = 0.0;
  bool fallback_used = false;
  bool via_shortcut = false;
  bool hook_used = false;
};

bool large_step_shortcut(double step_norm, std::span<const double> eps, const PolicyInputs& policy, double varpi,
                         double theta);

/// κ_δ = θ / (2 q! (6 L̂_w + 3σ)).
double kappa_delta(double theta, int q, double lw_hat, double sigma);

StepResult compute_step(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible,
                        std::span<const double> eps, const StepParams& params, const PolicyInputs& policy);

/// Hook-driven variant: only the descent condition is checked on the injected step.
StepResult hooked_step(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible,
                       const HookStep& step);

}  // namespace arqpc
