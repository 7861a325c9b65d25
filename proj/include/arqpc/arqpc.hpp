#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arqpc/subproblem.hpp"

namespace arqpc {

struct AlgoParams {
  int q = 1;
  Vector eps;     // ε_1..ε_q in (0,1)
  Vector delta0;  // δ_0 in (0,1]^q; empty means all ones
  double theta = 0.5;
  double sigma0 = 1.0;
  double sigma_min = 1e-8;
  double eta1 = 0.1;
  double eta2 = 0.9;
  double gamma1 = 0.5;
  double gamma2 = 2.0;
  double gamma3 = 10.0;
  long long max_iters = 1'000'000;
  std::uint64_t seed = 1;
  std::optional<double> shortcut_varpi;
  DeltaPolicy delta_policy = DeltaPolicy::auto_;
  GridSpec grid;

  /// Uniform tolerance for all orders.
  static AlgoParams with_eps(int q, double eps);
  void validate() const;
  Vector initial_delta() const;
};

struct IterationRecord {
  long long k = 0;
  Vector x;
  double w = 0.0;
  double sigma = 0.0;
  double sigma_next = 0.0;
  Vector delta;  // δ_k
  Vector s;
  double step_norm = 0.0;
  double rho = 0.0;
  bool success = false;
  double taylor_dec = 0.0;  // w(x_k) - T_{w,p}(x_k, s_k)
  double w_trial = 0.0;
  Vector delta_s;
  Vector phi;  // values tested in Step 1 (empty when Step 1 was skipped)
  EvalCounters counters;
  bool hook_used = false;
};

enum class Termination { step1, step2, budget };

std::string to_string(Termination t);

struct RunResult {
  Certificate certificate;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::budget;
  EvalCounters counters;
  long long iterations = 0;
  long long successes = 0;
  Vector x_final;
  double w_final = 0.0;
  double sigma_max = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  std::string message;  // reason for a budget stop
};

struct RunOptions {
  bool keep_trace = true;
  std::function<void(const IterationRecord&)> on_iteration;
  StepHook hook;
  /// Smooth univariate problems normally run a loop specialised to scalar
  /// Taylor data; this forces the dimension-generic loop (same results).
  bool generic_loop = false;
};

/// (w_k - w_trial) / taylor_dec; throws DegenerateDenominator when taylor_dec <= 1e-300.
double rho(double w_k, double w_trial, double taylor_dec);
double sigma_update(double sigma, double rho_k, const AlgoParams& params);

/// k+1 <= |S_k|(1 + |log γ1|/log γ2) + log(σ_max/σ0)/log γ2 for every prefix.
bool iteration_bound_check(std::span<const IterationRecord> trace, double sigma_max, const AlgoParams& params);

/// Streaming form of iteration_bound_check for long runs.
class IterationBoundMonitor {
 public:
  IterationBoundMonitor(const AlgoParams& params, double sigma_max);
  void add(long long k, bool success);
  bool ok() const { return ok_; }

 private:
  double per_success_;
  double offset_;
  long long successes_ = 0;
  bool ok_ = true;
};

PolicyInputs policy_for(const Problem& prob, int q);

RunResult run(const Problem& prob, const AlgoParams& params, const RunOptions& options = {});

}  // namespace arqpc
