#include "arqpc/arqpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arqpc {

AlgoParams AlgoParams::with_eps(int q, double eps) {
  AlgoParams p;
  p.q = q;
  p.eps.assign(q, eps);
  return p;
}

void AlgoParams::validate() const {
  if (q < 1) throw InvalidArgument("q must be >= 1");
  if (static_cast<int>(eps.size()) != q) throw InvalidArgument("need one ε per order 1..q");
  for (double e : eps)
    if (!(e > 0.0 && e < 1.0)) throw InvalidArgument("every ε_j must lie in (0,1)");
  if (!delta0.empty()) {
    if (static_cast<int>(delta0.size()) != q) throw InvalidArgument("need one δ_0 per order 1..q");
    for (double d : delta0)
      if (!(d > 0.0 && d <= 1.0)) throw InvalidArgument("every δ_0 component must lie in (0,1]");
  }
  if (!(theta > 0.0)) throw InvalidArgument("θ must be positive");
  if (!(sigma0 > 0.0)) throw InvalidArgument("σ_0 must be positive");
  if (!(sigma_min > 0.0 && sigma_min <= sigma0)) throw InvalidArgument("σ_min must lie in (0, σ_0]");
  if (!(eta1 > 0.0 && eta1 <= eta2 && eta2 < 1.0)) throw InvalidArgument("need 0 < η1 <= η2 < 1");
  if (!(gamma1 > 0.0 && gamma1 < 1.0 && 1.0 < gamma2 && gamma2 < gamma3))
    throw InvalidArgument("need 0 < γ1 < 1 < γ2 < γ3");
  if (max_iters < 0) throw InvalidArgument("max_iters must be nonnegative");
  if (shortcut_varpi && !(*shortcut_varpi > theta && *shortcut_varpi <= 1.0))
    throw InvalidArgument("shortcut constant must lie in (θ, 1]");
}

Vector AlgoParams::initial_delta() const { return delta0.empty() ? Vector(q, 1.0) : delta0; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::step1:
      return "step1";
    case Termination::step2:
      return "step2";
    case Termination::budget:
      return "budget";
  }
  return "unknown";
}

double rho(double w_k, double w_trial, double taylor_dec) {
  if (!(taylor_dec > 1e-300)) throw DegenerateDenominator("predicted decrease is not positive");
  return (w_k - w_trial) / taylor_dec;
}

double sigma_update(double sigma, double rho_k, const AlgoParams& params) {
  if (rho_k >= params.eta2) return std::max(params.sigma_min, params.gamma1 * sigma);
  if (rho_k >= params.eta1) return sigma;
  return params.gamma2 * sigma;
}

IterationBoundMonitor::IterationBoundMonitor(const AlgoParams& params, double sigma_max)
    : per_success_(1.0 + std::abs(std::log(params.gamma1)) / std::log(params.gamma2)),
      offset_(std::log(sigma_max / params.sigma0) / std::log(params.gamma2)) {}

void IterationBoundMonitor::add(long long k, bool success) {
  if (success) ++successes_;
  // Small relative slack for the logarithms.
  double rhs = successes_ * per_success_ + offset_;
  if (static_cast<double>(k + 1) > rhs * (1 + 1e-12) + 1e-9) ok_ = false;
}

bool iteration_bound_check(std::span<const IterationRecord> trace, double sigma_max, const AlgoParams& params) {
  IterationBoundMonitor mon(params, sigma_max);
  for (const auto& r : trace) mon.add(r.k, r.success);
  return mon.ok();
}

PolicyInputs policy_for(const Problem& prob, int q) {
  PolicyInputs pi;
  pi.h_zero = prob.h.kind() == HKind::zero;
  pi.h_convex = prob.h.is_convex();
  pi.f_convex = prob.feasible.convex();
  pi.q = q;
  pi.p = prob.p;
  return pi;
}

namespace {

// Running L_w surrogate from tensor norms at the current iterate.
double lw_surrogate(const Problem& prob, const TaylorPoly& f, const VecTaylorPoly& cs) {
  double best = 1.0;
  for (int l = 1; l <= f.degree(); ++l) {
    double v = f.terms[l].frobenius_norm();
    double vc = 0.0;
    for (const auto& c : cs.components) vc = std::max(vc, c.terms[l].frobenius_norm());
    best = std::max(best, v + prob.h.lipschitz() * vc);
  }
  return best;
}

// Certificate at a Step-2 termination: per order, the largest δ = 2^{-i} that passes.
Certificate step2_certificate(const Problem& prob, const TaylorBundle& b, std::span<const double> x,
                              std::span<const double> eps, const GridSpec& grid) {
  Certificate cert;
  cert.x = make_vector(x);
  cert.pass = true;
  cert.source = "step2-termination";
  for (int j = 1; j <= static_cast<int>(eps.size()); ++j) {
    OrderCheck oc;
    double delta = 1.0;
    for (int i = 0; i <= 60; ++i, delta *= 0.5) {
      PhiValue ph = phi_w(prob, b, x, j, delta, grid);
      oc.j = j;
      oc.delta = delta;
      oc.phi = ph.value;
      oc.gap = ph.gap;
      oc.threshold = strong_threshold(eps[j - 1], delta, j);
      oc.pass = oc.phi <= oc.threshold + oc.gap;
      if (oc.pass) break;
    }
    cert.pass = cert.pass && oc.pass;
    cert.orders.push_back(oc);
  }
  return cert;
}

}  // namespace

namespace {

RunResult run_generic(const Problem& prob, const AlgoParams& params, const RunOptions& options) {
  RunResult res;
  const bool want_record = options.keep_trace || static_cast<bool>(options.on_iteration);
  const PolicyInputs policy = policy_for(prob, params.q);
  const std::optional<double> lw_declared = lw_constant(prob);

  StepParams sp;
  sp.theta = params.theta;
  sp.delta_policy = params.delta_policy;
  sp.grid = params.grid;
  sp.seed = params.seed;
  sp.shortcut_varpi = params.shortcut_varpi;

  EvalCounters& counters = res.counters;
  Vector x = prob.x0;
  double w = eval_w(prob, x, counters);
  TaylorBundle bundle = taylor_at(prob, x, prob.p, counters);
  double lw_running = lw_surrogate(prob, bundle.f, bundle.c);
  double sigma = params.sigma0;
  Vector delta = params.initial_delta();
  res.sigma_max = sigma;
  res.rho_min = std::numeric_limits<double>::infinity();
  res.rho_max = -std::numeric_limits<double>::infinity();
  bool step1 = true;
  long long k = 0;
  Certificate last_check;

  auto finish = [&](Termination t, Certificate cert) {
    res.termination = t;
    res.certificate = std::move(cert);
    res.iterations = k;
    res.x_final = x;
    res.w_final = w;
    if (res.rho_min > res.rho_max) res.rho_min = res.rho_max = 0.0;
  };

  for (;;) {
    // Step 1: termination test with the current radii.
    if (step1) {
      last_check = strong_check(prob, bundle, x, params.eps, delta, params.grid, true);
      if (last_check.pass) {
        last_check.source = "step1";
        finish(Termination::step1, std::move(last_check));
        return res;
      }
    }
    if (k >= params.max_iters) {
      res.message = "iteration budget exhausted";
      Certificate c = strong_check(prob, bundle, x, params.eps, delta, params.grid);
      c.source = "budget";
      finish(Termination::budget, std::move(c));
      return res;
    }

    // Step 2: step computation.
    RegModel mdl(bundle.f, bundle.c, prob.h, sigma);
    StepResult step;
    std::optional<HookStep> scripted;
    if (options.hook) scripted = options.hook(k, mdl, x);
    if (scripted) {
      step = hooked_step(mdl, x, prob.feasible, *scripted);
    } else {
      sp.lw_hat = lw_declared ? std::max(1.0, *lw_declared) : lw_running;
      try {
        step = compute_step(mdl, x, prob.feasible, params.eps, sp, policy);
      } catch (const BudgetExhausted& e) {
        res.message = e.what();
        Certificate c = strong_check(prob, bundle, x, params.eps, delta, params.grid);
        c.source = "budget";
        finish(Termination::budget, std::move(c));
        return res;
      }
      if (step.status == StepStatus::step2_terminate) {
        finish(Termination::step2, step2_certificate(prob, bundle, x, params.eps, params.grid));
        return res;
      }
    }

    // Step 3: acceptance.
    Vector trial = add(x, step.s);
    if (!prob.feasible.member(trial)) trial = prob.feasible.project(trial);
    const double w_trial = eval_w(prob, trial, counters);
    const double taylor_dec = w - (step.taylor_value ? *step.taylor_value : model_taylor_w(mdl, step.s));
    double r;
    try {
      r = rho(w, w_trial, taylor_dec);
    } catch (const DegenerateDenominator&) {
      r = -std::numeric_limits<double>::infinity();
    }
    const bool success = r >= params.eta1;
    // Step 4: regularization update.
    const double sigma_next = sigma_update(sigma, r, params);
    if (std::isfinite(r)) {
      res.rho_min = std::min(res.rho_min, r);
      res.rho_max = std::max(res.rho_max, r);
    }
    if (success) ++res.successes;

    if (want_record) {
      IterationRecord rec;
      rec.k = k;
      rec.x = x;
      rec.w = w;
      rec.sigma = sigma;
      rec.sigma_next = sigma_next;
      rec.delta = delta;
      rec.s = step.s;
      rec.step_norm = norm2(step.s);
      rec.rho = r;
      rec.success = success;
      rec.taylor_dec = taylor_dec;
      rec.w_trial = w_trial;
      rec.delta_s = step.delta;
      if (step1)
        for (const auto& oc : last_check.orders) rec.phi.push_back(oc.phi);
      rec.counters = counters;
      rec.hook_used = step.hook_used;
      if (options.on_iteration) options.on_iteration(rec);
      if (options.keep_trace) res.trace.push_back(std::move(rec));
    }

    if (success) {
      x = std::move(trial);
      w = w_trial;
      delta = step.delta;
      bundle = taylor_at(prob, x, prob.p, counters);
      if (!lw_declared) lw_running = std::max(lw_running, lw_surrogate(prob, bundle.f, bundle.c));
    }
    step1 = success;
    sigma = sigma_next;
    res.sigma_max = std::max(res.sigma_max, sigma);
    ++k;
  }
}


// Same algorithm as run_generic for n = 1 and h = 0, with the Taylor data kept
// as a scalar jet. The model views one persistent TaylorPoly, so hooks and the
// step solver see exactly what the generic loop would give them.
RunResult run_smooth_1d(const Problem& prob, const AlgoParams& params, const RunOptions& options) {
  RunResult res;
  const bool want_record = options.keep_trace || static_cast<bool>(options.on_iteration);
  const PolicyInputs policy = policy_for(prob, params.q);
  const std::optional<double> lw_declared = lw_constant(prob);
  const int p = prob.p;
  const int q = params.q;

  StepParams sp;
  sp.theta = params.theta;
  sp.delta_policy = params.delta_policy;
  sp.grid = params.grid;
  sp.seed = params.seed;
  sp.shortcut_varpi = params.shortcut_varpi;

  EvalCounters& counters = res.counters;
  double x = prob.x0[0];
  auto xs = [&x] { return std::span<const double>(&x, 1); };
  double w = eval_w_1d(prob, x, counters);
  double jet[kMaxOrder + 1];
  TaylorPoly tf(xs(), p);
  const VecTaylorPoly no_c;
  auto load = [&] {
    taylor_at_1d(prob, x, p, jet, counters);
    tf.base[0] = x;
    for (int l = 0; l <= p; ++l) tf.terms[l].entry(0) = jet[l];
  };
  load();
  auto bundle = [&] { return TaylorBundle{tf, no_c}; };
  double lw_running = lw_surrogate(prob, tf, no_c);
  double sigma = params.sigma0;
  Vector delta = params.initial_delta();
  res.sigma_max = sigma;
  res.rho_min = std::numeric_limits<double>::infinity();
  res.rho_max = -std::numeric_limits<double>::infinity();
  bool step1 = true;
  long long k = 0;
  double phis[kMaxOrder];
  int nphi = 0;

  auto finish = [&](Termination t, Certificate cert) {
    res.termination = t;
    res.certificate = std::move(cert);
    res.iterations = k;
    res.x_final = Vector{x};
    res.w_final = w;
    if (res.rho_min > res.rho_max) res.rho_min = res.rho_max = 0.0;
  };
  auto budget_stop = [&](std::string why) {
    res.message = std::move(why);
    Certificate c = strong_check(prob, bundle(), xs(), params.eps, delta, params.grid);
    c.source = "budget";
    finish(Termination::budget, std::move(c));
  };

  for (;;) {
    if (step1) {
      bool pass = true;
      nphi = 0;
      for (int j = 1; j <= q; ++j) {
        const PhiValue ph = phi_smooth_1d(jet, j, prob.feasible, x, delta[j - 1]);
        phis[nphi++] = ph.value;
        if (!(ph.value <= strong_threshold(params.eps[j - 1], delta[j - 1], j) + ph.gap)) {
          pass = false;
          break;
        }
      }
      if (pass) {
        Certificate c = strong_check(prob, bundle(), xs(), params.eps, delta, params.grid, true);
        c.source = "step1";
        finish(Termination::step1, std::move(c));
        return res;
      }
    }
    if (k >= params.max_iters) {
      budget_stop("iteration budget exhausted");
      return res;
    }

    RegModel mdl(tf, no_c, prob.h, sigma);
    StepResult step;
    std::optional<HookStep> scripted;
    if (options.hook) scripted = options.hook(k, mdl, xs());
    if (scripted) {
      step = hooked_step(mdl, xs(), prob.feasible, *scripted);
    } else {
      sp.lw_hat = lw_declared ? std::max(1.0, *lw_declared) : lw_running;
      try {
        step = compute_step(mdl, xs(), prob.feasible, params.eps, sp, policy);
      } catch (const BudgetExhausted& e) {
        budget_stop(e.what());
        return res;
      }
      if (step.status == StepStatus::step2_terminate) {
        finish(Termination::step2, step2_certificate(prob, bundle(), xs(), params.eps, params.grid));
        return res;
      }
    }

    double trial = x + step.s[0];
    if (!prob.feasible.member(std::span<const double>(&trial, 1)))
      trial = prob.feasible.project(std::span<const double>(&trial, 1))[0];
    const double w_trial = eval_w_1d(prob, trial, counters);
    const double taylor_dec = w - (step.taylor_value ? *step.taylor_value : model_taylor_w(mdl, step.s));
    double r;
    try {
      r = rho(w, w_trial, taylor_dec);
    } catch (const DegenerateDenominator&) {
      r = -std::numeric_limits<double>::infinity();
    }
    const bool success = r >= params.eta1;
    const double sigma_next = sigma_update(sigma, r, params);
    if (std::isfinite(r)) {
      res.rho_min = std::min(res.rho_min, r);
      res.rho_max = std::max(res.rho_max, r);
    }
    if (success) ++res.successes;

    if (want_record) {
      IterationRecord rec;
      rec.k = k;
      rec.x = Vector{x};
      rec.w = w;
      rec.sigma = sigma;
      rec.sigma_next = sigma_next;
      rec.delta = delta;
      rec.s = step.s;
      rec.step_norm = norm2(step.s);
      rec.rho = r;
      rec.success = success;
      rec.taylor_dec = taylor_dec;
      rec.w_trial = w_trial;
      rec.delta_s = step.delta;
      if (step1)
        for (int i = 0; i < nphi; ++i) rec.phi.push_back(phis[i]);
      rec.counters = counters;
      rec.hook_used = step.hook_used;
      if (options.on_iteration) options.on_iteration(rec);
      if (options.keep_trace) res.trace.push_back(std::move(rec));
    }

    if (success) {
      x = trial;
      w = w_trial;
      delta = step.delta;
      load();
      if (!lw_declared) lw_running = std::max(lw_running, lw_surrogate(prob, tf, no_c));
    }
    step1 = success;
    sigma = sigma_next;
    res.sigma_max = std::max(res.sigma_max, sigma);
    ++k;
  }
}

}  // namespace

RunResult run(const Problem& prob, const AlgoParams& params, const RunOptions& options) {
  prob.validate();
  params.validate();
  if (params.q > prob.p) throw InvalidArgument("q must not exceed the model degree p");
  if (static_cast<int>(prob.x0.size()) != prob.n) throw InvalidArgument("x0 has the wrong dimension");
  if (!prob.feasible.member(prob.x0)) throw InvalidArgument("x0 is infeasible");
  if (prob.n == 1 && prob.h.kind() == HKind::zero && !params.grid.force_grid && !options.generic_loop)
    return run_smooth_1d(prob, params, options);
  return run_generic(prob, params, options);
}

}  // namespace arqpc
