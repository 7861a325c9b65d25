#include "arqpc/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace arqpc {

namespace {

// a + c·b for tensors of identical shape.
void axpy(SymTensor& a, double c, const SymTensor& b) {
  for (int i = 0; i < a.size(); ++i) a.entry(i) += c * b.entry(i);
}

double reg_coef(const RegModel& mdl) { return mdl.sigma / factorial(mdl.p + 1); }

bool composite(const RegModel& mdl) { return mdl.h != nullptr && mdl.h->kind() != HKind::zero; }

// Radius containing every s with m(s) <= m(0).
double descent_radius(const RegModel& mdl) {
  double kf = 0.0;
  for (int l = 1; l <= mdl.p; ++l) kf += mdl.tf.terms[l].frobenius_norm() / factorial(l);
  double kc = 0.0;
  if (composite(mdl))
    for (const auto& c : mdl.tc.components)
      for (int l = 0; l <= c.degree(); ++l) kc += c.terms[l].frobenius_norm() / factorial(l);
  double k = kf + 2.0 * (composite(mdl) ? mdl.h->lipschitz() : 0.0) * kc;
  return std::max(1.0, factorial(mdl.p + 1) * k / mdl.sigma) * (1.0 + 1e-9);
}

struct Candidate {
  Vector s;
  double value;
};

// Projected damped Newton with Armijo backtracking for smooth models.
Candidate newton_descent(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible, Vector s) {
  const int n = mdl.dim();
  const double rc = reg_coef(mdl);
  auto project_step = [&](const Vector& t) {
    Vector y = feasible.project(add(x_k, t));
    Vector r(n);
    for (int i = 0; i < n; ++i) r[i] = y[i] - x_k[i];
    return r;
  };
  s = project_step(s);
  double f = model_eval(mdl, s);
  for (int it = 0; it < 200; ++it) {
    SymTensor g1 = shift_derivative(mdl.tf, s, 1);
    axpy(g1, rc, reg_derivative_tensor(s, mdl.p, 1));
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = g1.entry(i);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    if (mdl.p >= 2) {
      SymTensor h2 = shift_derivative(mdl.tf, s, 2);
      if (norm2(s) > 0.0) axpy(h2, rc, reg_derivative_tensor(s, mdl.p, 2));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          int idx[2] = {i, j};
          H(i, j) = h2.get(idx);
        }
    } else {
      // p = 1: the model is linear plus σ/2‖s‖².
      H = Eigen::MatrixXd::Identity(n, n) * (2.0 * rc);
    }
    if (g.norm() <= 1e-14 * (1.0 + std::abs(f))) break;

    Eigen::VectorXd dir;
    double lambda = 0.0;
    const double hscale = 1.0 + H.cwiseAbs().maxCoeff();
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::LLT<Eigen::MatrixXd> llt(H + lambda * Eigen::MatrixXd::Identity(n, n));
      if (llt.info() == Eigen::Success) {
        dir = llt.solve(-g);
        break;
      }
      lambda = lambda == 0.0 ? 1e-10 * hscale : lambda * 4.0;
    }
    if (dir.size() == 0 || !(g.dot(dir) < 0.0)) dir = -g;

    bool moved = false;
    for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
      double t = 1.0;
      for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
        Vector trial(n);
        for (int i = 0; i < n; ++i) trial[i] = s[i] + t * dir(i);
        trial = project_step(trial);
        double ft = model_eval(mdl, trial);
        double lin = 0.0;
        for (int i = 0; i < n; ++i) lin += g(i) * (trial[i] - s[i]);
        if (ft <= f + 1e-4 * std::min(lin, 0.0) && ft < f) {
          s = trial;
          f = ft;
          moved = true;
          break;
        }
      }
      if (!moved) dir = -g;
    }
    if (!moved) break;
  }
  return {s, f};
}

// Derivative-free compass search with rejection of infeasible trial points.
Candidate compass_descent(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible, Vector s,
                          double step) {
  const int n = mdl.dim();
  auto feasible_step = [&](const Vector& t) { return feasible.member(add(x_k, t), 0.0); };
  if (!feasible_step(s)) s = Vector(n, 0.0);
  double f = model_eval(mdl, s);
  for (int it = 0; it < 20000 && step > 1e-15 * (1.0 + norm2(s)); ++it) {
    bool moved = false;
    for (int i = 0; i < n && !moved; ++i)
      for (double sgn : {1.0, -1.0}) {
        Vector t = s;
        t[i] += sgn * step;
        if (!feasible_step(t)) continue;
        double ft = model_eval(mdl, t);
        if (ft < f) {
          s = t;
          f = ft;
          moved = true;
          break;
        }
      }
    if (!moved) step *= 0.5;
  }
  return {s, f};
}

Candidate minimize_model(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible,
                         const StepParams& params) {
  const int n = mdl.dim();
  const double R = descent_radius(mdl);
  const bool comp = composite(mdl);

  if (n == 1 && (!comp || (poly1d::supports(*mdl.h) && mdl.tc.size() <= poly1d::kMaxInner))) {
    poly1d::Composite obj;
    obj.smooth.deg = mdl.p;
    for (int l = 0; l <= mdl.p; ++l) obj.smooth.c[l] = mdl.tf.terms[l].entry(0) / factorial(l);
    if (comp) {
      for (const auto& c : mdl.tc.components) {
        poly1d::Poly pc;
        pc.deg = c.degree();
        for (int l = 0; l <= c.degree(); ++l) pc.c[l] = c.terms[l].entry(0) / factorial(l);
        obj.inner.push_back(pc);
      }
      obj.h = mdl.h;
    }
    obj.radial = reg_coef(mdl);
    obj.radial_power = mdl.p + 1;
    auto [lo, hi] = feasible.interval_1d(x_k[0]);
    lo = std::min(0.0, std::max(lo, -R));
    hi = std::max(0.0, std::min(hi, R));
    poly1d::Result r = poly1d::minimize(obj, lo, hi);
    return {Vector{r.argmin}, model_eval(mdl, Vector{r.argmin})};
  }

  // Seeds: d = 0, the best point of a grid over the descent ball, and random
  // points of the unit ball.
  std::vector<Vector> starts;
  starts.emplace_back(n, 0.0);
  BallMin g = global_min_ball([&](std::span<const double> s) { return model_eval(mdl, s); }, x_k, R, feasible,
                              params.grid);
  starts.push_back(g.argmin);
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < params.multistart; ++i) {
    Vector v(n);
    for (double& x : v) x = gauss(rng);
    double nv = norm2(v);
    double r = std::pow(unif(rng), 1.0 / n);
    for (double& x : v) x = x / nv * r;
    starts.push_back(v);
  }
  Candidate best{Vector(n, 0.0), model_eval(mdl, Vector(n, 0.0))};
  const double grid_step = 2.0 * R / std::max(2, params.grid.points_for(n) - 1);
  for (const auto& st : starts) {
    Candidate c = comp ? compass_descent(mdl, x_k, feasible, st, std::max(grid_step, 1e-3))
                       : newton_descent(mdl, x_k, feasible, st);
    if (c.value < best.value) best = c;
  }
  return best;
}

}  // namespace

RegModel::RegModel(const TaylorPoly& tf_, const VecTaylorPoly& tc_, const HFunction& h_, double sigma_)
    : tf(tf_), tc(tc_), h(&h_), sigma(sigma_), p(tf_.degree()) {
  if (!(sigma > 0.0)) throw InvalidArgument("regularization weight σ must be positive");
  if (p < 1) throw InvalidArgument("model degree must be >= 1");
  if (h->kind() != HKind::zero && tc.size() != h->m()) throw InvalidArgument("c model size differs from h dimension");
}

double model_taylor_w(const RegModel& mdl, std::span<const double> s) {
  double v = eval_taylor(mdl.tf, s);
  if (composite(mdl)) v += (*mdl.h)(eval_taylor(mdl.tc, s));
  return v;
}

double model_eval(const RegModel& mdl, std::span<const double> s) {
  return model_taylor_w(mdl, s) + reg_coef(mdl) * ipow(norm2(s), mdl.p + 1);
}

namespace {

// m(0) without evaluating the polynomials.
double model_at_origin(const RegModel& mdl) {
  double v = mdl.tf.value();
  if (composite(mdl)) {
    Vector c0;
    for (const auto& c : mdl.tc.components) c0.push_back(c.value());
    v += (*mdl.h)(c0);
  }
  return v;
}

}  // namespace

PhiValue model_phi(const RegModel& mdl, std::span<const double> x_k, std::span<const double> s, int j, double delta,
                   const FeasibleSet& feasible, const GridSpec& grid) {
  const int n = mdl.dim();
  if (j < 1 || j > mdl.p) throw InvalidArgument("model_phi: order outside 1..p");
  if (!(delta > 0.0)) throw InvalidArgument("model_phi: radius must be positive");
  if (static_cast<int>(s.size()) != n || static_cast<int>(x_k.size()) != n)
    throw InvalidArgument("model_phi: dimension mismatch");
  if (j >= 2 && norm2(s) == 0.0) throw SingularPoint("model_phi: order >= 2 needs s != 0");

  const double rc = reg_coef(mdl);
  LocalModel lm;
  Vector zero(n, 0.0);
  lm.smooth = TaylorPoly(zero, j);
  for (int l = 1; l <= j; ++l) {
    SymTensor t = shift_derivative(mdl.tf, s, l);
    axpy(t, rc, reg_derivative_tensor(s, mdl.p, l));
    lm.smooth.terms[l] = t;
  }
  if (composite(mdl)) {
    for (const auto& c : mdl.tc.components) {
      TaylorPoly tp(zero, j);
      for (int l = 0; l <= j; ++l) tp.terms[l] = shift_derivative(c, s, l);
      lm.inner.components.push_back(tp);
    }
    lm.h = mdl.h;
  }
  Vector center = add(x_k, s);
  const double m0 = lm(zero);
  BallMin r = global_min_ball(lm, center, delta, feasible, grid);
  PhiValue out;
  out.value = m0 - r.value;
  out.gap = r.gap;
  out.argmin = r.argmin;
  out.exact = r.exact;
  if (std::abs(out.value) <= out.gap) out.value = 0.0;
  return out;
}

bool large_step_shortcut(double step_norm, std::span<const double> eps, const PolicyInputs& policy, double varpi,
                         double theta) {
  if (!(varpi > theta && varpi <= 1.0)) throw InvalidArgument("shortcut constant must lie in (θ, 1]");
  if (eps.empty()) throw InvalidArgument("shortcut needs at least one tolerance");
  const int p = policy.p, q = policy.q;
  double e;
  if (policy.good_case())
    e = 1.0 / (p - q + 1);
  else if (policy.h_zero)
    e = static_cast<double>(q) / p;
  else
    e = static_cast<double>(q + 1) / (p + 1);
  double emin = *std::min_element(eps.begin(), eps.end());
  return step_norm >= varpi * std::pow(emin, e);
}

double kappa_delta(double theta, int q, double lw_hat, double sigma) {
  return theta / (2.0 * factorial(q) * (6.0 * lw_hat + 3.0 * sigma));
}

StepResult compute_step(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible,
                        std::span<const double> eps, const StepParams& params, const PolicyInputs& policy) {
  const int q = static_cast<int>(eps.size());
  if (q < 1 || q > mdl.p) throw InvalidArgument("compute_step: q must lie in 1..p");
  const int n = mdl.dim();
  StepResult res;
  Vector zero(n, 0.0);
  res.m0 = model_eval(mdl, zero);

  Candidate best = minimize_model(mdl, x_k, feasible, params);
  res.s = best.s;
  res.model_value = best.value;
  if (!(best.value < res.m0 - 1e-12 * (1.0 + std::abs(res.m0)))) {
    res.status = StepStatus::step2_terminate;
    res.s = zero;
    res.model_value = res.m0;
    return res;
  }

  res.kappa_delta = kappa_delta(params.theta, q, std::max(1.0, params.lw_hat), mdl.sigma);
  const bool try_unit = params.delta_policy == DeltaPolicy::unit ||
                        (params.delta_policy == DeltaPolicy::auto_ && policy.good_case());
  const bool shortcut = params.shortcut_varpi &&
                        large_step_shortcut(norm2(res.s), eps, policy, *params.shortcut_varpi, params.theta);
  res.via_shortcut = shortcut;

  for (int j = 1; j <= q; ++j) {
    const double floor_delta = std::min(1.0, res.kappa_delta * eps[j - 1]);
    bool done = false;
    auto attempt = [&](double delta) {
      if (shortcut) {
        res.delta.push_back(delta);
        res.phi.push_back(PhiValue{});
        return true;
      }
      PhiValue ph = model_phi(mdl, x_k, res.s, j, delta, feasible, params.grid);
      if (ph.value <= params.theta * strong_threshold(eps[j - 1], delta, j) + ph.gap) {
        res.delta.push_back(delta);
        res.phi.push_back(ph);
        return true;
      }
      return false;
    };
    if (try_unit && attempt(1.0)) {
      res.floor_met.push_back(true);
      continue;
    }
    res.fallback_used = true;
    double delta = floor_delta;
    for (int hv = 0; hv <= params.max_halvings; ++hv, delta *= 0.5) {
      if (attempt(delta)) {
        res.floor_met.push_back(hv == 0);
        res.halvings += hv;
        done = true;
        break;
      }
    }
    if (!done)
      throw BudgetExhausted("no optimality radius certified for order " + std::to_string(j) + " after " +
                            std::to_string(params.max_halvings) + " halvings");
  }
  return res;
}

StepResult hooked_step(const RegModel& mdl, std::span<const double> x_k, const FeasibleSet& feasible,
                       const HookStep& step) {
  const int n = mdl.dim();
  if (static_cast<int>(step.s.size()) != n) throw InvalidArgument("step hook returned a step of the wrong size");
  if (feasible.kind() != FeasibleKind::all_space && !feasible.member(add(x_k, step.s))) throw InvalidArgument("step hook returned an infeasible step");
  StepResult res;
  res.m0 = model_at_origin(mdl);
  res.s = step.s;
  res.delta = step.delta;
  res.taylor_value = model_taylor_w(mdl, step.s);
  res.model_value = *res.taylor_value + reg_coef(mdl) * ipow(norm2(step.s), mdl.p + 1);
  res.hook_used = true;
  if (res.model_value > res.m0) throw InvalidArgument("step hook returned a step without model decrease");
  return res;
}

}  // namespace arqpc
