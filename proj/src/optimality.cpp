#include "arqpc/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

namespace arqpc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

poly1d::Poly coeffs_1d(const TaylorPoly& t, int degree, bool drop_constant) {
  poly1d::Poly p;
  p.deg = degree;
  for (int l = drop_constant ? 1 : 0; l <= degree; ++l) p.c[l] = t.terms[l].entry(0) / factorial(l);
  return p;
}

bool exact_capable(int n, const HFunction* h, int inner, const GridSpec& grid) {
  if (n != 1 || grid.force_grid) return false;
  if (h == nullptr || h->kind() == HKind::zero) return true;
  return poly1d::supports(*h) && inner <= poly1d::kMaxInner;
}

// Admissible offsets for n = 1: [-δ, δ] ∩ (F - x). Tiny infeasibility of x from
// round-off is absorbed so that d = 0 stays admissible.
std::pair<double, double> interval_for(const FeasibleSet& f, double x, double delta) {
  auto [lo, hi] = f.interval_1d(x);
  lo = std::max(lo, -delta);
  hi = std::min(hi, delta);
  if (lo > 1e-12 || hi < -1e-12) throw EmptyDomain("center is outside the feasible set");
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

void clamp_phi(PhiValue& r) {
  if (std::abs(r.value) <= r.gap) r.value = 0.0;
}

BallMin grid_min(const Objective& obj, std::span<const double> center, double delta, const FeasibleSet& feasible,
                 const GridSpec& grid) {
  const int n = static_cast<int>(center.size());
  if (n < 1 || n > kMaxDim) throw InvalidArgument("grid minimization supports n = 1..3");
  if (!(delta > 0.0)) throw InvalidArgument("radius must be positive");
  if (!feasible.member(center, 1e-12)) throw EmptyDomain("center is outside the feasible set");
  const int G = std::max(3, grid.points_for(n));

  Vector zero(n, 0.0);
  BallMin best;
  best.argmin = zero;
  best.value = obj(zero);
  const double v0 = best.value;

  // Box of the sampling grid: [-δ, δ]^n, tightened by F along the axis for n = 1.
  double lo1 = -delta, hi1 = delta;
  if (n == 1) std::tie(lo1, hi1) = interval_for(feasible, center[0], delta);
  const double a = n == 1 ? lo1 : -delta;
  const double b = n == 1 ? hi1 : delta;
  const double sp = (b - a) / (G - 1);

  auto admissible = [&](std::span<const double> d) {
    if (norm2(d) > delta * (1 + 1e-12)) return false;
    Vector y = add(center, d);
    return feasible.member(y, 1e-12);
  };

  long long total = 1;
  for (int i = 0; i < n; ++i) total *= G;
  std::vector<double> vals(static_cast<std::size_t>(total), std::numeric_limits<double>::quiet_NaN());
  Vector d(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (int i = 0; i < n; ++i) {
      d[i] = a + sp * static_cast<double>(r % G);
      r /= G;
    }
    if (n > 1 && !admissible(d)) continue;
    double v = obj(d);
    vals[idx] = v;
    if (v < best.value) {
      best.value = v;
      best.argmin = d;
    }
  }

  // Sampled Lipschitz estimate from axis-neighbour differences.
  double lip = 0.0;
  long long stride = 1;
  for (int axis = 0; axis < n; ++axis) {
    for (long long idx = 0; idx < total; ++idx) {
      if ((idx / stride) % G == G - 1) continue;
      double u = vals[idx], w = vals[idx + stride];
      if (std::isnan(u) || std::isnan(w)) continue;
      lip = std::max(lip, std::abs(u - w) / sp);
    }
    stride *= G;
  }

  // Local polish around the best sample.
  if (n == 1) {
    double lo = std::max(a, best.argmin[0] - sp), hi = std::min(b, best.argmin[0] + sp);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double t[1];
    t[0] = x1;
    double f1 = obj(t);
    t[0] = x2;
    double f2 = obj(t);
    for (int it = 0; it < grid.polish_iters && hi - lo > 1e-15 * (1 + std::abs(lo)); ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        t[0] = x1;
        f1 = obj(t);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        t[0] = x2;
        f2 = obj(t);
      }
      if (f1 < best.value) {
        best.value = f1;
        best.argmin[0] = x1;
      }
      if (f2 < best.value) {
        best.value = f2;
        best.argmin[0] = x2;
      }
    }
  } else {
    double step = sp;
    Vector cur = best.argmin;
    double fcur = best.value;
    for (int sweep = 0; sweep < grid.polish_iters && step > 1e-13 * delta; ++sweep) {
      bool moved = false;
      for (int i = 0; i < n; ++i)
        for (double sgn : {1.0, -1.0}) {
          Vector trial = cur;
          trial[i] += sgn * step;
          // Pull the trial back onto the ball and F so the search can slide along the boundary.
          const double r = norm2(trial);
          if (r > delta)
            for (double& t : trial) t *= delta / r;
          Vector y = add(center, trial);
          if (!feasible.member(y, 1e-12)) {
            Vector py = feasible.project(y);
            for (int k = 0; k < n; ++k) trial[k] = py[k] - center[k];
          }
          if (!admissible(trial)) continue;
          double v = obj(trial);
          if (v < fcur) {
            fcur = v;
            cur = trial;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    if (fcur < best.value) {
      best.value = fcur;
      best.argmin = cur;
    }
  }

  best.gap = lip * sp * std::sqrt(static_cast<double>(n)) + 32 * kEps * (1 + std::abs(v0));
  best.exact = false;
  return best;
}

}  // namespace

int GridSpec::points_for(int n) const {
  int base = points_per_axis;
  if (base <= 0) base = n == 1 ? 2048 : n == 2 ? 128 : 48;
  return base * std::max(1, refine);
}

GridSpec GridSpec::doubled() const {
  GridSpec g = *this;
  g.refine = std::max(1, refine) * 2;
  return g;
}

double LocalModel::operator()(std::span<const double> d) const {
  double v = eval_taylor(smooth, d);
  if (h != nullptr && h->kind() != HKind::zero) v += (*h)(eval_taylor(inner, d));
  if (radial != 0.0) v += radial * ipow(norm2(d), radial_power);
  return v;
}

poly1d::Composite LocalModel::to_1d() const {
  if (dim() != 1) throw InvalidArgument("to_1d needs a univariate model");
  poly1d::Composite c;
  c.smooth = coeffs_1d(smooth, smooth.degree(), false);
  for (const auto& comp : inner.components) c.inner.push_back(coeffs_1d(comp, comp.degree(), false));
  c.h = h;
  c.radial = radial;
  c.radial_power = radial_power;
  return c;
}

BallMin global_min_ball(const Objective& objective, std::span<const double> center, double delta,
                        const FeasibleSet& feasible, const GridSpec& grid) {
  return grid_min(objective, center, delta, feasible, grid);
}

BallMin global_min_ball(const LocalModel& model, std::span<const double> center, double delta,
                        const FeasibleSet& feasible, const GridSpec& grid) {
  const int n = model.dim();
  if (static_cast<int>(center.size()) != n) throw InvalidArgument("global_min_ball: dimension mismatch");
  if (!(delta > 0.0)) throw InvalidArgument("radius must be positive");
  if (exact_capable(n, model.h, model.inner.size(), grid)) {
    auto [lo, hi] = interval_for(feasible, center[0], delta);
    poly1d::Result r = poly1d::minimize(model.to_1d(), lo, hi);
    BallMin out;
    out.argmin = Vector{r.argmin};
    out.value = r.value;
    out.gap = r.gap;
    out.exact = true;
    return out;
  }
  return grid_min([&model](std::span<const double> d) { return model(d); }, center, delta, feasible, grid);
}

PhiValue phi_smooth_1d(const double* derivs, int j, const FeasibleSet& feasible, double x, double delta) {
  // The constant of f cancels in w(x) - min.
  poly1d::Poly poly;
  poly.deg = j;
  double inv = 1.0;
  for (int l = 1; l <= j; ++l) {
    inv /= l;
    poly.c[l] = derivs[l] * inv;
  }
  auto [lo, hi] = interval_for(feasible, x, delta);
  poly1d::Result r = poly1d::minimize_poly(poly, lo, hi);
  PhiValue out;
  out.value = -r.value;
  out.gap = r.gap;
  out.argmin = Vector{r.argmin};
  out.exact = true;
  clamp_phi(out);
  return out;
}

PhiValue phi_w(const Problem& prob, const TaylorBundle& at_x, std::span<const double> x, int j, double delta,
               const GridSpec& grid) {
  if (j < 1 || j > at_x.f.degree()) throw InvalidArgument("phi_w: order outside 1..degree of the Taylor data");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("phi_w: radius must lie in (0, 1]");
  const HFunction* h = prob.h.kind() == HKind::zero ? nullptr : &prob.h;
  PhiValue out;
  if (prob.n == 1 && h == nullptr && !grid.force_grid) {
    double d[kMaxOrder + 1];
    for (int l = 0; l <= j; ++l) d[l] = at_x.f.terms[l].entry(0);
    return phi_smooth_1d(d, j, prob.feasible, x[0], delta);
  } else if (exact_capable(prob.n, h, at_x.c.size(), grid)) {
    // Univariate fast path: the constant of f cancels in w(x) - min.
    poly1d::Composite obj;
    obj.smooth = coeffs_1d(at_x.f, j, true);
    if (h != nullptr)
      for (const auto& comp : at_x.c.components) obj.inner.push_back(coeffs_1d(comp, j, false));
    obj.h = h;
    auto [lo, hi] = interval_for(prob.feasible, x[0], delta);
    poly1d::Result r = poly1d::minimize(obj, lo, hi);
    out.value = obj(0.0) - r.value;
    out.gap = r.gap;
    out.argmin = Vector{r.argmin};
    out.exact = true;
  } else {
    LocalModel model;
    model.smooth = at_x.f.truncated(j);
    model.smooth.terms[0].entry(0) = 0.0;
    if (h != nullptr) model.inner = at_x.c.truncated(j);
    model.h = h;
    Vector zero(prob.n, 0.0);
    const double m0 = model(zero);
    BallMin r = global_min_ball(model, x, delta, prob.feasible, grid);
    out.value = m0 - r.value;
    out.gap = r.gap;
    out.argmin = r.argmin;
    out.exact = r.exact;
  }
  clamp_phi(out);
  return out;
}

PhiValue phi_w(const Problem& prob, std::span<const double> x, int j, double delta, const GridSpec& grid,
               EvalCounters* counters) {
  EvalCounters local;
  TaylorBundle b = taylor_at(prob, x, std::min(prob.p, std::max(j, 1)), counters ? *counters : local);
  return phi_w(prob, b, x, j, delta, grid);
}

Certificate strong_check(const Problem& prob, const TaylorBundle& at_x, std::span<const double> x,
                         std::span<const double> eps, std::span<const double> delta, const GridSpec& grid,
                         bool stop_early) {
  if (eps.size() != delta.size() || eps.empty()) throw InvalidArgument("strong_check: need q values of ε and δ");
  Certificate cert;
  cert.x = make_vector(x);
  cert.pass = true;
  const int q = static_cast<int>(eps.size());
  for (int j = 1; j <= q; ++j) {
    PhiValue phi = phi_w(prob, at_x, x, j, delta[j - 1], grid);
    OrderCheck oc;
    oc.j = j;
    oc.delta = delta[j - 1];
    oc.phi = phi.value;
    oc.gap = phi.gap;
    oc.threshold = strong_threshold(eps[j - 1], delta[j - 1], j);
    oc.pass = oc.phi <= oc.threshold + oc.gap;
    cert.orders.push_back(oc);
    if (!oc.pass) {
      cert.pass = false;
      if (stop_early) break;
    }
  }
  return cert;
}

Certificate strong_check(const Problem& prob, std::span<const double> x, std::span<const double> eps,
                         std::span<const double> delta, const GridSpec& grid) {
  EvalCounters local;
  const int q = static_cast<int>(eps.size());
  if (q > prob.p) throw InvalidArgument("strong_check: q exceeds the model degree");
  TaylorBundle b = taylor_at(prob, x, q, local);
  return strong_check(prob, b, x, eps, delta, grid);
}

double chi(int q, double delta) {
  if (q < 1) throw InvalidArgument("chi: q must be >= 1");
  if (!(delta > 0.0)) throw InvalidArgument("chi: δ must be positive");
  double acc = 0.0;
  for (int l = 1; l <= q; ++l) acc += ipow(delta, l) / factorial(l);
  return acc;
}

bool weak_check(const Problem& prob, std::span<const double> x, int q, double eps_q, double delta_q,
                const GridSpec& grid) {
  PhiValue phi = phi_w(prob, x, q, delta_q, grid);
  return phi.value <= eps_q * chi(q, delta_q) + phi.gap;
}

}  // namespace arqpc
