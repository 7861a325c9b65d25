#include "arqpc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arqpc {

FeasibleSet FeasibleSet::all() { return FeasibleSet{}; }

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in length");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i])) throw InvalidArgument("box lower bound exceeds upper bound");
  FeasibleSet f;
  f.kind_ = FeasibleKind::box;
  f.lower_ = std::move(lower);
  f.upper_ = std::move(upper);
  return f;
}

FeasibleSet FeasibleSet::l2_ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  FeasibleSet f;
  f.kind_ = FeasibleKind::l2_ball;
  f.center_ = std::move(center);
  f.radius_ = radius;
  return f;
}

bool FeasibleSet::member(std::span<const double> x, double tol) const {
  switch (kind_) {
    case FeasibleKind::all_space:
      return true;
    case FeasibleKind::box:
      if (x.size() != lower_.size()) throw InvalidArgument("box: dimension mismatch");
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
      return true;
    case FeasibleKind::l2_ball: {
      if (x.size() != center_.size()) throw InvalidArgument("ball: dimension mismatch");
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - center_[i]) * (x[i] - center_[i]);
      return std::sqrt(acc) <= radius_ + tol;
    }
  }
  return false;
}

Vector FeasibleSet::project(std::span<const double> x) const {
  Vector r(x.begin(), x.end());
  switch (kind_) {
    case FeasibleKind::all_space:
      break;
    case FeasibleKind::box:
      if (x.size() != lower_.size()) throw InvalidArgument("box: dimension mismatch");
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::clamp(r[i], lower_[i], upper_[i]);
      break;
    case FeasibleKind::l2_ball: {
      if (x.size() != center_.size()) throw InvalidArgument("ball: dimension mismatch");
      double acc = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) acc += (r[i] - center_[i]) * (r[i] - center_[i]);
      double d = std::sqrt(acc);
      if (d > radius_)
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = center_[i] + (r[i] - center_[i]) * (radius_ / d);
      break;
    }
  }
  return r;
}

std::pair<double, double> FeasibleSet::interval_1d(double x) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case FeasibleKind::all_space:
      return {-inf, inf};
    case FeasibleKind::box:
      return {lower_[0] - x, upper_[0] - x};
    case FeasibleKind::l2_ball:
      return {center_[0] - radius_ - x, center_[0] + radius_ - x};
  }
  return {-inf, inf};
}

void Problem::validate() const {
  if (p < 1) throw InvalidArgument("model degree p must be >= 1");
  if (p > kMaxOrder - 2) throw InvalidArgument("model degree p must be <= 6");
  if (n < 1 || n > kMaxDim) throw InvalidArgument("dimension n must be in 1..3");
  if (m < 0) throw InvalidArgument("m must be nonnegative");
  if (!f_oracle) throw InvalidArgument("problem needs an f oracle");
  if (h.kind() != HKind::zero && !c_oracle) throw InvalidArgument("composite problem needs a c oracle");
  if (h.kind() != HKind::zero && h.m() != m) throw InvalidArgument("h dimension differs from m");
  for (double l : lipschitz_f)
    if (!std::isnan(l) && l < 1.0) throw InvalidArgument("declared Lipschitz constants must be >= 1");
  for (double l : lipschitz_c)
    if (!std::isnan(l) && l < 1.0) throw InvalidArgument("declared Lipschitz constants must be >= 1");
  if (!x0.empty() && static_cast<int>(x0.size()) != n) throw InvalidArgument("x0 has the wrong dimension");
}

namespace {

template <class Fn>
auto call_oracle(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InvalidArgument&) {
    throw;
  } catch (const OracleError&) {
    throw;
  } catch (const InfeasiblePoint&) {
    throw;
  } catch (const std::exception& e) {
    throw OracleError(std::string("oracle failure: ") + e.what());
  }
}

void check_poly(const TaylorPoly& t, int n, int degree) {
  if (t.dim() != n) throw OracleError("oracle returned data of the wrong dimension");
  if (t.degree() < degree) throw OracleError("oracle returned too few derivatives");
}

}  // namespace

double eval_w(const Problem& prob, std::span<const double> x, EvalCounters& counters) {
  if (static_cast<int>(x.size()) != prob.n) throw InvalidArgument("eval_w: dimension mismatch");
  if (!prob.feasible.member(x)) throw InfeasiblePoint("eval_w: point outside the feasible set");
  ++counters.w_evals;
  TaylorPoly f = call_oracle([&] { return prob.f_oracle(x, 0); });
  check_poly(f, prob.n, 0);
  double v = f.value();
  if (prob.h.kind() != HKind::zero) {
    VecTaylorPoly c = call_oracle([&] { return prob.c_oracle(x, 0); });
    if (c.size() != prob.m) throw OracleError("c oracle returned the wrong number of components");
    v += prob.h(c.values());
  }
  return v;
}

TaylorBundle taylor_at(const Problem& prob, std::span<const double> x, int degree, EvalCounters& counters) {
  if (degree < 0 || degree > prob.p) throw InvalidArgument("taylor_at: degree outside 0..p");
  if (static_cast<int>(x.size()) != prob.n) throw InvalidArgument("taylor_at: dimension mismatch");
  if (!prob.feasible.member(x)) throw InfeasiblePoint("taylor_at: point outside the feasible set");
  TaylorBundle b;
  b.f = call_oracle([&] { return prob.f_oracle(x, degree); });
  check_poly(b.f, prob.n, degree);
  if (b.f.degree() > degree) b.f = b.f.truncated(degree);
  if (prob.h.kind() != HKind::zero || (prob.m > 0 && prob.c_oracle)) {
    b.c = call_oracle([&] { return prob.c_oracle(x, degree); });
    if (b.c.size() != prob.m) throw OracleError("c oracle returned the wrong number of components");
    for (auto& comp : b.c.components) {
      check_poly(comp, prob.n, degree);
      if (comp.degree() > degree) comp = comp.truncated(degree);
    }
  }
  if (degree >= 1) ++counters.deriv_evals;
  return b;
}

double eval_w_1d(const Problem& prob, double x, EvalCounters& counters) {
  if (!prob.f_jet_1d) return eval_w(prob, std::span<const double>(&x, 1), counters);
  if (prob.n != 1 || prob.h.kind() != HKind::zero) throw InvalidArgument("eval_w_1d: smooth univariate problems only");
  if (!prob.feasible.member(std::span<const double>(&x, 1)))
    throw InfeasiblePoint("eval_w: point outside the feasible set");
  ++counters.w_evals;
  double v = 0.0;
  call_oracle([&] { prob.f_jet_1d(x, 0, &v); });
  return v;
}

void taylor_at_1d(const Problem& prob, double x, int degree, double* out, EvalCounters& counters) {
  if (!prob.f_jet_1d) {
    TaylorBundle b = taylor_at(prob, std::span<const double>(&x, 1), degree, counters);
    for (int l = 0; l <= degree; ++l) out[l] = b.f.terms[l].entry(0);
    return;
  }
  if (prob.n != 1 || prob.h.kind() != HKind::zero) throw InvalidArgument("taylor_at_1d: smooth univariate problems only");
  if (degree < 0 || degree > prob.p) throw InvalidArgument("taylor_at: degree outside 0..p");
  if (!prob.feasible.member(std::span<const double>(&x, 1)))
    throw InfeasiblePoint("taylor_at: point outside the feasible set");
  call_oracle([&] { prob.f_jet_1d(x, degree, out); });
  if (degree >= 1) ++counters.deriv_evals;
}

double bundle_value(const Problem& prob, const TaylorBundle& b) {
  double v = b.f.value();
  if (prob.h.kind() != HKind::zero) v += prob.h(b.c.values());
  return v;
}

namespace {

std::optional<double> declared(const std::vector<double>& v, int order) {
  if (order < 0 || order >= static_cast<int>(v.size()) || std::isnan(v[order])) return std::nullopt;
  return v[order];
}

// L_{f,j} + L_h L_{c,j}; the c constant is only needed when h is not identically zero.
std::optional<double> combined(const Problem& prob, int order) {
  auto lf = declared(prob.lipschitz_f, order);
  if (!lf) return std::nullopt;
  if (prob.h.lipschitz() == 0.0) return *lf;
  auto lc = declared(prob.lipschitz_c, order);
  if (!lc) return std::nullopt;
  return *lf + prob.h.lipschitz() * *lc;
}

}  // namespace

std::optional<double> lw_constant(const Problem& prob) {
  double best = 0.0;
  for (int j = 1; j <= prob.p; ++j) {
    auto v = combined(prob, j - 1);
    if (!v) return std::nullopt;
    best = std::max(best, *v);
  }
  return best;
}

std::optional<double> lwp_constant(const Problem& prob) { return combined(prob, prob.p); }

}  // namespace arqpc
