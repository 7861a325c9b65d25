#include "arqpc/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace arqpc {

std::string to_string(WorstCaseKind k) {
  switch (k) {
    case WorstCaseKind::thm61:
      return "thm61";
    case WorstCaseKind::thm63:
      return "thm63";
    case WorstCaseKind::cor64:
      return "cor64";
  }
  return "unknown";
}

WorstCaseKind worstcase_kind_from_name(const std::string& name) {
  std::string n = name.rfind("wc-", 0) == 0 ? name.substr(3) : name;
  if (n == "thm61") return WorstCaseKind::thm61;
  if (n == "thm63") return WorstCaseKind::thm63;
  if (n == "cor64") return WorstCaseKind::cor64;
  throw InvalidArgument("unknown worst-case kind: " + name);
}

long long ceil_power(double eps, double e) {
  const double v = std::pow(eps, -e);
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, r)) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(v));
}

WorstCaseInstance build_thm61(int p, int q, double eps) {
  if (p < 1) throw InvalidArgument("thm61 needs p >= 1");
  if (q < 1 || q > p) throw InvalidArgument("thm61 needs 1 <= q <= p");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("thm61 needs ε in (0,1)");
  WorstCaseInstance w;
  w.kind_ = WorstCaseKind::thm61;
  w.p_ = p;
  w.q_ = q;
  w.eps_ = eps;
  w.k_eps_ = ceil_power(eps, static_cast<double>(p + 1) / (p - q + 1));
  w.sigma_ = factorial(p) / factorial(q - 1);
  w.delta_ = 1.0;
  return w;
}

WorstCaseInstance build_thm63(int p, int q, double eps) {
  if (p < 1) throw InvalidArgument("thm63 needs p >= 1");
  if (q < 2) throw InvalidArgument("thm63 needs q >= 2");
  if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("thm63 needs ε in (0, 1/2]");
  WorstCaseInstance w;
  w.kind_ = WorstCaseKind::thm63;
  w.p_ = p;
  w.q_ = q;
  w.eps_ = eps;
  w.k_eps_ = ceil_power(eps, static_cast<double>(q) * (p + 1) / p);
  w.sigma_ = factorial(p);
  w.delta_ = eps;
  return w;
}

WorstCaseInstance build_cor64(int p, double eps) {
  WorstCaseInstance w = build_thm61(p, 1, eps);
  w.kind_ = WorstCaseKind::cor64;
  return w;
}

WorstCaseInstance build_worstcase(WorstCaseKind kind, int p, int q, double eps) {
  switch (kind) {
    case WorstCaseKind::thm61:
      return build_thm61(p, q, eps);
    case WorstCaseKind::thm63:
      return build_thm63(p, q, eps);
    case WorstCaseKind::cor64:
      if (q != 1) throw InvalidArgument("cor64 is defined for q = 1 only");
      return build_cor64(p, eps);
  }
  throw InvalidArgument("unknown worst-case kind");
}

namespace {

// x^{num/den} for x >= 0, using exact products and sqrt where the exponent allows.
double ratpow(double x, int num, int den) {
  if (num % den == 0) return ipow(x, num / den);
  if ((2 * num) % den == 0) return ipow(x, num * 2 / den / 2) * std::sqrt(x);
  return std::pow(x, static_cast<double>(num) / den);
}

}  // namespace

double WorstCaseInstance::zeta() const {
  return static_cast<double>(p_ - q_ + 1) / ((p_ + 1) * factorial(q_));
}

double WorstCaseInstance::omega(long long k) const {
  const double base = kind_ == WorstCaseKind::thm63 ? ipow(eps_, q_) : eps_;
  return base * static_cast<double>(k_eps_ - k) / static_cast<double>(k_eps_);
}

double WorstCaseInstance::derivative(long long k, int order) const {
  if (kind_ == WorstCaseKind::thm63) {
    if (order != 1) return 0.0;
    return -(ipow(eps_, q_) + omega(k)) / factorial(q_);
  }
  if (order != q_) return 0.0;
  return -(eps_ + omega(k));
}

double WorstCaseInstance::step(long long k) const {
  if (kind_ == WorstCaseKind::thm63) return ratpow((ipow(eps_, q_) + omega(k)) / factorial(q_), 1, p_);
  return ratpow(eps_ + omega(k), 1, p_ - q_ + 1);
}

double WorstCaseInstance::f0_start() const {
  if (kind_ == WorstCaseKind::thm63) return std::pow(2.0, 1.0 + static_cast<double>(q_) * (p_ + 1) / p_);
  return std::pow(2.0, 1.0 + static_cast<double>(p_ + 1) / (p_ - q_ + 1));
}

double WorstCaseInstance::f0_decrement(long long k) const {
  if (kind_ == WorstCaseKind::thm63) {
    double a = (ipow(eps_, q_) + omega(k)) / factorial(q_);
    return static_cast<double>(p_) / (p_ + 1) * ratpow(a, p_ + 1, p_);
  }
  return zeta() * ratpow(eps_ + omega(k), p_ + 1, p_ - q_ + 1);
}

std::vector<Node> WorstCaseInstance::nodes(long long max_nodes) const {
  if (k_eps_ + 1 > max_nodes) throw InvalidArgument("worst-case sequence too long to materialize");
  std::vector<Node> out;
  out.reserve(static_cast<std::size_t>(k_eps_ + 1));
  double x = 0.0, f0 = f0_start();
  for (long long k = 0; k <= k_eps_; ++k) {
    Node nd;
    nd.k = k;
    nd.x = x;
    nd.jet.push_back(f0);
    for (int j = 1; j <= p_; ++j) nd.jet.push_back(derivative(k, j));
    nd.s = k < k_eps_ ? step(k) : 0.0;
    out.push_back(nd);
    if (k < k_eps_) {
      x = x + nd.s;
      f0 -= f0_decrement(k);
    }
  }
  return out;
}

NodeCursor::NodeCursor(const WorstCaseInstance& inst) : inst_(inst) {
  x_ = 0.0;
  f0_ = inst_.f0_start();
  s_ = inst_.k_eps() > 0 ? inst_.step(0) : 0.0;
  x_next_ = x_ + s_;
  load_jet();
}

void NodeCursor::load_jet() {
  // Only the active order is ever nonzero, so the other entries stay put.
  if (static_cast<int>(jet_.size()) != inst_.p() + 1) jet_.assign(inst_.p() + 1, 0.0);
  const int j = inst_.active_order();
  jet_[j] = inst_.derivative(k_, j);
}

void NodeCursor::advance() {
  f0_ -= inst_.f0_decrement(k_);
  x_ = x_next_;
  ++k_;
  s_ = k_ < inst_.k_eps() ? inst_.step(k_) : 0.0;
  x_next_ = x_ + s_;
  load_jet();
}

void NodeCursor::jet(double x, int degree, double* out) {
  if (x != x_) {
    if (k_ < inst_.k_eps() && x == x_next_) {
      advance();
    } else {
      std::ostringstream os;
      os.precision(17);
      os << "query at x = " << x << " is neither node " << k_ << " nor its successor";
      throw OracleError(os.str());
    }
  }
  out[0] = f0_;
  for (int j = 1; j <= degree; ++j) out[j] = j <= inst_.p() ? jet_[j] : 0.0;
}

TaylorPoly NodeCursor::at(double x, int degree) {
  double d[kMaxOrder + 1];
  jet(x, degree, d);
  double b[1] = {x_};
  TaylorPoly t(b, degree);
  for (int j = 0; j <= degree; ++j) t.terms[j].entry(0) = d[j];
  return t;
}

HermiteInterpolant::HermiteInterpolant(const std::vector<Node>& nodes) {
  if (nodes.empty()) throw InvalidArgument("interpolant needs at least one node");
  p_ = static_cast<int>(nodes.front().jet.size()) - 1;
  if (p_ < 0) throw InvalidArgument("nodes need derivative jets");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (static_cast<int>(nodes[i].jet.size()) != p_ + 1) throw InvalidArgument("nodes carry jets of unequal length");
    if (i > 0 && !(nodes[i].x > nodes[i - 1].x)) throw InvalidArgument("interpolation nodes must be strictly increasing");
    xs_.push_back(nodes[i].x);
    jets_.emplace_back(nodes[i].jet.begin(), nodes[i].jet.end());
  }
  const int N = 2 * p_ + 2;  // number of interpolation conditions
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = xs_[i + 1] - xs_[i];
    hs_.push_back(h);
    // Scaled Taylor coefficients in t: g^{(j)}/j! = f^{(j)} h^j / j!.
    std::vector<double> L(p_ + 1), R(p_ + 1);
    for (int j = 0; j <= p_; ++j) {
      double sc = std::pow(h, j) / factorial(j);
      L[j] = jets_[i][j] * sc;
      R[j] = jets_[i + 1][j] * sc;
    }
    std::vector<double> z(N);
    for (int k = 0; k < N; ++k) z[k] = k <= p_ ? 0.0 : 1.0;
    // Confluent divided-difference tableau, column by column.
    std::vector<double> col(N);
    for (int k = 0; k < N; ++k) col[k] = k <= p_ ? L[0] : R[0];
    std::vector<double> newton(N);
    newton[0] = col[0];
    for (int order = 1; order < N; ++order) {
      std::vector<double> next(N - order);
      for (int k = 0; k + order < N; ++k) {
        if (z[k] == z[k + order])
          next[k] = z[k] == 0.0 ? L[order] : R[order];
        else
          next[k] = (col[k + 1] - col[k]) / (z[k + order] - z[k]);
      }
      col = std::move(next);
      newton[order] = col[0];
    }
    // Newton form to monomial coefficients in t.
    std::vector<double> mono(N, 0.0);
    mono[0] = newton[N - 1];
    int deg = 0;
    for (int k = N - 2; k >= 0; --k) {
      // mono = mono·(t - z_k) + newton[k]
      std::vector<double> nm(N, 0.0);
      for (int d = 0; d <= deg; ++d) {
        nm[d + 1] += mono[d];
        nm[d] -= z[k] * mono[d];
      }
      nm[0] += newton[k];
      mono = std::move(nm);
      ++deg;
    }
    coef_.push_back(std::move(mono));
  }
}

TaylorPoly HermiteInterpolant::taylor(double x, int degree) const {
  double b[1] = {x};
  TaylorPoly out(b, degree);
  const std::size_t K = xs_.size() - 1;
  auto taylor_extension = [&](std::size_t node) {
    const double u = x - xs_[node];
    for (int j = 0; j <= degree; ++j) {
      double acc = 0.0;
      for (int l = p_; l >= j; --l) acc = jets_[node][l] + (l < p_ ? acc * u / (l - j + 1) : 0.0);
      out.terms[j].entry(0) = j <= p_ ? acc : 0.0;
    }
  };
  if (x < xs_.front()) {
    taylor_extension(0);
    return out;
  }
  if (x >= xs_[K]) {
    taylor_extension(K);
    return out;
  }
  std::size_t i = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin()) - 1;
  const double h = hs_[i];
  const double t = (x - xs_[i]) / h;
  std::vector<double> c = coef_[i];
  for (int j = 0; j <= degree; ++j) {
    double acc = 0.0;
    for (int d = static_cast<int>(c.size()) - 1; d >= 0; --d) acc = acc * t + c[d];
    out.terms[j].entry(0) = acc / std::pow(h, j);
    // Differentiate in t.
    std::vector<double> dc(std::max<std::size_t>(1, c.size() - 1), 0.0);
    for (std::size_t d = 1; d < c.size(); ++d) dc[d - 1] = d * c[d];
    c = std::move(dc);
  }
  return out;
}

Problem worstcase_problem(const WorstCaseInstance& inst, ReplayMode mode) {
  Problem prob;
  prob.name = "wc-" + to_string(inst.kind());
  prob.n = 1;
  prob.p = inst.p();
  prob.x0 = Vector{0.0};
  prob.feasible = FeasibleSet::all();

  std::function<TaylorPoly(std::span<const double>, int)> oracle;
  std::function<void(double, int, double*)> jet;
  if (mode == ReplayMode::node) {
    auto cursor = std::make_shared<NodeCursor>(inst);
    oracle = [cursor](std::span<const double> x, int degree) { return cursor->at(x[0], degree); };
    jet = [cursor](double x, int degree, double* out) { cursor->jet(x, degree, out); };
  } else {
    // Pinning f^{(p+1)} = 0 at the nodes keeps the model step insensitive, to
    // first order, to round-off in x_k; with it left free the iterates drift
    // off the sequence geometrically.
    std::vector<Node> nodes = inst.nodes();
    for (Node& nd : nodes) nd.jet.push_back(0.0);
    auto interp = std::make_shared<HermiteInterpolant>(nodes);
    oracle = [interp](std::span<const double> x, int degree) { return interp->taylor(x[0], degree); };
  }

  if (inst.kind() == WorstCaseKind::cor64) {
    prob.m = 1;
    prob.h = HFunction::abs();
    prob.f_oracle = [](std::span<const double> x, int degree) { return TaylorPoly(x, degree); };
    prob.c_oracle = [oracle](std::span<const double> x, int degree) {
      VecTaylorPoly v;
      v.components.push_back(oracle(x, degree));
      return v;
    };
  } else {
    prob.m = 0;
    prob.h = HFunction::zero();
    prob.f_oracle = oracle;
    prob.f_jet_1d = jet;
  }
  return prob;
}

AlgoParams replay_params(const WorstCaseInstance& inst) {
  AlgoParams ap = AlgoParams::with_eps(inst.q(), inst.eps());
  ap.sigma0 = inst.sigma();
  ap.sigma_min = inst.sigma();
  ap.delta0.assign(inst.q(), inst.designated_delta());
  ap.delta_policy = DeltaPolicy::unit;
  ap.max_iters = inst.k_eps() + 10;
  return ap;
}

namespace {

ReplayResult replay_nodes(const WorstCaseInstance& inst, const ReplayOptions& options) {
  if (inst.q() > inst.p()) throw InvalidArgument("replay needs q <= p");
  ReplayResult out;
  out.k_eps = inst.k_eps();

  // The hook and the oracle must share one cursor.
  auto cursor = std::make_shared<NodeCursor>(inst);
  Problem prob = worstcase_problem(inst, ReplayMode::node);
  auto oracle = [cursor](std::span<const double> x, int degree) { return cursor->at(x[0], degree); };
  if (inst.kind() == WorstCaseKind::cor64) {
    prob.c_oracle = [oracle](std::span<const double> x, int degree) {
      VecTaylorPoly v;
      v.components.push_back(oracle(x, degree));
      return v;
    };
  } else {
    prob.f_oracle = oracle;
    prob.f_jet_1d = [cursor](double x, int degree, double* out) { cursor->jet(x, degree, out); };
  }

  const double delta = inst.designated_delta();
  const int q = inst.q();
  RunOptions ro;
  ro.keep_trace = options.keep_trace;
  ro.on_iteration = options.on_iteration;
  ro.hook = [cursor, delta, q](long long k, const RegModel&, std::span<const double> x) -> std::optional<HookStep> {
    // An unsuccessful iteration leaves x behind while the cursor has moved on.
    if (x[0] != cursor->x()) throw ReplayMismatch("iterate left the designated node sequence", std::max(0LL, k - 1));
    if (k != cursor->k()) throw ReplayMismatch("iteration counter and node index disagree", std::min(k, cursor->k()));
    HookStep st;
    st.s = Vector{cursor->step()};
    st.delta.assign(q, delta);
    return st;
  };

  AlgoParams ap = replay_params(inst);
  try {
    out.run = run(prob, ap, ro);
  } catch (const ReplayMismatch&) {
    throw;
  } catch (const OracleError& e) {
    throw ReplayMismatch(e.what(), cursor->k());
  } catch (const InvalidArgument& e) {
    throw ReplayMismatch(e.what(), cursor->k());
  }
  out.terminal_x = cursor->x();

  const RunResult& r = out.run;
  if (r.termination != Termination::step1 || r.iterations != out.k_eps || r.successes != r.iterations) {
    // Early termination diverges at the stopping iteration; an unsuccessful
    // iteration would already have tripped the hook on the following one.
    long long first = r.iterations;
    for (const auto& rec : r.trace)
      if (!rec.success) {
        first = rec.k;
        break;
      }
    std::ostringstream os;
    os << "replay of " << to_string(inst.kind()) << " ended with " << to_string(r.termination) << " after "
       << r.iterations << " iterations (" << r.successes << " successful); expected " << out.k_eps;
    throw ReplayMismatch(os.str(), std::min(first, out.k_eps));
  }
  out.match = true;
  return out;
}

ReplayResult replay_interpolant(const WorstCaseInstance& inst, const ReplayOptions& options) {
  if (inst.q() > inst.p()) throw InvalidArgument("replay needs q <= p");
  ReplayResult out;
  out.k_eps = inst.k_eps();
  std::vector<Node> nodes = inst.nodes();
  out.terminal_x = nodes.back().x;
  Problem prob = worstcase_problem(inst, ReplayMode::interpolant);
  AlgoParams ap = replay_params(inst);
  ap.delta_policy = DeltaPolicy::auto_;
  ap.max_iters = inst.k_eps() + 50;
  RunOptions ro;
  ro.keep_trace = options.keep_trace;
  ro.on_iteration = options.on_iteration;
  out.run = run(prob, ap, ro);
  const RunResult& r = out.run;
  out.match = r.termination != Termination::budget && r.iterations >= out.k_eps && r.iterations <= out.k_eps + 2 &&
              std::abs(r.x_final[0] - out.terminal_x) <= 1e-3;
  return out;
}

}  // namespace

ReplayResult replay(const WorstCaseInstance& inst, const ReplayOptions& options) {
  return options.mode == ReplayMode::node ? replay_nodes(inst, options) : replay_interpolant(inst, options);
}

}  // namespace arqpc
