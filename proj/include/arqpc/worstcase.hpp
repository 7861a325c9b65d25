#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "arqpc/arqpc.hpp"

namespace arqpc {

enum class WorstCaseKind { thm61, thm63, cor64 };
enum class ReplayMode { node, interpolant };

std::string to_string(WorstCaseKind k);
WorstCaseKind worstcase_kind_from_name(const std::string& name);

struct ReplayMismatch : std::runtime_error {
  ReplayMismatch(const std::string& what, long long k) : std::runtime_error(what), divergent_k(k) {}
  long long divergent_k;
};

/// One node of a worst-case sequence: position, derivative jet f^{(0..p)} and
/// the designated step out of it (zero at the terminal node).
struct Node {
  long long k = 0;
  double x = 0.0;
  boost::container::small_vector<double, kMaxOrder> jet;
  double s = 0.0;
};

/// Slowly converging univariate sequence on which the algorithm needs exactly
/// k_ε iterations. Nodes are generated on the fly so that very long sequences
/// never have to be stored.
class WorstCaseInstance {
 public:
  WorstCaseKind kind() const { return kind_; }
  int p() const { return p_; }
  int q() const { return q_; }
  double eps() const { return eps_; }
  long long k_eps() const { return k_eps_; }
  double sigma() const { return sigma_; }
  /// Designated optimality radius used by the replay (1 or ε).
  double designated_delta() const { return delta_; }
  /// Decrement factor ζ(q,p) of thm61-type sequences (also used by cor64).
  double zeta() const;

  /// ω_k, the designated slack at iteration k.
  double omega(long long k) const;
  /// f^{(order)} at node k for order >= 1 (the value f^{(0)} is recursive, see NodeCursor).
  double derivative(long long k, int order) const;
  /// The only derivative order with a nonzero value at the nodes.
  int active_order() const { return kind_ == WorstCaseKind::thm63 ? 1 : q_; }
  /// Designated step s_k.
  double step(long long k) const;
  /// f_0^{(0)} and the decrement f_k^{(0)} - f_{k+1}^{(0)}.
  double f0_start() const;
  double f0_decrement(long long k) const;

  /// Materializes nodes 0..k_ε; refuses sequences longer than `max_nodes`.
  std::vector<Node> nodes(long long max_nodes = 2'000'000) const;

  friend WorstCaseInstance build_thm61(int p, int q, double eps);
  friend WorstCaseInstance build_thm63(int p, int q, double eps);
  friend WorstCaseInstance build_cor64(int p, double eps);

 private:
  WorstCaseKind kind_ = WorstCaseKind::thm61;
  int p_ = 1;
  int q_ = 1;
  double eps_ = 0.5;
  long long k_eps_ = 0;
  double sigma_ = 1.0;
  double delta_ = 1.0;
};

WorstCaseInstance build_thm61(int p, int q, double eps);
WorstCaseInstance build_thm63(int p, int q, double eps);
WorstCaseInstance build_cor64(int p, double eps);
WorstCaseInstance build_worstcase(WorstCaseKind kind, int p, int q, double eps);

/// ceil(eps^{-e}), snapping to the nearest integer when the power is an integer up to round-off.
long long ceil_power(double eps, double e);

/// Streaming node oracle: answers queries at the current node or the next one
/// (x_{k+1} = x_k + s_k computed exactly as the algorithm does) and advances.
class NodeCursor {
 public:
  explicit NodeCursor(const WorstCaseInstance& inst);

  long long k() const { return k_; }
  double x() const { return x_; }
  double f0() const { return f0_; }
  double next_x() const { return x_next_; }
  double step() const { return s_; }

  /// Taylor data at x (must be the current or the next node).
  TaylorPoly at(double x, int degree);
  /// Same as at(), writing f^{(0..degree)} to out.
  void jet(double x, int degree, double* out);

 private:
  void advance();
  void load_jet();

  WorstCaseInstance inst_;
  long long k_ = 0;
  double x_ = 0.0;
  double f0_ = 0.0;
  double s_ = 0.0;
  double x_next_ = 0.0;
  boost::container::small_vector<double, kMaxOrder> jet_;
};

/// C^p piecewise two-point Hermite interpolant of degree 2p+1 through the node
/// jets; degree-p Taylor extension outside [x_0, x_K].
class HermiteInterpolant {
 public:
  explicit HermiteInterpolant(const std::vector<Node>& nodes);

  int p() const { return p_; }
  /// Value and derivatives 0..degree at x.
  TaylorPoly taylor(double x, int degree) const;
  double value(double x) const { return taylor(x, 0).value(); }
  /// Coefficients of the local polynomial on interval i in t = (x - x_i)/h_i.
  const std::vector<double>& local_coefficients(int i) const { return coef_[i]; }
  const std::vector<double>& knots() const { return xs_; }

 private:
  int p_ = 1;
  std::vector<double> xs_;
  std::vector<double> hs_;
  std::vector<std::vector<double>> coef_;  // monomial coefficients in t, degree 2p+1
  std::vector<std::vector<double>> jets_;
};

/// Problem realizing an instance: node mode (streaming cursor) or interpolant mode.
Problem worstcase_problem(const WorstCaseInstance& inst, ReplayMode mode);

struct ReplayResult {
  RunResult run;
  long long k_eps = 0;
  bool match = false;
  double terminal_x = 0.0;  // last node x_{k_ε}
};

struct ReplayOptions {
  ReplayMode mode = ReplayMode::node;
  bool keep_trace = false;
  std::function<void(const IterationRecord&)> on_iteration;
};

/// Node mode: step hook injects s_k and the designated δ; any deviation from
/// k_ε all-successful iterations throws ReplayMismatch. Interpolant mode: the
/// honest solver runs on the Hermite interpolant and `match` reports whether it
/// ended within [k_ε, k_ε + 2] iterations and 1e-3 of the terminal node.
ReplayResult replay(const WorstCaseInstance& inst, const ReplayOptions& options = {});

/// Parameters used by replays: σ pinned to the instance value, ε_j = ε, δ_0 designated.
AlgoParams replay_params(const WorstCaseInstance& inst);

}  // namespace arqpc
