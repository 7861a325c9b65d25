#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "arqpc/types.hpp"

namespace arqpc {

enum class HKind { zero, abs, l1, l2, linf, relu, custom };

/// The outer function h of w = f + h(c). Must vanish at 0, be subadditive and
/// Lipschitz with the declared constant; `check_as3` samples these properties.
class HFunction {
 public:
  using Callback = std::function<double(std::span<const double>)>;

  HFunction() = default;

  static HFunction zero(int m = 0);
  static HFunction abs();
  static HFunction relu();
  static HFunction l1(int m);
  static HFunction l2(int m);
  static HFunction linf(int m);
  /// The callback must be pure and reentrant.
  static HFunction custom(int m, Callback fn, double lipschitz, bool convex);
  /// Config names: zero | abs | l1 | l2 | linf | relu.
  static HFunction from_name(const std::string& name, int m);

  HKind kind() const { return kind_; }
  int m() const { return m_; }
  double lipschitz() const { return lipschitz_; }
  bool is_convex() const { return convex_; }
  const std::string& name() const { return name_; }

  double operator()(std::span<const double> v) const;

 private:
  HKind kind_ = HKind::zero;
  int m_ = 0;
  double lipschitz_ = 0.0;
  bool convex_ = true;
  std::string name_ = "zero";
  Callback fn_;
};

inline double eval_h(const HFunction& h, std::span<const double> v) { return h(v); }

struct As3Report {
  double max_subadditivity_violation = 0.0;
  double max_lipschitz_violation = 0.0;
  double h_at_zero = 0.0;
};

As3Report check_as3(const HFunction& h, int sample_count, double radius, std::uint64_t seed);

}  // namespace arqpc
