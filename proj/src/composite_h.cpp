#include "arqpc/composite_h.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace arqpc {

HFunction HFunction::zero(int m) {
  HFunction h;
  h.kind_ = HKind::zero;
  h.m_ = m;
  h.lipschitz_ = 0.0;
  h.convex_ = true;
  h.name_ = "zero";
  return h;
}

HFunction HFunction::abs() {
  HFunction h;
  h.kind_ = HKind::abs;
  h.m_ = 1;
  h.lipschitz_ = 1.0;
  h.name_ = "abs";
  return h;
}

HFunction HFunction::relu() {
  HFunction h;
  h.kind_ = HKind::relu;
  h.m_ = 1;
  h.lipschitz_ = 1.0;
  h.name_ = "relu";
  return h;
}

HFunction HFunction::l1(int m) {
  if (m < 1) throw InvalidArgument("l1 needs m >= 1");
  HFunction h;
  h.kind_ = HKind::l1;
  h.m_ = m;
  h.lipschitz_ = std::sqrt(static_cast<double>(m));  // w.r.t. the Euclidean norm
  h.name_ = "l1";
  return h;
}

HFunction HFunction::l2(int m) {
  if (m < 1) throw InvalidArgument("l2 needs m >= 1");
  HFunction h;
  h.kind_ = HKind::l2;
  h.m_ = m;
  h.lipschitz_ = 1.0;
  h.name_ = "l2";
  return h;
}

HFunction HFunction::linf(int m) {
  if (m < 1) throw InvalidArgument("linf needs m >= 1");
  HFunction h;
  h.kind_ = HKind::linf;
  h.m_ = m;
  h.lipschitz_ = 1.0;
  h.name_ = "linf";
  return h;
}

HFunction HFunction::custom(int m, Callback fn, double lipschitz, bool convex) {
  if (!fn) throw InvalidArgument("custom h needs a callback");
  if (lipschitz < 0.0) throw InvalidArgument("Lipschitz constant must be nonnegative");
  HFunction h;
  h.kind_ = HKind::custom;
  h.m_ = m;
  h.lipschitz_ = lipschitz;
  h.convex_ = convex;
  h.name_ = "custom";
  h.fn_ = std::move(fn);
  return h;
}

HFunction HFunction::from_name(const std::string& name, int m) {
  if (name == "zero") return zero(m);
  if (name == "abs") return abs();
  if (name == "relu") return relu();
  if (name == "l1") return l1(m);
  if (name == "l2") return l2(m);
  if (name == "linf") return linf(m);
  throw InvalidArgument("unknown h: " + name);
}

double HFunction::operator()(std::span<const double> v) const {
  if (kind_ == HKind::zero) return 0.0;
  if (static_cast<int>(v.size()) != m_)
    throw InvalidArgument("h: expected " + std::to_string(m_) + " components, got " + std::to_string(v.size()));
  switch (kind_) {
    case HKind::abs:
      return std::abs(v[0]);
    case HKind::relu:
      return std::max(0.0, v[0]);
    case HKind::l1: {
      double acc = 0.0;
      for (double x : v) acc += std::abs(x);
      return acc;
    }
    case HKind::l2:
      return norm2(v);
    case HKind::linf: {
      double acc = 0.0;
      for (double x : v) acc = std::max(acc, std::abs(x));
      return acc;
    }
    case HKind::custom:
      return fn_(v);
    default:
      return 0.0;
  }
}

As3Report check_as3(const HFunction& h, int sample_count, double radius, std::uint64_t seed) {
  As3Report rep;
  const int m = std::max(1, h.m());
  Vector zero(m, 0.0);
  rep.h_at_zero = h.kind() == HKind::zero ? 0.0 : h(zero);
  rep.max_subadditivity_violation = -std::numeric_limits<double>::infinity();
  rep.max_lipschitz_violation = -std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Uniform in the ball: Gaussian direction, radius r·U^{1/m}.
  auto draw = [&] {
    Vector v(m);
    for (double& x : v) x = gauss(rng);
    double nv = norm2(v);
    double r = radius * std::pow(unif(rng), 1.0 / m);
    for (double& x : v) x = nv > 0 ? x / nv * r : 0.0;
    return v;
  };
  auto hv = [&](const Vector& v) { return h.kind() == HKind::zero ? 0.0 : h(v); };
  for (int i = 0; i < sample_count; ++i) {
    Vector x = draw();
    Vector y = draw();
    Vector xy = add(x, y);
    double hx = hv(x), hy = hv(y);
    rep.max_subadditivity_violation = std::max(rep.max_subadditivity_violation, hv(xy) - hx - hy);
    Vector diff(m);
    for (int k = 0; k < m; ++k) diff[k] = x[k] - y[k];
    rep.max_lipschitz_violation = std::max(rep.max_lipschitz_violation, std::abs(hx - hy) - h.lipschitz() * norm2(diff));
  }
  return rep;
}

}  // namespace arqpc
