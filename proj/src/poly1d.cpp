#include "arqpc/poly1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arqpc::poly1d {

namespace {

using Roots = boost::container::small_vector<double, 16>;

// Drops leading coefficients whose contribution over |x| <= w is below round-off.
Poly trimmed(const Poly& p, double w) {
  Poly r = p;
  const double ww = std::max(1.0, w);
  double pw[kCap];
  double scale = 0.0;
  for (int i = 0; i <= r.deg; ++i) {
    pw[i] = i == 0 ? 1.0 : pw[i - 1] * ww;
    scale += std::abs(r.c[i]) * pw[i];
  }
  while (r.deg > 0 && std::abs(r.c[r.deg]) * pw[r.deg] <= 1e-16 * scale) r.c[r.deg--] = 0.0;
  return r;
}

double bisect(const Poly& p, double lo, double hi, double flo) {
  for (int it = 0; it < 400; ++it) {
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    double fm = p(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

void roots_rec(const Poly& p0, double a, double b, Roots& out) {
  Poly p = trimmed(p0, std::max(std::abs(a), std::abs(b)));
  if (p.deg <= 0) return;
  if (p.deg == 1) {
    double r = -p.c[0] / p.c[1];
    if (r > a && r < b) out.push_back(r);
    return;
  }
  if (p.deg == 2) {
    const double A = p.c[2], B = p.c[1], C = p.c[0];
    double disc = B * B - 4 * A * C;
    if (disc < 0) return;
    double sq = std::sqrt(disc);
    double q = -0.5 * (B + (B >= 0 ? sq : -sq));
    double r1 = q / A;
    double r2 = q != 0.0 ? C / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > a && r1 < b) out.push_back(r1);
    if (r2 > a && r2 < b && r2 != r1) out.push_back(r2);
    return;
  }
  Roots crit;
  roots_rec(derivative(p), a, b, crit);
  std::sort(crit.begin(), crit.end());
  double u = a;
  double fu = p(a);
  for (std::size_t i = 0; i <= crit.size(); ++i) {
    double v = i < crit.size() ? crit[i] : b;
    double fv = p(v);
    if (i < crit.size() && fv == 0.0) {
      out.push_back(v);
    } else if (fu != 0.0 && fv != 0.0 && ((fu < 0) != (fv < 0))) {
      out.push_back(bisect(p, u, v, fu));
    }
    u = v;
    fu = fv;
  }
}

double poly_mag(const Poly& p, double w) {
  double acc = 0.0;
  double wp = 1.0;
  for (int i = 0; i <= p.deg; ++i) {
    acc += std::abs(p.c[i]) * wp;
    wp *= w;
  }
  return acc;
}

bool has_h(const Composite& obj) { return obj.h != nullptr && obj.h->kind() != HKind::zero; }

Poly derivative_of(const Poly& p) {
  Poly r;
  r.deg = std::max(0, p.deg - 1);
  for (int i = 1; i <= p.deg; ++i) r.c[i - 1] = i * p.c[i];
  return r;
}

// Plain polynomial: one piece, candidates are the ends, 0 and the critical points.
Result minimize_smooth_impl(const Poly& p, double lo, double hi) {
  Result best;
  best.argmin = 0.0;
  const double v0 = p(0.0);
  best.value = v0;
  auto consider = [&](double d) {
    double v = p(d);
    if (v < best.value) {
      best.value = v;
      best.argmin = d;
    }
  };
  consider(lo);
  consider(hi);
  auto inside = [&](double r) {
    if (r > lo && r < hi) consider(r);
  };
  if (!(lo < hi) || p.deg < 2) {
  } else if (p.deg == 2) {
    if (p.c[2] != 0.0) inside(-p.c[1] / (2.0 * p.c[2]));
  } else if (p.deg == 3) {
    // Critical points of a cubic: 3a d² + 2b d + c = 0, stable form.
    const double A = 3.0 * p.c[3], B = 2.0 * p.c[2], C = p.c[1];
    if (A == 0.0) {
      if (B != 0.0) inside(-C / B);
    } else {
      const double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
        inside(q / A);
        if (q != 0.0) inside(C / q);
      }
    }
  } else {
    Roots crit;
    roots_rec(derivative_of(p), lo, hi, crit);
    for (double r : crit) consider(r);
  }
  const double w = std::max(std::abs(lo), std::abs(hi));
  best.gap = 32.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(v0) + poly_mag(p, w));
  return best;
}

}  // namespace

Poly derivative(const Poly& p) {
  Poly r;
  r.deg = std::max(0, p.deg - 1);
  for (int i = 1; i <= p.deg; ++i) r.c[i - 1] = i * p.c[i];
  return r;
}

Poly add(const Poly& a, const Poly& b, double sb) {
  Poly r = a;
  r.deg = std::max(a.deg, b.deg);
  for (int i = 0; i <= b.deg; ++i) r.c[i] += sb * b.c[i];
  return r;
}

void real_roots(const Poly& p, double a, double b, Roots& out) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("real_roots needs a finite interval");
  if (!(a < b)) return;
  Roots tmp;
  roots_rec(p, a, b, tmp);
  std::sort(tmp.begin(), tmp.end());
  for (double r : tmp)
    if (out.empty() || r != out.back()) out.push_back(r);
}

bool supports(const HFunction& h) {
  switch (h.kind()) {
    case HKind::zero:
    case HKind::abs:
    case HKind::relu:
      return true;
    case HKind::l1:
    case HKind::linf:
      return h.m() <= kMaxInner;
    case HKind::l2:
      return h.m() == 1;
    default:
      return false;
  }
}

double Composite::operator()(double d) const {
  double v = smooth(d);
  if (h != nullptr && h->kind() != HKind::zero) {
    boost::container::small_vector<double, kMaxInner> cv;
    for (const auto& p : inner) cv.push_back(p(d));
    v += (*h)(std::span<const double>(cv.data(), cv.size()));
  }
  if (radial != 0.0) v += radial * ipow(std::abs(d), radial_power);
  return v;
}

Result minimize_poly(const Poly& p, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("minimize needs a finite interval");
  if (!(lo <= 0.0 && 0.0 <= hi)) throw EmptyDomain("interval does not contain d = 0");
  return minimize_smooth_impl(p, lo, hi);
}

Result minimize(const Composite& obj, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("minimize needs a finite interval");
  if (!(lo <= 0.0 && 0.0 <= hi)) throw EmptyDomain("interval does not contain d = 0");
  const bool comp = has_h(obj);
  if (comp && !supports(*obj.h)) throw InvalidArgument("h kind not supported by the exact univariate path");
  if (!comp && obj.radial == 0.0) return minimize_smooth_impl(obj.smooth, lo, hi);

  Roots breaks;
  if (comp) {
    const int m = static_cast<int>(obj.inner.size());
    for (int i = 0; i < m; ++i) real_roots(obj.inner[i], lo, hi, breaks);
    if (obj.h->kind() == HKind::linf)
      for (int i = 0; i < m; ++i)
        for (int k = i + 1; k < m; ++k) {
          real_roots(add(obj.inner[i], obj.inner[k], -1.0), lo, hi, breaks);
          real_roots(add(obj.inner[i], obj.inner[k], 1.0), lo, hi, breaks);
        }
  }
  if (obj.radial != 0.0 && lo < 0.0 && 0.0 < hi) breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  Result best;
  best.argmin = 0.0;
  best.value = obj(0.0);
  auto consider = [&](double d) {
    double v = obj(d);
    if (v < best.value) {
      best.value = v;
      best.argmin = d;
    }
  };
  consider(lo);
  consider(hi);
  for (double b : breaks) consider(b);

  Roots pts;
  pts.push_back(lo);
  pts.insert(pts.end(), breaks.begin(), breaks.end());
  pts.push_back(hi);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    if (!(a < b)) continue;
    const double mid = a + 0.5 * (b - a);
    Poly q = obj.smooth;
    if (comp) {
      const auto kind = obj.h->kind();
      if (kind == HKind::linf) {
        int arg = 0;
        double mx = -1.0;
        for (int k = 0; k < static_cast<int>(obj.inner.size()); ++k) {
          double v = std::abs(obj.inner[k](mid));
          if (v > mx) {
            mx = v;
            arg = k;
          }
        }
        q = add(q, obj.inner[arg], obj.inner[arg](mid) >= 0 ? 1.0 : -1.0);
      } else {
        for (const auto& c : obj.inner) {
          double cm = c(mid);
          if (kind == HKind::relu) {
            if (cm > 0) q = add(q, c, 1.0);
          } else {
            q = add(q, c, cm >= 0 ? 1.0 : -1.0);
          }
        }
      }
    }
    if (obj.radial != 0.0) {
      const int P = obj.radial_power;
      double coef = obj.radial * ((mid < 0 && P % 2 == 1) ? -1.0 : 1.0);
      if (P >= kCap) throw InvalidArgument("radial power too large");
      q.c[P] += coef;
      q.deg = std::max(q.deg, P);
    }
    Roots crit;
    real_roots(derivative(q), a, b, crit);
    for (double r : crit) consider(r);
  }

  const double w = std::max(std::abs(lo), std::abs(hi));
  double mag = 1.0 + std::abs(obj(0.0)) + poly_mag(obj.smooth, w);
  if (comp) {
    double lh = std::max(1.0, obj.h->lipschitz());
    for (const auto& c : obj.inner) mag += lh * poly_mag(c, w);
  }
  if (obj.radial != 0.0) mag += std::abs(obj.radial) * ipow(w, obj.radial_power);
  best.gap = 32.0 * std::numeric_limits<double>::epsilon() * mag;
  return best;
}

}  // namespace arqpc::poly1d
