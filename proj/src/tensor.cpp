#include "arqpc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace arqpc {

namespace {

using Alpha = std::array<std::uint8_t, kMaxDim>;

// Tables go up to order 2*kMaxOrder so that products in the regularizer
// expansion stay in range.
constexpr int kTableOrder = 2 * kMaxOrder;

MultiIndexTable build_table(int dim, int order) {
  MultiIndexTable t;
  t.dim = dim;
  t.order = order;
  int stride = order + 1;
  int dense = 1;
  for (int i = 0; i < dim; ++i) dense *= stride;
  t.lookup.assign(dense, -1);
  Alpha a{};
  // Enumerate with a0 descending so that dim 1 has a single entry and the
  // first entry of each table is (order, 0, 0).
  auto emit = [&](const Alpha& al) {
    int key = 0;
    for (int i = dim - 1; i >= 0; --i) key = key * stride + al[i];
    t.lookup[key] = static_cast<int>(t.alpha.size());
    t.alpha.push_back(al);
    double f = 1.0;
    for (int i = 0; i < dim; ++i) f *= factorial(al[i]);
    t.inv_fact.push_back(1.0 / f);
    t.mult.push_back(factorial(order) / f);
  };
  if (dim == 1) {
    a[0] = static_cast<std::uint8_t>(order);
    emit(a);
  } else if (dim == 2) {
    for (int i = order; i >= 0; --i) {
      a[0] = static_cast<std::uint8_t>(i);
      a[1] = static_cast<std::uint8_t>(order - i);
      emit(a);
    }
  } else {
    for (int i = order; i >= 0; --i)
      for (int j = order - i; j >= 0; --j) {
        a[0] = static_cast<std::uint8_t>(i);
        a[1] = static_cast<std::uint8_t>(j);
        a[2] = static_cast<std::uint8_t>(order - i - j);
        emit(a);
      }
  }
  return t;
}

struct TableStore {
  std::array<std::array<MultiIndexTable, kTableOrder + 1>, kMaxDim + 1> tables;
  TableStore() {
    for (int d = 1; d <= kMaxDim; ++d)
      for (int o = 0; o <= kTableOrder; ++o) tables[d][o] = build_table(d, o);
  }
};

Alpha index_to_alpha(std::span<const int> idx, int dim) {
  Alpha a{};
  for (int i : idx) {
    if (i < 0 || i >= dim) throw InvalidArgument("tensor index out of range");
    ++a[i];
  }
  return a;
}

double monomial(const Alpha& a, std::span<const double> d) {
  double v = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (int e = 0; e < a[i]; ++e) v *= d[i];
  return v;
}

// Homogeneous polynomial in `dim` variables, coefficients laid out by table position.
struct HPoly {
  int dim;
  int deg;
  std::vector<double> c;
  HPoly(int dim_, int deg_) : dim(dim_), deg(deg_), c(MultiIndexTable::get(dim_, deg_).size(), 0.0) {}
};

HPoly hmul(const HPoly& a, const HPoly& b) {
  HPoly r(a.dim, a.deg + b.deg);
  const auto& ta = MultiIndexTable::get(a.dim, a.deg);
  const auto& tb = MultiIndexTable::get(b.dim, b.deg);
  const auto& tr = MultiIndexTable::get(a.dim, r.deg);
  for (int i = 0; i < ta.size(); ++i) {
    if (a.c[i] == 0.0) continue;
    for (int k = 0; k < tb.size(); ++k) {
      Alpha s{};
      for (int q = 0; q < a.dim; ++q) s[q] = static_cast<std::uint8_t>(ta.alpha[i][q] + tb.alpha[k][q]);
      r.c[tr.position(s)] += a.c[i] * b.c[k];
    }
  }
  return r;
}

HPoly hpow(const HPoly& a, int e) {
  HPoly r(a.dim, 0);
  r.c[0] = 1.0;
  for (int i = 0; i < e; ++i) r = hmul(r, a);
  return r;
}

// k-th derivative of u -> u^a.
double power_derivative(double u, double a, int k) {
  double coef = 1.0;
  for (int i = 0; i < k; ++i) coef *= (a - i);
  if (coef == 0.0) return 0.0;
  return coef * std::pow(u, a - k);
}

}  // namespace

int MultiIndexTable::position(const Alpha& a) const {
  int stride = order + 1;
  int key = 0;
  for (int i = dim - 1; i >= 0; --i) key = key * stride + a[i];
  return lookup[key];
}

namespace {
const TableStore kStore;
}

const MultiIndexTable& MultiIndexTable::get(int dim, int order) {
  const TableStore& store = kStore;
  if (dim < 1 || dim > kMaxDim || order < 0 || order > kTableOrder)
    throw InvalidArgument("multi-index table out of range (dim " + std::to_string(dim) + ", order " +
                          std::to_string(order) + ")");
  return store.tables[dim][order];
}

SymTensor::SymTensor(int order, int dim)
    : order_(order), dim_(dim), table_(&MultiIndexTable::get(dim, order)), e_(table_->size(), 0.0) {}

SymTensor SymTensor::scalar(double v, int dim) {
  SymTensor t(0, dim);
  t.e_[0] = v;
  return t;
}

double SymTensor::get(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != order_) throw InvalidArgument("index length must equal tensor order");
  return e_[table_->position(index_to_alpha(idx, dim_))];
}

void SymTensor::set(std::span<const int> idx, double v) {
  if (static_cast<int>(idx.size()) != order_) throw InvalidArgument("index length must equal tensor order");
  e_[table_->position(index_to_alpha(idx, dim_))] = v;
}

double SymTensor::contract(std::span<const double> d) const {
  if (static_cast<int>(d.size()) != dim_) throw InvalidArgument("contract: dimension mismatch");
  if (dim_ == 1) return e_[0] * ipow(d[0], order_);
  double acc = 0.0;
  for (int i = 0; i < table_->size(); ++i) acc += table_->mult[i] * e_[i] * monomial(table_->alpha[i], d);
  return acc;
}

Vector SymTensor::contract_but_one(std::span<const double> d) const {
  if (static_cast<int>(d.size()) != dim_) throw InvalidArgument("contract: dimension mismatch");
  if (order_ == 0) return {};
  // ∂/∂d_i of T[d]^ℓ equals ℓ·T[d]^{ℓ-1}e_i.
  Vector g(dim_, 0.0);
  for (int i = 0; i < table_->size(); ++i) {
    const Alpha& a = table_->alpha[i];
    for (int q = 0; q < dim_; ++q) {
      if (a[q] == 0) continue;
      Alpha b = a;
      --b[q];
      g[q] += table_->mult[i] * e_[i] * a[q] * monomial(b, d);
    }
  }
  for (double& v : g) v /= order_;
  return g;
}

double SymTensor::frobenius_norm() const {
  if (dim_ == 1) return std::abs(e_[0]);
  double acc = 0.0;
  for (int i = 0; i < table_->size(); ++i) acc += table_->mult[i] * e_[i] * e_[i];
  return std::sqrt(acc);
}

double SymTensor::operator_norm(std::uint64_t seed) const {
  if (order_ == 0) return std::abs(e_[0]);
  if (dim_ == 1) return std::abs(e_[0]);
  if (order_ == 1) {
    double acc = 0.0;
    for (double v : e_) acc += v * v;
    return std::sqrt(acc);
  }
  if (order_ == 2) {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        int idx[2] = {i, j};
        m(i, j) = get(idx);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double best = 0.0;
  for (int start = 0; start < 64; ++start) {
    Vector x(dim_);
    for (double& v : x) v = gauss(rng);
    double nx = norm2(x);
    for (double& v : x) v /= nx;
    for (int sweep = 0; sweep < 100; ++sweep) {
      Vector g = contract_but_one(x);
      double ng = norm2(g);
      if (ng == 0.0) break;
      for (int i = 0; i < dim_; ++i) x[i] = g[i] / ng;
      best = std::max(best, std::abs(contract(x)));
    }
    best = std::max(best, std::abs(contract(x)));
  }
  return best;
}

TaylorPoly::TaylorPoly(std::span<const double> base_point, int degree) : base(base_point.begin(), base_point.end()) {
  if (degree < 0) throw InvalidArgument("Taylor degree must be nonnegative");
  if (base.empty() || static_cast<int>(base.size()) > kMaxDim) throw InvalidArgument("dimension must be in 1..3");
  if (degree > kMaxOrder) throw InvalidArgument("Taylor degree too large");
  terms.reserve(degree + 1);
  for (int l = 0; l <= degree; ++l) terms.emplace_back(l, static_cast<int>(base.size()));
}

TaylorPoly TaylorPoly::truncated(int degree) const {
  if (degree > this->degree()) throw InvalidArgument("cannot truncate to a higher degree");
  TaylorPoly r;
  r.base = base;
  r.terms.assign(terms.begin(), terms.begin() + degree + 1);
  return r;
}

VecTaylorPoly VecTaylorPoly::truncated(int degree) const {
  VecTaylorPoly r;
  for (const auto& c : components) r.components.push_back(c.truncated(degree));
  return r;
}

Vector VecTaylorPoly::values() const {
  Vector v;
  for (const auto& c : components) v.push_back(c.value());
  return v;
}

TaylorPoly taylor_1d(double base, std::span<const double> derivs) {
  if (derivs.empty()) throw InvalidArgument("taylor_1d needs at least the value");
  double b[1] = {base};
  TaylorPoly t(b, static_cast<int>(derivs.size()) - 1);
  for (std::size_t l = 0; l < derivs.size(); ++l) t.terms[l].entry(0) = derivs[l];
  return t;
}

double eval_taylor(const TaylorPoly& poly, std::span<const double> s) {
  if (static_cast<int>(s.size()) != poly.dim()) throw InvalidArgument("eval_taylor: dimension mismatch");
  const int p = poly.degree();
  if (poly.dim() == 1) {
    double d[kMaxOrder + 1];
    for (int l = 0; l <= p; ++l) d[l] = poly.terms[l].entry(0);
    return taylor_value_1d(d, p, s[0]);
  }
  double acc = 0.0;
  for (int l = 0; l <= p; ++l) {
    const SymTensor& t = poly.terms[l];
    const auto& tab = t.table();
    for (int i = 0; i < tab.size(); ++i) acc += t.entry(i) * tab.inv_fact[i] * monomial(tab.alpha[i], s);
  }
  return acc;
}

Vector eval_taylor(const VecTaylorPoly& poly, std::span<const double> s) {
  Vector r;
  for (const auto& c : poly.components) r.push_back(eval_taylor(c, s));
  return r;
}

SymTensor shift_derivative(const TaylorPoly& poly, std::span<const double> s, int j) {
  const int p = poly.degree();
  const int n = poly.dim();
  if (j < 0 || j > p) throw InvalidArgument("shift_derivative: order outside 0..degree");
  if (static_cast<int>(s.size()) != n) throw InvalidArgument("shift_derivative: dimension mismatch");
  SymTensor out(j, n);
  if (n == 1) {
    double acc = 0.0;
    for (int l = p; l >= j; --l) acc = poly.terms[l].entry(0) + (l < p ? acc * s[0] / (l - j + 1) : 0.0);
    out.entry(0) = acc;
    return out;
  }
  const auto& tb = MultiIndexTable::get(n, j);
  for (int l = j; l <= p; ++l) {
    const auto& tg = MultiIndexTable::get(n, l - j);
    const auto& tl = MultiIndexTable::get(n, l);
    const SymTensor& a = poly.terms[l];
    for (int g = 0; g < tg.size(); ++g) {
      double w = tg.inv_fact[g] * monomial(tg.alpha[g], s);
      if (w == 0.0) continue;
      for (int b = 0; b < tb.size(); ++b) {
        Alpha sum{};
        for (int q = 0; q < n; ++q) sum[q] = static_cast<std::uint8_t>(tb.alpha[b][q] + tg.alpha[g][q]);
        out.entry(b) += a.entry(tl.position(sum)) * w;
      }
    }
  }
  return out;
}

SymTensor reg_derivative_tensor(std::span<const double> s, int p, int j) {
  const int n = static_cast<int>(s.size());
  if (p < 1) throw InvalidArgument("regularizer degree p must be >= 1");
  if (j < 0 || j > p + 1) throw InvalidArgument("regularizer derivative order outside 0..p+1");
  const double ns = norm2(s);
  SymTensor out(j, n);
  if (j == 0) {
    out.entry(0) = ipow(ns, p + 1);
    return out;
  }
  if (ns == 0.0) {
    if (j == 1) return out;
    throw SingularPoint("regularizer derivative of order >= 2 is undefined at s = 0");
  }
  const double u = ns * ns;
  const double a = 0.5 * (p + 1);
  if (n == 1) {
    // d^j/ds^j |s|^{p+1} = (p+1)!/(p+1-j)! |s|^{p+1-j} sign(s)^j.
    double v = factorial(p + 1) / factorial(p + 1 - j) * ipow(ns, p + 1 - j);
    if (s[0] < 0 && (j % 2 == 1)) v = -v;
    out.entry(0) = v;
    return out;
  }
  // Faà di Bruno for g(u(s)), u = s·s: the j-th directional derivative is
  //   Σ_m j!/(m!(j-2m)!) g^{(j-m)}(u) (2 s·d)^{j-2m} (d·d)^m.
  HPoly lin(n, 1);
  HPoly quad(n, 2);
  const auto& t1 = MultiIndexTable::get(n, 1);
  const auto& t2 = MultiIndexTable::get(n, 2);
  for (int i = 0; i < n; ++i) {
    Alpha e{};
    e[i] = 1;
    lin.c[t1.position(e)] = 2.0 * s[i];
    e[i] = 2;
    quad.c[t2.position(e)] = 1.0;
  }
  HPoly total(n, j);
  for (int m = 0; 2 * m <= j; ++m) {
    double coef = factorial(j) / (factorial(m) * factorial(j - 2 * m)) * power_derivative(u, a, j - m);
    if (coef == 0.0) continue;
    HPoly term = hmul(hpow(lin, j - 2 * m), hpow(quad, m));
    for (std::size_t i = 0; i < total.c.size(); ++i) total.c[i] += coef * term.c[i];
  }
  const auto& tj = MultiIndexTable::get(n, j);
  for (int i = 0; i < tj.size(); ++i) out.entry(i) = total.c[i] / tj.mult[i];
  return out;
}

double reg_derivative_norm(std::span<const double> s, int p, int j) {
  if (p < 1) throw InvalidArgument("regularizer degree p must be >= 1");
  if (j < 0 || j > p + 1) throw InvalidArgument("regularizer derivative order outside 0..p+1");
  const double ns = norm2(s);
  if (ns == 0.0 && j >= 2) throw SingularPoint("regularizer derivative of order >= 2 is undefined at s = 0");
  return factorial(p + 1) / factorial(p + 1 - j) * ipow(ns, p + 1 - j);
}

}  // namespace arqpc
