#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "arqpc/types.hpp"

namespace arqpc {

/// Enumeration of the exponent vectors α with |α| = order in `dim` variables,
/// together with the multinomial multiplicity order!/α! and 1/α!.
struct MultiIndexTable {
  int dim = 1;
  int order = 0;
  std::vector<std::array<std::uint8_t, kMaxDim>> alpha;
  std::vector<double> mult;
  std::vector<double> inv_fact;
  std::vector<int> lookup;  // dense (order+1)^dim -> position, -1 when |α| != order

  int size() const { return static_cast<int>(alpha.size()); }
  int position(const std::array<std::uint8_t, kMaxDim>& a) const;

  /// Shared immutable table; built once for every (dim, order) in range.
  static const MultiIndexTable& get(int dim, int order);
};

/// Entry storage: inline up to ten values (dim 3 up to order 2, dim 1 always),
/// so that copying small tensors is a flat copy.
class TensorEntries {
 public:
  static constexpr int kInline = 10;
  TensorEntries() = default;
  TensorEntries(int n, double v) : n_(n) {
    if (n > kInline) heap_.reset(new double[n]);
    std::fill_n(data(), n, v);
  }
  TensorEntries(const TensorEntries& o) : n_(o.n_) {
    if (n_ > kInline) heap_.reset(new double[n_]);
    std::copy_n(o.data(), n_, data());
  }
  TensorEntries& operator=(const TensorEntries& o) {
    if (this != &o) {
      if (o.n_ > kInline && o.n_ != n_) heap_.reset(new double[o.n_]);
      if (o.n_ <= kInline) heap_.reset();
      n_ = o.n_;
      std::copy_n(o.data(), n_, data());
    }
    return *this;
  }
  TensorEntries(TensorEntries&& o) noexcept : n_(o.n_), heap_(std::move(o.heap_)) {
    if (n_ <= kInline) std::copy_n(o.inl_.begin(), n_, inl_.begin());
  }
  TensorEntries& operator=(TensorEntries&& o) noexcept {
    n_ = o.n_;
    heap_ = std::move(o.heap_);
    if (n_ <= kInline) std::copy_n(o.inl_.begin(), n_, inl_.begin());
    return *this;
  }

  int size() const { return n_; }
  double* data() { return n_ > kInline ? heap_.get() : inl_.data(); }
  const double* data() const { return n_ > kInline ? heap_.get() : inl_.data(); }
  double& operator[](int i) { return data()[i]; }
  double operator[](int i) const { return data()[i]; }
  const double* begin() const { return data(); }
  const double* end() const { return data() + n_; }

 private:
  int n_ = 0;
  std::array<double, kInline> inl_;
  std::unique_ptr<double[]> heap_;
};

/// Symmetric tensor stored once per sorted multi-index.
class SymTensor {
 public:
  SymTensor() : SymTensor(0, 1) {}
  SymTensor(int order, int dim);

  static SymTensor scalar(double v, int dim = 1);

  int order() const { return order_; }
  int dim() const { return dim_; }
  const MultiIndexTable& table() const { return *table_; }

  /// Entry access by position in the multi-index table.
  double entry(int pos) const { return e_[pos]; }
  double& entry(int pos) { return e_[pos]; }
  int size() const { return static_cast<int>(e_.size()); }

  /// Read/write through an explicit index list i_1..i_order (any permutation).
  double get(std::span<const int> idx) const;
  void set(std::span<const int> idx, double v);

  /// T[d]^order.
  double contract(std::span<const double> d) const;
  /// T[d]^(order-1) as a vector (zero-order tensors give an empty vector).
  Vector contract_but_one(std::span<const double> d) const;

  /// Frobenius norm over the full index set.
  double frobenius_norm() const;
  /// Induced operator norm; exact for order <= 2, multi-start power iteration above.
  double operator_norm(std::uint64_t seed = 7) const;

 private:
  int order_;
  int dim_;
  const MultiIndexTable* table_;
  TensorEntries e_;
};

/// T(s) = Σ_ℓ f^{(ℓ)} s^ℓ/ℓ! from univariate derivatives f^{(0..degree)}.
inline double taylor_value_1d(const double* derivs, int degree, double s) {
  double acc = 0.0;
  for (int l = degree; l >= 0; --l) acc = derivs[l] + (l < degree ? acc * s / (l + 1) : 0.0);
  return acc;
}

/// Degree-p Taylor data at a base point: terms[ℓ] holds the ℓ-th derivative tensor.
struct TaylorPoly {
  Vector base;
  InlineVec<SymTensor, kMaxOrder + 1> terms;

  TaylorPoly() = default;
  TaylorPoly(std::span<const double> base_point, int degree);

  int degree() const { return static_cast<int>(terms.size()) - 1; }
  int dim() const { return static_cast<int>(base.size()); }
  double value() const { return terms[0].entry(0); }
  TaylorPoly truncated(int degree) const;
};

/// Taylor data of a vector-valued map; one TaylorPoly per component.
struct VecTaylorPoly {
  boost::container::small_vector<TaylorPoly, 2> components;

  int size() const { return static_cast<int>(components.size()); }
  VecTaylorPoly truncated(int degree) const;
  Vector values() const;
};

/// 1-D convenience: terms given as derivative values f, f', f'', ...
TaylorPoly taylor_1d(double base, std::span<const double> derivs);

double eval_taylor(const TaylorPoly& poly, std::span<const double> s);
Vector eval_taylor(const VecTaylorPoly& poly, std::span<const double> s);

/// Exact j-th s-derivative of the polynomial s -> eval_taylor(poly, s).
SymTensor shift_derivative(const TaylorPoly& poly, std::span<const double> s, int j);

/// j-th derivative of s -> ‖s‖^{p+1}.
SymTensor reg_derivative_tensor(std::span<const double> s, int p, int j);
double reg_derivative_norm(std::span<const double> s, int p, int j);

}  // namespace arqpc
