#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <iterator>
#include <memory>
#include <new>
#include <utility>
#include <vector>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <boost/container/small_vector.hpp>

namespace arqpc {

/// Small dense vector for points, steps and per-order radii. Up to six values
/// live inline, so copies in the iteration loop are flat; longer vectors spill
/// to the heap.
class Vector {
 public:
  static constexpr std::size_t kInline = 6;
  using value_type = double;
  using iterator = double*;
  using const_iterator = const double*;

  Vector() = default;
  explicit Vector(std::size_t n, double v = 0.0) { assign(n, v); }
  Vector(std::initializer_list<double> il) { assign(il.begin(), il.end()); }
  template <std::input_iterator It>
  Vector(It first, It last) {
    assign(first, last);
  }
  Vector(std::span<const double> v) { assign(v.begin(), v.end()); }
  Vector(const Vector& o) { copy_from(o); }
  Vector(Vector&& o) noexcept { steal(o); }
  Vector& operator=(const Vector& o) {
    if (this != &o) copy_from(o);
    return *this;
  }
  Vector& operator=(Vector&& o) noexcept {
    if (this != &o) steal(o);
    return *this;
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  double* data() { return heap_ ? heap_.get() : inl_.data(); }
  const double* data() const { return heap_ ? heap_.get() : inl_.data(); }
  double* begin() { return data(); }
  double* end() { return data() + n_; }
  const double* begin() const { return data(); }
  const double* end() const { return data() + n_; }
  double& operator[](std::size_t i) { return data()[i]; }
  double operator[](std::size_t i) const { return data()[i]; }
  double& front() { return data()[0]; }
  double front() const { return data()[0]; }
  double& back() { return data()[n_ - 1]; }
  double back() const { return data()[n_ - 1]; }

  void clear() { n_ = 0; }
  void reserve(std::size_t n) {
    if (n <= capacity()) return;
    std::unique_ptr<double[]> fresh(new double[n]);
    std::copy_n(data(), n_, fresh.get());
    heap_ = std::move(fresh);
    cap_ = n;
  }
  void push_back(double v) {
    if (n_ == capacity()) reserve(2 * capacity());
    data()[n_++] = v;
  }
  double& emplace_back(double v) {
    push_back(v);
    return back();
  }
  void pop_back() { --n_; }
  void assign(std::size_t n, double v) {
    n_ = 0;
    reserve(n);
    std::fill_n(data(), n, v);
    n_ = n;
  }
  template <std::input_iterator It>
  void assign(It first, It last) {
    n_ = 0;
    for (; first != last; ++first) push_back(static_cast<double>(*first));
  }
  void resize(std::size_t n, double v = 0.0) {
    reserve(n);
    while (n_ < n) data()[n_++] = v;
    n_ = n;
  }

  bool operator==(const Vector& o) const { return n_ == o.n_ && std::equal(begin(), end(), o.begin()); }

  operator std::span<const double>() const { return {data(), n_}; }
  operator std::span<double>() { return {data(), n_}; }

 private:
  std::size_t capacity() const { return heap_ ? cap_ : kInline; }
  void copy_from(const Vector& o) {
    n_ = 0;
    reserve(o.n_);
    std::copy_n(o.data(), o.n_, data());
    n_ = o.n_;
  }
  void steal(Vector& o) {
    if (o.heap_) {
      heap_ = std::move(o.heap_);
      cap_ = o.cap_;
    } else {
      heap_.reset();
      std::copy_n(o.inl_.data(), o.n_, inl_.data());
    }
    n_ = o.n_;
    o.n_ = 0;
  }

  std::size_t n_ = 0;
  std::size_t cap_ = 0;
  std::array<double, kInline> inl_;
  std::unique_ptr<double[]> heap_;
};

/// Fixed-capacity sequence with inline storage and no heap fallback.
template <class T, std::size_t N>
class InlineVec {
 public:
  using value_type = T;
  InlineVec() = default;
  InlineVec(const InlineVec& o) {
    for (const T& x : o) push_back(x);
  }
  InlineVec(InlineVec&& o) noexcept {
    for (T& x : o) push_back(std::move(x));
  }
  InlineVec& operator=(const InlineVec& o) {
    if (this != &o) {
      clear();
      for (const T& x : o) push_back(x);
    }
    return *this;
  }
  InlineVec& operator=(InlineVec&& o) noexcept {
    if (this != &o) {
      clear();
      for (T& x : o) push_back(std::move(x));
    }
    return *this;
  }
  ~InlineVec() { clear(); }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  static constexpr std::size_t capacity() { return N; }
  T* begin() { return ptr(); }
  T* end() { return ptr() + n_; }
  const T* begin() const { return ptr(); }
  const T* end() const { return ptr() + n_; }
  T& operator[](std::size_t i) { return ptr()[i]; }
  const T& operator[](std::size_t i) const { return ptr()[i]; }
  T& back() { return ptr()[n_ - 1]; }
  const T& back() const { return ptr()[n_ - 1]; }
  void reserve(std::size_t) {}
  void clear() {
    while (n_ > 0) ptr()[--n_].~T();
  }

  void push_back(const T& x) { emplace_back(x); }
  void push_back(T&& x) { emplace_back(std::move(x)); }
  template <class... A>
  T& emplace_back(A&&... a) {
    if (n_ >= N) throw std::length_error("InlineVec capacity exceeded");
    T* p = new (ptr() + n_) T(std::forward<A>(a)...);
    ++n_;
    return *p;
  }
  template <class It>
  void assign(It first, It last) {
    clear();
    for (; first != last; ++first) push_back(*first);
  }

 private:
  T* ptr() { return std::launder(reinterpret_cast<T*>(buf_)); }
  const T* ptr() const { return std::launder(reinterpret_cast<const T*>(buf_)); }
  std::size_t n_ = 0;
  alignas(T) unsigned char buf_[N * sizeof(T)];
};

/// Largest tensor order handled by the dense symmetric storage (p <= 6 needs
/// order p+1 for the regularizer).
inline constexpr int kMaxOrder = 8;
inline constexpr int kMaxDim = 3;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a derivative of the regularizer is requested where it does not exist.
struct SingularPoint : std::domain_error {
  using std::domain_error::domain_error;
};

struct InfeasiblePoint : std::domain_error {
  using std::domain_error::domain_error;
};

struct EmptyDomain : std::domain_error {
  using std::domain_error::domain_error;
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDenominator : std::domain_error {
  using std::domain_error::domain_error;
};

/// The step computation could not certify any radius after its shrink budget.
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

/// x^n for small nonnegative integer n by repeated multiplication.
inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

inline constexpr auto kFactorials = [] {
  std::array<double, 21> t{};
  t[0] = 1.0;
  for (int i = 1; i < 21; ++i) t[i] = t[i - 1] * i;
  return t;
}();

inline double factorial(int n) {
  if (n < 0) return 1.0;
  if (n < static_cast<int>(kFactorials.size())) return kFactorials[n];
  double r = kFactorials.back();
  for (int i = static_cast<int>(kFactorials.size()); i <= n; ++i) r *= i;
  return r;
}

inline Vector make_vector(std::span<const double> v) { return Vector(v.begin(), v.end()); }

inline Vector add(std::span<const double> a, std::span<const double> b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

}  // namespace arqpc
