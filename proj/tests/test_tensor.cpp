#include <doctest.h>

#include <Eigen/Dense>

#include "arqpc/tensor.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace arqpc;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<int> random_index(oracle::Rng& rng, int order, int n) {
  std::vector<int> idx(order);
  for (int& i : idx) i = rng.integer(0, n - 1);
  return idx;
}

}  // namespace

TEST_CASE("multi-index tables count the sorted index tuples") {
  // C(n + k - 1, k) monomials of degree k in n variables.
  CHECK(MultiIndexTable::get(1, 5).size() == 1);
  CHECK(MultiIndexTable::get(2, 3).size() == 4);
  CHECK(MultiIndexTable::get(3, 2).size() == 6);
  CHECK(MultiIndexTable::get(3, 4).size() == 15);
  const auto& t = MultiIndexTable::get(3, 3);
  double total = 0.0;
  for (double m : t.mult) total += m;
  CHECK(total == doctest::Approx(27.0));  // n^k ordered tuples
}

TEST_CASE("eval_taylor on a univariate quadratic") {
  double d[] = {1.0, 2.0, 2.0};
  TaylorPoly t = taylor_1d(0.0, d);
  double s0[] = {0.0}, s1[] = {0.5};
  CHECK(eval_taylor(t, s0) == 1.0);
  CHECK(eval_taylor(t, s1) == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("eval_taylor matches the full index-loop evaluator") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 3);
    TaylorPoly t = oracle::random_taylor(rng, n, rng.integer(0, 5));
    std::vector<double> s = rng.vec(n, -1.5, 1.5);
    CHECK(rel_err(eval_taylor(t, s), oracle::naive_taylor(t, s)) <= 1e-12);
  }
}

TEST_CASE("eval_taylor rejects a step of the wrong dimension") {
  oracle::Rng rng(1);
  TaylorPoly t = oracle::random_taylor(rng, 2, 2);
  double s[] = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(eval_taylor(t, s), InvalidArgument);
}

TEST_CASE("shift_derivative special cases") {
  oracle::Rng rng(3);
  TaylorPoly t = oracle::random_taylor(rng, 2, 3);
  std::vector<double> s = {0.3, -0.7};
  CHECK(shift_derivative(t, s, 0).entry(0) == doctest::Approx(eval_taylor(t, s)).epsilon(1e-14));
  CHECK_THROWS_AS(shift_derivative(t, s, 4), InvalidArgument);

  double d[] = {0.0, -0.2, 0.0};
  TaylorPoly lin = taylor_1d(0.0, d);
  for (double sv : {-2.0, 0.0, 0.4, 1.7}) {
    double ss[] = {sv};
    CHECK(shift_derivative(lin, ss, 1).entry(0) == doctest::Approx(-0.2).epsilon(1e-15));
  }
}

TEST_CASE("shift_derivative agrees with central differences") {
  oracle::Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 3);
    const int degree = rng.integer(1, 4);
    TaylorPoly t = oracle::random_taylor(rng, n, degree);
    std::vector<double> s = rng.vec(n, -1.0, 1.0);
    const int j = rng.integer(1, degree);
    std::vector<int> idx = random_index(rng, j, n);
    // ∂/∂s_i of the (j-1)-th derivative entry with the remaining indices.
    const int i = idx.back();
    std::vector<int> rest(idx.begin(), idx.end() - 1);
    auto g = [&](double h) {
      std::vector<double> sh = s;
      sh[i] += h;
      return shift_derivative(t, sh, j - 1).get(rest);
    };
    const double fd = oracle::central_diff(g, 0.0);
    const double exact = shift_derivative(t, s, j).get(idx);
    CHECK(rel_err(exact, fd) <= 1e-5);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("regularizer derivatives: hand values") {
  double s2[] = {2.0};
  CHECK(reg_derivative_tensor(s2, 2, 0).entry(0) == doctest::Approx(8.0));
  CHECK(reg_derivative_tensor(s2, 2, 1).entry(0) == doctest::Approx(12.0));
  for (int p = 1; p <= 5; ++p) {
    // d^{p+1}/ds^{p+1} |s|^{p+1} = sign(s)^{p+1} (p+1)!.
    double pos[] = {0.37}, neg[] = {-0.37};
    const double sign = (p + 1) % 2 == 0 ? 1.0 : -1.0;
    CHECK(reg_derivative_tensor(pos, p, p + 1).entry(0) == doctest::Approx(oracle::fact(p + 1)).epsilon(1e-12));
    CHECK(reg_derivative_tensor(neg, p, p + 1).entry(0) == doctest::Approx(sign * oracle::fact(p + 1)).epsilon(1e-12));
    CHECK(reg_derivative_norm(neg, p, p + 1) == doctest::Approx(oracle::fact(p + 1)).epsilon(1e-12));
  }
  double zero[] = {0.0, 0.0};
  CHECK_THROWS_AS(reg_derivative_tensor(zero, 2, 2), SingularPoint);
  CHECK_THROWS_AS(reg_derivative_norm(zero, 3, 2), SingularPoint);
}

TEST_CASE("regularizer derivative norms: closed form and dense operator norms") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 3);
    const int p = rng.integer(1, 5);
    std::vector<double> s = rng.vec(n, -2.0, 2.0);
    const double r = norm2(s);
    for (int j = 0; j <= std::min(2, p); ++j) {
      const double hand = oracle::fact(p + 1) / oracle::fact(p + 1 - j) * std::pow(r, p + 1 - j);
      const double got = reg_derivative_norm(s, p, j);
      CHECK(rel_err(got, hand) <= 1e-10);
      SymTensor T = reg_derivative_tensor(s, p, j);
      double dense = 0.0;
      if (j == 0) {
        dense = std::abs(T.entry(0));
      } else if (j == 1) {
        Eigen::VectorXd g(n);
        for (int a = 0; a < n; ++a) g[a] = T.get(std::vector<int>{a});
        dense = g.norm();
      } else {
        Eigen::MatrixXd H(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) H(a, b) = T.get(std::vector<int>{a, b});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        dense = es.eigenvalues().cwiseAbs().maxCoeff();
      }
      CHECK(rel_err(got, dense) <= 1e-10);
    }
  }
}

TEST_CASE("symmetric storage: permuted writes and reads agree") {
  SymTensor T(3, 3);
  std::vector<int> w = {2, 0, 1};
  T.set(w, 4.5);
  for (auto idx : {std::vector<int>{0, 1, 2}, {1, 2, 0}, {2, 1, 0}, {0, 2, 1}}) CHECK(T.get(idx) == 4.5);
  std::vector<int> other = {0, 0, 1};
  CHECK(T.get(other) == 0.0);
}

TEST_CASE("contractions and norms") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 3);
    const int order = rng.integer(1, 4);
    SymTensor T(order, n);
    for (int i = 0; i < T.size(); ++i) T.entry(i) = rng.uniform(-1, 1);
    std::vector<double> d = rng.vec(n, -1, 1);
    // T[d]^k by explicit index loops.
    std::vector<int> idx(order, 0);
    double full = 0.0, frob = 0.0;
    for (;;) {
      double v = T.get(idx), prod = v;
      for (int i : idx) prod *= d[i];
      full += prod;
      frob += v * v;
      int pos = 0;
      while (pos < order && ++idx[pos] == n) idx[pos++] = 0;
      if (pos == order) break;
    }
    CHECK(rel_err(T.contract(d), full) <= 1e-12);
    CHECK(rel_err(T.frobenius_norm(), std::sqrt(frob)) <= 1e-12);
    Vector g = T.contract_but_one(d);
    CHECK(g.size() == static_cast<std::size_t>(n));
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += g[i] * d[i];
    CHECK(rel_err(dot, full) <= 1e-12);
  }
}

TEST_CASE("operator norm of symmetric matrices") {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 3);
    SymTensor T(2, n);
    for (int i = 0; i < T.size(); ++i) T.entry(i) = rng.uniform(-2, 2);
    Eigen::MatrixXd H(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) H(a, b) = T.get(std::vector<int>{a, b});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    CHECK(rel_err(T.operator_norm(), es.eigenvalues().cwiseAbs().maxCoeff()) <= 1e-10);
  }
}

TEST_CASE("Taylor expansions of polynomials are exact") {
  oracle::Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = rng.integer(1, 6);
    fixture::Poly1 f{rng.vec(rng.integer(1, p + 1), -2, 2)};
    const double x = rng.uniform(-1.5, 1.5), s = rng.uniform(-2, 2);
    TaylorPoly t = f.taylor(x, p);
    double ss[] = {s};
    CHECK(std::abs(f(x + s) - eval_taylor(t, ss)) <= 1e-10 * (1.0 + std::abs(f(x + s))));
  }
}

TEST_CASE("truncation keeps the leading terms") {
  oracle::Rng rng(2);
  TaylorPoly t = oracle::random_taylor(rng, 2, 4);
  TaylorPoly u = t.truncated(2);
  CHECK(u.degree() == 2);
  for (int l = 0; l <= 2; ++l)
    for (int i = 0; i < u.terms[l].size(); ++i) CHECK(u.terms[l].entry(i) == t.terms[l].entry(i));
}
