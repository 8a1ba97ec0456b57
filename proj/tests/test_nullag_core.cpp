#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nullag/nullag_core.hpp"

using namespace nullag;

namespace {

// Random quasiaffine polynomial: random rational coefficients on the minor
// basis plus a constant.
PolyMatrixFn random_quasiaffine(int m, int n, std::mt19937_64& rng,
                                MinorExpansion* truth = nullptr) {
  std::uniform_int_distribution<int> coef(-6, 6);
  MinorExpansion e;
  e.m = m;
  e.n = n;
  e.constant = Rational(coef(rng), 3);
  for (int s = 1; s <= std::min(m, n); ++s)
    for (const auto& p : index_sets(m, s))
      for (const auto& q : index_sets(n, s)) {
        int c = coef(rng);
        if (c == 0) continue;
        e.beta[{s, p.entries, q.entries}] = Rational(c, 2);
      }
  if (truth) *truth = e;
  return e.reconstruct();
}

}  // namespace

TEST_CASE("decompose_minors on the spec examples") {
  auto det2 = builtins::det(2);
  auto e = decompose_minors(det2);
  CHECK(e.constant == 0);
  REQUIRE(e.beta.size() == 1);
  MinorKey full{2, {1, 2}, {1, 2}};
  CHECK(e.beta.at(full) == 1);

  // 3 + 2 F_11 - 5 det
  Polynomial p(4);
  p.set_coeff({0, 0, 0, 0}, 3);
  p.set_coeff({1, 0, 0, 0}, 2);
  auto f = PolyMatrixFn(2, 2, p) + det2 * Rational(-5);
  auto e2 = decompose_minors(f);
  CHECK(e2.constant == 3);
  CHECK(e2.beta.at(MinorKey{1, {1}, {1}}) == 2);
  CHECK(e2.beta.at(full) == -5);
  CHECK(e2.reconstruct().identical(f));
}

TEST_CASE("decompose_minors rejects |F|^2 with residual monomials") {
  Polynomial p(4);
  for (int v = 0; v < 4; ++v) {
    Polynomial::Exps e(4, 0);
    e[v] = 2;
    p.set_coeff(e, 1);
  }
  bool threw = false;
  try {
    decompose_minors(PolyMatrixFn(2, 2, p));
  } catch (const not_quasiaffine& ex) {
    threw = true;
    CHECK(!ex.residual_monomials.empty());
    // squares of entries are exactly the non-representable monomials
    for (const auto& mono : ex.residual_monomials) {
      int total = 0;
      for (int v : mono) total += v;
      CHECK(total == 2);
    }
  }
  CHECK(threw);
}

TEST_CASE("decompose_minors roundtrips random quasiaffine polynomials") {
  std::mt19937_64 rng(41);
  for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}, {3, 4}}) {
    for (int rep = 0; rep < 25; ++rep) {
      MinorExpansion truth;
      auto f = random_quasiaffine(m, n, rng, &truth);
      auto e = decompose_minors(f);
      CHECK(e.constant == truth.constant);
      CHECK(e.beta == truth.beta);
      CHECK(e.reconstruct().identical(f));
    }
  }
}

TEST_CASE("is_boundary_nl on the canonical examples") {
  // a . Cof(F) rho is boundary NL for its own rho.
  std::vector<Rational> rho{Rational(3, 7), Rational(6, 7), Rational(2, 7)};
  std::vector<Rational> a{1, Rational(-1, 2), 2};
  auto cof = builtins::cof_dot(a, rho);
  CHECK(is_boundary_nl(cof, rho).is_boundary_nl);
  // ... but not for e3.
  std::vector<Rational> e3{0, 0, 1};
  auto neg = is_boundary_nl(cof, e3);
  CHECK(!neg.is_boundary_nl);
  REQUIRE(neg.witness);
  // Witness is a genuine inequality, exactly.
  RatMat shift = neg.witness->f + rank_one(neg.witness->a, e3);
  CHECK(cof.evaluate(shift) != cof.evaluate(neg.witness->f));

  // det is never boundary NL.
  auto det2 = builtins::det(2);
  auto v = is_boundary_nl(det2, std::vector<double>{0, 1});
  CHECK(!v.is_boundary_nl);
  REQUIRE(v.witness);
  std::vector<Rational> e2{0, 1};
  RatMat w = v.witness->f + rank_one(v.witness->a, e2);
  CHECK(det2.evaluate(w) != det2.evaluate(v.witness->f));

  // detprime is boundary NL exactly for +-e_n.
  auto detp = builtins::detprime(3);
  CHECK(is_boundary_nl(detp, std::vector<Rational>{0, 0, 1}).is_boundary_nl);
  CHECK(is_boundary_nl(detp, std::vector<Rational>{0, 0, -1}).is_boundary_nl);
  CHECK(!is_boundary_nl(detp, std::vector<Rational>{0, 1, 0}).is_boundary_nl);

  // linear in the first column is boundary NL for e2.
  Polynomial lin(4);
  lin.set_coeff({1, 0, 0, 0}, 2);
  lin.set_coeff({0, 0, 1, 0}, -3);
  CHECK(is_boundary_nl(PolyMatrixFn(2, 2, lin), e2).is_boundary_nl);
}

TEST_CASE("rank-one shifts preserve positives exactly") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> d(-3, 3);
  std::vector<Rational> e3{0, 0, 1};
  auto detp = builtins::detprime(3);
  for (int rep = 0; rep < 30; ++rep) {
    RatMat f(2, 3);
    std::vector<Rational> a(2);
    for (int i = 0; i < 2; ++i) {
      a[i] = d(rng);
      for (int j = 0; j < 3; ++j) f(i, j) = Rational(d(rng), 2);
    }
    CHECK(detp.evaluate(f + rank_one(a, e3)) == detp.evaluate(f));
  }
}

TEST_CASE("decompose_boundary") {
  std::vector<Rational> e3{0, 0, 1};
  auto e = decompose_boundary(builtins::detprime(3), e3);
  CHECK(e.constant == 0);
  REQUIRE(e.beta.size() == 1);
  CHECK(e.beta.at(MinorKey{2, {1, 2}, {1, 2}}) == 1);
  CHECK(e.reconstruct().identical(builtins::detprime(3)));

  // det on n x n is an interior NL but not a boundary one: offending betas
  // carry column sets containing n.
  bool threw = false;
  try {
    decompose_boundary(builtins::det(3), e3);
  } catch (const not_boundary_nl& ex) {
    threw = true;
    REQUIRE(!ex.offending_coefficients.empty());
    for (const auto& key : ex.offending_coefficients)
      CHECK(std::find(key.cols.begin(), key.cols.end(), 3) != key.cols.end());
  }
  CHECK(threw);

  // |F|^2 is not even a null Lagrangian.
  Polynomial p(9);
  for (int v = 0; v < 9; ++v) {
    Polynomial::Exps ex(9, 0);
    ex[v] = 2;
    p.set_coeff(ex, 1);
  }
  CHECK_THROWS_AS(decompose_boundary(PolyMatrixFn(3, 3, p), e3), not_quasiaffine);

  // constant 7
  auto c7 = decompose_boundary(PolyMatrixFn(2, 2, Polynomial::constant(4, 7)),
                               std::vector<Rational>{0, 1});
  CHECK(c7.constant == 7);
  CHECK(c7.beta.empty());
}

TEST_CASE("special_form") {
  // linear -> constant
  Polynomial lin(4);
  lin.set_coeff({1, 0, 0, 0}, 2);
  lin.set_coeff({0, 0, 0, 1}, -1);
  auto f = PolyMatrixFn(2, 2, lin);
  auto sf = special_form(f, RatMat::identity(2));
  CHECK(sf.degree() == 0);
  CHECK(sf.evaluate(RatMat(2, 2)) == f.evaluate(RatMat(2, 2)));

  // det at I: det - tr has vanishing gradient at I.
  auto g = special_form(builtins::det(2), RatMat::identity(2));
  RatMat grad = g.gradient_at(RatMat::identity(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(grad(i, j) == 0);
  CHECK(g.identical(builtins::det(2) - builtins::trace(2)));

  // 2-homogeneous at 0: unchanged.
  CHECK(special_form(builtins::detprime(3), RatMat(2, 3)).identical(builtins::detprime(3)));
}

TEST_CASE("boundary_trace_q") {
  // homogeneous p > 1 at 0 gives q = 0
  auto q0 = boundary_trace_q(builtins::detprime(3), RatMat(2, 3),
                             std::vector<Rational>{0, 0, 1});
  for (const auto& c : q0) CHECK(c == 0);

  // linear: q = beta rho independent of F
  Polynomial lin(4);
  lin.set_coeff({1, 0, 0, 0}, 2);  // 2 F_11
  lin.set_coeff({0, 0, 0, 1}, 3);  // 3 F_22
  auto f = PolyMatrixFn(2, 2, lin);
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> d(-3, 3);
  RatMat at(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) at(i, j) = d(rng);
  auto q = boundary_trace_q(f, at, std::vector<Rational>{0, 1});
  CHECK(q[0] == 0);
  CHECK(q[1] == 3);

  // det at I with e2: Cof(I) e2 = e2
  auto qd = boundary_trace_q(builtins::det(2), RatMat::identity(2), std::vector<Rational>{0, 1});
  CHECK(qd[0] == 0);
  CHECK(qd[1] == 1);
}

TEST_CASE("boundary_nl_basis") {
  std::vector<Rational> e2{0, 1};
  auto b22 = boundary_nl_basis(2, 2, e2);
  REQUIRE(b22.size() == 3);
  CHECK(b22[0].degree() == 0);
  // the nonconstant ones are H11 and H21
  Polynomial h11(4), h21(4);
  h11.set_coeff({1, 0, 0, 0}, 1);
  h21.set_coeff({0, 0, 1, 0}, 1);
  CHECK(b22[1].identical(PolyMatrixFn(2, 2, h11)));
  CHECK(b22[2].identical(PolyMatrixFn(2, 2, h21)));

  std::vector<Rational> e3{0, 0, 1};
  auto b23 = boundary_nl_basis(2, 3, e3);
  CHECK(b23.size() == 6);
  bool has_detprime = false;
  for (const auto& b : b23) has_detprime = has_detprime || b.identical(builtins::detprime(3));
  CHECK(has_detprime);

  std::vector<Rational> rho{Rational(3, 7), Rational(6, 7), Rational(2, 7)};
  auto b33 = boundary_nl_basis(3, 3, rho);
  CHECK(b33.size() == 10);
  for (const auto& b : b33) CHECK(is_boundary_nl(b, rho).is_boundary_nl);
}

TEST_CASE("frame covariance: verdict is invariant under the frame reduction") {
  std::mt19937_64 rng(53);
  std::vector<Rational> rho{Rational(3, 5), Rational(4, 5)};
  auto fr = exact_frame(rho);
  std::vector<Rational> e2{0, 1};
  for (int rep = 0; rep < 10; ++rep) {
    auto f = random_quasiaffine(2, 2, rng);
    auto rotated = f.substitute_linear(fr.rotation);  // f(H R^T)
    CHECK(is_boundary_nl(f, rho).is_boundary_nl ==
          is_boundary_nl(rotated, e2).is_boundary_nl);
  }
}

TEST_CASE("verdict JSON has the documented fields") {
  auto v = is_boundary_nl(builtins::det(2), std::vector<double>{0, 1});
  auto j = v.to_json();
  CHECK(j.find("\"is_boundary_nl\": false") != std::string::npos);
  CHECK(j.find("\"witness\"") != std::string::npos);
  CHECK(j.find("\"rationalized_normal\": false") != std::string::npos);
  CHECK(j.find("\"schema_version\": \"v1\"") != std::string::npos);
}
