#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nullag/polyform.hpp"

using namespace nullag;

namespace {

PolyMatrixFn random_poly(int m, int n, int deg, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> var(0, m * n - 1);
  std::uniform_int_distribution<int> d(0, deg);
  Polynomial p(m * n);
  for (int t = 0; t < 8; ++t) {
    Polynomial mono = Polynomial::constant(m * n, coef(rng));
    int total = d(rng);
    for (int i = 0; i < total; ++i) mono = mono * Polynomial::variable(m * n, var(rng));
    p += mono;
  }
  return {m, n, p};
}

RatMat random_rat(int m, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  RatMat a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Rational(d(rng), 2);
  return a;
}

}  // namespace

TEST_CASE("evaluate builtins") {
  RatMat id2 = RatMat::identity(2);
  CHECK(builtins::det(2).evaluate(id2) == 1);

  std::mt19937_64 rng(2);
  PolyMatrixFn c(2, 2, Polynomial::constant(4, Rational(7, 3)));
  CHECK(c.evaluate(random_rat(2, 2, rng)) == Rational(7, 3));
  for (int rep = 0; rep < 10; ++rep) {
    RatMat h = random_rat(3, 3, rng);
    CHECK(builtins::det(3).evaluate(h) == det_exact(h));
    CHECK(builtins::det(3).evaluate(h.to_real()) ==
          doctest::Approx(h.to_real().determinant()).epsilon(1e-10));
  }

  CHECK_THROWS_AS(builtins::det(2).evaluate(RatMat(2, 3)), std::invalid_argument);
}

TEST_CASE("substitute_linear") {
  auto det2 = builtins::det(2);
  CHECK(det2.substitute_linear(RatMat::identity(2)).identical(det2));

  RatMat diag(2, 2);
  diag(0, 0) = 2;
  diag(1, 1) = 3;
  CHECK(det2.substitute_linear(diag).identical(det2 * Rational(6)));

  std::mt19937_64 rng(5);
  auto detp = builtins::detprime(3);  // 2x3
  for (int rep = 0; rep < 5; ++rep) {
    RatMat a(2, 3);  // H is 2x2, substituted matrix is H*A on 2x3
    a = random_rat(2, 3, rng);
    auto g = detp.substitute_linear(a);
    for (int pt = 0; pt < 20; ++pt) {
      RatMat h = random_rat(2, 2, rng);
      CHECK(g.evaluate(h) == detp.evaluate(h * a));
    }
  }
}

TEST_CASE("substitute_linear is functorial") {
  std::mt19937_64 rng(9);
  auto f = random_poly(2, 3, 3, rng);
  // f(H A) for A: 4x3 then (f∘A)(G B) for B: 2x4 equals f∘(B A) on 2-col G.
  RatMat a = random_rat(4, 3, rng);
  RatMat b = random_rat(2, 4, rng);
  auto once = f.substitute_linear(a).substitute_linear(b);
  auto direct = f.substitute_linear(b * a);
  CHECK(once.identical(direct));
}

TEST_CASE("gradient of det is the cofactor matrix") {
  auto det2 = builtins::det(2);
  RatMat id2 = RatMat::identity(2);
  RatMat g = det2.gradient_at(id2);
  CHECK(g(0, 0) == 1);
  CHECK(g(1, 1) == 1);
  CHECK(g(0, 1) == 0);

  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    RatMat h = random_rat(3, 3, rng);
    RatMat grad = builtins::det(3).gradient_at(h);
    RatMat cof = cofactor(h);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(grad(i, j) == cof(i, j));
  }
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 100; ++rep) {
    auto f = random_poly(2, 2, 5, rng);
    Eigen::MatrixXd h(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h(i, j) = u(rng);
    Eigen::MatrixXd grad = f.gradient_at(h);
    const double step = 1e-5;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Eigen::MatrixXd hp = h, hm = h;
        hp(i, j) += step;
        hm(i, j) -= step;
        double fd = (f.evaluate(hp) - f.evaluate(hm)) / (2 * step);
        CHECK(grad(i, j) == doctest::Approx(fd).epsilon(1e-6));
      }
  }
}

TEST_CASE("homogeneous parts and the dilation identity") {
  auto one_plus_det = builtins::det(2) + PolyMatrixFn(2, 2, Polynomial::constant(4, 1));
  auto parts = one_plus_det.homogeneous_parts().parts;
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].poly().coeff({0, 0, 0, 0}) == 1);
  CHECK(parts[1].is_zero());
  CHECK(parts[2].identical(builtins::det(2)));

  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = random_poly(2, 2, 4, rng);
    auto hp = f.homogeneous_parts().parts;
    PolyMatrixFn sum(2, 2);
    for (const auto& part : hp) sum = sum + part;
    CHECK(sum.identical(f));

    // 2^d f(F) - f(2F) kills the top part and scales the rest.
    const int d = static_cast<int>(hp.size()) - 1;
    RatMat two = RatMat::identity(2);
    two(0, 0) = 2;
    two(1, 1) = 2;
    auto lhs = f * Rational(Int(1) << d) - f.substitute_linear(two);
    PolyMatrixFn rhs(2, 2);
    for (int i = 0; i < d; ++i)
      rhs = rhs + hp[i] * Rational((Int(1) << d) - (Int(1) << i));
    CHECK(lhs.identical(rhs));

    // a_i(tF) = t^i a_i(F) at random F for rational t.
    RatMat f0 = random_rat(2, 2, rng);
    RatMat tf0(2, 2);
    Rational t(3, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) tf0(i, j) = t * f0(i, j);
    Rational tp = 1;
    for (size_t i = 0; i < hp.size(); ++i) {
      CHECK(hp[i].evaluate(tf0) == tp * hp[i].evaluate(f0));
      tp *= t;
    }
  }
}

TEST_CASE("recession function") {
  CHECK(builtins::det(2).recession(2).identical(builtins::det(2)));

  auto one_plus_tr = builtins::trace(2) + PolyMatrixFn(2, 2, Polynomial::constant(4, 1));
  CHECK(one_plus_tr.recession(2).is_zero());

  auto f = builtins::detprime(3) + builtins::detprime(3).gradient()[0];  // det' + F_11-ish
  auto mixed = builtins::detprime(3);
  CHECK(mixed.recession(2).identical(builtins::detprime(3)));
  CHECK_THROWS_AS(builtins::det(3).recession(2), growth_violation);

  // (f - f_inf)(tF)/|tF|^2 -> 0 as t grows.
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  auto low = builtins::detprime(3);
  auto finf = low.recession(2);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd h(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) h(i, j) = u(rng);
    const double t = 1e6;
    double val = (low.evaluate(Eigen::MatrixXd(t * h)) - finf.evaluate(Eigen::MatrixXd(t * h))) /
                 (t * t * h.squaredNorm());
    CHECK(std::abs(val) < 1e-9);
  }
}

TEST_CASE("identical") {
  Polynomial p(4);
  p.set_coeff({1, 0, 0, 1}, 1);
  p.set_coeff({0, 1, 1, 0}, -1);
  CHECK(builtins::det(2).identical(PolyMatrixFn(2, 2, p)));
  CHECK(!builtins::det(2).identical(builtins::det(2) * Rational(-1)));
  CHECK_THROWS_AS(builtins::det(2).identical(builtins::det(3)), std::invalid_argument);

  // det(H R) == det H for any rotation with exact rational entries.
  std::vector<Rational> rho{Rational(3, 5), Rational(4, 5)};
  auto fr = exact_frame(rho);
  CHECK(builtins::det(2).substitute_linear(fr.rotation.transpose()).identical(builtins::det(2)));
}

TEST_CASE("ring axioms at random points") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = random_poly(2, 2, 3, rng);
    auto g = random_poly(2, 2, 3, rng);
    RatMat h = random_rat(2, 2, rng);
    CHECK((f + g).evaluate(h) == f.evaluate(h) + g.evaluate(h));
    CHECK((f * g).evaluate(h) == f.evaluate(h) * g.evaluate(h));
  }
}

TEST_CASE("JSON roundtrip and parse_poly_spec") {
  auto det3 = builtins::det(3);
  CHECK(PolyMatrixFn::from_json(det3.to_json()).identical(det3));

  CHECK(parse_poly_spec("det", 2, 2).identical(builtins::det(2)));
  CHECK(parse_poly_spec("detprime", 2, 3).identical(builtins::detprime(3)));
  CHECK(parse_poly_spec("trace", 3, 3).identical(builtins::trace(3)));
  CHECK(parse_poly_spec("minor(1,2;1,3)", 2, 3)
            .identical(builtins::minor(2, 3, {{1, 2}, 2}, {{1, 3}, 3})));
  auto cof = parse_poly_spec("cof_dot(1,0,0;0,0,1)", 3, 3);
  CHECK(cof.rows() == 3);
  CHECK_THROWS_AS(parse_poly_spec("nonsense", 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_poly_spec("det", 2, 3), std::invalid_argument);
}

TEST_CASE("CompiledPoly agrees with exact evaluation") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = random_poly(2, 3, 4, rng);
    CompiledPoly fc(f);
    Eigen::MatrixXd h(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) h(i, j) = u(rng);
    CHECK(fc(h) == doctest::Approx(f.evaluate(h)).epsilon(1e-12));
  }
}
