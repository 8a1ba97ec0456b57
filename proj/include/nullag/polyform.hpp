#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullag/tensor_minor.hpp"

namespace nullag {

// Sparse multivariate polynomial with exact rational coefficients. Exponent
// vectors are dense over a fixed variable count; zero coefficients are never
// stored.
class Polynomial {
 public:
  using Exps = std::vector<int>;
  using TermMap = std::map<Exps, Rational>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}
  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int idx);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // 0 for the zero polynomial
  Rational coeff(const Exps& e) const;
  void set_coeff(const Exps& e, const Rational& c);

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator-(const Polynomial& rhs) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial operator*(const Rational& c) const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  bool operator==(const Polynomial& rhs) const { return nvars_ == rhs.nvars_ && terms_ == rhs.terms_; }

  Polynomial pow(int e) const;
  Rational evaluate(const std::vector<Rational>& x) const;
  double evaluate(const std::vector<double>& x) const;
  Polynomial derivative(int var) const;
  // Composition: variable i is replaced by subs[i].
  Polynomial substitute(const std::vector<Polynomial>& subs) const;
  // Groups terms by total degree; index d holds the d-homogeneous part.
  std::vector<Polynomial> parts_by_degree() const;

 private:
  int nvars_;
  TermMap terms_;
};

// Polynomial in the entries of an m x n matrix variable, row-major
// (F_11, F_12, ..., F_mn).
class PolyMatrixFn {
 public:
  PolyMatrixFn() : m_(0), n_(0), p_(0) {}
  PolyMatrixFn(int m, int n) : m_(m), n_(n), p_(m * n) {}
  PolyMatrixFn(int m, int n, Polynomial p);

  int rows() const { return m_; }
  int cols() const { return n_; }
  int var(int i, int j) const { return i * n_ + j; }
  const Polynomial& poly() const { return p_; }
  int degree() const { return p_.degree(); }
  bool is_zero() const { return p_.is_zero(); }

  PolyMatrixFn operator+(const PolyMatrixFn& rhs) const;
  PolyMatrixFn operator-(const PolyMatrixFn& rhs) const;
  PolyMatrixFn operator*(const PolyMatrixFn& rhs) const;
  PolyMatrixFn operator*(const Rational& c) const;

  Rational evaluate(const RatMat& h) const;
  double evaluate(const Eigen::MatrixXd& h) const;

  // f on m x k composed with H -> H A, A rational n x k; result lives on
  // m x n matrices H.
  PolyMatrixFn substitute_linear(const RatMat& a) const;

  // Entry (i,j) is dF_ij.
  std::vector<PolyMatrixFn> gradient() const;
  Eigen::MatrixXd gradient_at(const Eigen::MatrixXd& f) const;
  RatMat gradient_at(const RatMat& f) const;

  struct HomogeneousParts {
    std::vector<PolyMatrixFn> parts;  // index d = d-homogeneous part
  };
  HomogeneousParts homogeneous_parts() const;

  // p-homogeneous part a_p; throws growth_violation if degree > p.
  PolyMatrixFn recession(int p) const;

  bool identical(const PolyMatrixFn& g) const;

  std::string to_json() const;
  static PolyMatrixFn from_json(const std::string& json_text);

 private:
  int m_, n_;
  Polynomial p_;
};

struct growth_violation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Built-in integrands.
namespace builtins {
PolyMatrixFn det(int n);
// det of the leading (n-1) x (n-1) block of an (n-1) x n matrix.
PolyMatrixFn detprime(int n);
PolyMatrixFn trace(int n);
// a . Cof(F) rho on n x n matrices.
PolyMatrixFn cof_dot(const std::vector<Rational>& a, const std::vector<Rational>& rho);
// Single unsigned minor det F_{(p)(q)} on m x n matrices.
PolyMatrixFn minor(int m, int n, const MultiIndex& p, const MultiIndex& q);
}  // namespace builtins

// Accepts a builtin spec ("det", "detprime", "trace", "cof_dot(a;rho)",
// "minor(p_list;q_list)") or the JSON text format.
PolyMatrixFn parse_poly_spec(const std::string& spec, int m, int n);

// Fast double-precision evaluator (flattened monomials). Shares the variable
// layout of the source PolyMatrixFn.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const PolyMatrixFn& f);
  int rows() const { return m_; }
  int cols() const { return n_; }
  // x has m*n entries, row-major.
  double operator()(const double* x) const;
  double operator()(const Eigen::MatrixXd& h) const;

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<int, int>> factors;  // (var, exponent)
  };
  int m_ = 0, n_ = 0;
  std::vector<Term> terms_;
};

}  // namespace nullag
