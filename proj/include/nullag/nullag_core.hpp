#pragma once

#include <map>
#include <optional>
#include <tuple>

#include "nullag/polyform.hpp"

namespace nullag {

// Key (s, rows, cols) for a minor coefficient; rows/cols are 1-based
// increasing index lists.
struct MinorKey {
  int s;
  std::vector<int> rows;
  std::vector<int> cols;
  auto operator<=>(const MinorKey&) const = default;
};

// Affine-in-minors representation: f(H) = c + sum beta[key] * minor_key(H),
// or, when a frame is attached, f(H) = c + sum beta[key] * minor_key(H R~).
struct MinorExpansion {
  int m = 0, n = 0;  // shape of the argument matrix H
  Rational constant;
  std::map<MinorKey, Rational> beta;
  std::optional<ExactFrame> frame;

  // Expands back to an explicit polynomial in H.
  PolyMatrixFn reconstruct() const;
};

struct not_quasiaffine : std::invalid_argument {
  explicit not_quasiaffine(std::string msg, std::vector<Polynomial::Exps> residual)
      : std::invalid_argument(std::move(msg)), residual_monomials(std::move(residual)) {}
  std::vector<Polynomial::Exps> residual_monomials;
};

struct not_boundary_nl : std::invalid_argument {
  explicit not_boundary_nl(std::string msg, std::vector<MinorKey> offending)
      : std::invalid_argument(std::move(msg)), offending_coefficients(std::move(offending)) {}
  std::vector<MinorKey> offending_coefficients;
};

// Exact minor-basis decomposition of a quasiaffine polynomial. Throws
// not_quasiaffine with the non-representable monomials otherwise.
MinorExpansion decompose_minors(const PolyMatrixFn& f);

struct BoundaryNLVerdict {
  bool is_boundary_nl = false;
  std::vector<Rational> rho;  // the exact (possibly rationalized) normal
  bool rationalized_normal = false;
  std::optional<MinorExpansion> expansion;  // positive case, rotated frame
  struct Witness {
    RatMat f;
    std::vector<Rational> a;
  };
  std::optional<Witness> witness;  // negative case: f(F + a x rho) != f(F)
  // Gradient polynomials enabling q(F) = grad f(F) rho.
  std::vector<PolyMatrixFn> gradient;

  std::string to_json() const;
};

// Decides condition (iv): f(F + a x rho) == f(F) as polynomials in (F, a),
// exactly. On success also carries the rotated-frame decomposition.
BoundaryNLVerdict is_boundary_nl(const PolyMatrixFn& f, const std::vector<double>& rho);
BoundaryNLVerdict is_boundary_nl(const PolyMatrixFn& f, const std::vector<Rational>& rho,
                                 bool rationalized = false);

// Rotated decomposition f(H) = c + sum beta~ . ad_s(H R~), s <= min(m, n-1).
// Throws not_boundary_nl listing the coefficients on column sets containing n
// (in rotated coordinates) when f is an interior null Lagrangian but not a
// boundary one, and not_quasiaffine when it is not a null Lagrangian at all.
MinorExpansion decompose_boundary(const PolyMatrixFn& f, const std::vector<Rational>& rho);

// f minus its linearization at F0: result has vanishing gradient at F0.
PolyMatrixFn special_form(const PolyMatrixFn& f, const RatMat& f0);

// q = grad f(F) rho.
std::vector<Rational> boundary_trace_q(const PolyMatrixFn& f, const RatMat& f_at,
                                       const std::vector<Rational>& rho);
Eigen::VectorXd boundary_trace_q(const PolyMatrixFn& f, const Eigen::MatrixXd& f_at,
                                 const Eigen::VectorXd& rho);

// Spanning set of boundary null Lagrangians for the normal rho: the constant
// 1 and all ad_s^{(p)(q)}(H R~) expanded in H. Count is
// 1 + sum_s C(m,s) C(n-1,s).
std::vector<PolyMatrixFn> boundary_nl_basis(int m, int n, const std::vector<Rational>& rho);

}  // namespace nullag
