#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nullag/rational.hpp"

namespace nullag {

// Strictly increasing multi-index {a_1 < ... < a_s} with 1-based entries in
// [1, ambient].
struct MultiIndex {
  std::vector<int> entries;
  int ambient = 0;
  int order() const { return static_cast<int>(entries.size()); }
  bool operator==(const MultiIndex&) const = default;
};

// All C(r,s) increasing s-subsets of {1..r}, lexicographically ordered. This
// ordering is the flattening convention for minor vectors everywhere.
std::vector<MultiIndex> index_sets(int r, int s);

// Dense matrix with exact rational entries.
class RatMat {
 public:
  RatMat() = default;
  RatMat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
  static RatMat identity(int n);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }
  RatMat transpose() const;
  RatMat operator*(const RatMat& rhs) const;
  RatMat operator+(const RatMat& rhs) const;
  Eigen::MatrixXd to_real() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

Rational det_exact(const RatMat& m);

// Vector of all s x s minors of H, flattened lexicographically over
// (rows, cols) multi-index pairs. Unsigned convention: no (-1)^{p+q} factor
// between positions; each entry is det of the row/column submatrix.
std::vector<Rational> ad_s(const RatMat& h, int s);
Eigen::VectorXd ad_s(const Eigen::MatrixXd& h, int s);

// Signed cofactor matrix, Cof(F)_{ij} = (-1)^{i+j} det F'_{ij}.
RatMat cofactor(const RatMat& f);
Eigen::MatrixXd cofactor(const Eigen::MatrixXd& f);

// (a x rho)_{ij} = a_i rho_j.
RatMat rank_one(const std::vector<Rational>& a, const std::vector<Rational>& rho);
Eigen::MatrixXd rank_one(const Eigen::VectorXd& a, const Eigen::VectorXd& rho);

// Unit normal rho, its tangential completion R~ (n x (n-1)) and the rotation
// R = (R~ | rho) in SO(n).
struct BoundaryFrame {
  Eigen::VectorXd normal;
  Eigen::MatrixXd completion;
  Eigen::MatrixXd rotation;
};

// Deterministic completion: Householder reflection mapping e_n to rho, with
// the first column negated when needed to reach det R = +1.
BoundaryFrame complete_rotation(const Eigen::VectorXd& rho);

// Exact counterpart for a rational unit vector (|rho|^2 == 1 exactly).
struct ExactFrame {
  std::vector<Rational> rho;
  RatMat completion;
  RatMat rotation;
};
ExactFrame exact_frame(const std::vector<Rational>& rho);

}  // namespace nullag
