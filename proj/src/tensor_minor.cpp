#include "nullag/tensor_minor.hpp"

#include <stdexcept>

namespace nullag {

std::vector<MultiIndex> index_sets(int r, int s) {
  if (s < 1 || s > r) throw std::invalid_argument("index_sets: need 1 <= s <= r");
  std::vector<MultiIndex> out;
  std::vector<int> cur(s);
  for (int i = 0; i < s; ++i) cur[i] = i + 1;
  while (true) {
    out.push_back({cur, r});
    int i = s - 1;
    while (i >= 0 && cur[i] == r - (s - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < s; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

RatMat RatMat::identity(int n) {
  RatMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMat RatMat::transpose() const {
  RatMat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RatMat RatMat::operator*(const RatMat& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("RatMat: shape mismatch in product");
  RatMat r(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rational& x = (*this)(i, k);
      if (x == 0) continue;
      for (int j = 0; j < rhs.cols_; ++j) r(i, j) += x * rhs(k, j);
    }
  return r;
}

RatMat RatMat::operator+(const RatMat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("RatMat: shape mismatch in sum");
  RatMat r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) + rhs(i, j);
  return r;
}

Eigen::MatrixXd RatMat::to_real() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = to_double((*this)(i, j));
  return m;
}

namespace {

// Laplace expansion along the first row; row/col index lists select the
// submatrix.
Rational det_sub(const RatMat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int s = static_cast<int>(rows.size());
  if (s == 1) return m(rows[0], cols[0]);
  Rational acc = 0;
  std::vector<int> subrows(rows.begin() + 1, rows.end());
  std::vector<int> subcols(s - 1);
  for (int j = 0; j < s; ++j) {
    const Rational& piv = m(rows[0], cols[j]);
    if (piv == 0) continue;
    int t = 0;
    for (int l = 0; l < s; ++l)
      if (l != j) subcols[t++] = cols[l];
    Rational term = piv * det_sub(m, subrows, subcols);
    if (j % 2) acc -= term; else acc += term;
  }
  return acc;
}

double det_sub(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int s = static_cast<int>(rows.size());
  Eigen::MatrixXd sub(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) sub(i, j) = m(rows[i], cols[j]);
  if (s == 1) return sub(0, 0);
  if (s == 2) return sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
  return sub.fullPivLu().determinant();
}

std::vector<int> zero_based(const MultiIndex& mi) {
  std::vector<int> v(mi.entries.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = mi.entries[i] - 1;
  return v;
}

}  // namespace

Rational det_exact(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det_exact: non-square matrix");
  std::vector<int> idx(m.rows());
  for (int i = 0; i < m.rows(); ++i) idx[i] = i;
  return det_sub(m, idx, idx);
}

std::vector<Rational> ad_s(const RatMat& h, int s) {
  if (s < 1 || s > std::min(h.rows(), h.cols()))
    throw std::invalid_argument("ad_s: order out of range");
  auto rows = index_sets(h.rows(), s);
  auto cols = index_sets(h.cols(), s);
  std::vector<Rational> out;
  out.reserve(rows.size() * cols.size());
  for (const auto& p : rows)
    for (const auto& q : cols) out.push_back(det_sub(h, zero_based(p), zero_based(q)));
  return out;
}

Eigen::VectorXd ad_s(const Eigen::MatrixXd& h, int s) {
  if (s < 1 || s > std::min(h.rows(), h.cols()))
    throw std::invalid_argument("ad_s: order out of range");
  auto rows = index_sets(static_cast<int>(h.rows()), s);
  auto cols = index_sets(static_cast<int>(h.cols()), s);
  Eigen::VectorXd out(rows.size() * cols.size());
  int t = 0;
  for (const auto& p : rows)
    for (const auto& q : cols) out(t++) = det_sub(h, zero_based(p), zero_based(q));
  return out;
}

RatMat cofactor(const RatMat& f) {
  if (f.rows() != f.cols()) throw std::invalid_argument("cofactor: non-square matrix");
  const int n = f.rows();
  RatMat c(n, n);
  if (n == 1) {
    c(0, 0) = 1;
    return c;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int k = 0; k < n; ++k) {
        if (k != i) rows.push_back(k);
        if (k != j) cols.push_back(k);
      }
      Rational d = det_sub(f, rows, cols);
      c(i, j) = ((i + j) % 2) ? -d : d;
    }
  return c;
}

Eigen::MatrixXd cofactor(const Eigen::MatrixXd& f) {
  if (f.rows() != f.cols()) throw std::invalid_argument("cofactor: non-square matrix");
  const int n = static_cast<int>(f.rows());
  Eigen::MatrixXd c(n, n);
  if (n == 1) {
    c(0, 0) = 1.0;
    return c;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int k = 0; k < n; ++k) {
        if (k != i) rows.push_back(k);
        if (k != j) cols.push_back(k);
      }
      double d = det_sub(f, rows, cols);
      c(i, j) = ((i + j) % 2) ? -d : d;
    }
  return c;
}

RatMat rank_one(const std::vector<Rational>& a, const std::vector<Rational>& rho) {
  RatMat m(static_cast<int>(a.size()), static_cast<int>(rho.size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = a[i] * rho[j];
  return m;
}

Eigen::MatrixXd rank_one(const Eigen::VectorXd& a, const Eigen::VectorXd& rho) {
  return a * rho.transpose();
}

BoundaryFrame complete_rotation(const Eigen::VectorXd& rho) {
  const int n = static_cast<int>(rho.size());
  if (n < 1) throw std::invalid_argument("complete_rotation: empty normal");
  if (std::abs(rho.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("complete_rotation: normal must have unit length within 1e-10");

  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd w = rho - Eigen::VectorXd::Unit(n, n - 1);
  const double w2 = w.squaredNorm();
  if (w2 > 1e-24) {
    r -= (2.0 / w2) * (w * w.transpose());
    // A Householder reflection has determinant -1.
    if (n >= 2) r.col(0) = -r.col(0);
  }
  BoundaryFrame frame;
  frame.normal = rho;
  frame.rotation = r;
  frame.completion = r.leftCols(n - 1);
  return frame;
}

ExactFrame exact_frame(const std::vector<Rational>& rho) {
  const int n = static_cast<int>(rho.size());
  Rational norm2 = 0;
  for (const auto& c : rho) norm2 += c * c;
  if (norm2 != 1) throw std::invalid_argument("exact_frame: |rho|^2 must equal 1 exactly");

  RatMat r = RatMat::identity(n);
  std::vector<Rational> w(rho);
  w[n - 1] -= 1;
  Rational w2 = 0;
  for (const auto& c : w) w2 += c * c;
  if (w2 != 0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) -= 2 * w[i] * w[j] / w2;
    if (n >= 2)
      for (int i = 0; i < n; ++i) r(i, 0) = -r(i, 0);
  }
  ExactFrame frame;
  frame.rho = rho;
  frame.rotation = r;
  frame.completion = RatMat(n, n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n - 1; ++j) frame.completion(i, j) = r(i, j);
  return frame;
}

}  // namespace nullag
