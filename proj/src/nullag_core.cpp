#include "nullag/nullag_core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>
#include <sstream>

namespace nullag {

namespace {

// Permutation sign of the row->column bijection encoded by a squarefree
// monomial of a minor.
int bijection_sign(const std::vector<std::pair<int, int>>& pairs_sorted_by_row) {
  int inv = 0;
  const int s = static_cast<int>(pairs_sorted_by_row.size());
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if (pairs_sorted_by_row[i].second > pairs_sorted_by_row[j].second) ++inv;
  return (inv % 2) ? -1 : 1;
}

std::string key_to_string(const MinorKey& k) {
  std::ostringstream os;
  os << "s=" << k.s << " rows={";
  for (size_t i = 0; i < k.rows.size(); ++i) os << (i ? "," : "") << k.rows[i];
  os << "} cols={";
  for (size_t i = 0; i < k.cols.size(); ++i) os << (i ? "," : "") << k.cols[i];
  os << "}";
  return os.str();
}

}  // namespace

PolyMatrixFn MinorExpansion::reconstruct() const {
  PolyMatrixFn acc(m, n);
  acc = acc + PolyMatrixFn(m, n, Polynomial::constant(m * n, constant));
  for (const auto& [key, coef] : beta) {
    MultiIndex p{key.rows, m};
    const int ncols = frame ? n - 1 : n;
    MultiIndex q{key.cols, ncols};
    PolyMatrixFn mono = builtins::minor(m, ncols, p, q);
    if (frame) mono = mono.substitute_linear(frame->completion);
    acc = acc + mono * coef;
  }
  return acc;
}

MinorExpansion decompose_minors(const PolyMatrixFn& f) {
  const int m = f.rows(), n = f.cols();
  MinorExpansion out;
  out.m = m;
  out.n = n;

  Polynomial residual = f.poly();
  out.constant = residual.coeff(Polynomial::Exps(m * n, 0));
  residual -= Polynomial::constant(m * n, out.constant);

  std::vector<Polynomial::Exps> bad;
  while (!residual.is_zero()) {
    const auto& [e, c] = *residual.terms().begin();
    // A minor monomial is squarefree, uses s distinct rows and s distinct
    // columns, each exactly once.
    std::vector<std::pair<int, int>> pairs;  // (row, col), rows increasing
    bool representable = true;
    for (int idx = 0; idx < m * n; ++idx) {
      if (e[idx] == 0) continue;
      if (e[idx] > 1) representable = false;
      pairs.emplace_back(idx / n, idx % n);
    }
    std::vector<int> rows, cols;
    for (const auto& [r, cc] : pairs) rows.push_back(r + 1);
    std::vector<std::pair<int, int>> by_col = pairs;
    std::sort(by_col.begin(), by_col.end(),
              [](auto& a, auto& b) { return a.second < b.second; });
    for (const auto& [r, cc] : by_col) cols.push_back(cc + 1);
    const int s = static_cast<int>(pairs.size());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end() ||
        std::adjacent_find(cols.begin(), cols.end()) != cols.end())
      representable = false;

    if (!representable) {
      bad.push_back(e);
      residual.set_coeff(e, 0);
      continue;
    }
    MinorKey key{s, rows, cols};
    if (out.beta.count(key)) {
      // The minor was already peeled off; a leftover monomial on its support
      // cannot be matched.
      bad.push_back(e);
      residual.set_coeff(e, 0);
      continue;
    }
    Rational coef = c / bijection_sign(pairs);
    MultiIndex p{rows, m}, q{cols, n};
    residual -= builtins::minor(m, n, p, q).poly() * coef;
    out.beta[key] = coef;
  }
  if (!bad.empty())
    throw not_quasiaffine("polynomial is not quasiaffine: " + std::to_string(bad.size()) +
                              " monomial(s) outside the minor basis",
                          bad);
  return out;
}

namespace {

// g(F,a) := f(F + a x rho) - f(F), a polynomial in mn + m variables
// (F row-major first, then a).
Polynomial shift_difference(const PolyMatrixFn& f, const std::vector<Rational>& rho) {
  const int m = f.rows(), n = f.cols();
  const int nv = m * n + m;
  std::vector<Polynomial> subs(m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      Polynomial s = Polynomial::variable(nv, i * n + j);
      if (rho[j] != 0) s += Polynomial::variable(nv, m * n + i) * rho[j];
      subs[i * n + j] = s;
    }
  Polynomial shifted = f.poly().substitute(subs);
  // Embed f itself into the extended variable set.
  std::vector<Polynomial> embed(m * n);
  for (int v = 0; v < m * n; ++v) embed[v] = Polynomial::variable(nv, v);
  return shifted - f.poly().substitute(embed);
}

BoundaryNLVerdict::Witness find_witness(const Polynomial& g, int m, int n) {
  const int nv = m * n + m;
  auto make = [&](const std::vector<Rational>& x) {
    BoundaryNLVerdict::Witness w;
    w.f = RatMat(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) w.f(i, j) = x[i * n + j];
    w.a.assign(x.begin() + m * n, x.end());
    return w;
  };
  // Small integer grid first, sampled deterministically.
  std::mt19937_64 rng(0);
  std::uniform_int_distribution<int> grid(-2, 2);
  for (int t = 0; t < 512; ++t) {
    std::vector<Rational> x(nv);
    for (auto& xi : x) xi = grid(rng);
    if (g.evaluate(x) != 0) return make(x);
  }
  // Structured fallback: activate the variables of one monomial at a time.
  for (const auto& [e, c] : g.terms()) {
    std::vector<Rational> x(nv, Rational(0));
    for (int v = 0; v < nv; ++v)
      if (e[v]) x[v] = 1;
    if (g.evaluate(x) != 0) return make(x);
  }
  // Last resort: distinct primes defeat any fixed cancellation pattern.
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  for (int round = 1; round < 64; ++round) {
    std::vector<Rational> x(nv);
    for (int v = 0; v < nv; ++v) x[v] = Rational(primes[v % 16], round);
    if (g.evaluate(x) != 0) return make(x);
  }
  throw std::logic_error("witness search failed for a nonzero polynomial");
}

}  // namespace

BoundaryNLVerdict is_boundary_nl(const PolyMatrixFn& f, const std::vector<double>& rho) {
  auto rat = rational_unit_normal(rho);
  return is_boundary_nl(f, rat.rho, rat.rationalized);
}

BoundaryNLVerdict is_boundary_nl(const PolyMatrixFn& f, const std::vector<Rational>& rho,
                                 bool rationalized) {
  if (static_cast<int>(rho.size()) != f.cols())
    throw std::invalid_argument("is_boundary_nl: normal dimension must equal column count");
  BoundaryNLVerdict v;
  v.rho = rho;
  v.rationalized_normal = rationalized;
  v.gradient = f.gradient();

  Polynomial g = shift_difference(f, rho);
  if (g.is_zero()) {
    v.is_boundary_nl = true;
    v.expansion = decompose_boundary(f, rho);
  } else {
    v.is_boundary_nl = false;
    v.witness = find_witness(g, f.rows(), f.cols());
  }
  return v;
}

MinorExpansion decompose_boundary(const PolyMatrixFn& f, const std::vector<Rational>& rho) {
  const int m = f.rows(), n = f.cols();
  ExactFrame frame = exact_frame(rho);

  // Rotate: fhat(H) := f(H R^T), decompose in the full minor basis, then
  // require every coefficient on a column set containing n to vanish.
  PolyMatrixFn fhat = f.substitute_linear(frame.rotation.transpose());
  MinorExpansion full = decompose_minors(fhat);

  std::vector<MinorKey> offending;
  MinorExpansion out;
  out.m = m;
  out.n = n;
  out.constant = full.constant;
  out.frame = frame;
  for (const auto& [key, coef] : full.beta) {
    if (std::find(key.cols.begin(), key.cols.end(), n) != key.cols.end()) {
      offending.push_back(key);
      continue;
    }
    MinorKey reduced = key;  // column indices already live in {1..n-1}
    out.beta[reduced] = coef;
  }
  if (!offending.empty()) {
    std::string msg = "interior null Lagrangian but not a boundary one; nonzero rotated "
                      "coefficients on column sets containing the normal direction:";
    for (const auto& k : offending) msg += " [" + key_to_string(k) + "]";
    throw not_boundary_nl(std::move(msg), std::move(offending));
  }
  return out;
}

PolyMatrixFn special_form(const PolyMatrixFn& f, const RatMat& f0) {
  const int m = f.rows(), n = f.cols();
  if (f0.rows() != m || f0.cols() != n) throw std::invalid_argument("special_form: shape mismatch");
  RatMat grad = f.gradient_at(f0);
  Polynomial linear(m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (grad(i, j) != 0) linear += Polynomial::variable(m * n, i * n + j) * grad(i, j);
  return {m, n, f.poly() - linear};
}

std::vector<Rational> boundary_trace_q(const PolyMatrixFn& f, const RatMat& f_at,
                                       const std::vector<Rational>& rho) {
  RatMat grad = f.gradient_at(f_at);
  std::vector<Rational> q(f.rows(), Rational(0));
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j) q[i] += grad(i, j) * rho[j];
  return q;
}

Eigen::VectorXd boundary_trace_q(const PolyMatrixFn& f, const Eigen::MatrixXd& f_at,
                                 const Eigen::VectorXd& rho) {
  return f.gradient_at(f_at) * rho;
}

std::vector<PolyMatrixFn> boundary_nl_basis(int m, int n, const std::vector<Rational>& rho) {
  if (n < 2) throw std::invalid_argument("boundary_nl_basis: need n >= 2");
  ExactFrame frame = exact_frame(rho);
  std::vector<PolyMatrixFn> basis;
  basis.push_back(PolyMatrixFn(m, n, Polynomial::constant(m * n, 1)));
  for (int s = 1; s <= std::min(m, n - 1); ++s)
    for (const auto& p : index_sets(m, s))
      for (const auto& q : index_sets(n - 1, s))
        basis.push_back(builtins::minor(m, n - 1, p, q).substitute_linear(frame.completion));
  return basis;
}

namespace {

nlohmann::json frame_json(const ExactFrame& fr) {
  nlohmann::json j;
  auto vec = nlohmann::json::array();
  for (const auto& c : fr.rho) vec.push_back(to_string(c));
  j["rho"] = vec;
  auto mat = nlohmann::json::array();
  for (int i = 0; i < fr.rotation.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (int k = 0; k < fr.rotation.cols(); ++k) row.push_back(to_string(fr.rotation(i, k)));
    mat.push_back(row);
  }
  j["rotation"] = mat;
  return j;
}

}  // namespace

std::string BoundaryNLVerdict::to_json() const {
  nlohmann::json j;
  j["schema_version"] = "v1";
  j["is_boundary_nl"] = is_boundary_nl;
  j["rationalized_normal"] = rationalized_normal;
  auto rv = nlohmann::json::array();
  for (const auto& c : rho) rv.push_back(to_string(c));
  j["normal"] = rv;
  if (expansion) {
    nlohmann::json e;
    e["constant"] = to_string(expansion->constant);
    auto terms = nlohmann::json::array();
    for (const auto& [key, coef] : expansion->beta) {
      nlohmann::json t;
      t["s"] = key.s;
      t["rows"] = key.rows;
      t["cols"] = key.cols;
      t["coeff"] = to_string(coef);
      terms.push_back(t);
    }
    e["terms"] = terms;
    if (expansion->frame) e["frame"] = frame_json(*expansion->frame);
    j["expansion"] = e;
  } else {
    j["expansion"] = nullptr;
  }
  if (witness) {
    nlohmann::json w;
    auto fm = nlohmann::json::array();
    for (int i = 0; i < witness->f.rows(); ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < witness->f.cols(); ++k) row.push_back(to_string(witness->f(i, k)));
      fm.push_back(row);
    }
    w["F"] = fm;
    auto av = nlohmann::json::array();
    for (const auto& c : witness->a) av.push_back(to_string(c));
    w["a"] = av;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace nullag
