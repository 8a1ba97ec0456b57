#include "nullag/polyform.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nullag {

namespace {
int total_degree(const Polynomial::Exps& e) { return std::accumulate(e.begin(), e.end(), 0); }
}  // namespace

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_[Exps(nvars, 0)] = c;
  return p;
}

Polynomial Polynomial::variable(int nvars, int idx) {
  Polynomial p(nvars);
  Exps e(nvars, 0);
  e.at(idx) = 1;
  p.terms_[e] = 1;
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

Rational Polynomial::coeff(const Exps& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::set_coeff(const Exps& e, const Rational& c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent size mismatch");
  if (c == 0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (nvars_ != rhs.nvars_) throw std::invalid_argument("polynomial variable-count mismatch");
  for (const auto& [e, c] : rhs.terms_) {
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) { return *this += -rhs; }

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  Polynomial r = *this;
  r += rhs;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const {
  Polynomial r = *this;
  r -= rhs;
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) r.terms_[e] = -c;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  if (nvars_ != rhs.nvars_) throw std::invalid_argument("polynomial variable-count mismatch");
  Polynomial r(nvars_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : rhs.terms_) {
      Exps e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
      auto [it, inserted] = r.terms_.try_emplace(e, Rational(c1 * c2));
      if (!inserted) {
        it->second += c1 * c2;
        if (it->second == 0) r.terms_.erase(it);
      }
    }
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r(nvars_);
  if (c == 0) return r;
  for (const auto& [e, k] : terms_) r.terms_[e] = k * c;
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative power");
  Polynomial r = constant(nvars_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) r = r * base;
    base = (e >>= 1) ? base * base : base;
  }
  return r;
}

Rational Polynomial::evaluate(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("evaluate: arity mismatch");
  // Per-variable power tables up to the needed degree.
  std::vector<std::vector<Rational>> pw(nvars_);
  for (int i = 0; i < nvars_; ++i) pw[i].push_back(1);
  Rational acc = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < nvars_; ++i) {
      while (static_cast<int>(pw[i].size()) <= e[i]) pw[i].push_back(pw[i].back() * x[i]);
      if (e[i]) t *= pw[i][e[i]];
    }
    acc += t;
  }
  return acc;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("evaluate: arity mismatch");
  double acc = 0;
  for (const auto& [e, c] : terms_) {
    double t = to_double(c);
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exps d = e;
    --d[var];
    r.terms_[d] = c * e[var];
  }
  return r;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& subs) const {
  if (static_cast<int>(subs.size()) != nvars_) throw std::invalid_argument("substitute: arity mismatch");
  const int out_vars = subs.empty() ? 0 : subs[0].nvars();
  for (const auto& s : subs)
    if (s.nvars() != out_vars) throw std::invalid_argument("substitute: inconsistent target arity");
  // Cache powers of each substituted variable.
  std::vector<std::vector<Polynomial>> pw(nvars_);
  for (int i = 0; i < nvars_; ++i) pw[i].push_back(Polynomial::constant(out_vars, 1));
  Polynomial acc(out_vars);
  for (const auto& [e, c] : terms_) {
    Polynomial t = Polynomial::constant(out_vars, c);
    for (int i = 0; i < nvars_; ++i) {
      while (static_cast<int>(pw[i].size()) <= e[i]) pw[i].push_back(pw[i].back() * subs[i]);
      if (e[i]) t = t * pw[i][e[i]];
    }
    acc += t;
  }
  return acc;
}

std::vector<Polynomial> Polynomial::parts_by_degree() const {
  std::vector<Polynomial> parts(degree() + 1, Polynomial(nvars_));
  for (const auto& [e, c] : terms_) parts[total_degree(e)].set_coeff(e, c);
  return parts;
}

PolyMatrixFn::PolyMatrixFn(int m, int n, Polynomial p) : m_(m), n_(n), p_(std::move(p)) {
  if (p_.nvars() != m * n) throw std::invalid_argument("PolyMatrixFn: arity does not match shape");
}

PolyMatrixFn PolyMatrixFn::operator+(const PolyMatrixFn& rhs) const {
  if (m_ != rhs.m_ || n_ != rhs.n_) throw std::invalid_argument("shape mismatch");
  return {m_, n_, p_ + rhs.p_};
}

PolyMatrixFn PolyMatrixFn::operator-(const PolyMatrixFn& rhs) const {
  if (m_ != rhs.m_ || n_ != rhs.n_) throw std::invalid_argument("shape mismatch");
  return {m_, n_, p_ - rhs.p_};
}

PolyMatrixFn PolyMatrixFn::operator*(const PolyMatrixFn& rhs) const {
  if (m_ != rhs.m_ || n_ != rhs.n_) throw std::invalid_argument("shape mismatch");
  return {m_, n_, p_ * rhs.p_};
}

PolyMatrixFn PolyMatrixFn::operator*(const Rational& c) const { return {m_, n_, p_ * c}; }

Rational PolyMatrixFn::evaluate(const RatMat& h) const {
  if (h.rows() != m_ || h.cols() != n_) throw std::invalid_argument("evaluate: shape mismatch");
  std::vector<Rational> x(m_ * n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) x[var(i, j)] = h(i, j);
  return p_.evaluate(x);
}

double PolyMatrixFn::evaluate(const Eigen::MatrixXd& h) const {
  if (h.rows() != m_ || h.cols() != n_) throw std::invalid_argument("evaluate: shape mismatch");
  std::vector<double> x(m_ * n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) x[var(i, j)] = h(i, j);
  return p_.evaluate(x);
}

PolyMatrixFn PolyMatrixFn::substitute_linear(const RatMat& a) const {
  // This polynomial's variable matrix is m x k with k = n_; the result is a
  // polynomial in H (m x rows(a)) composed as H A, so we need cols(a) == n_.
  if (a.cols() != n_) throw std::invalid_argument("substitute_linear: column count mismatch");
  const int n_new = a.rows();
  const int out_vars = m_ * n_new;
  std::vector<Polynomial> subs(m_ * n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) {
      Polynomial s(out_vars);
      for (int l = 0; l < n_new; ++l)
        if (a(l, j) != 0) s += Polynomial::variable(out_vars, i * n_new + l) * a(l, j);
      subs[var(i, j)] = s;
    }
  return {m_, n_new, p_.substitute(subs)};
}

std::vector<PolyMatrixFn> PolyMatrixFn::gradient() const {
  std::vector<PolyMatrixFn> g;
  g.reserve(m_ * n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) g.emplace_back(m_, n_, p_.derivative(var(i, j)));
  return g;
}

Eigen::MatrixXd PolyMatrixFn::gradient_at(const Eigen::MatrixXd& f) const {
  auto g = gradient();
  Eigen::MatrixXd out(m_, n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = g[var(i, j)].evaluate(f);
  return out;
}

RatMat PolyMatrixFn::gradient_at(const RatMat& f) const {
  auto g = gradient();
  RatMat out(m_, n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = g[var(i, j)].evaluate(f);
  return out;
}

PolyMatrixFn::HomogeneousParts PolyMatrixFn::homogeneous_parts() const {
  HomogeneousParts hp;
  for (auto& part : p_.parts_by_degree()) hp.parts.emplace_back(m_, n_, std::move(part));
  return hp;
}

PolyMatrixFn PolyMatrixFn::recession(int p) const {
  if (degree() > p)
    throw growth_violation("recession: polynomial degree exceeds growth exponent p");
  auto parts = homogeneous_parts().parts;
  if (p < static_cast<int>(parts.size())) return parts[p];
  return PolyMatrixFn(m_, n_);
}

bool PolyMatrixFn::identical(const PolyMatrixFn& g) const {
  if (m_ != g.m_ || n_ != g.n_) throw std::invalid_argument("identical: shape mismatch");
  // Schwartz-Zippel pre-check: a nonzero value at any point certifies "not
  // identical" without forming the difference.
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> num(-20, 20);
  for (int t = 0; t < 5; ++t) {
    std::vector<Rational> x(m_ * n_);
    for (auto& xi : x) xi = Rational(num(rng), 7);
    if (p_.evaluate(x) != g.p_.evaluate(x)) return false;
  }
  return (p_ - g.p_).is_zero();
}

std::string PolyMatrixFn::to_json() const {
  nlohmann::json j;
  j["shape"] = {m_, n_};
  auto terms = nlohmann::json::array();
  for (const auto& [e, c] : p_.terms()) {
    nlohmann::json t;
    t["coeff"] = to_string(c);
    t["exps"] = e;
    terms.push_back(t);
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

PolyMatrixFn PolyMatrixFn::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  const int m = j.at("shape").at(0).get<int>();
  const int n = j.at("shape").at(1).get<int>();
  Polynomial p(m * n);
  for (const auto& t : j.at("terms")) {
    Polynomial::Exps e = t.at("exps").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != m * n)
      throw std::invalid_argument("polynomial JSON: exponent vector length != m*n");
    p.set_coeff(e, p.coeff(e) + rational_from_string(t.at("coeff").get<std::string>()));
  }
  return {m, n, std::move(p)};
}

namespace builtins {

PolyMatrixFn minor(int m, int n, const MultiIndex& p, const MultiIndex& q) {
  const int s = p.order();
  if (s != q.order()) throw std::invalid_argument("minor: row/column orders differ");
  Polynomial poly(m * n);
  std::vector<int> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inversions = 0;
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Polynomial::Exps e(m * n, 0);
    for (int i = 0; i < s; ++i) e[(p.entries[i] - 1) * n + (q.entries[perm[i]] - 1)] += 1;
    poly.set_coeff(e, poly.coeff(e) + ((inversions % 2) ? -1 : 1));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {m, n, std::move(poly)};
}

PolyMatrixFn det(int n) {
  auto full = index_sets(n, n).front();
  return minor(n, n, full, full);
}

PolyMatrixFn detprime(int n) {
  if (n < 2) throw std::invalid_argument("detprime: need n >= 2");
  auto rows = index_sets(n - 1, n - 1).front();
  MultiIndex cols{rows.entries, n};
  return minor(n - 1, n, rows, cols);
}

PolyMatrixFn trace(int n) {
  Polynomial p(n * n);
  for (int i = 0; i < n; ++i) p += Polynomial::variable(n * n, i * n + i);
  return {n, n, std::move(p)};
}

PolyMatrixFn cof_dot(const std::vector<Rational>& a, const std::vector<Rational>& rho) {
  const int n = static_cast<int>(a.size());
  if (static_cast<int>(rho.size()) != n) throw std::invalid_argument("cof_dot: dimension mismatch");
  Polynomial acc(n * n);
  auto rowsets = index_sets(n, n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (a[i] == 0 || rho[j] == 0) continue;
      MultiIndex p, q;
      p.ambient = q.ambient = n;
      for (int k = 1; k <= n; ++k) {
        if (k != i + 1) p.entries.push_back(k);
        if (k != j + 1) q.entries.push_back(k);
      }
      Rational sign = ((i + j) % 2) ? -1 : 1;
      acc += minor(n, n, p, q).poly() * (sign * a[i] * rho[j]);
    }
  return {n, n, std::move(acc)};
}

}  // namespace builtins

namespace {

std::vector<Rational> parse_rational_csv(const std::string& s) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find('.') != std::string::npos || item.find('e') != std::string::npos)
      out.push_back(rationalize(std::stod(item)));
    else
      out.push_back(rational_from_string(item));
  }
  return out;
}

std::vector<int> parse_int_csv(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

PolyMatrixFn parse_poly_spec(const std::string& spec, int m, int n) {
  if (spec == "det") {
    if (m != n) throw std::invalid_argument("det requires a square shape");
    return builtins::det(n);
  }
  if (spec == "detprime") {
    if (m != n - 1) throw std::invalid_argument("detprime requires shape (n-1) x n");
    return builtins::detprime(n);
  }
  if (spec == "trace") {
    if (m != n) throw std::invalid_argument("trace requires a square shape");
    return builtins::trace(n);
  }
  if (spec.rfind("cof_dot(", 0) == 0 && spec.back() == ')') {
    auto body = spec.substr(8, spec.size() - 9);
    auto semi = body.find(';');
    if (semi == std::string::npos) throw std::invalid_argument("cof_dot(a;rho): missing ';'");
    auto a = parse_rational_csv(body.substr(0, semi));
    auto rho = parse_rational_csv(body.substr(semi + 1));
    return builtins::cof_dot(a, rho);
  }
  if (spec.rfind("minor(", 0) == 0 && spec.back() == ')') {
    auto body = spec.substr(6, spec.size() - 7);
    auto semi = body.find(';');
    if (semi == std::string::npos) throw std::invalid_argument("minor(p_list;q_list): missing ';'");
    MultiIndex p{parse_int_csv(body.substr(0, semi)), m};
    MultiIndex q{parse_int_csv(body.substr(semi + 1)), n};
    return builtins::minor(m, n, p, q);
  }
  if (!spec.empty() && spec.front() == '{') return PolyMatrixFn::from_json(spec);
  throw std::invalid_argument("unknown polynomial spec: '" + spec + "'");
}

CompiledPoly::CompiledPoly(const PolyMatrixFn& f) : m_(f.rows()), n_(f.cols()) {
  for (const auto& [e, c] : f.poly().terms()) {
    Term t;
    t.coeff = to_double(c);
    for (int i = 0; i < static_cast<int>(e.size()); ++i)
      if (e[i]) t.factors.emplace_back(i, e[i]);
    terms_.push_back(std::move(t));
  }
}

double CompiledPoly::operator()(const double* x) const {
  double acc = 0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (const auto& [var, exp] : t.factors) {
      double b = x[var];
      switch (exp) {
        case 1: v *= b; break;
        case 2: v *= b * b; break;
        case 3: v *= b * b * b; break;
        default:
          for (int k = 0; k < exp; ++k) v *= b;
      }
    }
    acc += v;
  }
  return acc;
}

double CompiledPoly::operator()(const Eigen::MatrixXd& h) const {
  std::vector<double> x(m_ * n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) x[i * n_ + j] = h(i, j);
  return (*this)(x.data());
}

}  // namespace nullag
