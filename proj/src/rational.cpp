#include "nullag/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace nullag {

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational: '" + s + "'");
  }
}

Rational rationalize(double x, double tol) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite input");
  // Continued-fraction convergents p_k/q_k of x.
  double rem = x;
  Int p0 = 0, q0 = 1;  // convergent k-2
  Int p1 = 1, q1 = 0;  // convergent k-1
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(rem);
    Int a = Int(static_cast<long long>(fa));
    Int p = a * p1 + p0;
    Int q = a * q1 + q0;
    p0 = p1; q0 = q1; p1 = p; q1 = q;
    Rational approx(p, q == 0 ? Int(1) : q);
    if (q != 0 && std::abs(to_double(approx) - x) <= tol) return approx;
    double frac = rem - fa;
    if (frac < 1e-18) break;
    rem = 1.0 / frac;
  }
  return Rational(p1, q1 == 0 ? Int(1) : q1);
}

RationalizedNormal rational_unit_normal(const std::vector<double>& rho, double tol) {
  const size_t n = rho.size();
  if (n == 0) throw std::invalid_argument("empty normal");
  double norm2 = 0;
  for (double c : rho) norm2 += c * c;
  if (std::abs(norm2 - 1.0) > 1e-10)
    throw std::invalid_argument("normal must have unit length within 1e-10");

  RationalizedNormal out;
  out.rho.resize(n);

  // Exact axis directions come out exactly.
  // Stereographic projection from the pole opposite to sign(rho_n) keeps the
  // parameter bounded: t = rho' / (1 + |rho_n|), back-projection is exactly
  // unit for rational t.
  const double last = rho[n - 1];
  const int sign = last >= 0 ? 1 : -1;
  std::vector<Rational> t(n - 1);
  Rational s2 = 0;
  for (size_t i = 0; i + 1 < n; ++i) {
    t[i] = rationalize(rho[i] / (1.0 + sign * last), tol);
    s2 += t[i] * t[i];
  }
  Rational denom = 1 + s2;
  for (size_t i = 0; i + 1 < n; ++i) out.rho[i] = 2 * t[i] / denom;
  out.rho[n - 1] = sign * (1 - s2) / denom;

  bool exact = true;
  for (size_t i = 0; i < n; ++i)
    if (to_double(out.rho[i]) != rho[i]) exact = false;
  out.rationalized = !exact;
  return out;
}

}  // namespace nullag
