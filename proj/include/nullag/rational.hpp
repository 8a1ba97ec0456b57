#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace nullag {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& q);
std::string to_string(const Rational& q);

// Parses "p", "-p" or "p/q".
Rational rational_from_string(const std::string& s);

// Best rational approximation of x with |x - p/q| <= tol, by continued
// fractions.
Rational rationalize(double x, double tol = 1e-12);

// Exact rational point on the unit sphere near a given (approximately unit)
// real vector. Built by rationalizing the inverse stereographic parameter,
// so |rho|^2 == 1 holds exactly. `rationalized` is false when the input was
// already reproduced exactly.
struct RationalizedNormal {
  std::vector<Rational> rho;
  bool rationalized = false;
};
RationalizedNormal rational_unit_normal(const std::vector<double>& rho,
                                        double tol = 1e-12);

}  // namespace nullag
