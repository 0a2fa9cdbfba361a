#ifndef QLOOP_RATIONAL_HPP
#define QLOOP_RATIONAL_HPP

#include <boost/rational.hpp>
#include <string>
#include <vector>

namespace qloop {

using Rational = boost::rational<long long>;
using RationalMatrix = std::vector<std::vector<Rational>>;

std::string rational_to_string(const Rational& r);   // canonical "p/q"
Rational rational_from_string(const std::string& s); // accepts "p" or "p/q"

// Exact inverse of a square rational matrix (Gauss-Jordan).
RationalMatrix rational_inverse(const RationalMatrix& a);

RationalMatrix rational_mul(const RationalMatrix& a, const RationalMatrix& b);

} // namespace qloop

#endif
