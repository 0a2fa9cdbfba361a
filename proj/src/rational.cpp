#include "qloop/rational.hpp"

#include "qloop/errors.hpp"

namespace qloop {

std::string rational_to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        const long long p = std::stoll(s.substr(0, slash));
        const long long q = std::stoll(s.substr(slash + 1));
        require(q != 0, "ParseError", "zero denominator in rational '" + s + "'");
        return Rational(p, q);
    } catch (const std::invalid_argument&) {
        fail("ParseError", "malformed rational '" + s + "'");
    } catch (const std::out_of_range&) {
        fail("ParseError", "rational out of range '" + s + "'");
    }
}

RationalMatrix rational_inverse(const RationalMatrix& a) {
    const std::size_t n = a.size();
    for (const auto& row : a)
        require(row.size() == n, "ShapeError", "rational_inverse needs a square matrix");

    RationalMatrix work = a;
    RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && work[pivot][col] == Rational(0)) ++pivot;
        require(pivot < n, "SingularMatrix", "rational matrix is singular");
        std::swap(work[pivot], work[col]);
        std::swap(inv[pivot], inv[col]);

        const Rational p = work[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            work[col][j] /= p;
            inv[col][j] /= p;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || work[row][col] == Rational(0)) continue;
            const Rational f = work[row][col];
            for (std::size_t j = 0; j < n; ++j) {
                work[row][j] -= f * work[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

RationalMatrix rational_mul(const RationalMatrix& a, const RationalMatrix& b) {
    const std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    RationalMatrix out(n, std::vector<Rational>(m, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        require(a[i].size() == k, "ShapeError", "rational_mul shape mismatch");
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < k; ++t) out[i][j] += a[i][t] * b[t][j];
    }
    return out;
}

} // namespace qloop
