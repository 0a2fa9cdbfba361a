#include "qloop/cartan.hpp"

#include <numeric>

#include "qloop/errors.hpp"

namespace qloop {

std::string algebra_name(AlgebraId id) {
    switch (id) {
        case AlgebraId::A1: return "A1";
        case AlgebraId::A2: return "A2";
    }
    fail("UnsupportedAlgebra", "unknown algebra id");
}

AlgebraId algebra_from_name(const std::string& name) {
    if (name == "A1") return AlgebraId::A1;
    if (name == "A2") return AlgebraId::A2;
    fail("UnsupportedAlgebra", "unsupported algebra '" + name + "'");
}

long long CartanData::grading_sum() const {
    long long s = 0;
    for (std::size_t i = 0; i < grading.size(); ++i) s += kac_labels[i] * grading[i];
    return s;
}

namespace {

// Symmetrizers of a connected generalized Cartan matrix: propagate
// d_i a_{ij} = d_j a_{ji} from node 0, then clear denominators and reduce.
std::vector<long long> compute_symmetrizers(const std::vector<std::vector<long long>>& a) {
    const std::size_t n = a.size();
    std::vector<Rational> d(n, Rational(0));
    std::vector<bool> seen(n, false);
    d[0] = Rational(1);
    seen[0] = true;
    std::vector<std::size_t> queue = {0};
    while (!queue.empty()) {
        const std::size_t i = queue.back();
        queue.pop_back();
        for (std::size_t j = 0; j < n; ++j) {
            if (seen[j] || i == j || a[i][j] == 0) continue;
            d[j] = d[i] * Rational(a[i][j], a[j][i]);
            seen[j] = true;
            queue.push_back(j);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        require(seen[i], "UnsupportedAlgebra", "Cartan diagram is not connected");

    long long lcm_den = 1;
    for (const auto& r : d) lcm_den = std::lcm(lcm_den, r.denominator());
    std::vector<long long> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (d[i] * lcm_den).numerator();
    long long g = 0;
    for (long long v : out) g = std::gcd(g, v);
    for (long long& v : out) v /= g;
    return out;
}

void check_invariants(const CartanData& c) {
    const std::size_t n = c.rank + 1;
    require(c.kac_labels[0] == 1 && c.dual_kac_labels[0] == 1, "UnsupportedAlgebra",
            "affine node labels must be 1");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            require(c.symmetrizers[i] * c.extended_cartan[i][j] ==
                        c.symmetrizers[j] * c.extended_cartan[j][i],
                    "UnsupportedAlgebra", "D A must be symmetric");
    long long h = 0, hv = 0, g = 0;
    for (std::size_t i = 0; i < n; ++i) {
        h += c.kac_labels[i];
        hv += c.dual_kac_labels[i];
        g = std::gcd(g, c.symmetrizers[i]);
    }
    require(h == c.coxeter && hv == c.dual_coxeter, "UnsupportedAlgebra",
            "Coxeter numbers disagree with label sums");
    require(g == 1, "UnsupportedAlgebra", "symmetrizers must be coprime");

    RationalMatrix a(c.rank, std::vector<Rational>(c.rank));
    for (int i = 0; i < c.rank; ++i)
        for (int j = 0; j < c.rank; ++j) a[i][j] = Rational(c.cartan[i][j]);
    const RationalMatrix prod = rational_mul(a, c.inverse_cartan);
    for (int i = 0; i < c.rank; ++i)
        for (int j = 0; j < c.rank; ++j)
            require(prod[i][j] == Rational(i == j ? 1 : 0), "UnsupportedAlgebra",
                    "A B must be the identity");
}

CartanData build_a_series(int l, const std::vector<long long>& grading) {
    CartanData c;
    c.rank = l;
    c.cartan.assign(l, std::vector<long long>(l, 0));
    for (int i = 0; i < l; ++i) {
        c.cartan[i][i] = 2;
        if (i + 1 < l) {
            c.cartan[i][i + 1] = -1;
            c.cartan[i + 1][i] = -1;
        }
    }
    c.kac_labels.assign(l + 1, 1);
    c.dual_kac_labels.assign(l + 1, 1);

    // Extended matrix from alpha_0 = -theta, h_0 = K - theta^vee:
    //   a_{0j} = -sum_i av_i a_{ij},  a_{i0} = -sum_j a_{ij} a_j,
    //   a_{00} = <theta, theta^vee>.
    c.extended_cartan.assign(l + 1, std::vector<long long>(l + 1, 0));
    for (int i = 1; i <= l; ++i)
        for (int j = 1; j <= l; ++j) c.extended_cartan[i][j] = c.cartan[i - 1][j - 1];
    for (int j = 1; j <= l; ++j) {
        long long v = 0;
        for (int i = 1; i <= l; ++i) v += c.dual_kac_labels[i] * c.cartan[i - 1][j - 1];
        c.extended_cartan[0][j] = -v;
    }
    for (int i = 1; i <= l; ++i) {
        long long v = 0;
        for (int j = 1; j <= l; ++j) v += c.cartan[i - 1][j - 1] * c.kac_labels[j];
        c.extended_cartan[i][0] = -v;
    }
    long long a00 = 0;
    for (int i = 1; i <= l; ++i)
        for (int j = 1; j <= l; ++j)
            a00 += c.dual_kac_labels[i] * c.cartan[i - 1][j - 1] * c.kac_labels[j];
    c.extended_cartan[0][0] = a00;

    c.symmetrizers = compute_symmetrizers(c.extended_cartan);

    // (theta|theta) with the form normalized by (alpha_i|alpha_i) = 2 d_i,
    // so (alpha_i|alpha_j) = d_i a_{ij} and theta = sum a_i alpha_i.
    c.theta_norm = Rational(0);
    for (int i = 1; i <= l; ++i)
        for (int j = 1; j <= l; ++j)
            c.theta_norm += Rational(c.kac_labels[i] * c.symmetrizers[i] *
                                     c.cartan[i - 1][j - 1] * c.kac_labels[j]);

    c.coxeter = 0;
    c.dual_coxeter = 0;
    for (int i = 0; i <= l; ++i) {
        c.coxeter += c.kac_labels[i];
        c.dual_coxeter += c.dual_kac_labels[i];
    }

    RationalMatrix a(l, std::vector<Rational>(l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) a[i][j] = Rational(c.cartan[i][j]);
    c.inverse_cartan = rational_inverse(a);

    require(grading.size() == static_cast<std::size_t>(l + 1), "UnsupportedAlgebra",
            "grading needs l+1 exponents");
    c.grading = grading;

    check_invariants(c);
    return c;
}

} // namespace

CartanData build_cartan(AlgebraId id) {
    const int l = (id == AlgebraId::A1) ? 1 : 2;
    return build_cartan(id, std::vector<long long>(l + 1, 1));
}

CartanData build_cartan(AlgebraId id, const std::vector<long long>& grading) {
    switch (id) {
        case AlgebraId::A1: return build_a_series(1, grading);
        case AlgebraId::A2: return build_a_series(2, grading);
    }
    fail("UnsupportedAlgebra", "unknown algebra id");
}

std::vector<Rational> x_coefficients(const CartanData& c) {
    const long long s = c.grading_sum();
    require(s != 0, "DegenerateGrading", "grading sum s vanishes");
    std::vector<Rational> out(c.rank, Rational(0));
    for (int j = 0; j < c.rank; ++j) {
        Rational acc(0);
        for (int i = 0; i < c.rank; ++i) {
            const Rational weight = Rational(2 * c.symmetrizers[i + 1]) -
                                    c.theta_norm * Rational(c.dual_coxeter) *
                                        Rational(c.grading[i + 1], s);
            acc += weight * c.inverse_cartan[i][j];
        }
        out[j] = -acc;
    }
    return out;
}

Rational crossing_shift(const CartanData& c) {
    const long long s = c.grading_sum();
    require(s != 0, "DegenerateGrading", "grading sum s vanishes");
    return c.theta_norm * Rational(c.dual_coxeter) / Rational(s);
}

nlohmann::json cartan_to_json(const CartanData& c) {
    nlohmann::json j;
    j["rank"] = c.rank;
    j["cartan"] = c.cartan;
    j["extended_cartan"] = c.extended_cartan;
    j["kac_labels"] = c.kac_labels;
    j["dual_kac_labels"] = c.dual_kac_labels;
    j["symmetrizers"] = c.symmetrizers;
    std::vector<std::vector<std::string>> inv;
    for (const auto& row : c.inverse_cartan) {
        std::vector<std::string> r;
        for (const auto& x : row) r.push_back(rational_to_string(x));
        inv.push_back(std::move(r));
    }
    j["inverse_cartan"] = inv;
    j["theta_norm"] = rational_to_string(c.theta_norm);
    j["coxeter"] = c.coxeter;
    j["dual_coxeter"] = c.dual_coxeter;
    j["grading"] = c.grading;
    j["grading_sum"] = c.grading_sum();
    return j;
}

CartanData cartan_from_json(const nlohmann::json& j) {
    CartanData c;
    c.rank = j.at("rank").get<int>();
    c.cartan = j.at("cartan").get<std::vector<std::vector<long long>>>();
    c.extended_cartan = j.at("extended_cartan").get<std::vector<std::vector<long long>>>();
    c.kac_labels = j.at("kac_labels").get<std::vector<long long>>();
    c.dual_kac_labels = j.at("dual_kac_labels").get<std::vector<long long>>();
    c.symmetrizers = j.at("symmetrizers").get<std::vector<long long>>();
    for (const auto& row : j.at("inverse_cartan")) {
        std::vector<Rational> r;
        for (const auto& x : row) r.push_back(rational_from_string(x.get<std::string>()));
        c.inverse_cartan.push_back(std::move(r));
    }
    c.theta_norm = rational_from_string(j.at("theta_norm").get<std::string>());
    c.coxeter = j.at("coxeter").get<long long>();
    c.dual_coxeter = j.at("dual_coxeter").get<long long>();
    c.grading = j.at("grading").get<std::vector<long long>>();
    check_invariants(c);
    return c;
}

} // namespace qloop
