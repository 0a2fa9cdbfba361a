#include "qloop/rep.hpp"

#include <cmath>

#include "qloop/errors.hpp"

namespace qloop {

std::string tag_name(SpaceTag t) { return t == SpaceTag::V ? "V" : "Vstar"; }

SpaceTag tag_from_name(const std::string& s) {
    if (s == "V") return SpaceTag::V;
    if (s == "Vstar" || s == "V*") return SpaceTag::Vstar;
    fail("ParseError", "unknown space tag '" + s + "'");
}

Matrix Representation::q_power(const std::vector<cplx>& coeffs) const {
    require(coeffs.size() == static_cast<std::size_t>(algebra.rank), "ShapeError",
            "q_power needs one coefficient per h_1..h_l");
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
        cplx expo(0.0);
        for (int i = 0; i < algebra.rank; ++i)
            expo += coeffs[i] * static_cast<double>(weights[i + 1][k]);
        m(k, k) = std::pow(q, expo);
    }
    return m;
}

Matrix Representation::q_pow_h(int i, cplx c) const {
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < dim; ++k)
        m(k, k) = std::pow(q, c * static_cast<double>(weights[i][k]));
    return m;
}

Matrix Representation::q_h_i(int i) const {
    return q_pow_h(i, cplx(static_cast<double>(algebra.symmetrizers[i])));
}

Representation evaluation_rep(const CartanData& c, RepId id, cplx q, bool allow_unit_modulus) {
    require(id == RepId::Fund, "UnsupportedRep", "only the first fundamental module ships");
    require(std::abs(q) > 1e-14, "BadDeformation", "q must be nonzero");
    if (!allow_unit_modulus)
        require(std::abs(std::abs(q) - 1.0) > 1e-12, "BadDeformation",
                "|q| = 1 risks a root of unity; pass allow_unit_modulus to override");

    const int l = c.rank;
    const std::size_t dim = static_cast<std::size_t>(l) + 1;

    Representation r;
    r.algebra = c;
    r.dim = dim;
    r.q = q;
    r.tag = SpaceTag::V;
    r.gen_e.assign(l + 1, Matrix::Zero(dim, dim));
    r.gen_f.assign(l + 1, Matrix::Zero(dim, dim));
    r.weights.assign(l + 1, std::vector<long long>(dim, 0));

    // Basis b_0..b_l; e_i = E_{i-1,i}, f_i = E_{i,i-1}, h_i weight
    // (0,..,1,-1,..,0). Affine node: e_0 = E_{l,0}, f_0 = E_{0,l},
    // h_0 = -theta^vee.
    for (int i = 1; i <= l; ++i) {
        r.gen_e[i](i - 1, i) = 1.0;
        r.gen_f[i](i, i - 1) = 1.0;
        r.weights[i][i - 1] = 1;
        r.weights[i][i] = -1;
    }
    r.gen_e[0](l, 0) = 1.0;
    r.gen_f[0](0, l) = 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
        long long w = 0;
        for (int i = 1; i <= l; ++i) w += c.dual_kac_labels[i] * r.weights[i][k];
        r.weights[0][k] = -w;
    }

    const RelationReport rep_check = check_defining_relations(r);
    require(rep_check.pass(1e-10), "UnsupportedRep",
            "constructed module violates the defining relations");
    return r;
}

Matrix gen_image(const Representation& r, const Generator& g, cplx zeta) {
    const long long s = r.algebra.grading[g.index];
    switch (g.kind) {
        case GenKind::E: return std::pow(zeta, static_cast<double>(s)) * r.gen_e[g.index];
        case GenKind::F: return std::pow(zeta, static_cast<double>(-s)) * r.gen_f[g.index];
        case GenKind::QH: return r.q_pow_h(g.index, 1.0);
    }
    fail("ShapeError", "unknown generator kind");
}

namespace {

double rel_norm(const Matrix& lhs, const Matrix& rhs) {
    const double scale = std::max({lhs.norm(), rhs.norm(), 1.0});
    return (lhs - rhs).norm() / scale;
}

cplx q_number(cplx q, long long n) {
    if (n == 0) return 0.0;
    const cplx qn = std::pow(q, static_cast<double>(n));
    return (qn - 1.0 / qn) / (q - 1.0 / q);
}

cplx q_factorial(cplx q, long long n) {
    cplx acc(1.0);
    for (long long k = 2; k <= n; ++k) acc *= q_number(q, k);
    return acc;
}

} // namespace

RelationReport check_defining_relations(const Representation& r) {
    RelationReport report;
    const int l = r.algebra.rank;
    const auto& ext = r.algebra.extended_cartan;
    const Matrix id = Matrix::Identity(r.dim, r.dim);

    auto add = [&](const std::string& rid, const std::string& detail, double res) {
        report.items.push_back({rid, detail, res});
        report.max_residual = std::max(report.max_residual, res);
    };

    // (djra): q^{nu K} = 1 realized as q^{nu(h_0 + theta^vee)} = 1, and the
    // q^x family multiplies additively.
    for (double nu : {0.3, 1.0, 2.7}) {
        Matrix m = Matrix::Identity(r.dim, r.dim);
        for (std::size_t k = 0; k < r.dim; ++k) {
            long long central = r.weights[0][k];
            for (int i = 1; i <= l; ++i)
                central += r.algebra.dual_kac_labels[i] * r.weights[i][k];
            m(k, k) = std::pow(r.q, nu * static_cast<double>(central));
        }
        add("djra", "q^{nu K} at nu=" + std::to_string(nu), rel_norm(m, id));
    }
    {
        std::vector<cplx> c1(l), c2(l), c12(l);
        for (int i = 0; i < l; ++i) {
            c1[i] = cplx(0.17 + 0.31 * i, 0.05);
            c2[i] = cplx(-0.42 + 0.11 * i, -0.23);
            c12[i] = c1[i] + c2[i];
        }
        add("djra", "q^{x1} q^{x2} = q^{x1+x2}",
            rel_norm(r.q_power(c1) * r.q_power(c2), r.q_power(c12)));
    }

    // (djrb): q^{h_i} e_j q^{-h_i} = q^{a_{ij}} e_j and the f mirror.
    for (int i = 0; i <= l; ++i) {
        const Matrix qh = r.q_pow_h(i, 1.0);
        const Matrix qhi = r.q_pow_h(i, -1.0);
        for (int j = 0; j <= l; ++j) {
            const cplx factor = std::pow(r.q, static_cast<double>(ext[i][j]));
            add("djrb", "e, i=" + std::to_string(i) + " j=" + std::to_string(j),
                rel_norm(qh * r.gen_e[j] * qhi, factor * r.gen_e[j]));
            add("djrb", "f, i=" + std::to_string(i) + " j=" + std::to_string(j),
                rel_norm(qh * r.gen_f[j] * qhi, (1.0 / factor) * r.gen_f[j]));
        }
    }

    // (djrc): [e_i, f_j] = delta_ij (q_i^{h_i} - q_i^{-h_i}) / (q_i - q_i^{-1}).
    for (int i = 0; i <= l; ++i) {
        for (int j = 0; j <= l; ++j) {
            const Matrix lhs = r.gen_e[i] * r.gen_f[j] - r.gen_f[j] * r.gen_e[i];
            Matrix rhs = Matrix::Zero(r.dim, r.dim);
            if (i == j) {
                const cplx qi = std::pow(r.q, static_cast<double>(r.algebra.symmetrizers[i]));
                rhs = (r.q_pow_h(i, static_cast<double>(r.algebra.symmetrizers[i])) -
                       r.q_pow_h(i, static_cast<double>(-r.algebra.symmetrizers[i]))) /
                      (qi - 1.0 / qi);
            }
            add("djrc", "i=" + std::to_string(i) + " j=" + std::to_string(j),
                rel_norm(lhs, rhs));
        }
    }

    // (djrd): quantum Serre relations for distinct i, j.
    auto serre = [&](const std::vector<Matrix>& gen, const std::string& which) {
        for (int i = 0; i <= l; ++i) {
            const cplx qi = std::pow(r.q, static_cast<double>(r.algebra.symmetrizers[i]));
            for (int j = 0; j <= l; ++j) {
                if (i == j) continue;
                const long long order = 1 - ext[i][j];
                Matrix sum = Matrix::Zero(r.dim, r.dim);
                double term_scale = 0.0;
                for (long long n = 0; n <= order; ++n) {
                    Matrix lhs = Matrix::Identity(r.dim, r.dim);
                    for (long long k = 0; k < order - n; ++k) lhs *= gen[i];
                    Matrix rhs = Matrix::Identity(r.dim, r.dim);
                    for (long long k = 0; k < n; ++k) rhs *= gen[i];
                    const cplx denom = q_factorial(qi, order - n) * q_factorial(qi, n);
                    const Matrix term =
                        (static_cast<double>(n % 2 ? -1 : 1) / denom) * (lhs * gen[j] * rhs);
                    term_scale = std::max(term_scale, term.norm());
                    sum += term;
                }
                add("djrd", which + ", i=" + std::to_string(i) + " j=" + std::to_string(j),
                    sum.norm() / std::max(term_scale, 1.0));
            }
        }
    };
    serre(r.gen_e, "e");
    serre(r.gen_f, "f");

    return report;
}

Representation dual_rep(const Representation& r, AntipodeVariant variant) {
    require(r.tag == SpaceTag::V, "UnsupportedRep", "dualize the base module, not a dual");
    const int l = r.algebra.rank;

    Representation d = r;
    d.tag = SpaceTag::Vstar;
    for (int i = 0; i <= l; ++i) {
        const double di = static_cast<double>(r.algebra.symmetrizers[i]);
        Matrix se, sf;
        if (variant == AntipodeVariant::S) {
            se = -(r.q_pow_h(i, -di) * r.gen_e[i]); // S(e_i) = -q_i^{-h_i} e_i
            sf = -(r.gen_f[i] * r.q_pow_h(i, di));  // S(f_i) = -f_i q_i^{h_i}
        } else {
            se = -(r.gen_e[i] * r.q_pow_h(i, -di)); // S^{-1}(e_i) = -e_i q_i^{-h_i}
            sf = -(r.q_pow_h(i, di) * r.gen_f[i]);  // S^{-1}(f_i) = -q_i^{h_i} f_i
        }
        d.gen_e[i] = se.transpose();
        d.gen_f[i] = sf.transpose();
        for (std::size_t k = 0; k < r.dim; ++k) d.weights[i][k] = -r.weights[i][k];
    }
    return d;
}

Matrix group_like_twist(const Representation& r, const std::vector<cplx>& nu) {
    return r.q_power(nu);
}

Matrix x_operator(const Representation& r) {
    const auto coeffs = x_coefficients(r.algebra);
    std::vector<cplx> c(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        c[i] = cplx(boost::rational_cast<double>(coeffs[i]));
    return r.q_power(c);
}

nlohmann::json rep_to_json(const Representation& r) {
    auto mat_json = [](const Matrix& m) {
        auto rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            auto row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                row.push_back({m(i, j).real(), m(i, j).imag()});
            rows.push_back(std::move(row));
        }
        return rows;
    };
    nlohmann::json j;
    j["algebra"] = cartan_to_json(r.algebra);
    j["dim"] = r.dim;
    j["q"] = {r.q.real(), r.q.imag()};
    j["tag"] = tag_name(r.tag);
    j["gen_e"] = nlohmann::json::array();
    j["gen_f"] = nlohmann::json::array();
    for (const auto& m : r.gen_e) j["gen_e"].push_back(mat_json(m));
    for (const auto& m : r.gen_f) j["gen_f"].push_back(mat_json(m));
    j["weights"] = r.weights;
    return j;
}

} // namespace qloop
