#include "qloop/rqkz.hpp"

#include "qloop/errors.hpp"

namespace qloop {

DensityLike as_density_like(const DensityState& d) { return {d.tensor, d.tags, d.eta}; }

Matrix lift_operator(const Matrix& f) {
    const std::size_t d = f.rows();
    Eigen::FullPivLU<Matrix> lu(f);
    require(lu.isInvertible(), "SingularLift", "lift needs an invertible operator");
    const Matrix finv = lu.inverse();

    Matrix out(d * d, d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            for (std::size_t c = 0; c < d; ++c)
                for (std::size_t e = 0; e < d; ++e)
                    out(a * d + b, c * d + e) = finv(a, b) * f(e, c);
    return out;
}

namespace {

std::string pspace(int k) { return "p" + std::to_string(k); }

struct Assembly {
    std::vector<std::string> spaces;
    std::vector<std::size_t> dims;
    Tensor acc;
    const Model* model;

    Assembly(const Model& m, const std::vector<std::string>& names)
        : spaces(names), dims(names.size(), m.d()), model(&m) {
        acc = identity_operator(spaces, dims);
    }
    void mul(const Tensor& op) { acc = operator_mul(acc, embed_operator(op, spaces, dims)); }
    void mul_two_site(const Matrix& mat, const std::string& s1, const std::string& s2) {
        mul(operator_from_matrix({s1, s2}, {model->d(), model->d()}, mat));
    }
    void mul_one_site(const Matrix& mat, const std::string& s) {
        mul(operator_from_matrix({s}, {model->d()}, mat));
    }
};

DensityLike finish(const Model& m, Tensor traced, int n, std::vector<SpaceTag> tags,
                   std::vector<cplx> eta) {
    std::map<std::string, std::string> renames;
    for (int k = 1; k <= n; ++k) renames[pspace(k)] = "site" + std::to_string(k);
    return {relabel(traced, renames), std::move(tags), std::move(eta)};
}

} // namespace

DensityLike apply_A_n(const Model& m, const DensityLike& d, const std::vector<cplx>& alpha) {
    const int n = static_cast<int>(d.tags.size());
    require(n >= 1, "TagError", "empty density state");
    for (SpaceTag t : d.tags)
        require(t == SpaceTag::V, "TagError", "first superoperator expects all sites on V");
    const cplx eta_n = d.eta[n - 1];

    std::vector<std::string> names;
    for (int k = 0; k <= n; ++k) names.push_back(pspace(k));
    Assembly as(m, names);

    as.mul_one_site(m.twist(SpaceTag::V, alpha), pspace(0));
    for (int k = 1; k <= n - 1; ++k)
        as.mul_two_site(m.R->rcheck(SpaceTag::V, SpaceTag::V, d.eta[k - 1], eta_n),
                        pspace(k - 1), pspace(k));

    std::map<std::string, std::string> to_spaces;
    for (int k = 1; k <= n; ++k) to_spaces["site" + std::to_string(k)] = pspace(k - 1);
    as.mul(relabel(d.tensor, to_spaces));

    as.mul_two_site(lift_operator(m.X), pspace(n - 1), pspace(n));
    for (int k = n - 1; k >= 1; --k)
        as.mul_two_site(m.R->rcheck(SpaceTag::V, SpaceTag::V, eta_n, d.eta[k - 1]),
                        pspace(k - 1), pspace(k));

    Tensor traced = partial_trace(as.acc, pspace(0));

    std::vector<SpaceTag> tags(n, SpaceTag::V);
    tags[n - 1] = SpaceTag::Vstar;
    std::vector<cplx> eta = d.eta;
    eta[n - 1] = m.q_pow(m.lambda) * eta_n;
    return finish(m, std::move(traced), n, std::move(tags), std::move(eta));
}

DensityLike apply_B_n(const Model& m, const DensityLike& d, const std::vector<cplx>& alpha) {
    const int n = static_cast<int>(d.tags.size());
    require(n >= 1, "TagError", "empty density state");
    for (int k = 0; k < n - 1; ++k)
        require(d.tags[k] == SpaceTag::V, "TagError", "inner sites must stay on V");
    require(d.tags[n - 1] == SpaceTag::Vstar, "TagError",
            "second superoperator expects a starred last site");
    const cplx eta_n = d.eta[n - 1];

    std::vector<std::string> names;
    for (int k = 0; k <= n; ++k) names.push_back(pspace(k));
    Assembly as(m, names);

    as.mul_one_site(m.twist(SpaceTag::Vstar, alpha), pspace(0));
    for (int k = 1; k <= n - 1; ++k)
        as.mul_two_site(m.R->rcheck(SpaceTag::V, SpaceTag::Vstar, d.eta[k - 1], eta_n),
                        pspace(k - 1), pspace(k));

    std::map<std::string, std::string> to_spaces;
    for (int k = 1; k <= n; ++k) to_spaces["site" + std::to_string(k)] = pspace(k - 1);
    as.mul(relabel(d.tensor, to_spaces));

    as.mul_two_site(lift_operator(Matrix::Identity(m.d(), m.d())), pspace(n - 1), pspace(n));
    for (int k = n - 1; k >= 1; --k)
        as.mul_two_site(m.R->rcheck(SpaceTag::Vstar, SpaceTag::V, eta_n, d.eta[k - 1]),
                        pspace(k - 1), pspace(k));

    Tensor traced = partial_trace(as.acc, pspace(0));

    std::vector<SpaceTag> tags(n, SpaceTag::V);
    return finish(m, std::move(traced), n, std::move(tags), std::vector<cplx>(d.eta));
}

namespace {

EquationCheck compare(const Tensor& image, cplx prefactor, const DensityState& rhs) {
    EquationCheck out;
    out.prefactor = prefactor;
    const Tensor lhs = prefactor * image;
    out.residual = rel_residual(lhs, rhs.tensor);
    const cplx tr_img = trace_all(image);
    const cplx tr_rhs = trace_all(rhs.tensor);
    out.prefactor_trace = tr_rhs / tr_img;
    out.prefactor_gap = std::abs(out.prefactor - out.prefactor_trace) / std::abs(out.prefactor);
    out.trace_gap = std::abs(trace_all(lhs) - tr_rhs);
    return out;
}

std::vector<Site> inner_sites(const LatticeConfig& cfg) {
    std::vector<Site> sites;
    for (int k = 0; k + 1 < cfg.n; ++k) sites.push_back({SpaceTag::V, cfg.eta[k]});
    return sites;
}

} // namespace

EquationCheck verify_first_equation(const Model& m, const LatticeConfig& cfg) {
    require(!cfg.zeta.empty(), "ShapeError", "first equation ties eta_n to zeta_1");
    const cplx zeta1 = cfg.zeta[0];
    QtmContext ctx(m, cfg);

    std::vector<Site> in_sites = inner_sites(cfg);
    in_sites.push_back({SpaceTag::V, zeta1});
    const DensityState d_in = ctx.density_analytic(in_sites);

    const DensityLike image = apply_A_n(m, as_density_like(d_in), cfg.alpha);

    std::vector<Site> out_sites = inner_sites(cfg);
    out_sites.push_back({SpaceTag::Vstar, m.q_pow(m.lambda) * zeta1});
    const DensityState rhs = ctx.density_analytic(out_sites);

    const cplx prefactor = ctx.lambda_ratio_analytic(SpaceTag::V, zeta1);
    return compare(image.tensor, prefactor, rhs);
}

EquationCheck verify_second_equation(const Model& m, const LatticeConfig& cfg) {
    require(!cfg.xi.empty(), "ShapeError", "second equation ties eta_n to xi_1");
    const cplx xi1 = cfg.xi[0];
    QtmContext ctx(m, cfg);

    std::vector<Site> in_sites = inner_sites(cfg);
    in_sites.push_back({SpaceTag::Vstar, xi1});
    const DensityState d_in = ctx.density_analytic(in_sites);

    const DensityLike image = apply_B_n(m, as_density_like(d_in), cfg.alpha);

    std::vector<Site> out_sites = inner_sites(cfg);
    out_sites.push_back({SpaceTag::V, xi1});
    const DensityState rhs = ctx.density_analytic(out_sites);

    const cplx prefactor = ctx.lambda_ratio_analytic(SpaceTag::Vstar, xi1);
    return compare(image.tensor, prefactor, rhs);
}

namespace {

// Literal two-auxiliary-trace form of the full equation on spaces
// pp, p0, .., pn; equals the sequential composition by trace factorization.
Tensor full_equation_double_trace(const Model& m, const DensityLike& d,
                                  const std::vector<cplx>& alpha) {
    const int n = static_cast<int>(d.tags.size());
    const cplx eta_n = d.eta[n - 1];
    const cplx shifted = m.q_pow(m.lambda) * eta_n;

    std::vector<std::string> names = {"pp"};
    for (int k = 0; k <= n; ++k) names.push_back(pspace(k));
    Assembly as(m, names);
    auto space = [&](int k) { return k < 0 ? std::string("pp") : pspace(k); };

    as.mul_one_site(m.twist(SpaceTag::Vstar, alpha), pspace(0));
    for (int k = 1; k <= n - 1; ++k)
        as.mul_two_site(m.R->rcheck(SpaceTag::V, SpaceTag::Vstar, d.eta[k - 1], shifted),
                        pspace(k - 1), pspace(k));
    as.mul_one_site(m.twist(SpaceTag::V, alpha), "pp");
    for (int k = 1; k <= n - 1; ++k)
        as.mul_two_site(m.R->rcheck(SpaceTag::V, SpaceTag::V, d.eta[k - 1], eta_n),
                        space(k - 2), space(k - 1));

    std::map<std::string, std::string> to_spaces;
    for (int k = 1; k <= n; ++k) to_spaces["site" + std::to_string(k)] = space(k - 2);
    as.mul(relabel(d.tensor, to_spaces));

    as.mul_two_site(lift_operator(m.X), space(n - 2), space(n - 1));
    for (int k = n - 1; k >= 1; --k)
        as.mul_two_site(m.R->rcheck(SpaceTag::V, SpaceTag::V, eta_n, d.eta[k - 1]),
                        space(k - 2), space(k - 1));
    as.mul_two_site(lift_operator(Matrix::Identity(m.d(), m.d())), pspace(n - 1), pspace(n));
    for (int k = n - 1; k >= 1; --k)
        as.mul_two_site(m.R->rcheck(SpaceTag::Vstar, SpaceTag::V, shifted, d.eta[k - 1]),
                        pspace(k - 1), pspace(k));

    Tensor traced = partial_trace(partial_trace(as.acc, "pp"), pspace(0));
    std::map<std::string, std::string> renames;
    for (int k = 1; k <= n; ++k) renames[pspace(k)] = "site" + std::to_string(k);
    return relabel(traced, renames);
}

} // namespace

FullEquationCheck verify_full_equation(const Model& m, const LatticeConfig& cfg) {
    require(!cfg.zeta.empty() && !cfg.xi.empty(), "ShapeError",
            "full equation needs zeta_1 and xi_1");
    const cplx zeta1 = cfg.zeta[0];
    const cplx shifted = m.q_pow(m.lambda) * zeta1;
    require(std::abs(cfg.xi[0] - shifted) <= 1e-12 * std::abs(shifted), "ShapeError",
            "full equation needs xi_1 = q^lambda zeta_1");
    require(cfg.n >= 2, "ShapeError", "full equation needs n >= 2");

    QtmContext ctx(m, cfg);

    std::vector<Site> in_sites = inner_sites(cfg);
    in_sites.push_back({SpaceTag::V, zeta1});
    const DensityState d_in = ctx.density_analytic(in_sites);

    const DensityLike mid = apply_A_n(m, as_density_like(d_in), cfg.alpha);
    const DensityLike out = apply_B_n(m, mid, cfg.alpha);

    std::vector<Site> out_sites = inner_sites(cfg);
    out_sites.push_back({SpaceTag::V, shifted});
    const DensityState rhs = ctx.density_analytic(out_sites);

    const cplx pref_first = ctx.lambda_ratio_analytic(SpaceTag::V, zeta1);
    const cplx pref_second = ctx.lambda_ratio_analytic(SpaceTag::Vstar, shifted);

    FullEquationCheck fc;
    fc.composed = compare(out.tensor, pref_first * pref_second, rhs);
    fc.first_residual = verify_first_equation(m, cfg).residual;
    fc.second_residual = verify_second_equation(m, cfg).residual;

    const Tensor literal = full_equation_double_trace(m, as_density_like(d_in), cfg.alpha);
    fc.double_trace_residual = rel_residual(literal, out.tensor);
    return fc;
}

} // namespace qloop
