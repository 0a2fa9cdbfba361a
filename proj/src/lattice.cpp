#include "qloop/lattice.hpp"

#include <cstdlib>
#include <functional>
#include <unsupported/Eigen/MatrixFunctions>

#include "qloop/errors.hpp"

namespace qloop {

namespace {
// Bilinear pairing <a, b> = sum_i a_i b_i (no conjugation); left eigenvectors
// pair with right ones through this form.
cplx bilinear(const Vector& a, const Vector& b) { return a.cwiseProduct(b).sum(); }
} // namespace

Matrix Model::twist(SpaceTag tag, const std::vector<cplx>& nu) const {
    return group_like_twist(tag == SpaceTag::V ? V : Vs, nu);
}

Model make_model(AlgebraId id, cplx q) {
    const CartanData c = build_cartan(id);
    return make_model(id, q, c.grading);
}

Model make_model(AlgebraId id, cplx q, const std::vector<long long>& grading) {
    Model m;
    m.cartan = build_cartan(id, grading);
    m.q = q;
    m.V = evaluation_rep(m.cartan, RepId::Fund, q);
    m.Vs = dual_rep(m.V);
    m.R = std::make_shared<RFamily>(m.V);
    m.lambda_exact = crossing_shift(m.cartan);
    m.lambda = boost::rational_cast<double>(m.lambda_exact);
    m.X = x_operator(m.V);
    return m;
}

std::size_t memory_budget_mib() {
    if (const char* env = std::getenv("QLOOP_MEM_MIB")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 2048;
}

void check_budget(std::size_t complex_entries, const std::string& what) {
    const std::size_t bytes = complex_entries * sizeof(cplx);
    const std::size_t budget = memory_budget_mib() * std::size_t(1024 * 1024);
    require(bytes <= budget, "TooLarge",
            what + " needs " + std::to_string(bytes / (1024 * 1024)) +
                " MiB, over the QLOOP_MEM_MIB budget of " + std::to_string(budget / (1024 * 1024)));
}

// --- horizontal --------------------------------------------------------------

namespace {

std::string chain_space(std::size_t i) { return "x" + std::to_string(i + 1); }

std::size_t ipow(std::size_t base, std::size_t e) {
    std::size_t p = 1;
    while (e--) p *= base;
    return p;
}

} // namespace

Tensor horizontal_monodromy(const Model& m, SpaceTag aux, cplx zeta,
                            const std::vector<Site>& sites) {
    const std::size_t L = sites.size();
    const std::size_t d = m.d();
    require(L >= 1, "ShapeError", "monodromy needs at least one site");
    check_budget(2 * ipow(d, 2 * (L + 1)), "horizontal monodromy");

    std::vector<std::string> spaces = {"a"};
    std::vector<std::size_t> dims = {d};
    for (std::size_t i = 0; i < L; ++i) {
        spaces.push_back(chain_space(i));
        dims.push_back(d);
    }

    Tensor acc = identity_operator(spaces, dims);
    for (std::size_t i = 0; i < L; ++i) {
        const Tensor factor = embed_operator(
            m.R->get(aux, sites[i].tag, zeta, sites[i].eta).to_tensor("a", chain_space(i)),
            spaces, dims);
        acc = operator_mul(factor, acc); // site L ends leftmost
    }
    return acc;
}

Tensor horizontal_transfer(const Model& m, SpaceTag aux, cplx zeta,
                           const std::vector<Site>& sites) {
    return partial_trace(horizontal_monodromy(m, aux, zeta, sites), "a");
}

Matrix transfer_matrix(const Model& m, SpaceTag aux, cplx zeta, std::size_t L) {
    const std::vector<Site> sites(L, Site{SpaceTag::V, cplx(1.0, 0.0)});
    std::vector<std::string> spaces;
    for (std::size_t i = 0; i < L; ++i) spaces.push_back(chain_space(i));
    return operator_to_matrix(horizontal_transfer(m, aux, zeta, sites), spaces);
}

namespace {

// Central differences at steps h1 > h2 with Richardson extrapolation. The
// extrapolation correction must stay below opt.agree_tol; it blows up only
// when the steps are roundoff-dominated.
Matrix richardson_derivative(const std::function<Matrix(double)>& f, const DerivativeOptions& opt,
                             const std::string& what) {
    auto central = [&](double h) { return ((f(h) - f(-h)) / (2.0 * h)).eval(); };
    const Matrix d1 = central(opt.h1);
    const Matrix d2 = central(opt.h2);
    const double r2 = (opt.h1 / opt.h2) * (opt.h1 / opt.h2);
    const Matrix rich = (r2 * d2 - d1) / (r2 - 1.0);
    const double disagreement = (rich - d2).norm() / std::max(rich.norm(), 1e-300);
    require(disagreement <= opt.agree_tol, "DerivativeUnstable",
            what + ": Richardson correction is " + std::to_string(disagreement));
    return rich;
}

} // namespace

Matrix hamiltonian(const Model& m, std::size_t L, const DerivativeOptions& opt) {
    require(L >= 2, "ShapeError", "the local Hamiltonian needs L >= 2");
    const std::size_t d = m.d();
    const Matrix p = permutation_matrix(d, d);
    const Matrix rprime = richardson_derivative(
        [&](double h) {
            return m.R->r(SpaceTag::V, SpaceTag::V, cplx(1.0 + h, 0.0), cplx(1.0, 0.0));
        },
        opt, "dR/dzeta at zeta=1");
    const Matrix rcheck_prime = p * rprime;

    std::vector<std::string> spaces;
    std::vector<std::size_t> dims(L, d);
    for (std::size_t i = 0; i < L; ++i) spaces.push_back(chain_space(i));

    Tensor h_total;
    bool first = true;
    for (std::size_t i = 0; i < L; ++i) {
        const std::string s_here = chain_space(i);
        const std::string s_next = chain_space((i + 1) % L);
        const Tensor term = embed_operator(
            operator_from_matrix({s_here, s_next}, {d, d}, rcheck_prime), spaces, dims);
        h_total = first ? term : h_total + term;
        first = false;
    }
    return operator_to_matrix(h_total, spaces);
}

std::vector<Matrix> charges(const Model& m, std::size_t L, int m_max, SpaceTag aux,
                            const DerivativeOptions& opt) {
    require(m_max >= 1 && m_max <= 2, "ShapeError", "charges supports m_max in {1, 2}");
    auto t_at = [&](double h) { return transfer_matrix(m, aux, cplx(1.0 + h, 0.0), L); };
    const Matrix t1 = t_at(0.0);
    const Matrix t1_inv = t1.inverse();

    const Matrix tp = richardson_derivative(t_at, opt, "dT/dzeta at zeta=1");
    std::vector<Matrix> out;
    const Matrix i1 = t1_inv * tp;
    out.push_back(i1);

    if (m_max >= 2) {
        const double h = opt.h_second;
        const Matrix tpp = (-t_at(2 * h) + 16.0 * t_at(h) - 30.0 * t1 + 16.0 * t_at(-h) -
                            t_at(-2 * h)) /
                           (12.0 * h * h);
        out.push_back(t1_inv * (tp + tpp) - i1 * i1);
    }
    return out;
}

Matrix trotter_density(const Model& m, std::size_t L, int N, double beta) {
    require(N >= 1, "ShapeError", "Trotter number must be positive");
    check_budget(4 * ipow(m.d(), 2 * L), "Trotter density");
    std::vector<cplx> zetas(N, m.q_pow(-beta / (2.0 * N)));
    std::vector<cplx> xis(N, m.q_pow(beta / (2.0 * N)));
    return trotter_density_rows(m, L, zetas, xis);
}

Matrix trotter_density_rows(const Model& m, std::size_t L, const std::vector<cplx>& zetas,
                            const std::vector<cplx>& xis) {
    require(zetas.size() == xis.size() && !zetas.empty(), "ShapeError",
            "row parameters must pair up");
    const std::size_t dim = ipow(m.d(), L);
    Matrix acc = Matrix::Identity(dim, dim);
    for (std::size_t i = 0; i < zetas.size(); ++i) {
        const Matrix t = transfer_matrix(m, SpaceTag::V, zetas[i], L);
        const Matrix ts = transfer_matrix(m, SpaceTag::Vstar, xis[i], L);
        acc = (ts * t) * acc;
    }
    return acc / acc.trace();
}

Matrix gibbs_density(const Model& m, std::size_t L, double beta) {
    const Matrix h = charges(m, L, 1, SpaceTag::V).front();
    const Matrix expo = (-beta * std::log(m.q)) * h;
    const Matrix g = expo.exp();
    return g / g.trace();
}

// --- vertical ------------------------------------------------------------------

VerticalOps::VerticalOps(const Model& m, ColumnSpec spec) : model_(&m), spec_(std::move(spec)) {
    require(spec_.N >= 1, "ShapeError", "column needs N >= 1");
    require(spec_.zeta.size() == static_cast<std::size_t>(spec_.N) &&
                spec_.xi.size() == static_cast<std::size_t>(spec_.N),
            "ShapeError", "column needs N zeta and N xi parameters");
    require(spec_.twist.size() == static_cast<std::size_t>(m.cartan.rank), "ShapeError",
            "twist needs one entry per h_1..h_l");
    vdim_ = ipow(m.d(), 2 * spec_.N);
    check_budget(4 * vdim_ * vdim_ * m.d() * m.d(), "vertical column");
    for (int j = 0; j < 2 * spec_.N; ++j) {
        col_spaces_.push_back("c" + std::to_string(j + 1));
        col_dims_.push_back(m.d());
    }
}

Tensor VerticalOps::monodromy_tensor(SpaceTag aux_tag, cplx eta) const {
    const Model& m = *model_;
    std::vector<std::string> spaces = col_spaces_;
    std::vector<std::size_t> dims = col_dims_;
    spaces.push_back("a");
    dims.push_back(m.d());

    Tensor acc = embed_operator(
        operator_from_matrix({"a"}, {m.d()}, m.twist(aux_tag, spec_.twist)), spaces, dims);
    for (int j = 1; j <= 2 * spec_.N; ++j) {
        const bool odd = (j % 2 == 1);
        const SpaceTag slot_tag = odd ? SpaceTag::V : SpaceTag::Vstar;
        const cplx param = odd ? spec_.zeta[(j - 1) / 2] : spec_.xi[j / 2 - 1];
        const Tensor factor = embed_operator(
            m.R->get(slot_tag, aux_tag, param, eta).to_tensor(col_spaces_[j - 1], "a"), spaces,
            dims);
        acc = operator_mul(factor, acc);
    }
    return acc;
}

std::vector<Matrix> VerticalOps::monodromy_blocks(SpaceTag aux_tag, cplx eta) const {
    const std::size_t d = model_->d();
    std::vector<std::string> order = col_spaces_;
    order.push_back("a");
    const Matrix full = operator_to_matrix(monodromy_tensor(aux_tag, eta), order);

    std::vector<Matrix> blocks(d * d, Matrix(vdim_, vdim_));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t r = 0; r < vdim_; ++r)
                for (std::size_t c = 0; c < vdim_; ++c)
                    blocks[i * d + j](r, c) = full(r * d + i, c * d + j);
    return blocks;
}

const Matrix& VerticalOps::transfer(SpaceTag aux_tag, cplx eta) const {
    const Key key{aux_tag == SpaceTag::V ? 0 : 1, eta.real(), eta.imag()};
    const auto it = transfer_cache_.find(key);
    if (it != transfer_cache_.end()) return it->second;
    const Tensor traced = partial_trace(monodromy_tensor(aux_tag, eta), "a");
    return transfer_cache_.emplace(key, operator_to_matrix(traced, col_spaces_)).first->second;
}

// --- spectra ----------------------------------------------------------------------

namespace {

SpectralData dominant_eigs_dense(const Matrix& t, double gap_tol) {
    const Eigen::Index n = t.rows();
    Eigen::ComplexEigenSolver<Matrix> right(t);
    require(right.info() == Eigen::Success, "DegenerateDominant", "eigensolver failed");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(right.eigenvalues()(a)) > std::abs(right.eigenvalues()(b));
    });

    SpectralData s;
    s.eigenvalues.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) s.eigenvalues(k) = right.eigenvalues()(order[k]);
    s.lambda0 = s.eigenvalues(0);
    s.right0 = right.eigenvectors().col(order[0]);
    s.gap = n > 1 ? (std::abs(s.eigenvalues(0)) - std::abs(s.eigenvalues(1))) /
                        std::abs(s.eigenvalues(0))
                  : 1.0;
    require(s.gap > gap_tol, "DegenerateDominant",
            "leading eigenvalue is not simple (gap " + std::to_string(s.gap) + ")");

    Eigen::ComplexEigenSolver<Matrix> left(t.transpose().eval());
    require(left.info() == Eigen::Success, "DegenerateDominant", "left eigensolver failed");
    Eigen::Index best = 0;
    double best_err = std::numeric_limits<double>::max();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double err = std::abs(left.eigenvalues()(k) - s.lambda0);
        if (err < best_err) {
            best_err = err;
            best = k;
        }
    }
    require(best_err <= 1e-8 * std::abs(s.lambda0), "DegenerateDominant",
            "left/right eigenvalue pairing failed");
    s.left0 = left.eigenvectors().col(best);

    const cplx pairing = bilinear(s.left0, s.right0);
    require(std::abs(pairing) > 1e-12, "DegenerateDominant",
            "left/right dominant vectors are bilinearly orthogonal");
    s.left0 /= pairing;

    if (n > 1) {
        const Vector v1 = right.eigenvectors().col(order[1]);
        s.biorth_residual = std::abs(bilinear(s.left0, v1)) /
                            std::max(s.left0.norm() * v1.norm(), 1e-300);
    }
    return s;
}

SpectralData dominant_eigs_power(const Matrix& t, double gap_tol) {
    const Eigen::Index n = t.rows();
    auto iterate = [&](const Matrix& a, Vector v, cplx& lambda) {
        lambda = cplx(0.0);
        v.normalize();
        for (int it = 0; it < 20000; ++it) {
            Vector w = a * v;
            const cplx next = v.dot(w) / v.dot(v);
            w.normalize();
            if (it > 0 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) {
                lambda = next;
                return w;
            }
            lambda = next;
            v = w;
        }
        return v;
    };
    SpectralData s;
    cplx l0r{}, l0l{};
    Vector v0 = iterate(t, Vector::Random(n), l0r);
    Vector p0 = iterate(t.transpose(), Vector::Random(n), l0l);
    s.lambda0 = l0r;
    s.right0 = v0;
    const cplx pairing = bilinear(p0, v0);
    require(std::abs(pairing) > 1e-12, "DegenerateDominant",
            "left/right dominant vectors are bilinearly orthogonal");
    s.left0 = p0 / pairing;

    // One deflation step for the subdominant modulus.
    const Matrix defl = t - s.lambda0 * (s.right0 * s.left0.transpose());
    cplx l1{};
    iterate(defl, Vector::Random(n), l1);
    s.eigenvalues.resize(2);
    s.eigenvalues << s.lambda0, l1;
    s.gap = (std::abs(l0r) - std::abs(l1)) / std::abs(l0r);
    require(s.gap > gap_tol, "DegenerateDominant", "leading eigenvalue is not simple");
    return s;
}

} // namespace

SpectralData dominant_eigs(const Matrix& t, double gap_tol, std::size_t dense_limit) {
    require(t.rows() == t.cols() && t.rows() >= 1, "ShapeError", "square matrix required");
    if (static_cast<std::size_t>(t.rows()) <= dense_limit) return dominant_eigs_dense(t, gap_tol);
    return dominant_eigs_power(t, gap_tol);
}

nlohmann::json spectral_to_json(const SpectralData& s) {
    nlohmann::json j;
    auto cv = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
    j["lambda0"] = cv(s.lambda0);
    j["gap"] = s.gap;
    j["biorth_residual"] = s.biorth_residual;
    auto evs = nlohmann::json::array();
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) evs.push_back(cv(s.eigenvalues(k)));
    j["eigenvalues"] = evs;
    return j;
}

// --- reduced density ------------------------------------------------------------

namespace {

cplx json_to_cplx(const nlohmann::json& v) {
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    return cplx(v.at(0).get<double>(), v.at(1).get<double>());
}

nlohmann::json cplx_to_json(cplx v) { return nlohmann::json::array({v.real(), v.imag()}); }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

LatticeConfig lattice_config_from_json(const nlohmann::json& j, int rank) {
    LatticeConfig c;
    c.N = j.value("N", 1);
    c.n = j.value("n", 1);
    if (j.contains("m") && j["m"].is_number()) c.m = j["m"].get<int>();
    for (const auto& v : j.value("zeta", nlohmann::json::array())) c.zeta.push_back(json_to_cplx(v));
    for (const auto& v : j.value("xi", nlohmann::json::array())) c.xi.push_back(json_to_cplx(v));
    for (const auto& v : j.value("eta", nlohmann::json::array())) c.eta.push_back(json_to_cplx(v));
    if (j.contains("eta_tags"))
        for (const auto& v : j["eta_tags"]) c.eta_tags.push_back(tag_from_name(v.get<std::string>()));
    else
        c.eta_tags.assign(c.eta.size(), SpaceTag::V);
    for (const auto& v : j.value("kappa", nlohmann::json::array())) c.kappa.push_back(json_to_cplx(v));
    for (const auto& v : j.value("alpha", nlohmann::json::array())) c.alpha.push_back(json_to_cplx(v));
    if (c.kappa.empty()) c.kappa.assign(rank, cplx(0.0));
    if (c.alpha.empty()) c.alpha.assign(rank, cplx(0.0));
    c.beta = j.value("beta", 0.0);
    return c;
}

nlohmann::json lattice_config_to_json(const LatticeConfig& c) {
    nlohmann::json j;
    j["N"] = c.N;
    j["n"] = c.n;
    j["m"] = c.m;
    auto arr = [&](const std::vector<cplx>& v) {
        auto a = nlohmann::json::array();
        for (cplx x : v) a.push_back(cplx_to_json(x));
        return a;
    };
    j["zeta"] = arr(c.zeta);
    j["xi"] = arr(c.xi);
    j["eta"] = arr(c.eta);
    auto tags = nlohmann::json::array();
    for (SpaceTag t : c.eta_tags) tags.push_back(tag_name(t));
    j["eta_tags"] = tags;
    j["kappa"] = arr(c.kappa);
    j["alpha"] = arr(c.alpha);
    j["beta"] = c.beta;
    return j;
}

nlohmann::json density_to_json(const DensityState& d) {
    nlohmann::json j;
    j["n"] = d.n;
    auto sites = nlohmann::json::array();
    for (int k = 0; k < d.n; ++k)
        sites.push_back({{"tag", tag_name(d.tags[k])}, {"eta", cplx_to_json(d.eta[k])}});
    j["sites"] = sites;
    j["tensor"] = tensor_to_json(d.tensor);
    j["provenance"] = d.provenance;
    return j;
}

QtmContext::QtmContext(const Model& m, LatticeConfig cfg) : model_(&m), cfg_(std::move(cfg)) {
    require(cfg_.eta.size() == static_cast<std::size_t>(cfg_.n) &&
                cfg_.eta_tags.size() == static_cast<std::size_t>(cfg_.n),
            "ShapeError", "config needs n vertical parameters and tags");
    ColumnSpec base{cfg_.N, cfg_.zeta, cfg_.xi, cfg_.kappa};
    ColumnSpec shifted = base;
    for (std::size_t i = 0; i < shifted.twist.size(); ++i) shifted.twist[i] += cfg_.alpha[i];
    col_kappa_ = std::make_unique<VerticalOps>(m, base);
    col_ka_ = std::make_unique<VerticalOps>(m, shifted);

    const cplx unit(1.0, 0.0);
    spec_kappa_ = dominant_eigs(col_kappa_->transfer(SpaceTag::V, unit));
    spec_ka_ = dominant_eigs(col_ka_->transfer(SpaceTag::V, unit));

    overlap_ = bilinear(spec_kappa_.left0, spec_ka_.right0);
    const double rel = std::abs(overlap_) /
                       std::max(spec_kappa_.left0.norm() * spec_ka_.right0.norm(), 1e-300);
    require(rel > 1e-12, "ZeroOverlap",
            "dominant left/right vectors of the two twist families are orthogonal");
}

cplx QtmContext::lambda0(SpaceTag column_tag, cplx eta) const {
    return bilinear(spec_kappa_.left0, col_kappa_->transfer(column_tag, eta) * spec_kappa_.right0);
}

cplx QtmContext::lambda0_alpha(SpaceTag column_tag, cplx eta) const {
    return bilinear(spec_ka_.left0, col_ka_->transfer(column_tag, eta) * spec_ka_.right0);
}

DensityState QtmContext::density() const {
    std::vector<Site> sites;
    for (int k = 0; k < cfg_.n; ++k) sites.push_back({cfg_.eta_tags[k], cfg_.eta[k]});
    return density(sites, cfg_.m);
}

DensityState QtmContext::density(const std::vector<Site>& sites,
                                 std::optional<int> m_override) const {
    const std::size_t d = model_->d();
    const int n = static_cast<int>(sites.size());
    const int m_wing = m_override.value_or(cfg_.m);
    const std::size_t vd = col_kappa_->vdim();

    std::vector<std::vector<Matrix>> blocks;
    for (const auto& s : sites) blocks.push_back(col_kappa_->monodromy_blocks(s.tag, s.eta));

    const std::size_t combos = ipow(d * d, n);
    std::vector<cplx> values(combos);
    cplx denom;

    if (m_wing < 0) {
        // Dominant-eigenvector limit of the wings.
        std::vector<Vector> states = {spec_ka_.right0};
        for (int k = 0; k < n; ++k) {
            std::vector<Vector> next(states.size() * d * d, Vector(vd));
            for (std::size_t s = 0; s < states.size(); ++s)
                for (std::size_t ij = 0; ij < d * d; ++ij)
                    next[s * d * d + ij] = blocks[k][ij] * states[s];
            states = std::move(next);
        }
        // states index order: ((i1 j1), (i2 j2), ..) with site 1 slowest.
        for (std::size_t idx = 0; idx < combos; ++idx)
            values[idx] = bilinear(spec_kappa_.left0, states[idx]);
        denom = overlap_;
        for (const auto& s : sites) denom *= lambda0(s.tag, s.eta);
    } else {
        Matrix wing_kappa = Matrix::Identity(vd, vd);
        Matrix wing_ka = Matrix::Identity(vd, vd);
        const Matrix tk = col_kappa_->transfer(SpaceTag::V, cplx(1.0));
        const Matrix tka = col_ka_->transfer(SpaceTag::V, cplx(1.0));
        for (int i = 0; i < m_wing; ++i) {
            wing_kappa *= tk;
            wing_ka *= tka;
        }
        std::vector<Matrix> states = {wing_ka};
        for (int k = 0; k < n; ++k) {
            std::vector<Matrix> next(states.size() * d * d);
            for (std::size_t s = 0; s < states.size(); ++s)
                for (std::size_t ij = 0; ij < d * d; ++ij)
                    next[s * d * d + ij] = blocks[k][ij] * states[s];
            states = std::move(next);
        }
        for (std::size_t idx = 0; idx < combos; ++idx)
            values[idx] = (wing_kappa * states[idx]).trace();
        Matrix tprod = wing_ka;
        for (const auto& s : sites) tprod = col_kappa_->transfer(s.tag, s.eta) * tprod;
        denom = (wing_kappa * tprod).trace();
    }

    // Re-fan the interleaved (i1 j1 i2 j2 ..) order into row (i1..in), col (j1..jn).
    const std::size_t dn = ipow(d, n);
    Matrix dm(dn, dn);
    for (std::size_t idx = 0; idx < combos; ++idx) {
        std::size_t row = 0, col = 0;
        for (int k = 0; k < n; ++k) {
            const std::size_t site_ij = idx / ipow(d * d, n - 1 - k) % (d * d);
            row = row * d + site_ij / d;
            col = col * d + site_ij % d;
        }
        dm(row, col) = values[idx] / denom;
    }

    DensityState out;
    out.n = n;
    std::vector<std::string> site_spaces;
    std::vector<std::size_t> site_dims(n, d);
    for (int k = 0; k < n; ++k) {
        out.tags.push_back(sites[k].tag);
        out.eta.push_back(sites[k].eta);
        site_spaces.push_back("site" + std::to_string(k + 1));
    }
    out.tensor = operator_from_matrix(site_spaces, site_dims, dm);

    std::string prov = std::to_string(cfg_.N) + "|" + std::to_string(m_wing);
    for (cplx z : cfg_.zeta) prov += "|z" + std::to_string(z.real()) + "," + std::to_string(z.imag());
    for (cplx z : cfg_.xi) prov += "|x" + std::to_string(z.real()) + "," + std::to_string(z.imag());
    for (cplx z : cfg_.kappa) prov += "|k" + std::to_string(z.real()) + "," + std::to_string(z.imag());
    for (cplx z : cfg_.alpha) prov += "|a" + std::to_string(z.real()) + "," + std::to_string(z.imag());
    for (const auto& s : sites)
        prov += "|s" + tag_name(s.tag) + std::to_string(s.eta.real()) + "," +
                std::to_string(s.eta.imag());
    out.provenance = fnv1a(prov);

    const cplx tr = dm.trace();
    require(std::abs(tr - 1.0) < 1e-8, "ZeroOverlap",
            "density matrix trace deviates from one: " + std::to_string(std::abs(tr - 1.0)));
    return out;
}

namespace {

// Discrete Cauchy mean over a circle, with two-radius self-validation: the
// radius shrinks until the means at r and r/2 agree, so nearby poles of the
// sampled function (pole-zero pairs of the eigenvalue denominators) cannot
// pollute the removable-singularity evaluation silently.
template <typename Value, typename Eval, typename Diff>
Value adaptive_circle_mean(cplx center, double rel_radius, int points, const Eval& eval,
                           const Diff& rel_diff, const std::string& what) {
    auto mean_at = [&](double radius) {
        Value acc{};
        for (int k = 0; k < points; ++k) {
            const double phi = 2.0 * M_PI * k / points;
            const Value sample = eval(center + radius * cplx(std::cos(phi), std::sin(phi)));
            acc = (k == 0) ? sample : Value(acc + sample);
        }
        return Value((cplx(1.0) / static_cast<double>(points)) * acc);
    };
    double r = rel_radius * std::abs(center);
    Value coarse = mean_at(r);
    for (int step = 0; step < 8; ++step) {
        Value fine = mean_at(r / 2.0);
        if (rel_diff(coarse, fine) < 1e-10) return fine;
        coarse = std::move(fine);
        r /= 2.0;
    }
    fail("DerivativeUnstable", what + ": circle means do not stabilize");
}

} // namespace

DensityState QtmContext::density_analytic(const std::vector<Site>& sites,
                                          std::optional<int> m_override, double rel_radius,
                                          int points) const {
    std::vector<Site> probe = sites;
    const cplx center = sites.back().eta;
    const Tensor mean = adaptive_circle_mean<Tensor>(
        center, rel_radius, points,
        [&](cplx eta) {
            probe.back().eta = eta;
            return density(probe, m_override).tensor;
        },
        [](const Tensor& a, const Tensor& b) { return rel_residual(a, b); },
        "density circle mean");
    DensityState out = density(probe, m_override); // metadata carrier
    out.tensor = mean;
    out.eta.back() = center;
    return out;
}

cplx QtmContext::lambda_ratio_analytic(SpaceTag column_tag, cplx eta, double rel_radius,
                                       int points) const {
    return adaptive_circle_mean<cplx>(
        eta, rel_radius, points,
        [&](cplx p) { return lambda0(column_tag, p) / lambda0_alpha(column_tag, p); },
        [](cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); },
        "eigenvalue-ratio circle mean");
}

DensityState reduced_density(const Model& m, const LatticeConfig& cfg) {
    return QtmContext(m, cfg).density();
}

} // namespace qloop
