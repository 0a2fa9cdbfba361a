#include "qloop/rmatrix.hpp"

#include <iostream>

#include <Eigen/SVD>

#include "qloop/errors.hpp"

namespace qloop {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix permutation_matrix(std::size_t d1, std::size_t d2) {
    Matrix p = Matrix::Zero(d1 * d2, d1 * d2);
    for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j) p(j * d1 + i, i * d2 + j) = 1.0;
    return p;
}

Matrix ptranspose1(const Matrix& m, std::size_t d1, std::size_t d2) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t a = 0; a < d1; ++a)
        for (std::size_t b = 0; b < d2; ++b)
            for (std::size_t c = 0; c < d1; ++c)
                for (std::size_t e = 0; e < d2; ++e)
                    out(a * d2 + b, c * d2 + e) = m(c * d2 + b, a * d2 + e);
    return out;
}

Matrix ptranspose2(const Matrix& m, std::size_t d1, std::size_t d2) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t a = 0; a < d1; ++a)
        for (std::size_t b = 0; b < d2; ++b)
            for (std::size_t c = 0; c < d1; ++c)
                for (std::size_t e = 0; e < d2; ++e)
                    out(a * d2 + b, c * d2 + e) = m(a * d2 + e, c * d2 + b);
    return out;
}

Tensor ROperator::to_tensor(const std::string& s1, const std::string& s2) const {
    return operator_from_matrix({s1, s2}, {dim1, dim2}, mat);
}

Matrix ROperator::rcheck() const { return permutation_matrix(dim1, dim2) * mat; }

ROperator solve_intertwiner(const Representation& r1, const Representation& r2, cplx zeta,
                            cplx eta, IntertwinerDiagnostics* diag) {
    require(r1.algebra.rank == r2.algebra.rank, "ShapeError", "modules of different algebras");
    const int l = r1.algebra.rank;
    const std::size_t d1 = r1.dim, d2 = r2.dim, n = d1 * d2;
    const Matrix i1 = Matrix::Identity(d1, d1), i2 = Matrix::Identity(d2, d2);
    const Matrix in = Matrix::Identity(n, n);

    std::vector<std::pair<Matrix, Matrix>> constraints; // (Delta image, Delta' image)
    for (int i = 0; i <= l; ++i) {
        const double di = static_cast<double>(r1.algebra.symmetrizers[i]);
        const Matrix e1 = gen_image(r1, {GenKind::E, i}, zeta);
        const Matrix e2 = gen_image(r2, {GenKind::E, i}, eta);
        const Matrix f1 = gen_image(r1, {GenKind::F, i}, zeta);
        const Matrix f2 = gen_image(r2, {GenKind::F, i}, eta);
        const Matrix qh1 = r1.q_pow_h(i, di), qh1i = r1.q_pow_h(i, -di);
        const Matrix qh2 = r2.q_pow_h(i, di), qh2i = r2.q_pow_h(i, -di);

        constraints.emplace_back(kron(e1, i2) + kron(qh1, e2), kron(i1, e2) + kron(e1, qh2));
        constraints.emplace_back(kron(f1, qh2i) + kron(i1, f2), kron(qh1i, f2) + kron(f1, i2));
        constraints.emplace_back(kron(r1.q_pow_h(i, 1.0), r2.q_pow_h(i, 1.0)),
                                 kron(r1.q_pow_h(i, 1.0), r2.q_pow_h(i, 1.0)));
    }

    Matrix system(constraints.size() * n * n, n * n);
    for (std::size_t g = 0; g < constraints.size(); ++g) {
        const auto& [md, mdp] = constraints[g];
        system.block(g * n * n, 0, n * n, n * n) =
            kron(in, md.transpose()) - kron(mdp, in);
    }

    Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double null_tol = smax * 1e-10;
    int null_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= null_tol) ++null_dim;

    if (diag) {
        diag->smax = smax;
        diag->smin = sv(sv.size() - 1);
        diag->snext = sv.size() > 1 ? sv(sv.size() - 2) : smax;
        diag->null_dim = null_dim;
    }
    require(null_dim >= 1, "NoIntertwiner", "intertwiner system has trivial null space");
    require(null_dim == 1, "NonSimpleTensorProduct",
            "tensor product is not simple at this parameter pair");

    Vector vec = svd.matrixV().col(n * n - 1);
    Eigen::Index top = 0;
    vec.cwiseAbs().maxCoeff(&top);
    vec /= vec(top);

    ROperator r;
    r.tag1 = r1.tag;
    r.tag2 = r2.tag;
    r.zeta = zeta;
    r.eta = eta;
    r.dim1 = d1;
    r.dim2 = d2;
    r.mat = Matrix(n, n);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < n; ++col) r.mat(row, col) = vec(row * n + col);
    r.normalized = false;
    return r;
}

namespace {

void corner_normalize(ROperator& r) {
    const cplx corner = r.mat(0, 0);
    require(std::abs(corner) > 1e-10 * r.mat.cwiseAbs().maxCoeff(), "BrokenUnitarity",
            "highest-weight corner vanishes; cannot fix the scalar here");
    r.mat /= corner;
    r.normalized = true;
}

} // namespace

std::pair<ROperator, ROperator> normalize_pair(const ROperator& raw,
                                               const ROperator& raw_swapped) {
    require(raw.tag1 == SpaceTag::V && raw.tag2 == SpaceTag::V && raw_swapped.tag1 == SpaceTag::V &&
                raw_swapped.tag2 == SpaceTag::V,
            "BrokenUnitarity", "normalize_pair expects V|V operators");
    require(raw.zeta == raw_swapped.eta && raw.eta == raw_swapped.zeta, "BrokenUnitarity",
            "swapped operator must live at the transposed parameter pair");

    ROperator a = raw, b = raw_swapped;
    corner_normalize(a);
    corner_normalize(b);

    const Matrix prod = a.rcheck() * b.rcheck();
    require(identity_residual(prod) < 1e-8, "BrokenUnitarity",
            "Rcheck(z|e) Rcheck(e|z) is not the identity; intertwiner solve failed");
    return {a, b};
}

DualROperators dual_r_operators(const ROperator& base) {
    require(base.normalized && base.tag1 == SpaceTag::V && base.tag2 == SpaceTag::V,
            "SingularR", "dual operators derive from the normalized V|V family");
    const std::size_t d1 = base.dim1, d2 = base.dim2;
    Eigen::FullPivLU<Matrix> lu(base.mat);
    require(lu.isInvertible(), "SingularR", "R is singular at this parameter pair");
    const Matrix rinv = lu.inverse();

    DualROperators out;
    out.vstar_v = base;
    out.vstar_v.tag1 = SpaceTag::Vstar;
    out.vstar_v.mat = ptranspose1(rinv, d1, d2);

    out.vstar_vstar = base;
    out.vstar_vstar.tag1 = SpaceTag::Vstar;
    out.vstar_vstar.tag2 = SpaceTag::Vstar;
    out.vstar_vstar.mat = base.mat.transpose();

    out.v_vstar = base;
    out.v_vstar.tag2 = SpaceTag::Vstar;
    const Matrix rt2 = ptranspose2(base.mat, d1, d2);
    Eigen::FullPivLU<Matrix> lu2(rt2);
    require(lu2.isInvertible(), "SingularR", "R^{t2} is singular at this parameter pair");
    out.v_vstar.mat = lu2.inverse();
    return out;
}

double check_ybe(const ROperator& r12, const ROperator& r13, const ROperator& r23) {
    require(r12.dim1 == r13.dim1 && r12.dim2 == r23.dim1 && r13.dim2 == r23.dim2, "LegMismatch",
            "YBE operands have inconsistent dimensions");
    const std::vector<std::string> spaces = {"s1", "s2", "s3"};
    const std::vector<std::size_t> dims = {r12.dim1, r12.dim2, r13.dim2};

    const Tensor a12 = embed_operator(r12.to_tensor("s1", "s2"), spaces, dims);
    const Tensor a13 = embed_operator(r13.to_tensor("s1", "s3"), spaces, dims);
    const Tensor a23 = embed_operator(r23.to_tensor("s2", "s3"), spaces, dims);

    const Tensor lhs = operator_mul(operator_mul(a12, a13), a23);
    const Tensor rhs = operator_mul(operator_mul(a23, a13), a12);
    return rel_residual(lhs, rhs);
}

bool RFamily::Key::operator<(const Key& o) const {
    return std::tie(t1, t2, zr, zi, er, ei) < std::tie(o.t1, o.t2, o.zr, o.zi, o.er, o.ei);
}

RFamily::RFamily(Representation base_v) : v_(std::move(base_v)), vs_(dual_rep(v_)) {
    require(v_.tag == SpaceTag::V, "UnsupportedRep", "RFamily expects the base module");
}

const Representation& RFamily::rep(SpaceTag t) const { return t == SpaceTag::V ? v_ : vs_; }

const ROperator& RFamily::base(cplx zeta, cplx eta) const {
    const Key key{0, 0, zeta.real(), zeta.imag(), eta.real(), eta.imag()};
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    cplx z = zeta;
    ROperator raw, raw_swapped;
    for (int attempt = 0;; ++attempt) {
        try {
            raw = solve_intertwiner(v_, v_, z, eta);
            raw_swapped = solve_intertwiner(v_, v_, eta, z);
            break;
        } catch (const Error& e) {
            if (e.code() != "NonSimpleTensorProduct" || attempt >= 2) throw;
            // Non-simple locus: nudge zeta/eta and warn, never proceed silently.
            z *= cplx(1.0 + 1e-6);
            ++perturbations_;
            std::cerr << "qloop: non-simple tensor product, perturbing zeta by 1e-6\n";
        }
    }
    auto [a, b] = normalize_pair(raw, raw_swapped);
    cache_.emplace(Key{0, 0, eta.real(), eta.imag(), z.real(), z.imag()}, std::move(b));
    return cache_.emplace(key, std::move(a)).first->second;
}

const ROperator& RFamily::get(SpaceTag t1, SpaceTag t2, cplx zeta, cplx eta) const {
    if (t1 == SpaceTag::V && t2 == SpaceTag::V) return base(zeta, eta);
    const Key key{t1 == SpaceTag::V ? 0 : 1, t2 == SpaceTag::V ? 0 : 1,
                  zeta.real(), zeta.imag(), eta.real(), eta.imag()};
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    // Only the requested dual: the others can be singular at special points
    // (R_{V|V*} has a pole at zeta = eta, where R_{V|V} is the permutation).
    const ROperator& b = base(zeta, eta);
    ROperator r = b;
    r.tag1 = t1;
    r.tag2 = t2;
    if (t1 == SpaceTag::Vstar && t2 == SpaceTag::V) {
        Eigen::FullPivLU<Matrix> lu(b.mat);
        require(lu.isInvertible(), "SingularR", "R is singular at this parameter pair");
        r.mat = ptranspose1(lu.inverse(), b.dim1, b.dim2);
    } else if (t1 == SpaceTag::V && t2 == SpaceTag::Vstar) {
        Eigen::FullPivLU<Matrix> lu(ptranspose2(b.mat, b.dim1, b.dim2));
        require(lu.isInvertible(), "SingularR", "R^{t2} is singular at this parameter pair");
        r.mat = lu.inverse();
    } else {
        r.mat = b.mat.transpose();
    }
    return cache_.emplace(key, std::move(r)).first->second;
}

Matrix RFamily::r(SpaceTag t1, SpaceTag t2, cplx zeta, cplx eta) const {
    return get(t1, t2, zeta, eta).mat;
}

Matrix RFamily::rcheck(SpaceTag t1, SpaceTag t2, cplx zeta, cplx eta) const {
    return get(t1, t2, zeta, eta).rcheck();
}

namespace {

// Least-squares scalar s minimizing ||lhs - s rhs||_F.
cplx fit_scalar(const Matrix& lhs, const Matrix& rhs) {
    cplx num(0.0), den(0.0);
    for (Eigen::Index i = 0; i < lhs.rows(); ++i)
        for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
            num += std::conj(rhs(i, j)) * lhs(i, j);
            den += std::conj(rhs(i, j)) * rhs(i, j);
        }
    require(std::abs(den) > 1e-300, "CrossingFailure", "degenerate crossing comparison");
    return num / den;
}

} // namespace

CrossingCheck check_crossing_c(const RFamily& family, const Matrix& x_v, double lambda,
                               cplx zeta, cplx eta, double tol) {
    const std::size_t d = family.d();
    const cplx q = family.q();
    const cplx shift = std::pow(q, -lambda);
    const Matrix xi = x_v.inverse();
    const Matrix x1 = kron(x_v, Matrix::Identity(d, d));
    const Matrix x1i = kron(xi, Matrix::Identity(d, d));

    // V|V form: conjugated shifted R against ((R_{V*|V})^{-1})^{t1}.
    const Matrix lhs1 = x1 * family.r(SpaceTag::V, SpaceTag::V, shift * zeta, eta) * x1i;
    const Matrix rhs1 =
        ptranspose1(family.r(SpaceTag::Vstar, SpaceTag::V, zeta, eta).inverse(), d, d);
    CrossingCheck out;
    out.D = fit_scalar(lhs1, rhs1);
    out.residual_i = (lhs1 - out.D * rhs1).norm() / lhs1.norm();

    // V|V* form carries D^{-1}.
    const Matrix lhs2 = x1 * family.r(SpaceTag::V, SpaceTag::Vstar, shift * zeta, eta) * x1i;
    const Matrix rhs2 =
        ptranspose1(family.r(SpaceTag::Vstar, SpaceTag::Vstar, zeta, eta).inverse(), d, d);
    const cplx d_inv = fit_scalar(lhs2, rhs2);
    out.residual_ii = (lhs2 - d_inv * rhs2).norm() / lhs2.norm();
    out.d_mismatch = std::abs(out.D - 1.0 / d_inv) / std::abs(out.D);

    require(out.residual_i <= tol && out.residual_ii <= tol && out.d_mismatch <= tol,
            "CrossingFailure", "crossing relation ratio is not a scalar within tolerance");
    return out;
}

} // namespace qloop
