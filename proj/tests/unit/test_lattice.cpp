#include "doctest.h"

#include "qloop/errors.hpp"
#include "qloop/lattice.hpp"
#include "qloop/suite.hpp"

using namespace qloop;

namespace {

std::vector<std::string> chain_spaces(std::size_t L) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < L; ++i) out.push_back("x" + std::to_string(i + 1));
    return out;
}

} // namespace

TEST_SUITE_BEGIN("lattice");

TEST_CASE("monodromy with one site is a single R-operator") {
    const Model m = make_model(AlgebraId::A1);
    const cplx zeta(1.3, 0.2), eta(0.8, -0.1);
    const Tensor mono = horizontal_monodromy(m, SpaceTag::V, zeta, {{SpaceTag::V, eta}});
    const Matrix got = operator_to_matrix(mono, {"a", "x1"});
    CHECK(rel_residual(got, m.R->r(SpaceTag::V, SpaceTag::V, zeta, eta)) < 1e-15);
}

TEST_CASE("two-site monodromy matches a direct contraction") {
    const Model m = make_model(AlgebraId::A1);
    const cplx zeta(1.3, 0.2), e1(0.8, -0.1), e2(1.1, 0.3);
    const Tensor mono =
        horizontal_monodromy(m, SpaceTag::V, zeta, {{SpaceTag::V, e1}, {SpaceTag::V, e2}});
    const Matrix got = operator_to_matrix(mono, {"a", "x1", "x2"});

    // oracle: dense 8x8 product of embedded factors, built by hand
    const Matrix r1 = m.R->r(SpaceTag::V, SpaceTag::V, zeta, e1);
    const Matrix r2 = m.R->r(SpaceTag::V, SpaceTag::V, zeta, e2);
    Matrix f1 = Matrix::Zero(8, 8), f2 = Matrix::Zero(8, 8);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    for (int s = 0; s < 2; ++s) {
                        f1(a * 4 + b * 2 + s, c * 4 + d * 2 + s) += r1(a * 2 + b, c * 2 + d);
                        f2(a * 4 + s * 2 + b, c * 4 + s * 2 + d) += r2(a * 2 + b, c * 2 + d);
                    }
    CHECK(rel_residual(got, Matrix(f2 * f1)) < 1e-14);
}

TEST_CASE("coincident parameters give the cyclic shift coupling") {
    const Model m = make_model(AlgebraId::A1);
    const std::size_t L = 3;
    // all inhomogeneities equal to the auxiliary parameter: product of swaps
    const cplx z(1.17, 0.08);
    std::vector<Site> sites(L, Site{SpaceTag::V, z});
    const Matrix t = operator_to_matrix(horizontal_transfer(m, SpaceTag::V, z, sites),
                                        chain_spaces(L));
    // T is then the shift permutation on the chain
    Matrix shift = Matrix::Zero(8, 8);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int x3 = 0; x3 < 2; ++x3)
                shift(x3 * 4 + x1 * 2 + x2, x1 * 4 + x2 * 2 + x3) = 1.0;
    CHECK(rel_residual(t, shift) < 1e-13);
}

TEST_CASE("shift inverse pair and transfer commutativity") {
    const Model m = make_model(AlgebraId::A1);
    const std::size_t L = 4;
    const Matrix t1 = transfer_matrix(m, SpaceTag::V, cplx(1.0), L);
    const Matrix ts1 = transfer_matrix(m, SpaceTag::Vstar, cplx(1.0), L);
    CHECK(identity_residual(t1 * ts1) < 1e-12);

    const Matrix ta = transfer_matrix(m, SpaceTag::V, cplx(0.93, 0.11), L);
    const Matrix tb = transfer_matrix(m, SpaceTag::V, cplx(1.21, -0.04), L);
    CHECK(commutator_residual(ta, tb) < 1e-12);
}

TEST_CASE("charges commute and the dual first charge is minus the first") {
    const Model m = make_model(AlgebraId::A1);
    for (std::size_t L : {3, 4}) {
        const auto iv = charges(m, L, 2, SpaceTag::V);
        const auto is = charges(m, L, 1, SpaceTag::Vstar);
        CHECK(commutator_residual(iv[0], iv[1]) < 1e-10);
        CHECK(commutator_residual(iv[0], is[0]) < 1e-10);
        CHECK(rel_residual(is[0], Matrix(-iv[0])) < 1e-10);
    }
}

TEST_CASE("local Hamiltonian equals the first charge") {
    const Model m = make_model(AlgebraId::A1);
    for (std::size_t L : {3, 4}) {
        const Matrix h = hamiltonian(m, L);
        const Matrix i1 = charges(m, L, 1, SpaceTag::V).front();
        CHECK(rel_residual(h, i1) < 1e-10);
    }
    // weight-conserving two-site structure: nonzero entries only where the
    // pair weight matches
    const std::size_t d = m.d();
    const Matrix p = permutation_matrix(d, d);
    const Matrix h2 = hamiltonian(m, 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const int wr = (r / 2 == 0 ? 1 : -1) + (r % 2 == 0 ? 1 : -1);
            const int wc = (c / 2 == 0 ? 1 : -1) + (c % 2 == 0 ? 1 : -1);
            if (wr != wc) CHECK(std::abs(h2(r, c)) < 1e-10);
        }
}

TEST_CASE("infinite-temperature Trotter density is maximally mixed") {
    const Model m = make_model(AlgebraId::A1);
    const Matrix d = trotter_density(m, 3, 2, 0.0);
    CHECK(rel_residual(d, Matrix(Matrix::Identity(8, 8) / 8.0)) < 1e-13);
    CHECK(std::abs(trotter_density(m, 3, 4, 0.7).trace() - 1.0) < 1e-14);
}

TEST_CASE("Trotter sequence converges to the Gibbs oracle") {
    const Model m = make_model(AlgebraId::A1);
    const auto series = trotter_convergence(m, 3, 0.5, {4, 8, 16});
    CHECK(series[0].error > series[1].error);
    CHECK(series[1].error > series[2].error);
    // measured second-order behavior: doubling N divides the error by ~4
    const double r1 = series[0].error / series[1].error;
    const double r2 = series[1].error / series[2].error;
    CHECK(r1 > 3.5);
    CHECK(r1 < 4.6);
    CHECK(r2 > 3.5);
    CHECK(r2 < 4.6);
}

TEST_CASE("memory budget guard") {
    const Model m = make_model(AlgebraId::A1);
    CHECK_THROWS_WITH_AS(trotter_density(m, 40, 2, 0.5), doctest::Contains("TooLarge"), Error);
}

TEST_CASE("vertical column reduces to permutation structure at equal parameters") {
    const Model m = make_model(AlgebraId::A1);
    const cplx z(1.1, 0.05);
    ColumnSpec spec{1, {z}, {z}, {cplx(0.0)}};
    const VerticalOps col(m, spec);
    // oracle: direct contraction of the two-slot column at eta = z, where both
    // crossings degenerate: R_{V|V}(z|z) = P and R_{V*|V}(z|z) = P^{t1}.
    const std::size_t d = m.d();
    const Matrix p = permutation_matrix(d, d);
    const Matrix pt1 = ptranspose1(Matrix(p.inverse()), d, d);
    Matrix f1 = Matrix::Zero(8, 8), f2 = Matrix::Zero(8, 8);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            for (std::size_t c = 0; c < d; ++c)
                for (std::size_t e = 0; e < d; ++e)
                    for (std::size_t s = 0; s < d; ++s) {
                        f1(a * 4 + s * 2 + b, c * 4 + s * 2 + e) += p(a * 2 + b, c * 2 + e);
                        f2(s * 4 + a * 2 + b, s * 4 + c * 2 + e) += pt1(a * 2 + b, c * 2 + e);
                    }
    Matrix expect = Matrix::Zero(4, 4);
    const Matrix full = f2 * f1;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t s = 0; s < 2; ++s) expect(i, j) += full(i * 2 + s, j * 2 + s);
    CHECK(rel_residual(col.transfer(SpaceTag::V, z), expect) < 1e-12);
}

TEST_CASE("equally twisted vertical transfer operators commute") {
    const Model m = make_model(AlgebraId::A1);
    ColumnSpec spec{2,
                    {cplx(0.91, 0.07), cplx(1.13, -0.03)},
                    {cplx(1.05, 0.02), cplx(0.87, 0.04)},
                    {cplx(0.15)}};
    const VerticalOps col(m, spec);
    const Matrix ta = col.transfer(SpaceTag::V, cplx(1.02, 0.05));
    const Matrix tb = col.transfer(SpaceTag::V, cplx(0.95, -0.08));
    CHECK(commutator_residual(ta, tb) < 1e-12);
}

TEST_CASE("twist composition matches the additive parameter group") {
    const Model m = make_model(AlgebraId::A1);
    const std::vector<cplx> n1 = {cplx(0.12, 0.03)}, n2 = {cplx(-0.31, 0.08)};
    ColumnSpec s1{1, {cplx(0.9)}, {cplx(1.1)}, n1};
    ColumnSpec s2{1, {cplx(0.9)}, {cplx(1.1)}, n2};
    ColumnSpec s12{1, {cplx(0.9)}, {cplx(1.1)}, {n1[0] + n2[0]}};
    const VerticalOps c2(m, s2);
    const VerticalOps c12(m, s12);
    // inserting A(n1) A(n2) equals the A(n1+n2) column: conjugate the n2
    // column by the extra twist on the auxiliary line before tracing.
    const cplx eta(1.21, -0.06);
    const Tensor mono2 = c2.monodromy_tensor(SpaceTag::V, eta);
    const Tensor extra = embed_operator(
        operator_from_matrix({"a"}, {m.d()}, m.twist(SpaceTag::V, n1)),
        [&] {
            std::vector<std::string> sp;
            for (int j = 1; j <= 2; ++j) sp.push_back("c" + std::to_string(j));
            sp.push_back("a");
            return sp;
        }(),
        {2, 2, 2});
    const Tensor composed = partial_trace(operator_mul(mono2, extra), "a");
    const Tensor direct = partial_trace(c12.monodromy_tensor(SpaceTag::V, eta), "a");
    CHECK(rel_residual(composed, direct) < 1e-13);
}

TEST_CASE("dominant spectral data") {
    const Model m = make_model(AlgebraId::A1);
    ColumnSpec spec{1, {cplx(0.95, 0.06)}, {cplx(1.22, -0.08)}, {cplx(0.05)}};
    const VerticalOps col(m, spec);
    const SpectralData s = dominant_eigs(col.transfer(SpaceTag::V, cplx(1.0)));
    CHECK(s.gap > 1e-3);
    CHECK(s.biorth_residual < 1e-9);
    const cplx pairing = s.left0.cwiseProduct(s.right0).sum();
    CHECK(std::abs(pairing - 1.0) < 1e-12);
    // power-iteration fallback agrees with the dense path
    const SpectralData sp = dominant_eigs(col.transfer(SpaceTag::V, cplx(1.0)), 1e-6, 2);
    CHECK(std::abs(sp.lambda0 - s.lambda0) / std::abs(s.lambda0) < 1e-10);
}

TEST_CASE("degenerate dominant eigenvalue is reported") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 2.0;
    m(1, 1) = -2.0;
    m(2, 2) = 0.5;
    CHECK_THROWS_WITH_AS(dominant_eigs(m), doctest::Contains("DegenerateDominant"), Error);
}

TEST_CASE("reduced density matrix against the row-product oracle") {
    // Trace the wing sites out of the inhomogeneous-row density and compare
    // with the column-side finite-m formula; pins every ordering convention.
    for (auto id : {AlgebraId::A1, AlgebraId::A2}) {
        const Model m = make_model(id);
        const std::size_t d = m.d();
        const int n = 2, mw = 1, N = 2;
        const std::size_t L = 2 * mw + n;
        const std::vector<cplx> zetas = {cplx(0.93, 0.08), cplx(1.11, -0.05)};
        const std::vector<cplx> xis = {cplx(1.04, 0.03), cplx(0.89, -0.07)};
        const std::vector<cplx> etas = {cplx(1.06, 0.04), cplx(0.95, -0.03)};

        std::vector<Site> sites(L, Site{SpaceTag::V, cplx(1.0)});
        for (int k = 0; k < n; ++k) sites[mw + k].eta = etas[k];
        const auto spaces = chain_spaces(L);
        const std::size_t dim = static_cast<std::size_t>(std::pow(d, L));
        Matrix acc = Matrix::Identity(dim, dim);
        for (int i = 0; i < N; ++i) {
            const Matrix t =
                operator_to_matrix(horizontal_transfer(m, SpaceTag::V, zetas[i], sites), spaces);
            const Matrix ts = operator_to_matrix(
                horizontal_transfer(m, SpaceTag::Vstar, xis[i], sites), spaces);
            acc = (ts * t) * acc;
        }
        acc /= acc.trace();
        Tensor traced = operator_from_matrix(spaces, std::vector<std::size_t>(L, d), acc);
        for (int i = 0; i < mw; ++i) {
            traced = partial_trace(traced, spaces[i]);
            traced = partial_trace(traced, spaces[L - 1 - i]);
        }
        const Matrix horiz = operator_to_matrix(traced, {spaces[mw], spaces[mw + 1]});

        LatticeConfig cfg;
        cfg.N = N;
        cfg.n = n;
        cfg.m = mw;
        cfg.zeta = zetas;
        cfg.xi = xis;
        cfg.eta = etas;
        cfg.eta_tags = {SpaceTag::V, SpaceTag::V};
        cfg.kappa.assign(m.cartan.rank, cplx(0.0));
        cfg.alpha.assign(m.cartan.rank, cplx(0.0));
        const DensityState ds = reduced_density(m, cfg);
        const Matrix vert = operator_to_matrix(ds.tensor, {"site1", "site2"});
        CHECK(rel_residual(horiz, vert) < 1e-13);
    }
}

TEST_CASE("finite wings converge geometrically to the dominant-pair formula") {
    const Model m = make_model(AlgebraId::A1);
    LatticeConfig cfg;
    cfg.N = 1;
    cfg.n = 1;
    cfg.m = -1;
    cfg.zeta = {cplx(0.93, 0.05)};
    cfg.xi = {cplx(1.12, -0.04)};
    cfg.eta = {cplx(1.02, 0.03)};
    cfg.eta_tags = {SpaceTag::V};
    cfg.kappa = {cplx(0.07)};
    cfg.alpha = {cplx(0.12)};
    const QtmContext ctx(m, cfg);
    const DensityState dinf = ctx.density();
    CHECK(std::abs(trace_all(dinf.tensor) - cplx(1.0)) < 1e-12);

    const double rate_bound = std::max(
        std::abs(ctx.spec_kappa().eigenvalues(1) / ctx.spec_kappa().eigenvalues(0)),
        std::abs(ctx.spec_kappa_alpha().eigenvalues(1) / ctx.spec_kappa_alpha().eigenvalues(0)));
    std::vector<double> errs;
    for (int mm : {2, 4, 6, 8})
        errs.push_back(rel_residual(ctx.density({{SpaceTag::V, cfg.eta[0]}}, mm).tensor,
                                     dinf.tensor));
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(errs[i + 1] < errs[i]);
    const double rate = std::pow(errs.back() / errs.front(), 1.0 / 6.0);
    CHECK(rate <= rate_bound * 1.05);
}

TEST_CASE("untwisted single-site density is weight-diagonal") {
    const Model m = make_model(AlgebraId::A1);
    LatticeConfig cfg;
    cfg.N = 1;
    cfg.n = 1;
    cfg.m = -1;
    cfg.zeta = {cplx(0.95, 0.06)};
    cfg.xi = {cplx(1.22, -0.08)};
    cfg.eta = {cplx(1.0)};
    cfg.eta_tags = {SpaceTag::V};
    cfg.kappa = {cplx(0.0)};
    cfg.alpha = {cplx(0.0)};
    const DensityState ds = reduced_density(m, cfg);
    const Matrix d1 = operator_to_matrix(ds.tensor, {"site1"});
    CHECK(std::abs(d1(0, 1)) < 1e-12);
    CHECK(std::abs(d1(1, 0)) < 1e-12);
    CHECK(std::abs(d1.trace() - 1.0) < 1e-12);
}

TEST_CASE("scalar identity holds between residues at the tied parameter") {
    const Model m = make_model(AlgebraId::A1);
    for (int N : {1, 2}) {
        ColumnSpec spec;
        spec.N = N;
        spec.twist = {cplx(0.05)};
        for (int i = 0; i < N; ++i) {
            spec.zeta.push_back(cplx(0.91 + 0.2 * i, 0.07 - 0.1 * i));
            spec.xi.push_back(cplx(1.05 - 0.1 * i, 0.02 + 0.08 * i));
        }
        const VerticalOps col(m, spec);
        CHECK(tst_residue_check(m, col, spec.zeta[0]) < 1e-10);
        // inversion identity at the xi_1 point is regular and exact
        const Matrix prod = col.transfer(SpaceTag::V, spec.xi[0]) *
                            col.transfer(SpaceTag::Vstar, spec.xi[0]);
        CHECK(identity_residual(prod) < 1e-12);
    }
}

TEST_SUITE_END();
