#include "doctest.h"

#include "qloop/errors.hpp"
#include "qloop/rep.hpp"

using namespace qloop;

TEST_SUITE_BEGIN("rep");

TEST_CASE("fundamental modules satisfy the defining relations") {
    for (auto id : {AlgebraId::A1, AlgebraId::A2}) {
        const CartanData c = build_cartan(id);
        const Representation r = evaluation_rep(c, RepId::Fund, cplx(1.3));
        CHECK(r.dim == static_cast<std::size_t>(c.rank + 1));
        const RelationReport report = check_defining_relations(r);
        CHECK(report.max_residual < 1e-12);
    }
}

TEST_CASE("commutator relation matches the q-weight formula directly") {
    const Representation r = evaluation_rep(build_cartan(AlgebraId::A1), RepId::Fund, cplx(1.3));
    const Matrix lhs = r.gen_e[1] * r.gen_f[1] - r.gen_f[1] * r.gen_e[1];
    const cplx q = r.q;
    const Matrix rhs = (r.q_pow_h(1, 1.0) - r.q_pow_h(1, -1.0)) / (q - 1.0 / q);
    CHECK((lhs - rhs).norm() < 1e-14);
}

TEST_CASE("perturbed generator fails the report") {
    Representation r = evaluation_rep(build_cartan(AlgebraId::A1), RepId::Fund, cplx(1.3));
    r.gen_e[1](1, 0) += 1e-3;
    const RelationReport report = check_defining_relations(r);
    CHECK_FALSE(report.pass(1e-10));
    double djrc = 0.0;
    for (const auto& item : report.items)
        if (item.id == "djrc") djrc = std::max(djrc, item.residual);
    CHECK(djrc > 1e-4);
    CHECK(djrc < 1e-2);
}

TEST_CASE("trivial one-dimensional module passes") {
    const CartanData c = build_cartan(AlgebraId::A1);
    Representation r;
    r.algebra = c;
    r.dim = 1;
    r.q = cplx(1.3);
    r.gen_e.assign(2, Matrix::Zero(1, 1));
    r.gen_f.assign(2, Matrix::Zero(1, 1));
    r.weights.assign(2, {0});
    CHECK(check_defining_relations(r).max_residual < 1e-14);
}

TEST_CASE("grading automorphism scaling") {
    const Representation r = evaluation_rep(build_cartan(AlgebraId::A2), RepId::Fund, cplx(1.3));
    const cplx z1(1.7, 0.1), z2(0.6, -0.2);
    for (int i = 0; i <= 2; ++i) {
        CHECK((gen_image(r, {GenKind::E, i}, cplx(1.0)) - r.gen_e[i]).norm() == 0.0);
        const Matrix a = gen_image(r, {GenKind::E, i}, z1 * z2);
        const Matrix b = std::pow(z1, 1.0) * gen_image(r, {GenKind::E, i}, z2);
        CHECK((a - b).norm() < 1e-14 * std::max(1.0, b.norm()));
        // q^h family sits in grade zero
        CHECK((gen_image(r, {GenKind::QH, i}, z1) - gen_image(r, {GenKind::QH, i}, z2)).norm() ==
              0.0);
    }
}

TEST_CASE("duals pass the relations and match the antipode images") {
    for (auto id : {AlgebraId::A1, AlgebraId::A2}) {
        const Representation r = evaluation_rep(build_cartan(id), RepId::Fund, cplx(1.3));
        for (auto variant : {AntipodeVariant::S, AntipodeVariant::SInv}) {
            const Representation d = dual_rep(r, variant);
            CHECK(d.tag == SpaceTag::Vstar);
            CHECK(check_defining_relations(d).max_residual < 1e-12);
        }
    }
    // S(e_i) = -q_i^{-h_i} e_i, transposed
    const Representation r = evaluation_rep(build_cartan(AlgebraId::A1), RepId::Fund, cplx(1.3));
    const Representation d = dual_rep(r);
    const Matrix expect = Matrix((-(r.q_pow_h(1, -1.0) * r.gen_e[1])).transpose());
    CHECK((d.gen_e[1] - expect).norm() < 1e-15);
}

TEST_CASE("dual of the trivial module is itself") {
    const CartanData c = build_cartan(AlgebraId::A1);
    Representation r;
    r.algebra = c;
    r.dim = 1;
    r.q = cplx(1.3);
    r.gen_e.assign(2, Matrix::Zero(1, 1));
    r.gen_f.assign(2, Matrix::Zero(1, 1));
    r.weights.assign(2, {0});
    const Representation d = dual_rep(r);
    CHECK((d.gen_e[1] - r.gen_e[1]).norm() == 0.0);
    CHECK(d.weights == r.weights);
}

TEST_CASE("group-like twists") {
    const Representation r = evaluation_rep(build_cartan(AlgebraId::A1), RepId::Fund, cplx(1.3));
    CHECK((group_like_twist(r, {cplx(0.0)}) - Matrix::Identity(2, 2)).norm() == 0.0);

    const Matrix a = group_like_twist(r, {cplx(0.2)});
    CHECK(std::abs(a(0, 0) - std::pow(cplx(1.3), 0.2)) < 1e-15);
    CHECK(std::abs(a(1, 1) - std::pow(cplx(1.3), -0.2)) < 1e-15);

    const std::vector<cplx> n1 = {cplx(0.3, 0.1)}, n2 = {cplx(-0.7, 0.2)};
    const Matrix prod = group_like_twist(r, n1) * group_like_twist(r, n2);
    const Matrix sum = group_like_twist(r, {n1[0] + n2[0]});
    CHECK((prod - sum).norm() / sum.norm() < 1e-14);
}

TEST_CASE("conjugation operator") {
    // homogeneous grading: x = 0 for both shipped algebras
    for (auto id : {AlgebraId::A1, AlgebraId::A2}) {
        const Representation r = evaluation_rep(build_cartan(id), RepId::Fund, cplx(1.3));
        const Matrix x = x_operator(r);
        CHECK((x - Matrix::Identity(r.dim, r.dim)).norm() < 1e-15);
    }
    // spin-like grading: x = -h_1
    const Representation r =
        evaluation_rep(build_cartan(AlgebraId::A1, {1, 0}), RepId::Fund, cplx(1.3));
    const Matrix x = x_operator(r);
    CHECK(std::abs(x(0, 0) - 1.0 / 1.3) < 1e-15);
    CHECK(std::abs(x(1, 1) - 1.3) < 1e-15);
    const Matrix a = group_like_twist(r, {cplx(0.37, -0.11)});
    CHECK(commutator_residual(x, a) < 1e-15);
}

TEST_CASE("deformation parameter guards") {
    const CartanData c = build_cartan(AlgebraId::A1);
    CHECK_THROWS_WITH_AS(evaluation_rep(c, RepId::Fund, std::polar(1.0, 0.4)),
                         doctest::Contains("BadDeformation"), Error);
    CHECK_THROWS_WITH_AS(evaluation_rep(c, RepId::Fund, cplx(0.0)),
                         doctest::Contains("BadDeformation"), Error);
    CHECK_NOTHROW(evaluation_rep(c, RepId::Fund, std::polar(1.0, 0.4), true));
}

TEST_SUITE_END();
