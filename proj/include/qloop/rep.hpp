#ifndef QLOOP_REP_HPP
#define QLOOP_REP_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "qloop/cartan.hpp"
#include "qloop/tensor.hpp"

namespace qloop {

enum class SpaceTag { V, Vstar };
enum class RepId { Fund };
enum class AntipodeVariant { S, SInv };

std::string tag_name(SpaceTag t);
SpaceTag tag_from_name(const std::string& s);

enum class GenKind { E, F, QH };
struct Generator {
    GenKind kind;
    int index; // 0..l
};

/// A finite-dimensional module of the quantum loop algebra, given by the
/// images of all Chevalley generators together with the integer weight of
/// every basis vector under each h_i. The affine node is realized through
/// h_0 = K - theta^vee with K acting by zero, so q^{nu K} is the identity.
struct Representation {
    CartanData algebra;
    std::size_t dim = 0;
    cplx q{};
    SpaceTag tag = SpaceTag::V;
    std::vector<Matrix> gen_e; // i in 0..l
    std::vector<Matrix> gen_f;
    std::vector<std::vector<long long>> weights; // weights[i][k] = <basis k | h_i>, i in 0..l

    // Image of q^{c . h} for exponent coefficients over h_1..h_l (diagonal).
    Matrix q_power(const std::vector<cplx>& coeffs) const;
    // Image of q^{c h_i}, i in 0..l.
    Matrix q_pow_h(int i, cplx c) const;
    // q_i^{h_i} = q^{d_i h_i}.
    Matrix q_h_i(int i) const;
};

/// First fundamental evaluation module (dim l+1 for the A series) at zeta = 1.
Representation evaluation_rep(const CartanData& c, RepId id, cplx q,
                              bool allow_unit_modulus = false);

/// phi_zeta(g) = phi(Gamma_zeta(g)): e_i scales by zeta^{s_i}, f_i by
/// zeta^{-s_i}, the q^x family is grade zero.
Matrix gen_image(const Representation& r, const Generator& g, cplx zeta);

struct RelationReport {
    struct Item {
        std::string id; // djra / djrb / djrc / djrd
        std::string detail;
        double residual;
    };
    std::vector<Item> items;
    double max_residual = 0.0;
    bool pass(double tol = 1e-10) const { return max_residual <= tol; }
};

RelationReport check_defining_relations(const Representation& r);

/// Dual module: phi*(a) = phi(S(a))^t (variant S), or with S^{-1}.
Representation dual_rep(const Representation& r, AntipodeVariant variant = AntipodeVariant::S);

/// A(nu) = phi(q^{sum nu_i h_i}); diagonal in the weight basis, and a
/// homomorphism in nu: A(nu1 + nu2) = A(nu1) A(nu2).
Matrix group_like_twist(const Representation& r, const std::vector<cplx>& nu);

/// X_V = phi(q^x) with x from cartan::x_coefficients.
Matrix x_operator(const Representation& r);

nlohmann::json rep_to_json(const Representation& r);

} // namespace qloop

#endif
