#ifndef QLOOP_RMATRIX_HPP
#define QLOOP_RMATRIX_HPP

#include <map>
#include <memory>
#include <utility>

#include "qloop/rep.hpp"
#include "qloop/tensor.hpp"

namespace qloop {

/// Two-space R-operator. The matrix acts on the tensor product in the fixed
/// leg convention: row index (out1, out2), column index (in1, in2), both
/// flattened row-major.
struct ROperator {
    SpaceTag tag1 = SpaceTag::V, tag2 = SpaceTag::V;
    cplx zeta{}, eta{};
    std::size_t dim1 = 0, dim2 = 0;
    Matrix mat;
    bool normalized = false;

    Tensor to_tensor(const std::string& s1, const std::string& s2) const;
    Matrix rcheck() const; // P * R, the braid form
};

struct IntertwinerDiagnostics {
    double smin = 0.0;  // smallest singular value of the stacked system
    double snext = 0.0; // next one up; the simplicity gap
    double smax = 0.0;
    int null_dim = 0;
};

/// Solve R (phi_zeta x psi_eta)(Delta(a)) = (phi_zeta x psi_eta)(Delta'(a)) R
/// over all Chevalley generators and the q^{h_i} family; returns the
/// one-dimensional null-space representative scaled so its largest entry is 1.
ROperator solve_intertwiner(const Representation& r1, const Representation& r2, cplx zeta,
                            cplx eta, IntertwinerDiagnostics* diag = nullptr);

/// Fix the scalar freedom of a V|V pair: divide by the highest-weight corner
/// entry. The top vector v0 (x) v0 spans its weight space, so the corner
/// normalization makes Rcheck(zeta|eta) Rcheck(eta|zeta) = 1 and
/// R(zeta|zeta) = +P, and it is continuous in zeta/eta.
std::pair<ROperator, ROperator> normalize_pair(const ROperator& raw,
                                               const ROperator& raw_swapped);

struct DualROperators {
    ROperator vstar_v;    // (R^{-1})^{t1}
    ROperator v_vstar;    // (R^{t2})^{-1}
    ROperator vstar_vstar;// R^t
};
DualROperators dual_r_operators(const ROperator& base);

/// Relative Frobenius residual of R12 R13 R23 - R23 R13 R12 on three spaces.
double check_ybe(const ROperator& r12, const ROperator& r13, const ROperator& r23);

// Partial transposes of a two-space operator matrix.
Matrix ptranspose1(const Matrix& m, std::size_t d1, std::size_t d2);
Matrix ptranspose2(const Matrix& m, std::size_t d1, std::size_t d2);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix permutation_matrix(std::size_t d1, std::size_t d2);

/// Cached, consistently normalized R-operator family for one module and its
/// antipode dual. All dual-tagged operators derive from the V|V family via
/// the normalized crossing relations, so a single scalar convention threads
/// every identity downstream.
class RFamily {
public:
    explicit RFamily(Representation base_v);

    const Representation& rep(SpaceTag t) const;
    std::size_t d() const { return v_.dim; }
    cplx q() const { return v_.q; }

    const ROperator& get(SpaceTag t1, SpaceTag t2, cplx zeta, cplx eta) const;
    Matrix r(SpaceTag t1, SpaceTag t2, cplx zeta, cplx eta) const;
    Matrix rcheck(SpaceTag t1, SpaceTag t2, cplx zeta, cplx eta) const;

    int perturbation_count() const { return perturbations_; }

private:
    const ROperator& base(cplx zeta, cplx eta) const;

    Representation v_, vs_;
    struct Key {
        int t1, t2;
        double zr, zi, er, ei;
        bool operator<(const Key& o) const;
    };
    mutable std::map<Key, ROperator> cache_;
    mutable int perturbations_ = 0;
};

struct CrossingCheck {
    cplx D{};            // scalar in the double-dual crossing relation
    double residual_i;   // scalar-consistency of the V|V form
    double residual_ii;  // scalar-consistency of the V|V* form with D^{-1}
    double d_mismatch;   // relative gap between the two D extractions
};

/// Verify (X_V x 1) R_{V|V}(q^{-lambda} zeta | eta) (X_V^{-1} x 1) =
/// D(zeta|eta) (R_{V*|V}(zeta|eta)^{-1})^{t1} and the companion V|V* relation
/// with D^{-1}; returns the extracted D and the residuals.
CrossingCheck check_crossing_c(const RFamily& family, const Matrix& x_v, double lambda,
                               cplx zeta, cplx eta, double tol = 1e-6);

} // namespace qloop

#endif
