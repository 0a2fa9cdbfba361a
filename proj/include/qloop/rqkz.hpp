#ifndef QLOOP_RQKZ_HPP
#define QLOOP_RQKZ_HPP

#include "qloop/lattice.hpp"

namespace qloop {

/// Density-matrix-shaped operator with per-site tags and parameters; the
/// images of the difference superoperators are of this shape but are not
/// trace-normalized.
struct DensityLike {
    Tensor tensor; // operator legs site1..site<n>
    std::vector<SpaceTag> tags;
    std::vector<cplx> eta;
};

DensityLike as_density_like(const DensityState& d);

/// Lift of an invertible F on V to the operator on V (x) V* with components
/// lifted[(a,b),(c,d)] = (F^{-1})_{ab} F_{dc}; rank one by construction.
/// lift of the identity is the canonical insertion used by the second
/// difference equation.
Matrix lift_operator(const Matrix& f);

/// First superoperator: close the last-site line through the alpha-twisted
/// auxiliary space with the X_V lift inserted. Input sites all carry V; the
/// output last site carries V* at q^lambda eta_n.
DensityLike apply_A_n(const Model& m, const DensityLike& d, const std::vector<cplx>& alpha);

/// Second superoperator: same contraction pattern through a dual auxiliary
/// line with the identity lift; the starred last site comes back to V.
DensityLike apply_B_n(const Model& m, const DensityLike& d, const std::vector<cplx>& alpha);

struct EquationCheck {
    double residual = 0.0;
    cplx prefactor{};        // dominant-eigenvalue ratio applied to the image
    cplx prefactor_trace{};  // empirical trace-ratio extraction
    double prefactor_gap = 0.0;
    double trace_gap = 0.0;  // |tr(lhs) - tr(rhs)| after the prefactor
};

/// Finite Trotter number first equation at eta_n = zeta_1:
///   (lambda0^k / lambda0^{k+a})(zeta_1) A_n(D(.., zeta_1)) = D(.., (q^lambda zeta_1)*).
EquationCheck verify_first_equation(const Model& m, const LatticeConfig& cfg);

/// Finite Trotter number second equation at eta_n = xi_1:
///   (lambda*^k / lambda*^{k+a})(xi_1) B_n(D(.., xi_1*)) = D(.., xi_1).
EquationCheck verify_second_equation(const Model& m, const LatticeConfig& cfg);

struct FullEquationCheck {
    EquationCheck composed;       // B_n after A_n against the shifted density
    double first_residual = 0.0;  // the two halves on the same configuration
    double second_residual = 0.0;
    double double_trace_residual = 0.0; // literal two-auxiliary-trace formula vs composition
};

/// Full difference equation with eta_n = zeta_1 and xi_1 = q^lambda zeta_1
/// (the compatible parameter choice); the composed residual is reported next
/// to the residuals of the two halves.
FullEquationCheck verify_full_equation(const Model& m, const LatticeConfig& cfg);

} // namespace qloop

#endif
