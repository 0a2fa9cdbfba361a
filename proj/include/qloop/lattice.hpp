#ifndef QLOOP_LATTICE_HPP
#define QLOOP_LATTICE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"
#include "qloop/rmatrix.hpp"

namespace qloop {

/// One algebra + module + normalized R-operator family, ready for lattice
/// assembly. The crossing data (lambda, X_V) rides along because every
/// dual-turning identity needs it.
struct Model {
    CartanData cartan;
    cplx q{};
    Representation V, Vs;
    std::shared_ptr<RFamily> R;
    Rational lambda_exact{};
    double lambda = 0.0;
    Matrix X; // X_V = phi(q^x)

    std::size_t d() const { return V.dim; }
    cplx q_pow(double e) const { return std::pow(q, e); }
    Matrix twist(SpaceTag tag, const std::vector<cplx>& nu) const;
};

Model make_model(AlgebraId id, cplx q = cplx(1.3, 0.0));
Model make_model(AlgebraId id, cplx q, const std::vector<long long>& grading);

// Memory guard: environment QLOOP_MEM_MIB (default 2048) caps dense allocations.
std::size_t memory_budget_mib();
void check_budget(std::size_t complex_entries, const std::string& what);

// --- horizontal row operators ------------------------------------------------

struct Site {
    SpaceTag tag = SpaceTag::V;
    cplx eta{1.0, 0.0};
};

/// Ordered product R^{(a,xL)}(zeta|eta_L) ... R^{(a,x1)}(zeta|eta_1) on the
/// auxiliary space "a" and chain spaces "x1".."xL".
Tensor horizontal_monodromy(const Model& m, SpaceTag aux, cplx zeta,
                            const std::vector<Site>& sites);
/// Partial trace of the monodromy over the auxiliary space.
Tensor horizontal_transfer(const Model& m, SpaceTag aux, cplx zeta,
                           const std::vector<Site>& sites);
/// Homogeneous transfer matrix T_L(zeta) (aux = V) or T*_L(zeta) (aux = V*),
/// all chain inhomogeneities at 1, as a matrix on V^{(x) L}.
Matrix transfer_matrix(const Model& m, SpaceTag aux, cplx zeta, std::size_t L);

struct DerivativeOptions {
    double h1 = 1e-4; // central-difference steps on the multiplicative parameter
    double h2 = 1e-5;
    double agree_tol = 1e-6;  // Richardson pair disagreement guard
    double h_second = 1e-2;   // wide 4th-order stencil for the second derivative
};

/// Local Hamiltonian: sum over i of d/dzeta Rcheck(zeta|1)^{i,i+1} at zeta = 1
/// with the periodic wrap (L, 1).
Matrix hamiltonian(const Model& m, std::size_t L, const DerivativeOptions& opt = {});
/// Charges I_1..I_mmax = (zeta d/dzeta)^m log T_L(zeta) at zeta = 1.
/// Truncation error of the wide I_2 stencil is a polynomial in commuting
/// transfer matrices, so commutator tests are insensitive to the step.
std::vector<Matrix> charges(const Model& m, std::size_t L, int m_max, SpaceTag aux,
                            const DerivativeOptions& opt = {});

/// D_{L,N} = (T*_L(q^{beta/2N}) T_L(q^{-beta/2N}))^N / trace.
Matrix trotter_density(const Model& m, std::size_t L, int N, double beta);
/// Inhomogeneous row product (T*_L(xi_N) T_L(zeta_N)) ... (T*_L(xi_1) T_L(zeta_1)),
/// trace-normalized; the vertex-model density with explicit row parameters.
Matrix trotter_density_rows(const Model& m, std::size_t L, const std::vector<cplx>& zetas,
                            const std::vector<cplx>& xis);
/// Gibbs state exp(-beta log(q) I_1)/Z matching the Trotter limit.
Matrix gibbs_density(const Model& m, std::size_t L, double beta);

// --- vertical (quantum-transfer-matrix) operators ----------------------------

struct ColumnSpec {
    int N = 1;
    std::vector<cplx> zeta, xi; // row inhomogeneities, N each
    std::vector<cplx> twist;    // nu_1..nu_l
};

/// Column operators on the alternating space 𝒱 = (V (x) V*)^{(x) N}:
/// M^nu(eta) = R^{(2N,a)}(xi_N|eta) ... R^{(1,a)}(zeta_1|eta) (1 (x) A(nu)),
/// slots 1..2N alternating V(zeta_k), V*(xi_k); the transfer operator is the
/// auxiliary partial trace. The slot order realizes the opposite
/// comultiplication down the column.
class VerticalOps {
public:
    VerticalOps(const Model& m, ColumnSpec spec);

    std::size_t vdim() const { return vdim_; }
    const ColumnSpec& spec() const { return spec_; }

    Tensor monodromy_tensor(SpaceTag aux_tag, cplx eta) const;
    /// blocks[i*d + j] = M(eta)^i_j acting on 𝒱 (aux out = i, aux in = j).
    std::vector<Matrix> monodromy_blocks(SpaceTag aux_tag, cplx eta) const;
    const Matrix& transfer(SpaceTag aux_tag, cplx eta) const; // cached

private:
    const Model* model_;
    ColumnSpec spec_;
    std::size_t vdim_;
    std::vector<std::string> col_spaces_;
    std::vector<std::size_t> col_dims_;
    struct Key {
        int tag;
        double er, ei;
        bool operator<(const Key& o) const {
            return std::tie(tag, er, ei) < std::tie(o.tag, o.er, o.ei);
        }
    };
    mutable std::map<Key, Matrix> transfer_cache_;
};

// --- spectra ------------------------------------------------------------------

struct SpectralData {
    Vector eigenvalues;       // sorted by modulus, descending
    cplx lambda0{};
    Vector right0, left0;     // bilinear pairing, left0^T right0 = 1
    double gap = 0.0;         // (|l0| - |l1|)/|l0|
    double biorth_residual = 0.0;
};

/// Dense spectrum below dense_limit, power iteration with single deflation
/// above. Throws DegenerateDominant when the leading modulus gap is below
/// gap_tol.
SpectralData dominant_eigs(const Matrix& t, double gap_tol = 1e-6,
                           std::size_t dense_limit = 4096);

nlohmann::json spectral_to_json(const SpectralData& s);

// --- reduced density matrices ---------------------------------------------------

struct LatticeConfig {
    int N = 1;
    int n = 1;
    int m = -1; // wing width; negative = dominant-eigenvector limit
    std::vector<cplx> zeta, xi;      // N row parameters each
    std::vector<cplx> eta;           // n vertical parameters
    std::vector<SpaceTag> eta_tags;  // per site
    std::vector<cplx> kappa, alpha;  // twists, rank entries each
    double beta = 0.0;
};

LatticeConfig lattice_config_from_json(const nlohmann::json& j, int rank);
nlohmann::json lattice_config_to_json(const LatticeConfig& c);

struct DensityState {
    int n = 0;
    std::vector<SpaceTag> tags;
    std::vector<cplx> eta;
    Tensor tensor; // operator legs site1..site<n>
    std::uint64_t provenance = 0;
};

nlohmann::json density_to_json(const DensityState& d);

/// Shared context for one (N, row parameters, kappa, alpha) lattice: the two
/// twisted column families, their dominant pairs, and the density-matrix
/// assembly.
class QtmContext {
public:
    QtmContext(const Model& m, LatticeConfig cfg);

    const Model& model() const { return *model_; }
    const LatticeConfig& config() const { return cfg_; }
    const VerticalOps& column_kappa() const { return *col_kappa_; }
    const VerticalOps& column_kappa_alpha() const { return *col_ka_; }
    const SpectralData& spec_kappa() const { return spec_kappa_; }
    const SpectralData& spec_kappa_alpha() const { return spec_ka_; }
    cplx overlap() const { return overlap_; }

    /// lambda^nu_0(eta) for the kappa family (starred when tag = Vstar).
    cplx lambda0(SpaceTag column_tag, cplx eta) const;
    /// Same for the kappa+alpha family.
    cplx lambda0_alpha(SpaceTag column_tag, cplx eta) const;

    DensityState density() const; // sites from the config (m from config)
    DensityState density(const std::vector<Site>& sites, std::optional<int> m_override = {}) const;

    /// Density as a function of the last site's parameter is rational; tied
    /// parameter choices can sit exactly on crossing poles of individual
    /// column factors while the density itself stays finite. This evaluates
    /// the removable limit by a discrete Cauchy mean over a small circle
    /// around the last site's eta.
    DensityState density_analytic(const std::vector<Site>& sites,
                                  std::optional<int> m_override = {},
                                  double rel_radius = 2e-2, int points = 16) const;
    /// lambda0(tag, eta) / lambda0_alpha(tag, eta) through the same circle
    /// mean; the two families share their pole so the ratio is regular.
    cplx lambda_ratio_analytic(SpaceTag column_tag, cplx eta, double rel_radius = 2e-2,
                               int points = 16) const;

private:
    const Model* model_;
    LatticeConfig cfg_;
    std::unique_ptr<VerticalOps> col_kappa_, col_ka_;
    SpectralData spec_kappa_, spec_ka_;
    cplx overlap_{};
};

DensityState reduced_density(const Model& m, const LatticeConfig& cfg);

} // namespace qloop

#endif
