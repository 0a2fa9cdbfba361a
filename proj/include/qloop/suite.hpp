#ifndef QLOOP_SUITE_HPP
#define QLOOP_SUITE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "qloop/rqkz.hpp"

namespace qloop {

struct Tolerances {
    double relations = 1e-10;
    double ybe = 1e-10;
    double unitarity = 1e-10;       // urn and the mixed forms
    double initial_condition = 1e-12;
    double crossing = 1e-9;         // ccni/ccnii scalar consistency and shared D
    double scaling = 1e-10;         // zeta/eta-ratio dependence of R and D
    double transfer_comm = 1e-8;
    double charge_comm = 1e-8;
    double shift_product = 1e-10;
    double locality = 1e-6;         // H_L vs I_1
    double trotter_ratio_lo = 1.6;  // expected error(N)/error(2N) window
    double trotter_ratio_hi = 2.4;
    double tst = 1e-8;
    double inversion = 1e-8;        // T(xi_1) T*(xi_1) = 1
    double column_comm = 1e-9;
    double density_trace = 1e-10;
    double rqkz = 1e-8;             // andnf/bndnf (1e-7 for A2 runs)
};

struct ReportRow {
    std::string id;       // identity anchor: "urn", "tst", "andnf", ...
    std::string algebra;
    nlohmann::json params;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool has_residual = true; // false for label-only rows (limit forms)
    double wall_ms = 0.0;
    std::string note;
};

struct ReportBundle {
    std::vector<ReportRow> rows;
    bool all_pass() const;
    nlohmann::json to_json() const;
};

struct SuiteConfig {
    AlgebraId algebra = AlgebraId::A1;
    cplx q{1.3, 0.0};
    std::vector<long long> grading; // empty = homogeneous
    std::string suite = "all";      // relations | rmatrix | lattice | rqkz | all
    std::uint64_t seed = 20260809;
    std::size_t L = 4;              // horizontal chain length
    double beta = 0.5;
    std::vector<int> trotter_n = {4, 8, 16};
    LatticeConfig lattice;          // vertical lattice; empty arrays are seeded
    Tolerances tol;
    std::string out_dir;
};

SuiteConfig suite_config_from_json(const nlohmann::json& j);
nlohmann::json suite_config_to_json(const SuiteConfig& c);

/// Deterministic generic parameters for any config arrays left empty.
void fill_default_parameters(SuiteConfig& cfg);

ReportBundle run_suite(const SuiteConfig& cfg);

// Individual check groups (used by run_suite and the acceptance driver).
std::vector<ReportRow> check_relations(const Model& m, const Tolerances& tol);
std::vector<ReportRow> check_rmatrix(const Model& m, std::uint64_t seed, const Tolerances& tol);
std::vector<ReportRow> check_lattice(const Model& m, const SuiteConfig& cfg);
std::vector<ReportRow> check_rqkz(const Model& m, const SuiteConfig& cfg);

/// Residue form of the tied scalar identity: both sides of
/// T*(q^lambda eta) T(eta) = prod_i D^{-1}(q^lambda eta|zeta_i) D(q^lambda eta|xi_i)
/// have a simple pole at eta = zeta_1; their circle-extracted residues must
/// agree as scalar times identity.
double tst_residue_check(const Model& m, const VerticalOps& col, cplx zeta1,
                         double rel_radius = 2e-2, int points = 16);

struct ConvergencePoint {
    int n = 0;
    double error = 0.0;
};

/// ||D_{L,N} - exp(-beta log q I_1)/Z||_F for the given Trotter numbers.
std::vector<ConvergencePoint> trotter_convergence(const Model& m, std::size_t L, double beta,
                                                  const std::vector<int>& ns);

/// Columns N, error, ratio(error_N / error_2N); plot-ready.
void emit_convergence(const std::vector<ConvergencePoint>& series, std::ostream& csv,
                      nlohmann::json& out);

void write_reports(const ReportBundle& bundle, const std::string& out_dir);

} // namespace qloop

#endif
