#ifndef QLOOP_TENSOR_HPP
#define QLOOP_TENSOR_HPP

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace qloop {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class LegDir { In, Out };

struct Leg {
    std::string label;
    std::size_t dim = 0;
    LegDir dir = LegDir::Out;

    bool operator==(const Leg&) const = default;
};

/// Dense complex tensor with labeled, directed legs. Data is row-major over
/// the legs in listed order. An operator on spaces s1..sn is stored with legs
/// [out s1, .., out sn, in s1, .., in sn]; the matrix element R^{ij}_{kl} of a
/// two-space operator sits at row (i,j), column (k,l).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<Leg> legs);
    Tensor(std::vector<Leg> legs, std::vector<cplx> data);

    const std::vector<Leg>& legs() const { return legs_; }
    std::size_t n_legs() const { return legs_.size(); }
    std::size_t size() const { return data_.size(); }
    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    // Position of the leg with the given label and direction; throws
    // LegMismatch if absent or ambiguous.
    std::size_t leg_index(const std::string& label, LegDir dir) const;
    bool has_leg(const std::string& label, LegDir dir) const;

    std::vector<std::size_t> dims() const;
    std::vector<std::size_t> strides() const;

    cplx at(const std::vector<std::size_t>& idx) const;
    void set(const std::vector<std::size_t>& idx, cplx v);

private:
    std::vector<Leg> legs_;
    std::vector<cplx> data_;
};

// --- graphical-calculus primitives ---------------------------------------

/// Contract b into a: each pairing entry names (out-leg of b, in-leg of a).
/// Result legs: a's legs minus the paired in-legs, then b's legs minus the
/// paired out-legs, in original order.
Tensor compose(const Tensor& a, const Tensor& b,
               const std::vector<std::pair<std::string, std::string>>& pairing);

/// P : V (x) W -> W (x) V with P^{kl}_{ij} = delta_{il} delta_{jk}.
/// Legs: [out s1 (dim d2), out s2 (dim d1), in s1 (dim d1), in s2 (dim d2)].
Tensor permutation_operator(std::size_t d1, std::size_t d2,
                            const std::string& s1 = "s1", const std::string& s2 = "s2");

/// Trace out the in/out leg pair with the given label.
Tensor partial_trace(const Tensor& t, const std::string& space);

/// Swap in <-> out for the named spaces (partial transpose); all spaces gives
/// the full transpose.
Tensor partial_transpose(const Tensor& t, const std::vector<std::string>& spaces);

// --- structural helpers ----------------------------------------------------

Tensor permute_legs(const Tensor& t, const std::vector<std::size_t>& order);
Tensor relabel(const Tensor& t, const std::map<std::string, std::string>& renames);
Tensor tensor_product(const Tensor& a, const Tensor& b);
Tensor conjugate(const Tensor& t);

// --- operator view ----------------------------------------------------------

Tensor operator_from_matrix(const std::vector<std::string>& spaces,
                            const std::vector<std::size_t>& dims, const Matrix& m);
Matrix operator_to_matrix(const Tensor& t, const std::vector<std::string>& spaces);
Tensor identity_operator(const std::vector<std::string>& spaces,
                         const std::vector<std::size_t>& dims);
/// a * b as linear maps (contract a's in-legs with b's out-legs over all
/// shared operator labels).
Tensor operator_mul(const Tensor& a, const Tensor& b);
/// Extend an operator by identities to the full ordered space list, returning
/// canonical leg order [outs..., ins...].
Tensor embed_operator(const Tensor& op, const std::vector<std::string>& spaces,
                      const std::vector<std::size_t>& dims);

// --- arithmetic -------------------------------------------------------------

Tensor operator*(cplx s, const Tensor& t);
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);

cplx trace_all(const Tensor& t); // close every in/out pair

double frobenius_norm(const Tensor& t);
/// ||a - b||_F / max(||a||_F, ||b||_F); zero-safe.
double rel_residual(const Tensor& a, const Tensor& b);
double rel_residual(const Matrix& a, const Matrix& b);
/// Deviation from the identity, relative to ||1||.
double identity_residual(const Matrix& m);
/// ||AB - BA||_F / (||A||_F ||B||_F).
double commutator_residual(const Matrix& a, const Matrix& b);

// --- serialization ----------------------------------------------------------

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

} // namespace qloop

#endif
