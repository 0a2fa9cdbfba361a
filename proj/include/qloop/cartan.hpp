#ifndef QLOOP_CARTAN_HPP
#define QLOOP_CARTAN_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "qloop/rational.hpp"

namespace qloop {

enum class AlgebraId { A1, A2 };

std::string algebra_name(AlgebraId id);
AlgebraId algebra_from_name(const std::string& name);

/// Fixed data of a finite-dimensional simple Lie algebra, affine-extended.
/// Everything is exact (integers and rationals); floating point enters only
/// in the representation layer.
struct CartanData {
    int rank = 0;                                       // l
    std::vector<std::vector<long long>> cartan;         // A, l x l
    std::vector<std::vector<long long>> extended_cartan;// indices 0..l
    std::vector<long long> kac_labels;                  // a_i, i in 0..l
    std::vector<long long> dual_kac_labels;             // a^vee_i
    std::vector<long long> symmetrizers;                // d_i, coprime, D A symmetric
    RationalMatrix inverse_cartan;                      // B = A^{-1}
    Rational theta_norm;                                // (theta|theta)
    long long coxeter = 0;                              // h
    long long dual_coxeter = 0;                         // h^vee
    std::vector<long long> grading;                     // s_i, i in 0..l

    long long grading_sum() const;                      // s = sum a_i s_i
};

// Table lookup for the shipped series members. The grading defaults to the
// homogeneous one, s_i = 1 for all i.
CartanData build_cartan(AlgebraId id);
CartanData build_cartan(AlgebraId id, const std::vector<long long>& grading);

// Coefficients c_j of x = sum_j c_j h_j, where
//   x = -sum_{i,j} (2 d_i - (theta|theta) h^vee s_i / s) b_{ij} h_j.
// The conjugation operator X_V downstream is the image of q^x.
std::vector<Rational> x_coefficients(const CartanData& c);

// lambda = (theta|theta) h^vee / s; the double-dual spectral shift is q^lambda.
Rational crossing_shift(const CartanData& c);

nlohmann::json cartan_to_json(const CartanData& c);
CartanData cartan_from_json(const nlohmann::json& j);

} // namespace qloop

#endif
