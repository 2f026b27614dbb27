#pragma once

// Soft-margin linear SVM trained by sequential minimal optimization.
//
// Dual problem:  max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j <x_i, x_j>
//                s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0
// Decision:      f(x) = <w, x> + b,  w = sum(a_i y_i x_i)

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "attrforge/features.hpp"

namespace attrforge {

struct SvmParams {
    double c = 1.0;
    double tol = 1e-3;
    double eps = 1e-8;
    std::size_t max_passes = 50;

    // Throws std::invalid_argument unless every field is positive.
    void validate() const;

    friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    SvmParams params;
    std::size_t n_support = 0;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct SmoSolution {
    SvmModel model;
    std::vector<double> alphas;
    std::size_t sweeps = 0;
};

// dimension == 0 infers the feature space from the largest column seen.
// Throws std::invalid_argument on size mismatch, labels other than +-1, a
// single label class, or an empty feature space.
SmoSolution solve_smo(std::span<const SparseVector> xs, std::span<const int> ys,
                      const SvmParams& params, std::size_t dimension = 0);

SvmModel train_binary(std::span<const SparseVector> xs, std::span<const int> ys,
                      const SvmParams& params, std::size_t dimension = 0);

// w.x + b. Throws std::out_of_range if a column is outside the weight vector.
double decision_value(const SvmModel& model, const SparseVector& x);

double dot(const SparseVector& a, const SparseVector& b);

// Dual objective of a feasible alpha vector.
double dual_objective(std::span<const double> alphas, std::span<const SparseVector> xs,
                      std::span<const int> ys);

struct KktViolation {
    std::size_t index = 0;
    double alpha = 0.0;
    double margin = 0.0;  // y_i * f(x_i)
};

// Every i breaking: a=0 => yf >= 1-tol; 0<a<C => |yf-1| <= tol; a=C => yf <= 1+tol.
std::vector<KktViolation> check_kkt(const SvmModel& model, std::span<const double> alphas,
                                    std::span<const SparseVector> xs, std::span<const int> ys,
                                    double tol);

}  // namespace attrforge
