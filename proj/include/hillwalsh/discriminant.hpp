#pragma once

// Discriminant Delta(alpha, beta) = trace of the monodromy matrix, computed
// from the right-endpoint samples p_n = p(n tau / 2^k) of the excitation.
//
// Three routes are provided:
//   * the O(2^k) coefficient recursion (production path),
//   * back-substitution on the two upper-triangular sampling matrices,
//   * dense solves in the Walsh domain (small k only).
// All three agree up to rounding; the recursion is the only one meant for
// grid scans.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hillwalsh/excitation.hpp"

namespace hillwalsh {

enum class Method { Recursive, TriangularBacksolve, DirectInversion, Monodromy, LyapunovSeries };

std::string_view method_name(Method method);

struct DiscriminantResult {
    double delta = 0.0;
    Method method = Method::Recursive;
    long order = 0;  // k for the Walsh routes, step count or quadrature points otherwise
    bool singular_flag = false;
    std::optional<std::size_t> singular_index;  // 1-based sample index
};

inline constexpr int kMinRecursionOrder = 2;
inline constexpr int kMaxRecursionOrder = 20;
inline constexpr int kMaxTriangularOrder = 12;
inline constexpr int kMaxDirectOrder = 8;

/// Relative threshold on 2^(2k+2) + tau^2 q_n below which a sample is singular.
inline constexpr double kSingularityTolerance = 1e-12;

struct RecursionCoefficients {
    double psi = 0.0;  // 4 tau^2 / (2^(2k+2) + tau^2 xi)
    double xi = 0.0;   // alpha + beta p_{2^k - h}
    double mu = 0.0;   // alpha + beta (p_{2^k-h} + p_{2^k-h+1}) / 2
};

/// Coefficients for step h in [1, 2^k - 1]. Throws SingularityError when the
/// psi denominator vanishes.
RecursionCoefficients coefficients_psi_xi_mu(const HillProblem& problem, int k, std::size_t h);

/// Every stream produced by the recursion, for diagnostics and tests.
struct RecursionState {
    int k = 0;
    double delta_step = 0.0;      // tau / 2^k
    std::vector<double> samples;  // p_1 .. p_{2^k}
    std::vector<double> b, c;     // b_n, c_n for n = 0 .. 2^k - 1
    std::vector<double> S, Z;     // running sums of b and c
    std::vector<double> cum_S;    // cum_S[n] = sum_{i<n} S_i
    std::vector<double> mu_prefix;   // mu_prefix[n] = sum_{j=1..n} mu_j
    std::vector<double> c_mu_prefix; // c_mu_prefix[n] = sum_{i<n} c_i mu_prefix[i]
    double delta = 0.0;
};

/// First 1-based n with |2^(2k+2) + tau^2 (alpha + beta p_n)| < tol * 2^(2k+2).
std::optional<std::size_t> singularity_guard(const HillProblem& problem, int k);
std::optional<std::size_t> singularity_guard(std::span<const double> samples, double alpha,
                                             double beta, double tau, int k);

/// Hot path: Delta from precomputed samples (length 2^k) in O(2^k) with O(1)
/// memory. Throws SingularityError or NumericError.
double recursive_delta(std::span<const double> samples, double alpha, double beta, double tau);

RecursionState recursion_state(const HillProblem& problem, int k);

DiscriminantResult discriminant_recursive(const HillProblem& problem, int k);

/// Literal nested-sum evaluation of the b/c formulas, O(8^k). Equivalence
/// oracle for the running-sum kernel; keep k small.
double recursive_delta_naive(std::span<const double> samples, double alpha, double beta, double tau);

/// Last column of U^-1 for nonsingular upper-triangular U, top to bottom.
/// Throws SingularityError if a diagonal entry is below tol * max|U|.
Eigen::VectorXd last_column_of_inverse(const Eigen::MatrixXd& upper, double tol = 1e-14);

struct SamplingMatrixInverses {
    Eigen::MatrixXd gamma_bar_inv;    // I + (tau^2 s^2) diag(q) Pbar^2
    Eigen::MatrixXd gamma_p_bar_inv;  // I + (tau^2 s^2) (alpha Pbar^2 + beta Pbar diag(p) Pbar)
};

/// Dense triangular matrices whose inverses are the discriminant sampling
/// matrices. `scale_perturbation` multiplies the similarity scale s; it is a
/// negative-control hook and must stay 1 in normal use.
SamplingMatrixInverses sampling_matrix_inverses(const HillProblem& problem, int k,
                                                double scale_perturbation = 1.0);

DiscriminantResult discriminant_triangular(const HillProblem& problem, int k,
                                           double scale_perturbation = 1.0);

/// Dense Walsh-domain route: Gamma = (I + tau^2 (alpha I + beta Lambda_r) P^2)^-1.
/// Throws NumericError carrying the reciprocal condition estimate when the
/// system is ill-conditioned.
DiscriminantResult discriminant_direct(const HillProblem& problem, int k);

/// x1(t_n) + x2'(t_n) at t_n = n tau / 2^k, n in [1, 2^k].
double transition_sample(const HillProblem& problem, int k, std::size_t n);

}  // namespace hillwalsh
