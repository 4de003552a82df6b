#pragma once

// Reference discriminants that do not go through the Walsh machinery:
// RK4 monodromy, closed forms for constant and piecewise-constant q, and the
// alternating multiple-integral series.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hillwalsh/excitation.hpp"

namespace hillwalsh {

inline constexpr long kMinMonodromySteps = 64;

struct MonodromyResult {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    double trace = 0.0;
    double det = 0.0;
    std::complex<double> rho1, rho2;  // roots of rho^2 - trace rho + 1
    long steps = 0;
};

/// Fixed-step RK4 for z' = [[0,1],[-q,0]] z over one period. Step boundaries
/// are forced onto the excitation's jump points, so `steps` is distributed
/// over the smooth segments and the reported count may differ slightly.
/// Throws NumericError on blow-up.
MonodromyResult monodromy(const HillProblem& problem, long steps);

/// Same integrator with p precomputed at every stage time, so many (alpha,
/// beta) pairs sharing an excitation and tau cost only the arithmetic.
class MonodromyIntegrator {
public:
    MonodromyIntegrator(const Excitation& excitation, double tau, long steps);

    Eigen::Matrix2d matrix(double alpha, double beta) const;
    double delta(double alpha, double beta) const;
    long steps() const noexcept { return static_cast<long>(h_.size()); }

private:
    // per step: width and p at the start, middle and end of the step
    std::vector<double> h_;
    std::vector<double> p0_, pm_, p1_;
};

/// 2cos(tau sqrt(alpha)) or 2cosh(tau sqrt(-alpha)).
double constant_coeff_delta(double alpha, double tau);

/// Trace of the product of exact constant-q propagators, first level first.
/// Each entry is (q value, duration > 0).
double piecewise_constant_delta(const std::vector<std::pair<double, double>>& levels);

/// Levels (q, duration) of a piecewise-constant problem over one period.
/// Throws DomainError for smooth excitations.
std::vector<std::pair<double, double>> constant_levels(const HillProblem& problem);

inline constexpr int kMinLyapunovPoints = 32;

struct LyapunovSeries {
    std::vector<double> terms;         // A_0 = 2, A_1, ..., A_nmax
    std::vector<double> partial_sums;  // A_0, A_0 - A_1, A_0 - A_1 + A_2, ...
    int quad_points = 0;               // per dimension

    double delta() const { return partial_sums.back(); }
};

/// Simplex integrals with composite Gauss-Legendre per dimension (panels of
/// 8 nodes; quad_points is rounded up to a multiple of 8). n_max in [0,3].
LyapunovSeries lyapunov_terms(const HillProblem& problem, int n_max, int quad_points = 64);

struct ExpansionReport {
    int k = 0;
    int order = 0;
    double step = 0.0;                 // tau / 2^k
    std::vector<double> terms;         // expanded coefficients: 2, A_1, ..., A_order
    double expansion = 0.0;            // alternating sum of terms
    double corollary = 0.0;            // S + Z from the un-expanded integral recursion
    std::vector<double> recursion_terms;  // recursion split by the number of psi factors
    double recursion_truncated = 0.0;
    double recursion = 0.0;            // full discriminant_recursive value
    double gap_truncated = 0.0;        // |expansion - recursion_truncated|
    double gap_full = 0.0;             // |corollary - recursion|
};

/// Builds the partial-period integrals of q by quadrature, expands S and Z in
/// powers of tau / 2^k up to `order` term by term, and compares with the
/// recursion truncated at the same order. O(8^k) at order 3; k in [2,6].
ExpansionReport delta_power_expansion_check(const HillProblem& problem, int k, int order);

}  // namespace hillwalsh
