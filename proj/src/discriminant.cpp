#include "hillwalsh/discriminant.hpp"

#include <bit>
#include <cmath>

#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"
#include "hillwalsh/walsh.hpp"

namespace hillwalsh {

std::string_view method_name(Method method) {
    switch (method) {
        case Method::Recursive: return "recursive";
        case Method::TriangularBacksolve: return "triangular";
        case Method::DirectInversion: return "direct";
        case Method::Monodromy: return "monodromy";
        case Method::LyapunovSeries: return "lyapunov";
    }
    return "unknown";
}

namespace {

void check_range(int k, int lo, int hi, const char* what) {
    if (k < lo || k > hi) {
        throw SizeError(std::string(what) + ": order exponent k=" + std::to_string(k) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

int order_of(std::span<const double> samples) {
    if (samples.size() < 4 || !std::has_single_bit(samples.size())) {
        throw SizeError("sample vector length " + std::to_string(samples.size()) +
                        " is not a power of two >= 4");
    }
    return std::countr_zero(samples.size());
}

[[noreturn]] void throw_singular(std::size_t n, double alpha, double beta, double tau, int k) {
    throw SingularityError(
        n, "alpha + beta*p_n = -2^(2k+2)/tau^2 (within tolerance) at n=" + std::to_string(n) +
               " for alpha=" + format_shortest(alpha) + " beta=" + format_shortest(beta) +
               " tau=" + format_shortest(tau) + " k=" + std::to_string(k));
}

void check_finite(double delta, const char* what) {
    if (!std::isfinite(delta)) throw NumericError(std::string(what) + ": running sums overflowed");
}

struct NoRecord {
    void operator()(std::size_t, double, double, double, double, double, double, double) const {}
};

// Running-sum form: b_n needs sum_{i<n} S_i, c_n needs
// Mcum(n) Z_{n-1} - sum_{i<n} c_i Mcum(i); both are carried forward.
template <class Recorder>
double run_recursion(std::span<const double> samples, double alpha, double beta, double tau,
                     Recorder&& record) {
    const int k = order_of(samples);
    if (auto bad = singularity_guard(samples, alpha, beta, tau, k)) {
        throw_singular(*bad, alpha, beta, tau, k);
    }
    const std::size_t n_total = samples.size();
    const double big = std::ldexp(1.0, 2 * k + 2);
    const double tau2 = tau * tau;
    auto p = [&](std::size_t n) { return samples[n - 1]; };

    const double first = big / (big + tau2 * (alpha + beta * p(n_total)));
    double s_sum = first;
    double z_sum = first;
    double cum_s = 0.0;
    double mu_cum = 0.0;
    double c_mu = 0.0;
    record(0, first, first, s_sum, z_sum, cum_s, mu_cum, c_mu);
    cum_s += s_sum;

    for (std::size_t n = 1; n < n_total; ++n) {
        const double pa = p(n_total - n);
        const double pb = p(n_total - n + 1);
        const double xi = alpha + beta * pa;
        const double psi = 4.0 * tau2 / (big + tau2 * xi);
        const double mu = alpha + 0.5 * beta * (pa + pb);
        const double bn = -psi * xi * cum_s;
        mu_cum += mu;
        const double cn = -psi * (mu_cum * z_sum - c_mu);
        s_sum += bn;
        z_sum += cn;
        record(n, bn, cn, s_sum, z_sum, cum_s, mu_cum, c_mu);
        cum_s += s_sum;
        c_mu += cn * mu_cum;
    }
    return s_sum + z_sum;
}

}  // namespace

std::optional<std::size_t> singularity_guard(std::span<const double> samples, double alpha,
                                             double beta, double tau, int k) {
    const double big = std::ldexp(1.0, 2 * k + 2);
    const double tau2 = tau * tau;
    for (std::size_t n = 1; n <= samples.size(); ++n) {
        const double denom = big + tau2 * (alpha + beta * samples[n - 1]);
        if (!(std::abs(denom) >= kSingularityTolerance * big)) return n;
    }
    return std::nullopt;
}

std::optional<std::size_t> singularity_guard(const HillProblem& problem, int k) {
    const auto samples = sample_p(problem, k);
    return singularity_guard(samples, problem.alpha, problem.beta, problem.tau, k);
}

RecursionCoefficients coefficients_psi_xi_mu(const HillProblem& problem, int k, std::size_t h) {
    check_range(k, 1, kMaxRecursionOrder, "coefficients_psi_xi_mu");
    const std::size_t n_total = std::size_t{1} << k;
    if (h < 1 || h >= n_total) {
        throw DomainError("coefficients_psi_xi_mu: h=" + std::to_string(h) + " outside [1, 2^k - 1]");
    }
    const double big = std::ldexp(1.0, 2 * k + 2);
    const double tau2 = problem.tau * problem.tau;
    const double step = 1.0 / static_cast<double>(n_total);
    const double pa = problem.excitation.at_phase(static_cast<double>(n_total - h) * step);
    const double pb = problem.excitation.at_phase(static_cast<double>(n_total - h + 1) * step);
    RecursionCoefficients out;
    out.xi = problem.alpha + problem.beta * pa;
    const double denom = big + tau2 * out.xi;
    if (!(std::abs(denom) >= kSingularityTolerance * big)) {
        throw_singular(n_total - h, problem.alpha, problem.beta, problem.tau, k);
    }
    out.psi = 4.0 * tau2 / denom;
    out.mu = problem.alpha + 0.5 * problem.beta * (pa + pb);
    return out;
}

double recursive_delta(std::span<const double> samples, double alpha, double beta, double tau) {
    const double delta = run_recursion(samples, alpha, beta, tau, NoRecord{});
    check_finite(delta, "recursive_delta");
    return delta;
}

RecursionState recursion_state(const HillProblem& problem, int k) {
    check_range(k, kMinRecursionOrder, kMaxRecursionOrder, "recursion_state");
    RecursionState st;
    st.k = k;
    st.delta_step = problem.tau / std::ldexp(1.0, k);
    st.samples = sample_p(problem, k);
    const std::size_t n = st.samples.size();
    for (auto* v : {&st.b, &st.c, &st.S, &st.Z, &st.cum_S, &st.mu_prefix, &st.c_mu_prefix}) {
        v->resize(n);
    }
    st.delta = run_recursion(st.samples, problem.alpha, problem.beta, problem.tau,
                             [&](std::size_t i, double b, double c, double s, double z, double cum_s,
                                 double mu_cum, double c_mu) {
                                 st.b[i] = b;
                                 st.c[i] = c;
                                 st.S[i] = s;
                                 st.Z[i] = z;
                                 st.cum_S[i] = cum_s;
                                 st.mu_prefix[i] = mu_cum;
                                 st.c_mu_prefix[i] = c_mu;
                             });
    check_finite(st.delta, "recursion_state");
    return st;
}

DiscriminantResult discriminant_recursive(const HillProblem& problem, int k) {
    check_range(k, kMinRecursionOrder, kMaxRecursionOrder, "discriminant_recursive");
    const auto samples = sample_p(problem, k);
    DiscriminantResult r;
    r.method = Method::Recursive;
    r.order = k;
    r.delta = recursive_delta(samples, problem.alpha, problem.beta, problem.tau);
    return r;
}

double recursive_delta_naive(std::span<const double> samples, double alpha, double beta, double tau) {
    const int k = order_of(samples);
    if (auto bad = singularity_guard(samples, alpha, beta, tau, k)) {
        throw_singular(*bad, alpha, beta, tau, k);
    }
    const std::size_t n_total = samples.size();
    const double big = std::ldexp(1.0, 2 * k + 2);
    const double tau2 = tau * tau;
    auto p = [&](std::size_t n) { return samples[n - 1]; };
    auto xi = [&](std::size_t h) { return alpha + beta * p(n_total - h); };
    auto psi = [&](std::size_t h) { return 4.0 * tau2 / (big + tau2 * xi(h)); };
    auto mu = [&](std::size_t h) { return alpha + beta / 2.0 * (p(n_total - h) + p(n_total - h + 1)); };

    std::vector<double> b(n_total), c(n_total);
    b[0] = c[0] = big / (big + tau2 * (alpha + beta * p(n_total)));
    auto S = [&](std::size_t h) {
        double s = 0.0;
        for (std::size_t i = 0; i <= h; ++i) s += b[i];
        return s;
    };
    for (std::size_t n = 1; n < n_total; ++n) {
        double sum_s = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum_s += S(i);
        b[n] = -psi(n) * xi(n) * sum_s;

        double sum_c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double inner = 0.0;
            for (std::size_t j = i + 1; j <= n; ++j) inner += mu(j);
            sum_c += c[i] * inner;
        }
        c[n] = -psi(n) * sum_c;
    }
    double delta = 0.0;
    for (std::size_t n = 0; n < n_total; ++n) delta += b[n] + c[n];
    check_finite(delta, "recursive_delta_naive");
    return delta;
}

Eigen::VectorXd last_column_of_inverse(const Eigen::MatrixXd& upper, double tol) {
    const Eigen::Index n = upper.rows();
    if (n == 0 || upper.cols() != n) throw SizeError("last_column_of_inverse: matrix must be square");
    const double threshold = tol * upper.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(std::abs(upper(i, i)) > threshold)) {
            throw SingularityError(static_cast<std::size_t>(i + 1),
                                   "last_column_of_inverse: diagonal entry " + std::to_string(i + 1) +
                                       " is numerically zero");
        }
    }
    // a_0 = 1/u_nn,  a_i = -sum_{j<i} a_j u_{n-i,n-j} / u_{n-i,n-i}   (1-based u)
    Eigen::VectorXd a(n);
    a(0) = 1.0 / upper(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
        const Eigen::Index row = n - 1 - i;
        double sum = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) sum += a(j) * upper(row, n - 1 - j);
        a(i) = -sum / upper(row, row);
    }
    return a.reverse();
}

SamplingMatrixInverses sampling_matrix_inverses(const HillProblem& problem, int k,
                                                double scale_perturbation) {
    check_range(k, kMinRecursionOrder, kMaxTriangularOrder, "sampling_matrix_inverses");
    const auto samples = sample_p(problem, k);
    const auto n = static_cast<Eigen::Index>(samples.size());
    const double s = walsh::pbar_similarity_scale(k) * scale_perturbation;
    const double factor = problem.tau * problem.tau * s * s;
    const double alpha = problem.alpha;
    const double beta = problem.beta;

    // prefix[i] = p_1 + ... + p_i
    std::vector<double> prefix(samples.size() + 1, 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) prefix[i + 1] = prefix[i] + samples[i];

    SamplingMatrixInverses out;
    out.gamma_bar_inv = Eigen::MatrixXd::Zero(n, n);
    out.gamma_p_bar_inv = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = samples[static_cast<std::size_t>(i)];
        const double qi = alpha + beta * pi;
        // Pbar^2 has 1/4 on the diagonal and (j - i) above it.
        out.gamma_bar_inv(i, i) = 1.0 + factor * qi / 4.0;
        out.gamma_p_bar_inv(i, i) = 1.0 + factor * qi / 4.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double pj = samples[static_cast<std::size_t>(j)];
            const auto gap = static_cast<double>(j - i);
            out.gamma_bar_inv(i, j) = factor * qi * gap;
            // (Pbar diag(p) Pbar)_ij = p_i/2 + p_{i+1} + ... + p_{j-1} + p_j/2
            const double inner = prefix[static_cast<std::size_t>(j)] - prefix[static_cast<std::size_t>(i + 1)];
            out.gamma_p_bar_inv(i, j) = factor * (gap * alpha + beta * (0.5 * pi + inner + 0.5 * pj));
        }
    }
    return out;
}

DiscriminantResult discriminant_triangular(const HillProblem& problem, int k, double scale_perturbation) {
    check_range(k, kMinRecursionOrder, kMaxTriangularOrder, "discriminant_triangular");
    if (auto bad = singularity_guard(problem, k)) {
        throw_singular(*bad, problem.alpha, problem.beta, problem.tau, k);
    }
    const auto mats = sampling_matrix_inverses(problem, k, scale_perturbation);
    const Eigen::VectorXd b = last_column_of_inverse(mats.gamma_bar_inv);
    const Eigen::VectorXd c = last_column_of_inverse(mats.gamma_p_bar_inv);
    DiscriminantResult r;
    r.method = Method::TriangularBacksolve;
    r.order = k;
    r.delta = b.sum() + c.sum();
    check_finite(r.delta, "discriminant_triangular");
    return r;
}

DiscriminantResult discriminant_direct(const HillProblem& problem, int k) {
    check_range(k, kMinRecursionOrder, kMaxDirectOrder, "discriminant_direct");
    problem.validate();
    const auto samples = sample_p(problem, k);
    const std::size_t n_total = samples.size();
    const auto n = static_cast<Eigen::Index>(n_total);

    // Walsh coefficients of the step function equal to p_n on the n-th cell;
    // with these, W^-1 Lambda_r W is exactly diag(p_1, ..., p_2^k).
    const auto series = walsh::walsh_series_coeffs(
        [&](double s) {
            auto cell = static_cast<std::size_t>(s * static_cast<double>(n_total));
            return samples[std::min(cell, n_total - 1)];
        },
        k);
    const auto family = walsh::permutation_family(k);
    const Eigen::MatrixXd lambda_r = walsh::lambda_of_vector(series.coeffs, family);
    const Eigen::MatrixXd p = walsh::integration_operator(k);
    const Eigen::MatrixXd w = walsh::walsh_matrix(k).cast<double>();
    const double tau2 = problem.tau * problem.tau;

    const Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) +
        tau2 * (problem.alpha * Eigen::MatrixXd::Identity(n, n) + problem.beta * lambda_r) * p * p;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        throw NumericError("discriminant_direct: ill-conditioned system, rcond=" + format_shortest(rcond),
                           rcond);
    }
    const Eigen::VectorXd w_tau = w.col(n - 1);
    // Delta = e1' Gamma w(tau) + e1' P Gamma P^-1 w(tau)
    const double x1 = lu.solve(w_tau)(0);
    const Eigen::VectorXd u = p.partialPivLu().solve(w_tau);
    const double x2_dot = p.row(0).dot(lu.solve(u));

    DiscriminantResult r;
    r.method = Method::DirectInversion;
    r.order = k;
    r.delta = x1 + x2_dot;
    check_finite(r.delta, "discriminant_direct");
    return r;
}

double transition_sample(const HillProblem& problem, int k, std::size_t n) {
    check_range(k, kMinRecursionOrder, kMaxTriangularOrder, "transition_sample");
    const std::size_t n_total = std::size_t{1} << k;
    if (n < 1 || n > n_total) {
        throw DomainError("transition_sample: n=" + std::to_string(n) + " outside [1, 2^k]");
    }
    if (auto bad = singularity_guard(problem, k)) {
        throw_singular(*bad, problem.alpha, problem.beta, problem.tau, k);
    }
    const auto mats = sampling_matrix_inverses(problem, k);
    const auto m = static_cast<Eigen::Index>(n);
    // Column n of an upper-triangular inverse is the last column of the
    // inverse of its leading n x n block.
    const double b = last_column_of_inverse(mats.gamma_bar_inv.topLeftCorner(m, m)).sum();
    const double c = last_column_of_inverse(mats.gamma_p_bar_inv.topLeftCorner(m, m)).sum();
    return b + c;
}

}  // namespace hillwalsh
