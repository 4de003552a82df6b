#include "hillwalsh/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "hillwalsh/discriminant.hpp"
#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"

namespace hillwalsh {

namespace {

constexpr int kPanelNodes = 8;

struct Node {
    double x;
    double w;
};

// Phase segments [a, b) on which p is continuous.
std::vector<std::pair<double, double>> smooth_segments(const Excitation& excitation) {
    auto cuts = excitation.breakpoints();
    cuts.push_back(1.0);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) out.emplace_back(cuts[i], cuts[i + 1]);
    }
    return out;
}

// Jump times of p strictly inside (a, b).
std::vector<double> jumps_inside(const HillProblem& problem, double a, double b) {
    std::vector<double> out;
    if (!problem.excitation.is_piecewise_constant()) return out;
    const auto phases = problem.excitation.breakpoints();
    const auto first = static_cast<long>(std::floor(a / problem.tau));
    const auto last = static_cast<long>(std::ceil(b / problem.tau));
    for (long m = first; m <= last; ++m) {
        for (double s : phases) {
            const double t = (static_cast<double>(m) + s) * problem.tau;
            if (t > a && t < b) out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Composite 8-point Gauss-Legendre on [a, b], pieces cut at the jumps of p,
// about `density` panels per period.
std::vector<Node> nodes(const HillProblem& problem, double a, double b, int density) {
    std::vector<Node> out;
    if (!(b > a)) return out;
    using rule = boost::math::quadrature::gauss<double, kPanelNodes>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();

    std::vector<double> cuts{a};
    for (double t : jumps_inside(problem, a, b)) cuts.push_back(t);
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c];
        const double len = cuts[c + 1] - lo;
        const int panels = std::max(1, static_cast<int>(std::ceil(density * len / problem.tau - 1e-9)));
        const double width = len / panels;
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double mid = lo + (pnl + 0.5) * width;
            const double half = 0.5 * width;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out.push_back({mid - half * xs[i], half * ws[i]});
                out.push_back({mid + half * xs[i], half * ws[i]});
            }
        }
    }
    return out;
}

// q on the open interval after the jump at a; evaluated at interior nodes only.
double q_at(const HillProblem& problem, double t) {
    const double v = problem.q(t);
    if (!std::isfinite(v)) throw NumericError("non-finite q at t=" + format_shortest(t));
    return v;
}

Eigen::Matrix2d propagator(double q, double duration) {
    Eigen::Matrix2d m;
    if (q > 0.0) {
        const double w = std::sqrt(q);
        const double c = std::cos(w * duration);
        const double s = std::sin(w * duration);
        m << c, s / w, -w * s, c;
    } else if (q < 0.0) {
        const double w = std::sqrt(-q);
        const double c = std::cosh(w * duration);
        const double s = std::sinh(w * duration);
        m << c, s / w, w * s, c;
    } else {
        m << 1.0, duration, 0.0, 1.0;
    }
    return m;
}

}  // namespace

MonodromyIntegrator::MonodromyIntegrator(const Excitation& excitation, double tau, long steps) {
    if (steps < kMinMonodromySteps) {
        throw SizeError("monodromy: steps=" + std::to_string(steps) + " below " +
                        std::to_string(kMinMonodromySteps));
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("monodromy: tau must be positive");
    const bool constant = excitation.is_piecewise_constant();
    for (const auto& [a, b] : smooth_segments(excitation)) {
        const long n = std::max(1L, std::lround(static_cast<double>(steps) * (b - a)));
        const double hs = (b - a) / static_cast<double>(n);
        const double level = constant ? excitation.at_phase(0.5 * (a + b)) : 0.0;
        for (long i = 0; i < n; ++i) {
            const double s0 = a + static_cast<double>(i) * hs;
            h_.push_back(hs * tau);
            if (constant) {
                p0_.push_back(level);
                pm_.push_back(level);
                p1_.push_back(level);
            } else {
                p0_.push_back(excitation.at_phase(s0));
                pm_.push_back(excitation.at_phase(s0 + 0.5 * hs));
                p1_.push_back(excitation.at_phase_left(i + 1 == n ? b : s0 + hs));
            }
        }
    }
}

Eigen::Matrix2d MonodromyIntegrator::matrix(double alpha, double beta) const {
    // columns are the two unit-initial-condition solutions (x, x')
    double x[2] = {1.0, 0.0};
    double v[2] = {0.0, 1.0};
    for (std::size_t s = 0; s < h_.size(); ++s) {
        const double h = h_[s];
        const double q0 = alpha + beta * p0_[s];
        const double qm = alpha + beta * pm_[s];
        const double q1 = alpha + beta * p1_[s];
        for (int c = 0; c < 2; ++c) {
            const double x0 = x[c];
            const double v0 = v[c];
            const double k1x = v0;
            const double k1v = -q0 * x0;
            const double k2x = v0 + 0.5 * h * k1v;
            const double k2v = -qm * (x0 + 0.5 * h * k1x);
            const double k3x = v0 + 0.5 * h * k2v;
            const double k3v = -qm * (x0 + 0.5 * h * k2x);
            const double k4x = v0 + h * k3v;
            const double k4v = -q1 * (x0 + h * k3x);
            x[c] = x0 + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v[c] = v0 + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
    }
    Eigen::Matrix2d m;
    m << x[0], x[1], v[0], v[1];
    if (!m.allFinite()) {
        throw NumericError("monodromy: integration blew up at alpha=" + format_shortest(alpha) +
                           " beta=" + format_shortest(beta));
    }
    return m;
}

double MonodromyIntegrator::delta(double alpha, double beta) const {
    return matrix(alpha, beta).trace();
}

MonodromyResult monodromy(const HillProblem& problem, long steps) {
    problem.validate();
    const MonodromyIntegrator integrator(problem.excitation, problem.tau, steps);
    MonodromyResult r;
    r.m = integrator.matrix(problem.alpha, problem.beta);
    r.trace = r.m.trace();
    r.det = r.m.determinant();
    r.steps = integrator.steps();
    const std::complex<double> disc = std::sqrt(std::complex<double>(r.trace * r.trace - 4.0, 0.0));
    r.rho1 = 0.5 * (r.trace + disc);
    r.rho2 = 0.5 * (r.trace - disc);
    return r;
}

double constant_coeff_delta(double alpha, double tau) {
    if (alpha >= 0.0) return 2.0 * std::cos(tau * std::sqrt(alpha));
    return 2.0 * std::cosh(tau * std::sqrt(-alpha));
}

double piecewise_constant_delta(const std::vector<std::pair<double, double>>& levels) {
    if (levels.empty()) throw DomainError("piecewise_constant_delta: no levels");
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    for (const auto& [q, duration] : levels) {
        if (!(duration > 0.0) || !std::isfinite(q)) {
            throw DomainError("piecewise_constant_delta: durations must be positive and q finite");
        }
        m = propagator(q, duration) * m;
    }
    return m.trace();
}

std::vector<std::pair<double, double>> constant_levels(const HillProblem& problem) {
    problem.validate();
    if (!problem.excitation.is_piecewise_constant()) {
        throw DomainError("constant_levels: excitation '" + problem.excitation.describe() +
                          "' is not piecewise constant");
    }
    std::vector<std::pair<double, double>> out;
    for (const auto& [a, b] : smooth_segments(problem.excitation)) {
        const double p = problem.excitation.at_phase(0.5 * (a + b));
        out.emplace_back(problem.alpha + problem.beta * p, (b - a) * problem.tau);
    }
    return out;
}

LyapunovSeries lyapunov_terms(const HillProblem& problem, int n_max, int quad_points) {
    problem.validate();
    if (n_max < 0 || n_max > 3) throw DomainError("lyapunov_terms: n_max must be in [0,3]");
    if (quad_points < kMinLyapunovPoints) {
        throw SizeError("lyapunov_terms: need at least " + std::to_string(kMinLyapunovPoints) +
                        " points per dimension");
    }
    const int density = (quad_points + kPanelNodes - 1) / kPanelNodes;
    const double tau = problem.tau;

    LyapunovSeries out;
    out.quad_points = density * kPanelNodes;
    out.terms.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.terms[0] = 2.0;

    // outer variable t1 >= t2 >= t3
    const auto outer = nodes(problem, 0.0, tau, density);
    for (const auto& n1 : outer) {
        const double q1 = q_at(problem, n1.x);
        if (n_max >= 1) out.terms[1] += n1.w * tau * q1;
        if (n_max < 2) continue;
        for (const auto& n2 : nodes(problem, 0.0, n1.x, density)) {
            const double q2 = q_at(problem, n2.x);
            out.terms[2] += n1.w * n2.w * (tau - n1.x + n2.x) * (n1.x - n2.x) * q1 * q2;
            if (n_max < 3) continue;
            double inner = 0.0;
            for (const auto& n3 : nodes(problem, 0.0, n2.x, density)) {
                inner += n3.w * (tau - n1.x + n3.x) * (n2.x - n3.x) * q_at(problem, n3.x);
            }
            out.terms[3] += n1.w * n2.w * (n1.x - n2.x) * q1 * q2 * inner;
        }
    }

    double sum = 0.0;
    for (std::size_t n = 0; n < out.terms.size(); ++n) {
        sum += (n % 2 == 0 ? 1.0 : -1.0) * out.terms[n];
        out.partial_sums.push_back(sum);
    }
    return out;
}

ExpansionReport delta_power_expansion_check(const HillProblem& problem, int k, int order) {
    problem.validate();
    if (k < kMinRecursionOrder || k > 6) throw SizeError("delta_power_expansion_check: k must be in [2,6]");
    if (order < 0 || order > 3) throw DomainError("delta_power_expansion_check: order must be in [0,3]");
    const auto big_n = std::size_t{1} << k;
    const double tau = problem.tau;
    const double step = tau / static_cast<double>(big_n);

    // prefix[j] = integral of q over [tau - j step, tau]; I(n, m) = prefix[n] - prefix[m]
    std::vector<double> prefix(big_n + 2, 0.0);
    for (std::size_t j = 0; j <= big_n; ++j) {
        const double hi = tau - static_cast<double>(j) * step;
        double cell = 0.0;
        for (const auto& nd : nodes(problem, hi - step, hi, static_cast<int>(big_n))) {
            cell += nd.w * q_at(problem, nd.x);
        }
        prefix[j + 1] = prefix[j] + cell;
    }
    auto I = [&](std::size_t n, std::size_t m) { return prefix[n] - prefix[m]; };

    const std::size_t n = big_n - 1;
    ExpansionReport r;
    r.k = k;
    r.order = order;
    r.step = step;

    double s[4] = {1.0, 0.0, 0.0, 0.0};
    double z[4] = {1.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 1; i <= n; ++i) s[1] += I(n + 1, i);
    for (std::size_t i = 2; i <= n + 1; ++i) z[1] += I(i, 1);
    if (order >= 2) {
        for (std::size_t i = 2; i <= n; ++i) {
            double inner = 0.0;
            for (std::size_t j = 1; j <= i - 1; ++j) inner += I(i, j);
            s[2] += I(n + 1, i) * inner;
        }
        for (std::size_t i = 2; i <= n; ++i) {
            double inner = 0.0;
            for (std::size_t j = i + 1; j <= n + 1; ++j) inner += I(j, i);
            z[2] += I(i, 1) * inner;
        }
    }
    if (order >= 3) {
        for (std::size_t i = 3; i <= n; ++i) {
            double mid = 0.0;
            for (std::size_t j = 1; j <= i - 1; ++j) {
                double inner = 0.0;
                for (std::size_t l = 1; l <= j; ++l) inner += I(j, l);
                mid += I(i, j) * inner;
            }
            s[3] += I(n + 1, i) * mid;
        }
        for (std::size_t i = 2; i + 1 <= n; ++i) {
            double mid = 0.0;
            for (std::size_t j = i + 1; j <= n; ++j) {
                double inner = 0.0;
                for (std::size_t l = j + 1; l <= n + 1; ++l) inner += I(l, j);
                mid += I(j, i) * inner;
            }
            z[3] += I(i, 1) * mid;
        }
    }
    r.terms.push_back(2.0);
    r.expansion = 2.0;
    for (int o = 1; o <= order; ++o) {
        const double a = std::pow(step, o) * (s[o] + z[o]);
        r.terms.push_back(a);
        r.expansion += (o % 2 == 0 ? 1.0 : -1.0) * a;
    }

    // un-expanded form: S_m = 1 - step sum S_i I(m+1, i+1), Z_m = 1 - step sum (m-i) Z_i I(i+2, i+1)
    std::vector<double> sv(big_n), zv(big_n);
    for (std::size_t m = 0; m < big_n; ++m) {
        double as = 0.0;
        double az = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            as += sv[i] * I(m + 1, i + 1);
            az += static_cast<double>(m - i) * zv[i] * I(i + 2, i + 1);
        }
        sv[m] = 1.0 - step * as;
        zv[m] = 1.0 - step * az;
    }
    r.corollary = sv[n] + zv[n];

    // The recursion with every quantity carried as a polynomial in the number
    // of psi factors, truncated at `order`.
    const auto samples = sample_p(problem, k);
    const double big = std::ldexp(1.0, 2 * k + 2);
    const double tau2 = tau * tau;
    const auto width = static_cast<std::size_t>(order) + 1;
    auto p = [&](std::size_t i) { return samples[i - 1]; };
    const double first = big / (big + tau2 * (problem.alpha + problem.beta * p(big_n)));
    std::vector<double> ss(width, 0.0), zz(width, 0.0), cum_s(width, 0.0), c_mu(width, 0.0);
    ss[0] = zz[0] = first;
    cum_s[0] = first;
    double mu_cum = 0.0;
    std::vector<double> bn(width), cn(width);
    for (std::size_t h = 1; h < big_n; ++h) {
        const double pa = p(big_n - h);
        const double pb = p(big_n - h + 1);
        const double xi = problem.alpha + problem.beta * pa;
        const double psi = 4.0 * tau2 / (big + tau2 * xi);
        mu_cum += problem.alpha + 0.5 * problem.beta * (pa + pb);
        bn[0] = cn[0] = 0.0;
        for (std::size_t o = 1; o < width; ++o) {
            bn[o] = -psi * xi * cum_s[o - 1];
            cn[o] = -psi * (mu_cum * zz[o - 1] - c_mu[o - 1]);
        }
        for (std::size_t o = 0; o < width; ++o) {
            ss[o] += bn[o];
            zz[o] += cn[o];
            cum_s[o] += ss[o];
            c_mu[o] += cn[o] * mu_cum;
        }
    }
    for (std::size_t o = 0; o < width; ++o) {
        const double signed_term = ss[o] + zz[o];
        r.recursion_terms.push_back(o % 2 == 0 ? signed_term : -signed_term);
        r.recursion_truncated += signed_term;
    }
    r.recursion = discriminant_recursive(problem, k).delta;
    r.gap_truncated = std::abs(r.expansion - r.recursion_truncated);
    r.gap_full = std::abs(r.corollary - r.recursion);
    return r;
}

}  // namespace hillwalsh
