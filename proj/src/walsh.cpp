#include "hillwalsh/walsh.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"

namespace hillwalsh::walsh {

namespace {

void check_order(int k, const char* what) {
    if (k < kMinOrder || k > kMaxOrder) {
        throw SizeError(std::string(what) + ": order exponent k=" + std::to_string(k) +
                        " outside [" + std::to_string(kMinOrder) + ", " +
                        std::to_string(kMaxOrder) + "]");
    }
}

std::uint32_t reverse_bits(std::uint32_t x, int k) {
    std::uint32_t r = 0;
    for (int b = 0; b < k; ++b) {
        r = (r << 1) | ((x >> b) & 1u);
    }
    return r;
}

}  // namespace

int walsh_value(std::int64_t n, double t) {
    if (n < 0) throw DomainError("walsh_value: negative sequency " + std::to_string(n));
    if (!(t >= 0.0 && t < 1.0)) {
        throw DomainError("walsh_value: t=" + format_shortest(t) + " outside [0,1)");
    }
    if (n >= (std::int64_t{1} << 52)) throw DomainError("walsh_value: sequency too large");
    int sign = 1;
    auto bits = static_cast<std::uint64_t>(n);
    for (int j = 0; bits != 0; ++j, bits >>= 1) {
        if ((bits & 1u) == 0) continue;
        // Rademacher r_{j+1}(t): parity of the (j+1)-th binary digit of t.
        const auto digit = static_cast<std::uint64_t>(std::floor(std::ldexp(t, j + 1)));
        if (digit & 1u) sign = -sign;
    }
    return sign;
}

int walsh_cell_value(std::uint32_t n, std::uint32_t cell, int k) {
    return (std::popcount(n & reverse_bits(cell, k)) & 1) ? -1 : 1;
}

SignMatrix walsh_matrix(int k) {
    check_order(k, "walsh_matrix");
    const std::uint32_t n = 1u << k;
    SignMatrix w(n, n);
    for (std::uint32_t row = 0; row < n; ++row) {
        for (std::uint32_t col = 0; col < n; ++col) {
            w(row, col) = walsh_cell_value(row, col, k);
        }
    }
    return w;
}

Eigen::MatrixXd integration_operator(int k) {
    check_order(k, "integration_operator");
    const Eigen::Index n = Eigen::Index{1} << k;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    p(0, 0) = 0.5;
    for (int level = 1; level <= k; ++level) {
        const Eigen::Index half = Eigen::Index{1} << (level - 1);
        const double entry = std::ldexp(1.0, -(level + 1));
        for (Eigen::Index i = 0; i < half; ++i) {
            p(i, i + half) = -entry;
            p(i + half, i) = entry;
        }
    }
    return p;
}

Eigen::MatrixXd integration_operator_step(const Eigen::MatrixXd& previous) {
    const Eigen::Index half = previous.rows();
    if (half == 0 || previous.cols() != half || (half & (half - 1)) != 0) {
        throw SizeError("integration_operator_step: expected a square power-of-two matrix");
    }
    const int level = std::countr_zero(static_cast<std::uint64_t>(half)) + 1;
    const double entry = std::ldexp(1.0, -(level + 1));
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(2 * half, 2 * half);
    next.topLeftCorner(half, half) = previous;
    next.topRightCorner(half, half) = -entry * Eigen::MatrixXd::Identity(half, half);
    next.bottomLeftCorner(half, half) = entry * Eigen::MatrixXd::Identity(half, half);
    return next;
}

WalshBasis make_basis(int k) {
    check_order(k, "make_basis");
    WalshBasis basis;
    basis.k = k;
    basis.n = std::size_t{1} << k;
    basis.hadamard = walsh_matrix(k);
    basis.integ_op = integration_operator(k);
    basis.notes = "dyadic (Paley) ordering from Rademacher products; P from block recursion, P(0)=1/2";
    return basis;
}

PermutationFamily::PermutationFamily(int k) : k_(k) { check_order(k, "permutation_family"); }

IndexMap PermutationFamily::lambda(std::uint32_t i) const {
    if (i >= size()) throw SizeError("permutation index out of range");
    // L_0 of size 1 is the identity; doubling puts L_i on the diagonal blocks
    // when the new top bit of i is clear, on the anti-diagonal blocks otherwise.
    IndexMap map{0};
    for (int level = 1; level <= k_; ++level) {
        const auto half = static_cast<std::uint32_t>(map.size());
        const bool swap_blocks = (i >> (level - 1)) & 1u;
        IndexMap next(2 * half);
        for (std::uint32_t x = 0; x < half; ++x) {
            if (swap_blocks) {
                next[x] = map[x] + half;
                next[x + half] = map[x];
            } else {
                next[x] = map[x];
                next[x + half] = map[x] + half;
            }
        }
        map = std::move(next);
    }
    return map;
}

void PermutationFamily::apply(std::uint32_t i, std::span<const double> in,
                              std::span<double> out) const {
    if (in.size() != size() || out.size() != size()) {
        throw SizeError("permutation apply: vector length must be 2^k");
    }
    for (std::uint32_t x = 0; x < in.size(); ++x) {
        out[x] = in[image(i, x)];
    }
}

PermutationFamily permutation_family(int k) { return PermutationFamily(k); }

Eigen::MatrixXd dense_permutation(const IndexMap& map) {
    const auto n = static_cast<Eigen::Index>(map.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index row = 0; row < n; ++row) {
        m(row, map[static_cast<std::size_t>(row)]) = 1.0;
    }
    return m;
}

Eigen::MatrixXd lambda_of_vector(std::span<const double> gamma, const PermutationFamily& family) {
    if (gamma.size() != family.size()) {
        throw SizeError("lambda_of_vector: gamma has length " + std::to_string(gamma.size()) +
                        ", expected " + std::to_string(family.size()));
    }
    const auto n = static_cast<Eigen::Index>(gamma.size());
    Eigen::MatrixXd out(n, n);
    std::vector<double> column(gamma.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        family.apply(static_cast<std::uint32_t>(j), gamma, column);
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = column[static_cast<std::size_t>(i)];
    }
    return out;
}

double WalshSeries::evaluate(double t) const {
    double sum = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        sum += coeffs[n] * walsh_value(static_cast<std::int64_t>(n), t);
    }
    return sum;
}

WalshSeries walsh_series_coeffs(const std::function<double(double)>& f, int k) {
    check_order(k, "walsh_series_coeffs");
    const std::uint32_t n = 1u << k;
    std::vector<double> cells(n);
    for (std::uint32_t c = 0; c < n; ++c) {
        const double v = f((c + 0.5) / n);
        if (!std::isfinite(v)) {
            throw NumericError("walsh_series_coeffs: non-finite value at cell " + std::to_string(c));
        }
        cells[c] = v;
    }
    WalshSeries series;
    series.k = k;
    series.coeffs.assign(n, 0.0);
    for (std::uint32_t row = 0; row < n; ++row) {
        double sum = 0.0;
        for (std::uint32_t c = 0; c < n; ++c) sum += walsh_cell_value(row, c, k) * cells[c];
        series.coeffs[row] = sum / n;
    }
    return series;
}

double pbar_similarity_scale(int k) { return std::ldexp(1.0, -k); }

namespace {

// Single scalar s with a = s * b, or NaN when no such scalar fits to `tol`.
double measured_ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    b.cwiseAbs().maxCoeff(&r, &c);
    const double s = a(r, c) / b(r, c);
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
    if ((a - s * b).cwiseAbs().maxCoeff() > tol * scale) return std::nan("");
    return s;
}

}  // namespace

PBarMatrices pbar_matrices(int k) {
    check_order(k, "pbar_matrices");
    const Eigen::Index n = Eigen::Index{1} << k;
    PBarMatrices out;
    out.pbar = Eigen::MatrixXd::Zero(n, n);
    out.companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.pbar(i, i) = 0.5;
        out.companion(i, i) = 0.5;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out.pbar(i, j) = 1.0;
            out.companion(i, j) = ((j - i) % 2 == 1) ? -1.0 : 1.0;
        }
    }

    const Eigen::MatrixXd w = walsh_matrix(k).cast<double>();
    const Eigen::MatrixXd p = integration_operator(k);
    const Eigen::MatrixXd wpw = w * p * w;
    const Eigen::MatrixXd wpinvw = w * p.inverse() * w;
    const Eigen::MatrixXd prod = out.pbar * out.companion;

    out.similarity_scale = measured_ratio(wpw, out.pbar, 1e-12);
    out.inverse_scale = measured_ratio(wpinvw, out.companion, 1e-9);
    out.product_scale = measured_ratio(prod, Eigen::MatrixXd::Identity(n, n), 1e-12);
    if (std::isnan(out.similarity_scale) || std::isnan(out.inverse_scale) ||
        std::isnan(out.product_scale)) {
        throw NumericError("pbar_matrices: similarity transform is not a scaled triangular form");
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_shortest(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace hillwalsh::walsh
