#pragma once

// Walsh functions in dyadic (Paley) ordering and the matrices built on them:
// the sign matrix W_H, the operational integration matrix P, the XOR
// permutation family and the triangular similarity forms of P.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hillwalsh::walsh {

inline constexpr int kMinOrder = 1;
inline constexpr int kMaxOrder = 16;

using SignMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IndexMap = std::vector<std::uint32_t>;

/// Value of w_n at t in [0,1), as the product of Rademacher functions picked
/// by the bits of n. Jumps are right-continuous.
int walsh_value(std::int64_t n, double t);

/// Sign of w_n on dyadic cell `cell` of an order-2^k partition.
int walsh_cell_value(std::uint32_t n, std::uint32_t cell, int k);

/// 2^k x 2^k matrix whose row n holds w_n on the 2^k dyadic cells.
SignMatrix walsh_matrix(int k);

/// Sequency of w_n * w_m (no-carry binary addition).
constexpr std::uint64_t dyadic_index(std::uint64_t n, std::uint64_t m) noexcept { return n ^ m; }

/// Operational matrix P with  integral_0^t w(s) ds = P w(t)  on [0,1].
Eigen::MatrixXd integration_operator(int k);

/// One step of the block recursion: from P of size n to P of size 2n.
Eigen::MatrixXd integration_operator_step(const Eigen::MatrixXd& previous);

struct WalshBasis {
    int k = 0;
    std::size_t n = 0;
    SignMatrix hadamard;
    Eigen::MatrixXd integ_op;
    std::string notes;
};

WalshBasis make_basis(int k);

/// The 2^k symmetric involutive permutations L_i with (L_i v)[x] = v[x xor i].
/// Maps are produced on demand; nothing of size 4^k is ever stored.
class PermutationFamily {
public:
    explicit PermutationFamily(int k);

    int order() const noexcept { return k_; }
    std::size_t size() const noexcept { return std::size_t{1} << k_; }

    /// Index map of L_i assembled through the half-size block recursion.
    IndexMap lambda(std::uint32_t i) const;

    std::uint32_t image(std::uint32_t i, std::uint32_t x) const noexcept { return x ^ i; }

    /// out = L_i in
    void apply(std::uint32_t i, std::span<const double> in, std::span<double> out) const;

private:
    int k_;
};

PermutationFamily permutation_family(int k);

/// Dense 0/1 matrix of an index map. Test and debugging aid.
Eigen::MatrixXd dense_permutation(const IndexMap& map);

/// Matrix whose column j is L_j gamma.
Eigen::MatrixXd lambda_of_vector(std::span<const double> gamma, const PermutationFamily& family);

struct WalshSeries {
    int k = 0;
    std::vector<double> coeffs;

    double evaluate(double t) const;
};

/// a_n = integral_0^1 f w_n by the midpoint rule on the 2^k dyadic cells.
WalshSeries walsh_series_coeffs(const std::function<double(double)>& f, int k);

/// Ratio s(k) in  W^-1 P W = s(k) * Pbar. Equal to 2^-k; the unit tests
/// confirm it against direct products of W and P.
double pbar_similarity_scale(int k);

struct PBarMatrices {
    Eigen::MatrixXd pbar;       // 1/2 on the diagonal, 1 above it
    Eigen::MatrixXd companion;  // 1/2 on the diagonal, alternating -1, +1, ... above it
    double similarity_scale = 0.0;  // measured: W P W = similarity_scale * pbar
    double inverse_scale = 0.0;     // measured: W P^-1 W = inverse_scale * companion
    double product_scale = 0.0;     // measured: pbar * companion = product_scale * I
};

/// Builds the triangular forms and measures the three scalars by direct
/// products with W and P. Throws NumericError if a product is not a scalar
/// multiple of the expected pattern. Cost is O(8^k).
PBarMatrices pbar_matrices(int k);

/// Plain decimal, row per line, comma separated, no header.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace hillwalsh::walsh
