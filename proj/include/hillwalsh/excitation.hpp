#pragma once

// The Hill problem  x'' + (alpha + beta p(t)) x = 0  and its periodic
// excitation p. Every excitation is defined on the normalized phase
// s = t / tau in [0,1).

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hillwalsh {

struct Cosine {};  // p = cos(2 pi s)

struct CosineSum {
    struct Term {
        double amplitude = 0.0;
        int harmonic = 0;
    };
    std::vector<Term> terms;  // p = sum a cos(2 pi n s)
};

struct SquareWave {
    double hi = 1.0;
    double lo = -1.0;
    double duty = 0.5;  // p = hi on [0, duty), lo on [duty, 1)
};

/// Zero-order hold: value j holds on [j/N, (j+1)/N). N must be a power of 2.
struct SampledTable {
    std::vector<double> values;
};

class Excitation {
public:
    using Kind = std::variant<Cosine, CosineSum, SquareWave, SampledTable>;

    Excitation() : kind_(Cosine{}) {}
    Excitation(Kind kind);  // validates

    static Excitation cosine() { return Excitation(Cosine{}); }
    static Excitation cosine_sum(std::vector<CosineSum::Term> terms);
    static Excitation square(double hi, double lo, double duty);
    static Excitation table(std::vector<double> values);

    const Kind& kind() const noexcept { return kind_; }

    /// p at phase s (reduced mod 1), right-continuous at jumps.
    double at_phase(double s) const;
    /// Left limit of p at phase s in (0,1]; equals at_phase for continuous kinds.
    double at_phase_left(double s) const;

    /// Phases in [0,1) where p may jump, sorted, always containing 0.
    std::vector<double> breakpoints() const;

    bool is_piecewise_constant() const noexcept;

    /// Short description in the CLI spec language ("cos", "square:1,-1,0.5", ...).
    std::string describe() const;

private:
    Kind kind_;
};

struct HillProblem {
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 1.0;
    Excitation excitation;

    /// Throws DomainError unless tau > 0 and alpha, beta finite.
    void validate() const;

    double p(double t) const { return excitation.at_phase(t / tau); }
    double q(double t) const { return alpha + beta * p(t); }
};

/// p(t mod tau)
double eval_p(const HillProblem& problem, double t);

/// [p_1, ..., p_{2^k}] with p_n = p(n tau / 2^k); the last entry is p(0).
std::vector<double> sample_p(const HillProblem& problem, int k);
std::vector<double> sample_p(const Excitation& excitation, int k);

inline constexpr int kMaxSampleOrder = 20;

/// One decimal per line; blank lines and lines starting with '#' ignored.
/// Throws IoError on read failure, DomainError if the count is not a power of 2.
SampledTable load_table(const std::filesystem::path& path);

/// Parses "cos", "cossum:1x1,1x2", "square:hi,lo,duty", "table:<path>".
Excitation parse_excitation(const std::string& spec);

}  // namespace hillwalsh
