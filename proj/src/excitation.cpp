#include "hillwalsh/excitation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"

namespace hillwalsh {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double reduce_phase(double s) {
    double r = s - std::floor(s);
    if (r >= 1.0) r = 0.0;
    return r;
}

double parse_double(const std::string& text, const std::string& context) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError(context + ": cannot parse number '" + text + "'");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw DomainError(context + ": trailing characters in '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Excitation::Excitation(Kind kind) : kind_(std::move(kind)) {
    std::visit(overloaded{
                   [](const Cosine&) {},
                   [](const CosineSum& c) {
                       if (c.terms.empty()) throw DomainError("cosine sum needs at least one term");
                       for (const auto& t : c.terms) {
                           if (!std::isfinite(t.amplitude)) {
                               throw DomainError("cosine sum amplitude must be finite");
                           }
                           if (t.harmonic < 0) throw DomainError("cosine sum harmonic must be >= 0");
                       }
                   },
                   [](const SquareWave& w) {
                       if (!std::isfinite(w.hi) || !std::isfinite(w.lo)) {
                           throw DomainError("square wave levels must be finite");
                       }
                       if (!(w.duty > 0.0 && w.duty < 1.0)) {
                           throw DomainError("square wave duty must lie in (0,1)");
                       }
                   },
                   [](const SampledTable& t) {
                       if (t.values.empty() || !std::has_single_bit(t.values.size())) {
                           throw DomainError("sampled table length " + std::to_string(t.values.size()) +
                                             " is not a power of two");
                       }
                       for (double v : t.values) {
                           if (!std::isfinite(v)) throw DomainError("sampled table has a non-finite value");
                       }
                   },
               },
               kind_);
}

Excitation Excitation::cosine_sum(std::vector<CosineSum::Term> terms) {
    return Excitation(CosineSum{std::move(terms)});
}

Excitation Excitation::square(double hi, double lo, double duty) {
    return Excitation(SquareWave{hi, lo, duty});
}

Excitation Excitation::table(std::vector<double> values) {
    return Excitation(SampledTable{std::move(values)});
}

double Excitation::at_phase(double s) const {
    const double r = reduce_phase(s);
    return std::visit(overloaded{
                          [&](const Cosine&) { return std::cos(2.0 * std::numbers::pi * r); },
                          [&](const CosineSum& c) {
                              double sum = 0.0;
                              for (const auto& t : c.terms) {
                                  sum += t.amplitude * std::cos(2.0 * std::numbers::pi * t.harmonic * r);
                              }
                              return sum;
                          },
                          [&](const SquareWave& w) { return r < w.duty ? w.hi : w.lo; },
                          [&](const SampledTable& t) {
                              const auto n = t.values.size();
                              auto idx = static_cast<std::size_t>(std::floor(r * static_cast<double>(n)));
                              return t.values[std::min(idx, n - 1)];
                          },
                      },
                      kind_);
}

double Excitation::at_phase_left(double s) const {
    if (!is_piecewise_constant()) return at_phase(s);
    double r = s - std::floor(s);
    if (r <= 0.0) r = 1.0;  // left limit at a period boundary is the end of the period
    return std::visit(overloaded{
                          [&](const SquareWave& w) { return r <= w.duty ? w.hi : w.lo; },
                          [&](const SampledTable& t) {
                              const auto n = t.values.size();
                              const double scaled = r * static_cast<double>(n);
                              auto idx = static_cast<std::size_t>(std::ceil(scaled));
                              idx = idx == 0 ? 0 : idx - 1;
                              return t.values[std::min(idx, n - 1)];
                          },
                          [&](const auto&) { return at_phase(r); },
                      },
                      kind_);
}

std::vector<double> Excitation::breakpoints() const {
    return std::visit(overloaded{
                          [](const SquareWave& w) { return std::vector<double>{0.0, w.duty}; },
                          [](const SampledTable& t) {
                              std::vector<double> b(t.values.size());
                              for (std::size_t j = 0; j < b.size(); ++j) {
                                  b[j] = static_cast<double>(j) / static_cast<double>(b.size());
                              }
                              return b;
                          },
                          [](const auto&) { return std::vector<double>{0.0}; },
                      },
                      kind_);
}

bool Excitation::is_piecewise_constant() const noexcept {
    return std::holds_alternative<SquareWave>(kind_) || std::holds_alternative<SampledTable>(kind_);
}

std::string Excitation::describe() const {
    return std::visit(overloaded{
                          [](const Cosine&) { return std::string("cos"); },
                          [](const CosineSum& c) {
                              std::string out = "cossum:";
                              for (std::size_t i = 0; i < c.terms.size(); ++i) {
                                  if (i) out += ',';
                                  out += format_shortest(c.terms[i].amplitude) + "x" +
                                         std::to_string(c.terms[i].harmonic);
                              }
                              return out;
                          },
                          [](const SquareWave& w) {
                              return "square:" + format_shortest(w.hi) + "," + format_shortest(w.lo) +
                                     "," + format_shortest(w.duty);
                          },
                          [](const SampledTable& t) {
                              return "table[" + std::to_string(t.values.size()) + "]";
                          },
                      },
                      kind_);
}

void HillProblem::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("tau must be a positive finite period, got " + format_shortest(tau));
    }
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw DomainError("alpha and beta must be finite");
    }
}

double eval_p(const HillProblem& problem, double t) { return problem.p(t); }

std::vector<double> sample_p(const Excitation& excitation, int k) {
    if (k < 1 || k > kMaxSampleOrder) {
        throw SizeError("sample_p: order exponent k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(kMaxSampleOrder) + "]");
    }
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        out[i - 1] = excitation.at_phase(static_cast<double>(i) / static_cast<double>(n));
    }
    return out;
}

std::vector<double> sample_p(const HillProblem& problem, int k) {
    problem.validate();
    return sample_p(problem.excitation, k);
}

SampledTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open excitation table '" + path.string() + "'");
    SampledTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        table.values.push_back(parse_double(t, path.string() + ":" + std::to_string(lineno)));
    }
    if (in.bad()) throw IoError("read error on '" + path.string() + "'");
    if (table.values.empty() || !std::has_single_bit(table.values.size())) {
        throw DomainError("excitation table '" + path.string() + "' has " +
                          std::to_string(table.values.size()) + " values; need a power of two");
    }
    return table;
}

Excitation parse_excitation(const std::string& spec) {
    const std::string s = trim(spec);
    if (s == "cos") return Excitation::cosine();
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw DomainError("unknown excitation '" + s + "'");
    const std::string head = s.substr(0, colon);
    const std::string body = s.substr(colon + 1);
    if (head == "cossum") {
        std::vector<CosineSum::Term> terms;
        for (const auto& part : split(body, ',')) {
            const auto x = part.find('x');
            if (x == std::string::npos) {
                throw DomainError("cossum term '" + part + "' must look like <amplitude>x<harmonic>");
            }
            const double amp = parse_double(trim(part.substr(0, x)), "cossum amplitude");
            const double harm = parse_double(trim(part.substr(x + 1)), "cossum harmonic");
            if (harm != std::floor(harm)) throw DomainError("cossum harmonic must be an integer");
            terms.push_back({amp, static_cast<int>(harm)});
        }
        return Excitation::cosine_sum(std::move(terms));
    }
    if (head == "square") {
        const auto parts = split(body, ',');
        if (parts.size() != 3) throw DomainError("square excitation needs hi,lo,duty");
        return Excitation::square(parse_double(trim(parts[0]), "square hi"),
                                  parse_double(trim(parts[1]), "square lo"),
                                  parse_double(trim(parts[2]), "square duty"));
    }
    if (head == "table") return Excitation(load_table(body));
    throw DomainError("unknown excitation kind '" + head + "'");
}

}  // namespace hillwalsh
