#include "hillwalsh/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "hillwalsh/discriminant.hpp"
#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"
#include "hillwalsh/io.hpp"
#include "hillwalsh/oracles.hpp"

namespace hillwalsh {

namespace {

double parse_real(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError(what + ": cannot parse '" + text + "'");
    }
    if (used != text.size()) throw DomainError(what + ": trailing characters in '" + text + "'");
    return v;
}

Method parse_method(const std::string& name) {
    if (name == "recursive") return Method::Recursive;
    if (name == "triangular") return Method::TriangularBacksolve;
    if (name == "direct") return Method::DirectInversion;
    if (name == "monodromy") return Method::Monodromy;
    if (name == "lyapunov") return Method::LyapunovSeries;
    throw DomainError("unknown method '" + name + "'");
}

HillProblem point_problem(const RunConfig& c) {
    if (!c.alpha || !c.beta) throw DomainError("this command needs --alpha and --beta");
    HillProblem p{*c.alpha, *c.beta, c.tau, parse_excitation(c.excitation)};
    p.validate();
    return p;
}

std::string fmt(double x) { return format_number(x); }

void check_singularity(const HillProblem& p, int k) {
    if (auto bad = singularity_guard(p, k)) {
        throw SingularityError(*bad, "alpha + beta*p_n = -2^(2k+2)/tau^2 (within tolerance) at n=" +
                                         std::to_string(*bad) + " for k=" + std::to_string(k));
    }
}

ScanOptions scan_options(const RunConfig& c) {
    ScanOptions o;
    o.k = c.k;
    o.tol = c.tol;
    o.workers = c.workers;
    o.monodromy_steps = c.steps;
    const Method m = parse_method(c.method);
    if (m != Method::Recursive && m != Method::Monodromy) {
        throw DomainError("grid commands accept --method recursive or monodromy");
    }
    o.method = m;
    return o;
}

StabilityGrid run_grid(const RunConfig& c) {
    if (!c.alpha_range || !c.beta_range) throw DomainError("this command needs --alpha-range and --beta-range");
    return grid_scan(parse_excitation(c.excitation), c.tau, *c.alpha_range, *c.beta_range, scan_options(c));
}

struct CheckRow {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

void RunConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("--tau must be a positive number");
    if (!(tol >= 0.0)) throw DomainError("--tol must be non-negative");
    if (!(root_tol > 0.0)) throw DomainError("root tolerance must be positive");
    if (alpha_range) alpha_range->validate("alpha");
    if (beta_range) beta_range->validate("beta");
    const Method m = method == "all" ? Method::Recursive : parse_method(method);
    int hi = kMaxRecursionOrder;
    if (m == Method::TriangularBacksolve) hi = kMaxTriangularOrder;
    if (m == Method::DirectInversion) hi = kMaxDirectOrder;
    if (k < kMinRecursionOrder || k > hi) {
        throw SizeError("-k " + std::to_string(k) + " outside [" + std::to_string(kMinRecursionOrder) + ", " +
                        std::to_string(hi) + "] for method " + method);
    }
    if (steps < kMinMonodromySteps) throw SizeError("--steps must be at least " + std::to_string(kMinMonodromySteps));
    if (quad_points < kMinLyapunovPoints) {
        throw SizeError("--quad-points must be at least " + std::to_string(kMinLyapunovPoints));
    }
}

Axis parse_axis(const std::string& text, std::optional<long> default_count) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() == 2 && default_count) parts.push_back(std::to_string(*default_count));
    if (parts.size() != 3) throw DomainError("range '" + text + "' must look like lo:hi:n");
    Axis a;
    a.min = parse_real(parts[0], "range lower bound");
    a.max = parse_real(parts[1], "range upper bound");
    const double n = parse_real(parts[2], "range count");
    if (n != std::floor(n) || n < 1 || n > 1e7) throw DomainError("range count '" + parts[2] + "' must be a positive integer");
    a.count = static_cast<long>(n);
    a.validate("range");
    return a;
}

void apply_config_json(RunConfig& c, const nlohmann::json& j, const std::vector<std::string>& skip) {
    if (!j.is_object()) throw DomainError("config file must hold a JSON object");
    for (const auto& [raw_key, value] : j.items()) {
        std::string key = raw_key;
        std::replace(key.begin(), key.end(), '_', '-');
        if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
        try {
            if (key == "alpha") c.alpha = value.get<double>();
            else if (key == "beta") c.beta = value.get<double>();
            else if (key == "alpha-range") c.alpha_range = parse_axis(value.get<std::string>());
            else if (key == "beta-range") c.beta_range = parse_axis(value.get<std::string>());
            else if (key == "tau") c.tau = value.get<double>();
            else if (key == "excitation") c.excitation = value.get<std::string>();
            else if (key == "k") c.k = value.get<int>();
            else if (key == "method") c.method = value.get<std::string>();
            else if (key == "tol") c.tol = value.get<double>();
            else if (key == "root-tol") c.root_tol = value.get<double>();
            else if (key == "workers") c.workers = value.get<unsigned>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "steps") c.steps = value.get<long>();
            else if (key == "quad-points") c.quad_points = value.get<int>();
            else if (key == "emit-fixtures") c.emit_fixtures = value.get<std::string>();
            else if (key == "command") c.command = value.get<std::string>();
            else throw DomainError("unknown config key '" + raw_key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw DomainError("config key '" + raw_key + "': " + e.what());
        }
    }
}

int cmd_delta(const RunConfig& c, std::ostream& out) {
    c.validate();
    const HillProblem p = point_problem(c);
    out << "problem alpha=" << fmt(p.alpha) << " beta=" << fmt(p.beta) << " tau=" << fmt(p.tau)
        << " excitation=" << p.excitation.describe() << '\n';

    auto print = [&](const std::string& name, const std::string& order, double delta) {
        out << name << ' ' << order << " delta=" << fmt(delta) << " class=" << class_name(classify(delta, c.tol))
            << '\n';
    };
    auto korder = [](int k) { return "k=" + std::to_string(k); };

    if (c.method == "all") {
        check_singularity(p, c.k);
        const int kt = std::min(c.k, kMaxTriangularOrder);
        const int kd = std::min(c.k, kMaxDirectOrder);
        const double rec = discriminant_recursive(p, c.k).delta;
        const double tri = discriminant_triangular(p, kt).delta;
        const double dir = discriminant_direct(p, kd).delta;
        print("recursive", korder(c.k), rec);
        print("triangular", korder(kt), tri);
        print("direct", korder(kd), dir);
        const auto mono = monodromy(p, c.steps);
        print("monodromy", "steps=" + std::to_string(mono.steps), mono.trace);
        const auto series = lyapunov_terms(p, 3, c.quad_points);
        print("lyapunov", "points=" + std::to_string(series.quad_points), series.delta());
        const double rec_t = kt == c.k ? rec : discriminant_recursive(p, kt).delta;
        const double rec_d = kd == c.k ? rec : discriminant_recursive(p, kd).delta;
        out << "gap recursive-triangular " << korder(kt) << " rel=" << fmt(rel_gap(tri, rec_t)) << '\n';
        out << "gap recursive-direct " << korder(kd) << " abs=" << fmt(std::abs(dir - rec_d)) << '\n';
        out << "gap recursive-monodromy abs=" << fmt(std::abs(rec - mono.trace)) << '\n';
        out << "monodromy det=" << fmt(mono.det) << '\n';
        out << "singular=no\n";
        return 0;
    }

    switch (parse_method(c.method)) {
        case Method::Recursive: {
            check_singularity(p, c.k);
            print("recursive", korder(c.k), discriminant_recursive(p, c.k).delta);
            break;
        }
        case Method::TriangularBacksolve:
            check_singularity(p, c.k);
            print("triangular", korder(c.k), discriminant_triangular(p, c.k).delta);
            break;
        case Method::DirectInversion:
            check_singularity(p, c.k);
            print("direct", korder(c.k), discriminant_direct(p, c.k).delta);
            break;
        case Method::Monodromy: {
            const auto mono = monodromy(p, c.steps);
            print("monodromy", "steps=" + std::to_string(mono.steps), mono.trace);
            out << "monodromy det=" << fmt(mono.det) << '\n';
            break;
        }
        case Method::LyapunovSeries: {
            const auto series = lyapunov_terms(p, 3, c.quad_points);
            print("lyapunov", "points=" + std::to_string(series.quad_points), series.delta());
            out << "lyapunov terms=";
            for (std::size_t i = 0; i < series.terms.size(); ++i) out << (i ? "," : "") << fmt(series.terms[i]);
            out << '\n';
            break;
        }
    }
    out << "singular=no\n";
    return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    c.validate();
    const auto grid = run_grid(c);
    if (c.out.empty()) {
        io::write_grid_csv(out, grid);
    } else {
        std::ostringstream text;
        io::write_grid_csv(text, grid);
        io::write_text_file(c.out, text.str());
        out << "wrote " << c.out << " cells=" << grid.deltas.size() << " singular=" << grid.singular_count << '\n';
    }
    return 0;
}

int cmd_chart(const RunConfig& c, std::ostream& out) {
    c.validate();
    const auto grid = run_grid(c);
    const auto curves = transition_contours(grid);
    const std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);

    std::ostringstream csv, pgm, lines;
    io::write_grid_csv(csv, grid);
    io::write_pgm(pgm, grid);
    io::write_curves_csv(lines, curves);
    io::write_text_file(dir / "grid.csv", csv.str());
    io::write_text_file(dir / "chart.pgm", pgm.str());
    io::write_text_file(dir / "curves.csv", lines.str());

    std::size_t counts[4] = {0, 0, 0, 0};
    for (auto cls : grid.classes) ++counts[static_cast<int>(cls)];
    out << "chart " << grid.alpha_axis.count << "x" << grid.beta_axis.count << " method=" << method_name(grid.method)
        << " k=" << grid.k << '\n';
    out << "cells stable=" << counts[0] << " unstable=" << counts[1] << " transition=" << counts[2]
        << " singular=" << counts[3] << '\n';
    out << "curves plus=" << curves.plus_level.size() << " minus=" << curves.minus_level.size()
        << " skipped_cells=" << curves.skipped_cells << '\n';
    out << "wrote " << (dir / "grid.csv").string() << ' ' << (dir / "chart.pgm").string() << ' '
        << (dir / "curves.csv").string() << '\n';
    return 0;
}

int cmd_interlace(const RunConfig& c, std::ostream& out) {
    c.validate();
    if (!c.beta) throw DomainError("interlace needs --beta");
    if (!c.alpha_range) throw DomainError("interlace needs --alpha-range lo:hi");
    if (!(c.alpha_range->max > c.alpha_range->min)) throw DomainError("interlace needs lo < hi");
    const auto excitation = parse_excitation(c.excitation);
    InterlacingReport report;
    if (c.method == "monodromy") {
        const MonodromyIntegrator integrator(excitation, c.tau, c.steps);
        const double beta = *c.beta;
        report = interlacing_scan([&](double a) { return integrator.delta(a, beta); }, beta,
                                  c.alpha_range->min, c.alpha_range->max, c.root_tol);
    } else if (c.method == "recursive") {
        report = interlacing_scan(excitation, c.tau, *c.beta, {c.alpha_range->min, c.alpha_range->max}, c.k,
                                  c.root_tol);
    } else {
        throw DomainError("interlace accepts --method recursive or monodromy");
    }
    const std::string text = io::interlacing_json(report).dump(2) + "\n";
    if (!c.out.empty()) io::write_text_file(c.out, text);
    out << text;
    return report.ordering_ok ? 0 : 1;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<CheckRow> rows;
    std::vector<io::Fixture> fixtures;

    {
        CheckRow r{"closed-form beta=0 (k=14)", true, 0.0, 5e-3, ""};
        const std::vector<std::pair<double, double>> cases{{0.0625, two_pi}, {0.25, two_pi}, {1.0, two_pi},
                                                           {2.0, two_pi}, {-1.0, 1.0}};
        for (const auto& [a, tau] : cases) {
            const HillProblem p{a, 0.0, tau, Excitation::cosine()};
            const double d = discriminant_recursive(p, 14).delta;
            const double exact = constant_coeff_delta(a, tau);
            const double gap = std::abs(d - exact);
            if (gap > r.worst) {
                r.worst = gap;
                r.detail = "alpha=" + fmt(a) + " tau=" + fmt(tau);
            }
            fixtures.push_back({"closed_form_a" + format_shortest(a), p, "closed-form", 0, exact});
        }
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }

    const std::vector<std::string> excitations{"cos", "cossum:1x1,1x2", "square:1,-1,0.5"};
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> box(-5.0, 5.0);
    {
        CheckRow r{"recursive vs triangular (k=10)", true, 0.0, 1e-10, ""};
        for (const auto& e : excitations) {
            for (int i = 0; i < 12; ++i) {
                const HillProblem p{box(rng), box(rng), two_pi, parse_excitation(e)};
                const double rec = discriminant_recursive(p, 10).delta;
                const double tri = discriminant_triangular(p, 10, c.scale_perturbation).delta;
                const double gap = rel_gap(tri, rec);
                if (!(gap <= r.worst)) {
                    r.worst = gap;
                    r.detail = e + " alpha=" + fmt(p.alpha) + " beta=" + fmt(p.beta);
                }
            }
        }
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        CheckRow r{"recursive vs direct (k=6, relative)", true, 0.0, 1e-6, ""};
        for (const auto& e : excitations) {
            for (int i = 0; i < 4; ++i) {
                const HillProblem p{box(rng), box(rng), two_pi, parse_excitation(e)};
                const double gap = rel_gap(discriminant_direct(p, 6).delta, discriminant_recursive(p, 6).delta);
                if (!(gap <= r.worst)) {
                    r.worst = gap;
                    r.detail = e + " alpha=" + fmt(p.alpha) + " beta=" + fmt(p.beta);
                }
            }
        }
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        CheckRow r{"running sums vs nested sums (k=6)", true, 0.0, 1e-12, ""};
        for (const auto& e : excitations) {
            const auto samples = sample_p(parse_excitation(e), 6);
            const double a = box(rng);
            const double b = box(rng);
            const double fast = recursive_delta(samples, a, b, two_pi);
            const double slow = recursive_delta_naive(samples, a, b, two_pi);
            const double gap = rel_gap(fast, slow);
            if (!(gap <= r.worst)) {
                r.worst = gap;
                r.detail = e;
            }
        }
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        CheckRow r{"monodromy det = 1 (2^14 steps)", true, 0.0, 1e-8, ""};
        for (const auto& e : excitations) {
            const HillProblem p{1.0, 0.5, two_pi, parse_excitation(e)};
            const auto m = monodromy(p, 1 << 14);
            const double gap = std::abs(m.det - 1.0);
            if (!(gap <= r.worst)) {
                r.worst = gap;
                r.detail = e;
            }
        }
        const HillProblem ref{0.2, 0.5, two_pi, Excitation::cosine()};
        fixtures.push_back({"mathieu_monodromy", ref, "monodromy", 1 << 16, monodromy(ref, 1 << 16).trace});
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        CheckRow r{"square wave exact vs monodromy", true, 0.0, 1e-8, "alpha=1 beta=0.5"};
        const HillProblem p{1.0, 0.5, two_pi, Excitation::square(1.0, -1.0, 0.5)};
        const double exact = piecewise_constant_delta(constant_levels(p));
        r.worst = std::abs(exact - monodromy(p, 1 << 14).trace);
        fixtures.push_back({"meissner_exact", p, "piecewise-constant", 2, exact});
        fixtures.push_back({"meissner_recursive_k14", p, "recursive", 14, discriminant_recursive(p, 14).delta});
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        CheckRow r{"series constant-q identities", true, 0.0, 1e-6, ""};
        for (double a : {0.5, 2.0, -1.0}) {
            const HillProblem p{a, 0.0, 1.5, Excitation::cosine()};
            const auto s = lyapunov_terms(p, 2, c.quad_points);
            const double t = p.tau;
            const double g1 = rel_gap(s.terms[1], a * t * t);
            const double g2 = std::abs(s.terms[2] - a * a * std::pow(t, 4) / 12.0) / (a * a * std::pow(t, 4) / 12.0);
            const double g = std::max(g1, g2);
            if (!(g <= r.worst)) {
                r.worst = g;
                r.detail = "alpha=" + fmt(a);
            }
        }
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        const HillProblem p{0.05, 0.05, two_pi, Excitation::cosine()};
        const auto s = lyapunov_terms(p, 3, c.quad_points);
        const double mono = monodromy(p, 1 << 14).trace;
        CheckRow r{"series within next-term bound", true, std::abs(s.delta() - mono), std::abs(s.terms[3]),
                   "alpha=beta=0.05"};
        fixtures.push_back({"mathieu_series", p, "lyapunov", s.quad_points, s.delta()});
        r.pass = r.worst < r.tolerance;
        rows.push_back(r);
    }
    {
        const auto rep = interlacing_scan(Excitation::cosine(), two_pi, 0.5, {-1.0, 5.0}, 12);
        CheckRow r{"root interlacing (beta=0.5, k=12)", rep.ordering_ok, 0.0, 0.0,
                   std::to_string(rep.lambdas.size()) + " roots at +2, " + std::to_string(rep.lambda_primes.size()) +
                       " at -2"};
        rows.push_back(r);
    }

    out << "check,status,worst,tolerance,detail\n";
    const CheckRow* worst = nullptr;
    double worst_ratio = -1.0;
    for (const auto& r : rows) {
        out << r.name << ',' << (r.pass ? "pass" : "FAIL") << ',' << fmt(r.worst) << ',' << fmt(r.tolerance) << ','
            << r.detail << '\n';
        if (!r.pass) {
            const double ratio = r.tolerance > 0 ? r.worst / r.tolerance : 1.0;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst = &r;
            }
        }
    }
    if (!c.emit_fixtures.empty()) {
        const auto path = std::filesystem::path(c.emit_fixtures) / "oracles.json";
        io::write_fixtures(path, fixtures);
        out << "wrote " << path.string() << '\n';
    }
    if (worst) {
        out << "worst offender: " << worst->name << " worst=" << fmt(worst->worst)
            << " tolerance=" << fmt(worst->tolerance) << ' ' << worst->detail << '\n';
        return 1;
    }
    return 0;
}

int run_command(const RunConfig& config, std::ostream& out) {
    if (config.command == "delta") return cmd_delta(config, out);
    if (config.command == "sweep") return cmd_sweep(config, out);
    if (config.command == "chart") return cmd_chart(config, out);
    if (config.command == "interlace") return cmd_interlace(config, out);
    if (config.command == "validate") return cmd_validate(config, out);
    throw DomainError("unknown command '" + config.command + "'");
}

}  // namespace hillwalsh
