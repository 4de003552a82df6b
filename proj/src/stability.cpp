#include "hillwalsh/stability.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"
#include "hillwalsh/oracles.hpp"

namespace hillwalsh {

std::string_view class_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::Stable: return "stable";
        case StabilityClass::Unstable: return "unstable";
        case StabilityClass::Transition: return "transition";
        case StabilityClass::Singular: return "singular";
    }
    return "unknown";
}

StabilityClass classify(double delta, double tol) {
    if (!std::isfinite(delta)) return StabilityClass::Singular;
    const double a = std::abs(delta);
    if (a < 2.0 - tol) return StabilityClass::Stable;
    if (a > 2.0 + tol) return StabilityClass::Unstable;
    return StabilityClass::Transition;
}

double Axis::at(long i) const {
    if (count <= 1) return min;
    if (i == count - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

double Axis::spacing() const {
    return count <= 1 ? 0.0 : (max - min) / static_cast<double>(count - 1);
}

void Axis::validate(const char* name) const {
    if (count < 1) throw DomainError(std::string(name) + " axis needs at least one point");
    if (!std::isfinite(min) || !std::isfinite(max)) throw DomainError(std::string(name) + " axis bounds must be finite");
    if (max < min) throw DomainError(std::string(name) + " axis range is reversed");
    if (count == 1 && max != min) {
        throw DomainError(std::string(name) + " axis with one point needs min == max");
    }
}

StabilityGrid grid_scan(const Excitation& excitation, double tau, const Axis& alpha_axis,
                        const Axis& beta_axis, const ScanOptions& options) {
    alpha_axis.validate("alpha");
    beta_axis.validate("beta");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("grid_scan: tau must be positive");

    StabilityGrid grid;
    grid.alpha_axis = alpha_axis;
    grid.beta_axis = beta_axis;
    grid.k = options.k;
    grid.method = options.method;
    grid.tol = options.tol;
    const auto cells = static_cast<std::size_t>(alpha_axis.count * beta_axis.count);
    grid.deltas.assign(cells, 0.0);
    grid.classes.assign(cells, StabilityClass::Singular);

    std::vector<double> samples;
    std::optional<MonodromyIntegrator> integrator;
    if (options.method == Method::Recursive) {
        if (options.k < kMinRecursionOrder || options.k > kMaxRecursionOrder) {
            throw SizeError("grid_scan: k=" + std::to_string(options.k) + " outside the recursion range");
        }
        samples = sample_p(excitation, options.k);
    } else if (options.method == Method::Monodromy) {
        integrator.emplace(excitation, tau, options.monodromy_steps);
    } else {
        throw DomainError("grid_scan supports the recursive and monodromy methods only");
    }

    auto cell_delta = [&](double alpha, double beta) {
        try {
            if (integrator) return integrator->delta(alpha, beta);
            return recursive_delta(samples, alpha, beta, tau);
        } catch (const SingularityError&) {
            return std::nan("");
        } catch (const NumericError&) {
            return std::nan("");
        }
    };

    std::atomic<long> next_row{0};
    auto work = [&] {
        for (long i = next_row++; i < beta_axis.count; i = next_row++) {
            const double beta = beta_axis.at(i);
            for (long j = 0; j < alpha_axis.count; ++j) {
                const double d = cell_delta(alpha_axis.at(j), beta);
                grid.deltas[grid.index(i, j)] = d;
                grid.classes[grid.index(i, j)] = classify(d, options.tol);
            }
        }
    };

    unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.workers;
    workers = static_cast<unsigned>(std::min<long>(workers, beta_axis.count));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    grid.singular_count = static_cast<std::size_t>(
        std::count(grid.classes.begin(), grid.classes.end(), StabilityClass::Singular));
    return grid;
}

std::vector<Polyline> contour_level(const std::vector<double>& field, const Axis& x_axis,
                                    const Axis& y_axis, double level, std::size_t* skipped) {
    const long nx = x_axis.count;
    const long ny = y_axis.count;
    if (static_cast<long>(field.size()) != nx * ny) throw SizeError("contour_level: field size mismatch");
    std::vector<Polyline> out;
    if (nx < 2 || ny < 2) return out;

    auto f = [&](long i, long j) { return field[static_cast<std::size_t>(i * nx + j)] - level; };
    const long h_edges = ny * (nx - 1);
    auto h_id = [&](long i, long j) { return i * (nx - 1) + j; };
    auto v_id = [&](long i, long j) { return h_edges + i * nx + j; };
    const long edge_count = h_edges + (ny - 1) * nx;

    auto edge_point = [&](long id) -> Point {
        if (id < h_edges) {
            const long i = id / (nx - 1);
            const long j = id % (nx - 1);
            const double f0 = f(i, j);
            const double f1 = f(i, j + 1);
            const double t = f0 / (f0 - f1);
            return {x_axis.at(j) + t * (x_axis.at(j + 1) - x_axis.at(j)), y_axis.at(i)};
        }
        const long r = id - h_edges;
        const long i = r / nx;
        const long j = r % nx;
        const double f0 = f(i, j);
        const double f1 = f(i + 1, j);
        const double t = f0 / (f0 - f1);
        return {x_axis.at(j), y_axis.at(i) + t * (y_axis.at(i + 1) - y_axis.at(i))};
    };

    std::vector<std::array<long, 2>> segments;
    std::size_t skip = 0;
    for (long i = 0; i + 1 < ny; ++i) {
        for (long j = 0; j + 1 < nx; ++j) {
            const std::array<double, 4> c{f(i, j), f(i, j + 1), f(i + 1, j + 1), f(i + 1, j)};
            if (std::any_of(c.begin(), c.end(), [](double v) { return !std::isfinite(v); })) {
                ++skip;
                continue;
            }
            const std::array<bool, 4> s{c[0] > 0, c[1] > 0, c[2] > 0, c[3] > 0};
            // edge e joins corner e and corner (e+1)%4
            const std::array<long, 4> e{h_id(i, j), v_id(i, j + 1), h_id(i + 1, j), v_id(i, j)};
            std::array<bool, 4> crossed{};
            int n = 0;
            for (int q = 0; q < 4; ++q) {
                crossed[q] = s[q] != s[(q + 1) % 4];
                n += crossed[q];
            }
            if (n == 2) {
                long a = -1;
                long b = -1;
                for (int q = 0; q < 4; ++q) {
                    if (!crossed[q]) continue;
                    (a < 0 ? a : b) = e[q];
                }
                segments.push_back({a, b});
            } else if (n == 4) {
                const bool centre = (c[0] + c[1] + c[2] + c[3]) / 4.0 > 0;
                if (centre == s[0]) {
                    // corners 0 and 2 joined through the centre; cut off 1 and 3
                    segments.push_back({e[0], e[1]});
                    segments.push_back({e[2], e[3]});
                } else {
                    segments.push_back({e[3], e[0]});
                    segments.push_back({e[1], e[2]});
                }
            }
        }
    }
    if (skipped) *skipped += skip;

    std::vector<std::array<long, 2>> at_edge(static_cast<std::size_t>(edge_count), {-1, -1});
    for (long sidx = 0; sidx < static_cast<long>(segments.size()); ++sidx) {
        for (long id : segments[static_cast<std::size_t>(sidx)]) {
            auto& slot = at_edge[static_cast<std::size_t>(id)];
            (slot[0] < 0 ? slot[0] : slot[1]) = sidx;
        }
    }
    auto degree = [&](long id) {
        const auto& slot = at_edge[static_cast<std::size_t>(id)];
        return (slot[0] >= 0) + (slot[1] >= 0);
    };

    std::vector<bool> used(segments.size(), false);
    auto walk = [&](long sidx, long start_edge) {
        Polyline line;
        auto push = [&](const Point& p) {
            if (line.points.empty() || line.points.back() != p) line.points.push_back(p);
        };
        push(edge_point(start_edge));
        long edge = start_edge;
        long seg = sidx;
        while (seg >= 0 && !used[static_cast<std::size_t>(seg)]) {
            used[static_cast<std::size_t>(seg)] = true;
            const auto& sg = segments[static_cast<std::size_t>(seg)];
            edge = sg[0] == edge ? sg[1] : sg[0];
            if (edge == start_edge) {
                line.closed = true;
                break;
            }
            push(edge_point(edge));
            const auto& slot = at_edge[static_cast<std::size_t>(edge)];
            seg = slot[0] == seg ? slot[1] : slot[0];
        }
        return line;
    };

    for (long sidx = 0; sidx < static_cast<long>(segments.size()); ++sidx) {
        if (used[static_cast<std::size_t>(sidx)]) continue;
        for (long id : segments[static_cast<std::size_t>(sidx)]) {
            if (degree(id) == 1) {
                out.push_back(walk(sidx, id));
                break;
            }
        }
    }
    for (long sidx = 0; sidx < static_cast<long>(segments.size()); ++sidx) {
        if (used[static_cast<std::size_t>(sidx)]) continue;
        out.push_back(walk(sidx, segments[static_cast<std::size_t>(sidx)][0]));
    }
    return out;
}

TransitionCurves transition_contours(const StabilityGrid& grid) {
    TransitionCurves curves;
    curves.plus_level = contour_level(grid.deltas, grid.alpha_axis, grid.beta_axis, 2.0, &curves.skipped_cells);
    std::size_t minus_skipped = 0;
    curves.minus_level = contour_level(grid.deltas, grid.alpha_axis, grid.beta_axis, -2.0, &minus_skipped);
    return curves;
}

namespace {

double find_root(const std::function<double(double)>& g, double a, double b, double ga, double gb,
                 double tol) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        g, a, b, ga, gb, [tol](double x, double y) { return std::abs(y - x) <= tol; }, iters);
    return 0.5 * (bracket.first + bracket.second);
}

struct LevelRoots {
    std::vector<double> roots;
    std::vector<double> touches;
};

LevelRoots roots_for_level(const std::function<double(double)>& delta, const std::vector<double>& mesh,
                           const std::vector<double>& values, double level, double root_tol,
                           double touch_tol) {
    LevelRoots out;
    auto g = [&](double a) { return delta(a) - level; };
    const std::size_t m = mesh.size();
    std::vector<double> gv(m);
    for (std::size_t i = 0; i < m; ++i) gv[i] = values[i] - level;
    auto positive = [](double v) { return v > 0.0; };

    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (positive(gv[i]) != positive(gv[i + 1])) {
            out.roots.push_back(find_root(g, mesh[i], mesh[i + 1], gv[i], gv[i + 1], root_tol));
        }
    }

    // an extremum of delta that approaches the level from the inside may touch
    // or cross it between mesh points
    const double toward = level > 0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if (positive(gv[i - 1]) != positive(gv[i]) || positive(gv[i]) != positive(gv[i + 1])) continue;
        const double here = toward * gv[i];
        if (!(here <= 0.0 && here >= toward * gv[i - 1] && here >= toward * gv[i + 1])) continue;
        std::uintmax_t iters = 200;
        const auto best = boost::math::tools::brent_find_minima(
            [&](double a) { return -toward * g(a); }, mesh[i - 1], mesh[i + 1], 52, iters);
        const double peak = -best.second;  // toward * g at the extremum
        if (peak > 0.0) {
            out.roots.push_back(find_root(g, mesh[i - 1], best.first, gv[i - 1], g(best.first), root_tol));
            out.roots.push_back(find_root(g, best.first, mesh[i + 1], g(best.first), gv[i + 1], root_tol));
        } else if (peak >= -touch_tol) {
            out.roots.push_back(best.first);
            out.roots.push_back(best.first);
            out.touches.push_back(best.first);
        }
    }
    std::sort(out.roots.begin(), out.roots.end());
    return out;
}

}  // namespace

bool interlacing_order_ok(const std::vector<double>& lambdas, const std::vector<double>& lambda_primes,
                          double delta_lo, double delta_hi) {
    std::vector<std::pair<double, int>> merged;
    for (double r : lambdas) merged.emplace_back(r, +1);
    for (double r : lambda_primes) merged.emplace_back(r, -1);
    std::sort(merged.begin(), merged.end());

    std::vector<std::pair<int, int>> runs;  // (sign, length)
    for (const auto& [x, sign] : merged) {
        if (!runs.empty() && runs.back().first == sign) {
            ++runs.back().second;
        } else {
            runs.emplace_back(sign, 1);
        }
    }
    auto region = [](double d) { return d > 2.0 ? 1 : (d < -2.0 ? -1 : 0); };
    if (runs.empty()) return region(delta_lo) == region(delta_hi);

    const bool open_lo = region(delta_lo) != 0;
    const bool open_hi = region(delta_hi) != 0;
    if (open_lo && runs.front().first != region(delta_lo)) return false;
    if (open_hi && runs.back().first != region(delta_hi)) return false;
    if (runs.size() == 1) {
        if (open_lo && open_hi) return false;
        return runs.front().second == (open_lo || open_hi ? 1 : 2);
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
        int expected = 2;
        if (r == 0 && open_lo) expected = 1;
        if (r + 1 == runs.size() && open_hi) expected = 1;
        if (runs[r].second != expected) return false;
    }
    return true;
}

InterlacingReport interlacing_scan(const std::function<double(double)>& delta_of_alpha, double beta,
                                   double lo, double hi, double root_tol, double touch_tol) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
        throw DomainError("interlacing_scan: alpha range must be finite with lo < hi");
    }
    const auto intervals =
        std::max<long>(2, static_cast<long>(std::ceil(kMeshPerUnitAlpha * (hi - lo))));
    const Axis mesh_axis{lo, hi, intervals + 1};
    std::vector<double> mesh(static_cast<std::size_t>(mesh_axis.count));
    std::vector<double> values(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        mesh[i] = mesh_axis.at(static_cast<long>(i));
        values[i] = delta_of_alpha(mesh[i]);
        if (!std::isfinite(values[i])) {
            throw NumericError("interlacing_scan: non-finite discriminant at alpha=" + format_shortest(mesh[i]));
        }
    }

    InterlacingReport report;
    report.beta = beta;
    auto plus = roots_for_level(delta_of_alpha, mesh, values, 2.0, root_tol, touch_tol);
    auto minus = roots_for_level(delta_of_alpha, mesh, values, -2.0, root_tol, touch_tol);
    report.lambdas = plus.roots;
    report.lambda_primes = minus.roots;

    // same-level roots closer than the mesh spacing are one tangency split by rounding
    const double spacing = mesh_axis.spacing();
    for (const auto* level : {&plus, &minus}) {
        for (double t : level->touches) report.coincident.push_back(t);
        for (std::size_t i = 0; i + 1 < level->roots.size(); ++i) {
            const double a = level->roots[i];
            const double b = level->roots[i + 1];
            if (b - a < spacing && b != a) report.coincident.push_back(0.5 * (a + b));
        }
    }
    std::sort(report.coincident.begin(), report.coincident.end());

    report.ordering_ok = interlacing_order_ok(report.lambdas, report.lambda_primes, values.front(), values.back());

    std::vector<double> cuts;
    cuts.insert(cuts.end(), report.lambdas.begin(), report.lambdas.end());
    cuts.insert(cuts.end(), report.lambda_primes.begin(), report.lambda_primes.end());
    std::sort(cuts.begin(), cuts.end());
    bool unstable = std::abs(values.front()) > 2.0;
    double left = lo;
    for (double c : cuts) {
        if (c > left) report.intervals.push_back({left, c, unstable ? "unstable" : "stable"});
        left = std::max(left, c);
        unstable = !unstable;
    }
    if (hi > left) report.intervals.push_back({left, hi, unstable ? "unstable" : "stable"});
    return report;
}

InterlacingReport interlacing_scan(const Excitation& excitation, double tau, double beta,
                                   std::pair<double, double> alpha_range, int k, double root_tol) {
    if (k < kMinRecursionOrder || k > kMaxRecursionOrder) {
        throw SizeError("interlacing_scan: k=" + std::to_string(k) + " outside the recursion range");
    }
    const auto samples = sample_p(excitation, k);
    return interlacing_scan([&](double a) { return recursive_delta(samples, a, beta, tau); }, beta,
                            alpha_range.first, alpha_range.second, root_tol);
}

}  // namespace hillwalsh
