#pragma once

// Stability classification, alpha-beta grid scans, transition-curve
// extraction and the root-ordering check along alpha at fixed beta.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hillwalsh/discriminant.hpp"
#include "hillwalsh/excitation.hpp"

namespace hillwalsh {

enum class StabilityClass : std::uint8_t { Stable, Unstable, Transition, Singular };

std::string_view class_name(StabilityClass c);

inline constexpr double kDefaultClassifyTol = 1e-6;

/// |delta| < 2 - tol Stable, > 2 + tol Unstable, otherwise Transition;
/// non-finite input is Singular.
StabilityClass classify(double delta, double tol = kDefaultClassifyTol);

/// count points from min to max inclusive. count == 1 means the single value min.
struct Axis {
    double min = 0.0;
    double max = 0.0;
    long count = 1;

    double at(long i) const;
    double spacing() const;  // 0 for a single point
    void validate(const char* name) const;
};

struct ScanOptions {
    int k = 12;
    double tol = kDefaultClassifyTol;
    unsigned workers = 1;
    Method method = Method::Recursive;  // Recursive or Monodromy
    long monodromy_steps = 4096;
};

struct StabilityGrid {
    Axis alpha_axis;
    Axis beta_axis;
    std::vector<double> deltas;           // beta-major: deltas[i * alpha count + j]
    std::vector<StabilityClass> classes;  // same layout
    int k = 0;
    Method method = Method::Recursive;
    double tol = kDefaultClassifyTol;
    std::size_t singular_count = 0;

    std::size_t index(long beta_i, long alpha_j) const {
        return static_cast<std::size_t>(beta_i * alpha_axis.count + alpha_j);
    }
    double delta(long beta_i, long alpha_j) const { return deltas[index(beta_i, alpha_j)]; }
    StabilityClass cls(long beta_i, long alpha_j) const { return classes[index(beta_i, alpha_j)]; }
};

/// Rows are shared out over `workers` threads; each cell is written once, so
/// the result does not depend on the worker count.
StabilityGrid grid_scan(const Excitation& excitation, double tau, const Axis& alpha_axis,
                        const Axis& beta_axis, const ScanOptions& options);

using Point = std::pair<double, double>;  // (alpha, beta)

struct Polyline {
    std::vector<Point> points;
    bool closed = false;
};

struct TransitionCurves {
    std::vector<Polyline> plus_level;   // delta = +2
    std::vector<Polyline> minus_level;  // delta = -2
    std::size_t skipped_cells = 0;      // cells with a singular corner
};

/// Marching squares on delta - 2 and delta + 2 with linear edge
/// interpolation. Saddle cells are split by the average of the corners.
TransitionCurves transition_contours(const StabilityGrid& grid);

/// Marching squares for one level on a row-major field; exposed for tests.
std::vector<Polyline> contour_level(const std::vector<double>& field, const Axis& x_axis,
                                    const Axis& y_axis, double level, std::size_t* skipped = nullptr);

struct LabeledInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::string label;  // "stable" or "unstable"
};

struct InterlacingReport {
    double beta = 0.0;
    std::vector<double> lambdas;        // roots of delta = 2
    std::vector<double> lambda_primes;  // roots of delta = -2
    bool ordering_ok = false;
    std::vector<LabeledInterval> intervals;
    std::vector<double> coincident;     // double roots (tangencies), each listed once
};

inline constexpr int kMeshPerUnitAlpha = 512;

/// Root scan of an arbitrary delta(alpha) on [lo, hi]. Sign changes on the
/// mesh are bisected to root_tol; mesh extrema within touch_tol of the level
/// are refined and reported as coincident double roots.
InterlacingReport interlacing_scan(const std::function<double(double)>& delta_of_alpha, double beta,
                                   double lo, double hi, double root_tol = 1e-10,
                                   double touch_tol = 1e-6);

/// Same scan with the discriminant recursion at order k.
InterlacingReport interlacing_scan(const Excitation& excitation, double tau, double beta,
                                   std::pair<double, double> alpha_range, int k,
                                   double root_tol = 1e-10);

/// Checks the labels of the merged roots against the required pattern
/// (+)(--)(++)(--)... given delta at both ends of the window.
bool interlacing_order_ok(const std::vector<double>& lambdas, const std::vector<double>& lambda_primes,
                          double delta_lo, double delta_hi);

}  // namespace hillwalsh
