#pragma once

// File formats. Every real is written with 12 significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hillwalsh/discriminant.hpp"
#include "hillwalsh/stability.hpp"

namespace hillwalsh::io {

/// Header `alpha,beta,delta,class`; beta-major rows.
void write_grid_csv(std::ostream& out, const StabilityGrid& grid);

/// Plain (P2) graymap, one pixel per cell: stable 255, transition 128,
/// unstable 0, singular 64. First image row is the smallest beta.
void write_pgm(std::ostream& out, const StabilityGrid& grid);

/// Header `curve_id,level,alpha,beta`; closed curves repeat their first point.
void write_curves_csv(std::ostream& out, const TransitionCurves& curves);

nlohmann::json interlacing_json(const InterlacingReport& report);

/// Rounds to 12 significant digits so JSON output matches the text formats.
double rounded(double x);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

struct Fixture {
    std::string name;
    HillProblem problem;
    std::string method;
    long order = 0;  // k, RK4 steps or quadrature points
    double delta = 0.0;
};

nlohmann::json fixture_json(const Fixture& fixture);
Fixture fixture_from_json(const nlohmann::json& j);

std::vector<Fixture> read_fixtures(const std::filesystem::path& path);
void write_fixtures(const std::filesystem::path& path, const std::vector<Fixture>& fixtures);

}  // namespace hillwalsh::io
