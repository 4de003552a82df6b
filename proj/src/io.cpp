#include "hillwalsh/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "hillwalsh/error.hpp"
#include "hillwalsh/format.hpp"

namespace hillwalsh::io {

namespace {

int gray_level(StabilityClass c) {
    switch (c) {
        case StabilityClass::Stable: return 255;
        case StabilityClass::Transition: return 128;
        case StabilityClass::Unstable: return 0;
        case StabilityClass::Singular: return 64;
    }
    return 64;
}

}  // namespace

void write_grid_csv(std::ostream& out, const StabilityGrid& grid) {
    out << "alpha,beta,delta,class\n";
    for (long i = 0; i < grid.beta_axis.count; ++i) {
        const std::string beta = format_number(grid.beta_axis.at(i));
        for (long j = 0; j < grid.alpha_axis.count; ++j) {
            out << format_number(grid.alpha_axis.at(j)) << ',' << beta << ','
                << format_number(grid.delta(i, j)) << ',' << class_name(grid.cls(i, j)) << '\n';
        }
    }
}

void write_pgm(std::ostream& out, const StabilityGrid& grid) {
    out << "P2\n# stability chart: alpha across, beta down\n"
        << grid.alpha_axis.count << ' ' << grid.beta_axis.count << "\n255\n";
    for (long i = 0; i < grid.beta_axis.count; ++i) {
        for (long j = 0; j < grid.alpha_axis.count; ++j) {
            if (j) out << ' ';
            out << gray_level(grid.cls(i, j));
        }
        out << '\n';
    }
}

void write_curves_csv(std::ostream& out, const TransitionCurves& curves) {
    out << "curve_id,level,alpha,beta\n";
    long id = 0;
    auto emit = [&](const std::vector<Polyline>& lines, const char* level) {
        for (const auto& line : lines) {
            for (const auto& [a, b] : line.points) {
                out << id << ',' << level << ',' << format_number(a) << ',' << format_number(b) << '\n';
            }
            if (line.closed && !line.points.empty()) {
                out << id << ',' << level << ',' << format_number(line.points.front().first) << ','
                    << format_number(line.points.front().second) << '\n';
            }
            ++id;
        }
    };
    emit(curves.plus_level, "+2");
    emit(curves.minus_level, "-2");
}

double rounded(double x) {
    if (!std::isfinite(x)) return x;
    return std::stod(format_number(x));
}

nlohmann::json interlacing_json(const InterlacingReport& report) {
    auto list = [](const std::vector<double>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (double x : v) a.push_back(rounded(x));
        return a;
    };
    nlohmann::json j;
    j["beta"] = rounded(report.beta);
    j["lambdas"] = list(report.lambdas);
    j["lambda_primes"] = list(report.lambda_primes);
    j["ordering_ok"] = report.ordering_ok;
    j["coincident"] = list(report.coincident);
    j["intervals"] = nlohmann::json::array();
    for (const auto& iv : report.intervals) {
        j["intervals"].push_back({{"lo", rounded(iv.lo)}, {"hi", rounded(iv.hi)}, {"label", iv.label}});
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

nlohmann::json fixture_json(const Fixture& fixture) {
    nlohmann::json problem;
    problem["alpha"] = fixture.problem.alpha;
    problem["beta"] = fixture.problem.beta;
    problem["tau"] = fixture.problem.tau;
    if (const auto* t = std::get_if<SampledTable>(&fixture.problem.excitation.kind())) {
        problem["excitation"] = "table";
        problem["values"] = t->values;
    } else {
        problem["excitation"] = fixture.problem.excitation.describe();
    }
    return {{"name", fixture.name},
            {"problem", problem},
            {"method", fixture.method},
            {"order", fixture.order},
            {"delta", rounded(fixture.delta)}};
}

Fixture fixture_from_json(const nlohmann::json& j) {
    try {
        Fixture f;
        f.name = j.at("name").get<std::string>();
        const auto& p = j.at("problem");
        f.problem.alpha = p.at("alpha").get<double>();
        f.problem.beta = p.at("beta").get<double>();
        f.problem.tau = p.at("tau").get<double>();
        const auto spec = p.at("excitation").get<std::string>();
        if (spec == "table") {
            f.problem.excitation = Excitation::table(p.at("values").get<std::vector<double>>());
        } else {
            f.problem.excitation = parse_excitation(spec);
        }
        f.method = j.at("method").get<std::string>();
        f.order = j.at("order").get<long>();
        f.delta = j.at("delta").get<double>();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed fixture record: ") + e.what());
    }
}

std::vector<Fixture> read_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fixture file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse '" + path.string() + "': " + e.what());
    }
    std::vector<Fixture> out;
    for (const auto& rec : doc.at("fixtures")) out.push_back(fixture_from_json(rec));
    return out;
}

void write_fixtures(const std::filesystem::path& path, const std::vector<Fixture>& fixtures) {
    nlohmann::json doc;
    doc["fixtures"] = nlohmann::json::array();
    for (const auto& f : fixtures) doc["fixtures"].push_back(fixture_json(f));
    write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace hillwalsh::io
