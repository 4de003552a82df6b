// hillwalsh: discriminant, stability charts and checks for Hill's equation.
//
//   hillwalsh delta --alpha 1 --beta 0.5 --excitation cos -k 12
//   hillwalsh chart --alpha-range 0:4:200 --beta-range 0:2:100 --excitation cossum:1x1,1x2 --out chart/
//   hillwalsh interlace --beta 0.5 --alpha-range -1:5 -k 14
//   hillwalsh validate --emit-fixtures fixtures/

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hillwalsh/commands.hpp"
#include "hillwalsh/error.hpp"

namespace {

struct Flags {
    double alpha = 0.0;
    double beta = 0.0;
    std::string alpha_range;
    std::string beta_range;
    double tau = 0.0;
    std::string excitation;
    int k = 0;
    std::string method;
    double tol = 0.0;
    double root_tol = 0.0;
    unsigned workers = 1;
    std::string out;
    long steps = 0;
    int quad_points = 0;
    std::string config;
    std::string emit_fixtures;
    double inject_scale = 1.0;
};

int usage_error(const std::string& what) {
    std::cerr << "error[usage]: " << what << '\n';
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hill equation discriminant via the Walsh-function recursion"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--alpha", f.alpha, "alpha");
        sub->add_option("--beta", f.beta, "beta");
        sub->add_option("--alpha-range", f.alpha_range, "lo:hi:n");
        sub->add_option("--beta-range", f.beta_range, "lo:hi:n");
        sub->add_option("--tau", f.tau, "period (default 2 pi)");
        sub->add_option("--excitation", f.excitation, "cos | cossum:1x1,1x2 | square:hi,lo,duty | table:<path>");
        sub->add_option("-k", f.k, "order exponent, 2^k samples (default 12)");
        sub->add_option("--method", f.method, "discriminant method")
            ->check(CLI::IsMember({"recursive", "triangular", "direct", "monodromy", "lyapunov", "all"}));
        sub->add_option("--tol", f.tol, "classification tolerance (default 1e-6)");
        sub->add_option("--root-tol", f.root_tol, "root tolerance for interlace (default 1e-10)");
        sub->add_option("--workers", f.workers, "threads for grid scans")->envname("HILLWALSH_WORKERS");
        sub->add_option("--out", f.out, "output file or directory");
        sub->add_option("--steps", f.steps, "RK4 steps for the monodromy oracle (default 16384)");
        sub->add_option("--quad-points", f.quad_points, "quadrature points per dimension (default 64)");
        sub->add_option("--config", f.config, "JSON file with the same keys as the flags");
    };

    auto* delta = app.add_subcommand("delta", "discriminant at one (alpha, beta)");
    auto* sweep = app.add_subcommand("sweep", "discriminant grid as CSV");
    auto* chart = app.add_subcommand("chart", "grid CSV, PGM image and transition curves");
    auto* interlace = app.add_subcommand("interlace", "roots of delta = +-2 along alpha at fixed beta");
    auto* validate = app.add_subcommand("validate", "oracle cross-checks");
    for (auto* sub : {delta, sweep, chart, interlace, validate}) add_common(sub);
    validate->add_option("--emit-fixtures", f.emit_fixtures, "directory for oracles.json");
    validate->add_option("--inject-scale", f.inject_scale, "debug: multiply the similarity scale")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return usage_error(e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    hillwalsh::RunConfig config;
    config.command = sub->get_name();
    try {
        std::vector<std::string> given;
        for (const auto* opt : sub->get_options()) {
            if (opt->count() > 0) given.push_back(opt->get_single_name());
        }
        if (!f.config.empty()) {
            std::ifstream in(f.config);
            if (!in) return usage_error("cannot open config '" + f.config + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                return usage_error("cannot parse config '" + f.config + "': " + e.what());
            }
            hillwalsh::apply_config_json(config, j, given);
        }
        auto has = [&](const char* name) { return sub->get_option(name)->count() > 0; };
        if (has("--alpha")) config.alpha = f.alpha;
        if (has("--beta")) config.beta = f.beta;
        if (has("--alpha-range")) {
            config.alpha_range = hillwalsh::parse_axis(
                f.alpha_range, config.command == "interlace" ? std::optional<long>(2) : std::nullopt);
        }
        if (has("--beta-range")) config.beta_range = hillwalsh::parse_axis(f.beta_range);
        if (has("--tau")) config.tau = f.tau;
        if (has("--excitation")) config.excitation = f.excitation;
        if (has("-k")) config.k = f.k;
        if (has("--method")) config.method = f.method;
        if (has("--tol")) config.tol = f.tol;
        if (has("--root-tol")) config.root_tol = f.root_tol;
        if (has("--workers")) config.workers = f.workers;
        if (has("--out")) config.out = f.out;
        if (has("--steps")) config.steps = f.steps;
        if (has("--quad-points")) config.quad_points = f.quad_points;
        if (config.command == "validate") {
            if (has("--emit-fixtures")) config.emit_fixtures = f.emit_fixtures;
            config.scale_perturbation = f.inject_scale;
        }
        config.validate();
    } catch (const hillwalsh::Error& e) {
        return usage_error(e.what());
    }

    try {
        return hillwalsh::run_command(config, std::cout);
    } catch (const hillwalsh::Error& e) {
        std::cout.flush();
        std::cerr << "error[" << e.kind() << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cout.flush();
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
}
