#pragma once

// The CLI subcommands as library calls. Each returns the process exit code
// and writes its report to `out`; errors are thrown as hillwalsh::Error.

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "hillwalsh/stability.hpp"

namespace hillwalsh {

struct RunConfig {
    std::string command;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<Axis> alpha_range;
    std::optional<Axis> beta_range;
    double tau = 6.283185307179586;
    std::string excitation = "cos";
    int k = 12;
    std::string method = "recursive";
    double tol = kDefaultClassifyTol;
    double root_tol = 1e-10;
    unsigned workers = 1;
    std::string out;
    long steps = 16384;      // RK4 steps for the monodromy oracle
    int quad_points = 64;    // per dimension for the series
    std::string emit_fixtures;
    double scale_perturbation = 1.0;  // validate only; != 1 must make it fail

    /// Throws DomainError or SizeError for inconsistent settings.
    void validate() const;
};

/// "lo:hi:n", or "lo:hi" when `default_count` is given.
Axis parse_axis(const std::string& text, std::optional<long> default_count = std::nullopt);

/// Applies keys from a JSON object (same names as the long flags, with '-'
/// or '_'); keys listed in `skip` are left untouched.
void apply_config_json(RunConfig& config, const nlohmann::json& j,
                       const std::vector<std::string>& skip = {});

int cmd_delta(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_chart(const RunConfig& config, std::ostream& out);
int cmd_interlace(const RunConfig& config, std::ostream& out);
int cmd_validate(const RunConfig& config, std::ostream& out);

int run_command(const RunConfig& config, std::ostream& out);

}  // namespace hillwalsh
