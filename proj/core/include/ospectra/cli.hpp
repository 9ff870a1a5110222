#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ospectra/operator.hpp"
#include "ospectra/solver.hpp"

namespace ospectra {

inline constexpr const char* kSchema = "orlicz-spectra/v1";

// Configuration problems; the message is anchored to a config line or a flag.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    struct Domain {
        double a = -1.0;
        double b = 1.0;
        bool operator==(const Domain&) const = default;
    };
    struct Young {
        std::string kind = "power"; // power | exp | custom
        double p = 2.0;
        std::vector<std::array<double, 2>> table; // (t, m(t)) knots for custom
        bool operator==(const Young&) const = default;
    };
    struct Growth {
        std::string kind = "from_young"; // from_young | power
        double q = 2.0;
        double a1 = 0.0;
        double a2 = 1.0;
        double a3 = 1.0;
        bool operator==(const Growth&) const = default;
    };
    struct MeshSpec {
        int k = 15;
        double grading = 2.0;
        double exterior_radius = 0.0;
        int quad_order = 8;
        bool operator==(const MeshSpec&) const = default;
    };
    struct Sweep {
        std::vector<int> k;
        std::vector<double> s;
        bool operator==(const Sweep&) const = default;
    };

    Domain domain;
    double s = 0.5;
    Young young;
    Growth growth;
    MeshSpec mesh;
    SolverConfig solver;
    std::string task = "solve"; // solve | sweep | validate
    std::vector<int> levels{1};
    Sweep sweep;
    int trials = 1000; // validate only
    std::string output = "ospectra_out.json";

    // Runs every constituent validation; throws ConfigError.
    void validate() const;
    bool operator==(const RunConfig& o) const;
};

RunConfig parse_config(std::string_view json_text);
std::string emit_config(const RunConfig& cfg);
// key is a dotted path such as "mesh.k"; value is JSON, or a bare string.
void apply_override(RunConfig& cfg, std::string_view key, std::string_view value);
// Applies every override, then validates once, so cross-field rules see the final state.
void apply_overrides(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& overrides);

YoungFunction make_young(const RunConfig& cfg);
GrowthFunction make_growth(const RunConfig& cfg);
AssembledProblem make_problem(const RunConfig& cfg, int k, double s);

// Writes through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_validate(const RunConfig& cfg, std::ostream& log);
// Dispatches on cfg.task after validation; configuration errors become exit 1.
int run_task(const RunConfig& cfg, std::ostream& log);

} // namespace ospectra
