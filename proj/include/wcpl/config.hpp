#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcpl/eigensolver.hpp"
#include "wcpl/energy.hpp"
#include "wcpl/potentials.hpp"
#include "wcpl/radial.hpp"

namespace wcpl {

// Raised for unparseable text, unknown sections/keys, and invalid values.
// The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemBlock {
    double p = 0.0;
    int dim = 0;
    std::string potential;       // smooth_tail | glued | file | zero
    double r0 = 2.0;             // glued: outer blend radius
    std::string potential_file;  // file: path of a radial-potential table
    std::string w_shape = "bump";  // bump | well | none
    double w_radius = 1.0;
    double w_amplitude = 1.0;
};

struct GridBlock {
    std::vector<double> r_schedule;  // explicit, or {R_max/2, R_max}
    double r_max = 0.0;
    double r_cap = 2e6;
    std::size_t cells = 2000;
    Grading grading = Grading::geometric;
    double ratio = 1.005;
};

struct SweepBlock {
    bool present = false;
    std::vector<double> alphas;
};

struct OutputsBlock {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool dat = true;
};

// Parsed form of the sectioned key=value experiment file. Unknown sections
// or keys are rejected so a typo cannot silently fall back to a default.
struct ExperimentConfig {
    ProblemBlock problem;
    GridBlock grid;
    SolverConfig solver;
    SweepBlock sweep;
    OutputsBlock outputs;
    std::uint64_t hash = 0;  // FNV-1a of the raw config text
};

std::uint64_t fnv1a(const std::string& text);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Problem pieces materialized from a parsed config: the spec carries V, W
// and (when the potential is profile-derived) the ground state; alpha is
// left at 0 for the caller to fill in.
struct Experiment {
    ProblemSpec spec;
    GridPolicy policy;
    std::vector<double> r_schedule;
};

Experiment build_experiment(const ExperimentConfig& cfg);

}  // namespace wcpl
