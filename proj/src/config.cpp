#include "wcpl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wcpl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not a number: " + value);
    }
    if (used != value.size())
        throw ConfigError("[" + section + "] " + key + ": trailing junk: " + value);
    return v;
}

long long parse_int(const std::string& section, const std::string& key,
                    const std::string& value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not an integer: " + value);
    }
    if (used != value.size())
        throw ConfigError("[" + section + "] " + key + ": trailing junk: " + value);
    return v;
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("[" + section + "] " + key + ": empty list entry");
        out.push_back(parse_double(section, key, item));
    }
    if (out.empty())
        throw ConfigError("[" + section + "] " + key + ": empty list");
    return out;
}

using Section = std::map<std::string, std::string>;

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ExperimentConfig parse_config(const std::string& text) {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"problem",
         {"p", "N", "V", "r0", "potential_file", "W_shape", "W_radius",
          "W_amplitude"}},
        {"grid", {"R_max", "R_schedule", "R_cap", "cells", "grading", "ratio"}},
        {"solver",
         {"max_iterations", "tolerance_lambda", "tolerance_residual",
          "step_init", "backtrack", "seed", "perturbation"}},
        {"sweep", {"alphas", "alpha_min", "alpha_max", "points"}},
        {"outputs", {"directory", "formats"}},
    };

    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed section header: " + t);
            current = trim(t.substr(1, t.size() - 2));
            if (!schema.count(current))
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unknown section [" + current + "]");
            sections[current];
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value: " + t);
        if (current.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key outside any section: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!schema.at(current).count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                              key + "' in section [" + current + "]");
        if (sections[current].count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "' in section [" + current + "]");
        if (value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" +
                              key + "'");
        sections[current][key] = value;
    }

    ExperimentConfig cfg;
    cfg.hash = fnv1a(text);

    if (!sections.count("problem")) throw ConfigError("missing section [problem]");
    const Section& prob = sections.at("problem");
    const auto require = [](const Section& s, const char* section, const char* key) {
        auto it = s.find(key);
        if (it == s.end())
            throw ConfigError(std::string("[") + section + "] missing required key '" +
                              key + "'");
        return it->second;
    };
    cfg.problem.p = parse_double("problem", "p", require(prob, "problem", "p"));
    cfg.problem.dim =
        static_cast<int>(parse_int("problem", "N", require(prob, "problem", "N")));
    cfg.problem.potential = require(prob, "problem", "V");
    if (cfg.problem.potential != "smooth_tail" && cfg.problem.potential != "glued" &&
        cfg.problem.potential != "file" && cfg.problem.potential != "zero")
        throw ConfigError("[problem] V must be smooth_tail, glued, file, or zero");
    if (prob.count("r0")) {
        if (cfg.problem.potential != "glued")
            throw ConfigError("[problem] r0 applies only to V = glued");
        cfg.problem.r0 = parse_double("problem", "r0", prob.at("r0"));
    }
    if (cfg.problem.potential == "file") {
        cfg.problem.potential_file = require(prob, "problem", "potential_file");
    } else if (prob.count("potential_file")) {
        throw ConfigError("[problem] potential_file applies only to V = file");
    }
    if (prob.count("W_shape")) {
        cfg.problem.w_shape = prob.at("W_shape");
        if (cfg.problem.w_shape != "bump" && cfg.problem.w_shape != "well" &&
            cfg.problem.w_shape != "none")
            throw ConfigError("[problem] W_shape must be bump, well, or none");
    }
    if (prob.count("W_radius"))
        cfg.problem.w_radius = parse_double("problem", "W_radius", prob.at("W_radius"));
    if (prob.count("W_amplitude"))
        cfg.problem.w_amplitude =
            parse_double("problem", "W_amplitude", prob.at("W_amplitude"));
    if (!(cfg.problem.p > 1.0)) throw ConfigError("[problem] p must exceed 1");
    if (cfg.problem.dim < 1) throw ConfigError("[problem] N must be >= 1");
    if (!(cfg.problem.w_radius > 0.0))
        throw ConfigError("[problem] W_radius must be positive");

    if (!sections.count("grid")) throw ConfigError("missing section [grid]");
    const Section& grid = sections.at("grid");
    if (grid.count("R_schedule")) {
        cfg.grid.r_schedule = parse_list("grid", "R_schedule", grid.at("R_schedule"));
        if (!std::is_sorted(cfg.grid.r_schedule.begin(), cfg.grid.r_schedule.end()) ||
            cfg.grid.r_schedule.size() < 2)
            throw ConfigError("[grid] R_schedule must be >= 2 increasing radii");
        cfg.grid.r_max = cfg.grid.r_schedule.back();
        if (grid.count("R_max"))
            throw ConfigError("[grid] give R_max or R_schedule, not both");
    } else if (grid.count("R_max")) {
        cfg.grid.r_max = parse_double("grid", "R_max", grid.at("R_max"));
        if (!(cfg.grid.r_max > 0.0)) throw ConfigError("[grid] R_max must be positive");
        cfg.grid.r_schedule = {0.5 * cfg.grid.r_max, cfg.grid.r_max};
    } else {
        throw ConfigError("[grid] needs R_max or R_schedule");
    }
    if (grid.count("R_cap"))
        cfg.grid.r_cap = parse_double("grid", "R_cap", grid.at("R_cap"));
    if (grid.count("cells")) {
        const long long m = parse_int("grid", "cells", grid.at("cells"));
        if (m < 16) throw ConfigError("[grid] cells must be >= 16");
        cfg.grid.cells = static_cast<std::size_t>(m);
    }
    if (grid.count("grading")) {
        const std::string& g = grid.at("grading");
        if (g == "uniform")
            cfg.grid.grading = Grading::uniform;
        else if (g == "geometric")
            cfg.grid.grading = Grading::geometric;
        else
            throw ConfigError("[grid] grading must be uniform or geometric");
    }
    if (grid.count("ratio"))
        cfg.grid.ratio = parse_double("grid", "ratio", grid.at("ratio"));

    if (sections.count("solver")) {
        const Section& sol = sections.at("solver");
        if (sol.count("max_iterations")) {
            const long long v = parse_int("solver", "max_iterations",
                                          sol.at("max_iterations"));
            if (v < 1) throw ConfigError("[solver] max_iterations must be >= 1");
            cfg.solver.max_iterations = static_cast<std::size_t>(v);
        }
        if (sol.count("tolerance_lambda")) {
            cfg.solver.tolerance_lambda =
                parse_double("solver", "tolerance_lambda", sol.at("tolerance_lambda"));
            if (!(cfg.solver.tolerance_lambda > 0.0))
                throw ConfigError("[solver] tolerance_lambda must be positive");
        }
        if (sol.count("tolerance_residual")) {
            cfg.solver.tolerance_residual = parse_double(
                "solver", "tolerance_residual", sol.at("tolerance_residual"));
            if (!(cfg.solver.tolerance_residual > 0.0))
                throw ConfigError("[solver] tolerance_residual must be positive");
        }
        if (sol.count("step_init")) {
            cfg.solver.step_init = parse_double("solver", "step_init", sol.at("step_init"));
            if (!(cfg.solver.step_init > 0.0))
                throw ConfigError("[solver] step_init must be positive");
        }
        if (sol.count("backtrack")) {
            cfg.solver.backtrack = parse_double("solver", "backtrack", sol.at("backtrack"));
            if (!(cfg.solver.backtrack > 0.0 && cfg.solver.backtrack < 1.0))
                throw ConfigError("[solver] backtrack must lie in (0,1)");
        }
        if (sol.count("seed"))
            cfg.solver.seed = static_cast<std::uint64_t>(
                parse_int("solver", "seed", sol.at("seed")));
        if (sol.count("perturbation")) {
            cfg.solver.perturbation =
                parse_double("solver", "perturbation", sol.at("perturbation"));
            if (cfg.solver.perturbation < 0.0)
                throw ConfigError("[solver] perturbation must be >= 0");
        }
    }

    if (sections.count("sweep")) {
        const Section& sw = sections.at("sweep");
        cfg.sweep.present = true;
        if (sw.count("alphas")) {
            if (sw.count("alpha_min") || sw.count("alpha_max") || sw.count("points"))
                throw ConfigError("[sweep] give alphas or a geometric range, not both");
            cfg.sweep.alphas = parse_list("sweep", "alphas", sw.at("alphas"));
        } else {
            const double lo =
                parse_double("sweep", "alpha_min", require(sw, "sweep", "alpha_min"));
            const double hi =
                parse_double("sweep", "alpha_max", require(sw, "sweep", "alpha_max"));
            const long long n =
                parse_int("sweep", "points", require(sw, "sweep", "points"));
            if (!(lo > 0.0 && hi > lo))
                throw ConfigError("[sweep] need 0 < alpha_min < alpha_max");
            if (n < 2) throw ConfigError("[sweep] points must be >= 2");
            for (long long k = 0; k < n; ++k)
                cfg.sweep.alphas.push_back(
                    lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
        }
        for (double a : cfg.sweep.alphas)
            if (!(a > 0.0)) throw ConfigError("[sweep] alphas must be positive");
    }

    if (sections.count("outputs")) {
        const Section& outs = sections.at("outputs");
        if (outs.count("directory")) cfg.outputs.directory = outs.at("directory");
        if (outs.count("formats")) {
            cfg.outputs.csv = cfg.outputs.json = cfg.outputs.dat = false;
            std::stringstream ss(outs.at("formats"));
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item == "csv")
                    cfg.outputs.csv = true;
                else if (item == "json")
                    cfg.outputs.json = true;
                else if (item == "dat")
                    cfg.outputs.dat = true;
                else
                    throw ConfigError("[outputs] unknown format '" + item + "'");
            }
        }
    }

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

Experiment build_experiment(const ExperimentConfig& cfg) {
    Experiment ex;
    ex.spec.p = cfg.problem.p;
    ex.spec.dim = cfg.problem.dim;
    ex.spec.alpha = 0.0;

    if (cfg.problem.potential == "smooth_tail") {
        GroundStateProfile gs = smooth_tail_profile(cfg.problem.p, cfg.problem.dim);
        ex.spec.V = potential_from_profile(gs);
        ex.spec.ground_state = std::move(gs);
    } else if (cfg.problem.potential == "glued") {
        GroundStateProfile gs =
            glued_power_profile(cfg.problem.p, cfg.problem.dim, cfg.problem.r0);
        ex.spec.V = potential_from_profile(gs);
        ex.spec.ground_state = std::move(gs);
    } else if (cfg.problem.potential == "file") {
        const PotentialTable table = load_potential_table(cfg.problem.potential_file);
        if (std::fabs(table.p - cfg.problem.p) > 1e-12 || table.dim != cfg.problem.dim)
            throw ConfigError("potential table (p, N) disagrees with [problem]");
        ex.spec.V = potential_from_table(table);
    } else {
        ex.spec.V = Potential::zero();
    }

    if (cfg.problem.w_shape == "bump")
        ex.spec.W = bump_perturbation(cfg.problem.w_radius, cfg.problem.w_amplitude);
    else if (cfg.problem.w_shape == "well")
        ex.spec.W = well_perturbation(cfg.problem.w_radius, cfg.problem.w_amplitude);
    else
        ex.spec.W = Potential::zero();

    ex.policy.cells = cfg.grid.cells;
    ex.policy.grading = cfg.grid.grading;
    ex.policy.ratio = cfg.grid.ratio;
    ex.policy.r_min = cfg.grid.r_max;
    ex.policy.r_cap = cfg.grid.r_cap;
    ex.r_schedule = cfg.grid.r_schedule;
    return ex;
}

}  // namespace wcpl
