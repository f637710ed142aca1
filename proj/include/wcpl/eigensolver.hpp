#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "wcpl/energy.hpp"

namespace wcpl {

struct SolverConfig {
    std::size_t max_iterations = 50000;
    /// Successive-change tolerance on lambda. Interpreted as absolute while
    /// |lambda| >= 1e-5 and relaxed to 1e-3 relative below that scale.
    double tolerance_lambda = 1e-8;
    /// Relative stationarity of the Rayleigh gradient.
    double tolerance_residual = 1e-6;
    double step_init = 1.0;
    double backtrack = 0.5;
    std::uint64_t seed = 1;
    /// Relative amplitude of the seeded perturbation of the initial guess.
    double perturbation = 1e-3;
    /// Optional observer called after every accepted step with
    /// (iteration, quotient, relative residual); the quotient values it sees
    /// are nonincreasing.
    std::function<void(std::size_t, double, double)> on_iterate;
};

struct SpectralResult {
    double alpha = 0.0;
    double lambda = 0.0;
    RadialField eigenfunction;   // positive, unit L^p mass, zero at r_max
    double value_at_zero = 0.0;  // eigenfunction[0]; divide by it for the
                                 // value-one-at-origin normalization
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double r_max = 0.0;
    /// Breakdown of the value-one-at-origin normalization (mass therefore
    /// reports |phi|_p^p under phi(0) = 1).
    EnergyBreakdown breakdown;
};

/// Thrown when the line search cannot decrease the quotient for 20
/// consecutive iterations; carries the last iterate for diagnostics.
struct SolverFailure : std::runtime_error {
    SolverFailure(const std::string& what, RadialField iterate, double lam)
        : std::runtime_error(what), last_iterate(std::move(iterate)), lambda(lam) {}
    RadialField last_iterate;
    double lambda;
};

/// How grids are built when the solver chooses radii itself.
struct GridPolicy {
    std::size_t cells = 2000;
    Grading grading = Grading::geometric;
    double ratio = 1.005;
    double r_min = 50.0;    // starting domain radius
    double r_cap = 2e6;     // largest domain the policy will build
    double safety = 1.0;    // multiplies the 10/mu adequacy rule
};

RadialGrid grid_for_radius(const GridPolicy& policy, int dim, double r_max);

/// Decay rate estimate mu = (|lambda| / (p-1))^{1/p} used by the domain
/// adequacy rule r_max >= 10 / mu.
double decay_rate(double lambda, double p);

/// Minimize the Rayleigh quotient of Q_alpha over positive radial fields
/// vanishing at r_max, by preconditioned projected gradient descent:
/// each step takes the Gateaux derivative of the quotient, applies a
/// tridiagonal elliptic preconditioner, backtracks until the quotient
/// decreases, replaces u by |u|, and renormalizes to unit L^p mass.
/// The reported lambda is the quotient of the returned eigenfunction under
/// the same discretization as energy()/rayleigh().
SpectralResult solve_ground_state(const ProblemSpec& spec, const RadialGrid& grid,
                                  const SolverConfig& config,
                                  const RadialField* warm_start = nullptr);

/// Re-solve on an increasing schedule of radii, warm-starting each stage
/// from the previous minimizer (extended by its decay tail). Dirichlet
/// truncation makes lambda decrease toward the whole-space value as the
/// radius grows.
struct ExtrapolationResult {
    std::vector<SpectralResult> stages;
    bool truncation_converged = false;  // last two lambdas within 1% relative
    bool schedule_adequate = false;     // final radius >= 10/mu from the
                                        // previous stage's estimate
    const SpectralResult& final() const { return stages.back(); }
};
ExtrapolationResult solve_with_domain_extrapolation(const ProblemSpec& spec,
                                                    const std::vector<double>& r_schedule,
                                                    const GridPolicy& policy,
                                                    const SolverConfig& config);

/// lambda(alpha) along a sweep. Alphas are solved in decreasing order with
/// warm starts; for each alpha the domain is grown until it satisfies the
/// 10/mu rule. Results are returned sorted by increasing alpha. When
/// on_result is set it is invoked once per alpha as soon as that solve
/// completes, so callers can stream partial results to disk.
std::vector<SpectralResult> lambda_curve(
    const ProblemSpec& base, std::vector<double> alphas,
    const GridPolicy& policy, const SolverConfig& config,
    const std::function<void(const SpectralResult&)>& on_result = {});

/// Interpolate a field onto a new grid; beyond the old domain the field is
/// continued by the decay model u(anchor) (r/anchor)^{-(N-1)/(p-1)}
/// exp(-mu (r - anchor)).
RadialField transfer_field(const RadialGrid& from, const RadialField& u,
                           const RadialGrid& to, double p, double mu);

}  // namespace wcpl
