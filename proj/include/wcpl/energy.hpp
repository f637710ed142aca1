#pragma once

#include "wcpl/potentials.hpp"
#include "wcpl/radial.hpp"

namespace wcpl {

/// Relation of the dimension N to the exponents p and p^2, which selects the
/// small-coupling behaviour of the principal eigenvalue.
enum class Regime {
    dim_below_p,     // N < p
    dim_equal_p,     // N = p
    dim_between,     // p < N < p^2
    dim_equal_p2,    // N = p^2
    dim_above_p2,    // N > p^2
};

Regime classify_regime(double p, int dim);
const char* regime_name(Regime r);

/// Problem data for the quadratic-form family
///   Q_alpha[u] = integral |grad u|^p + V |u|^p - alpha W |u|^p.
/// The optional ground state is carried when V was produced by the inverse
/// construction, so that downstream predictions and bounds can use it.
struct ProblemSpec {
    double p = 2.0;
    int dim = 0;
    double alpha = 0.0;
    Potential V;
    Potential W;
    std::optional<GroundStateProfile> ground_state;

    Regime regime() const { return classify_regime(p, dim); }
    /// N p / (N - p), defined for p < N.
    std::optional<double> sobolev_exponent() const;
    void validate() const;  // throws std::invalid_argument on bad data
};

struct EnergyBreakdown {
    double kinetic = 0.0;      // integral |grad u|^p
    double potential_V = 0.0;  // integral V |u|^p
    double potential_W = 0.0;  // integral W |u|^p
    double total = 0.0;        // kinetic + potential_V - alpha * potential_W
    double mass = 0.0;         // integral |u|^p
};

/// Nodal values of V as every quadrature in this module sees them. Plain
/// specs sample V.value at the nodes. When the spec carries the profile that
/// generated V by the inverse construction, V is instead re-derived from the
/// sampled profile through the discrete kinetic form ("well-prepared"
/// discretization): the profile then solves the discrete zero-energy
/// equation exactly, so criticality survives discretization instead of
/// drifting by O(h^2) into a spurious bound state. Both variants agree with
/// the closed form to O(h^2). The Dirichlet node keeps the analytic sample.
RadialField effective_potential(const ProblemSpec& spec, const RadialGrid& grid);

/// Zeroth-order terms use the grid weights and effective_potential for V.
/// The kinetic term integrates the per-cell slope |u[i+1]-u[i]| / h_i
/// against the exact shell volume of each cell: for piecewise-linear fields
/// this is exact, and it is the same discrete Dirichlet energy whose
/// stationarity the eigensolver certifies, so rayleigh() of a converged
/// eigenfunction reproduces the solver's eigenvalue instead of drifting by a
/// quadrature mismatch.
EnergyBreakdown energy(const ProblemSpec& spec, const RadialGrid& grid,
                       const RadialField& u);

/// total / mass. Throws std::invalid_argument on a zero field.
double rayleigh(const ProblemSpec& spec, const RadialGrid& grid,
                const RadialField& u);

/// integral phi0^2 |grad v|^2 (v |grad phi0| + phi0 |grad v|)^{p-2} dx with
/// v = u / phi0. Nodes where phi0 underflows are skipped with weight zero.
double simplified_energy(const RadialGrid& grid, const RadialField& phi0,
                         const RadialField& u, double p);

/// Range of the ratio (kinetic + potential_V) / simplified_energy over a set
/// of trial fields; trials where both sides fall below 1e-12 are skipped.
struct TwoSidedReport {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
};
TwoSidedReport two_sided_check(const ProblemSpec& spec, const RadialGrid& grid,
                               const RadialField& phi0,
                               const std::vector<RadialField>& trials);

}  // namespace wcpl
