#include "wcpl/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace wcpl {

Regime classify_regime(double p, int dim) {
    const double n = static_cast<double>(dim);
    const double tol = 1e-12;
    if (n < p - tol) return Regime::dim_below_p;
    if (std::fabs(n - p) <= tol) return Regime::dim_equal_p;
    if (n < p * p - tol) return Regime::dim_between;
    if (std::fabs(n - p * p) <= tol) return Regime::dim_equal_p2;
    return Regime::dim_above_p2;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::dim_below_p: return "N<p";
        case Regime::dim_equal_p: return "N=p";
        case Regime::dim_between: return "p<N<p^2";
        case Regime::dim_equal_p2: return "N=p^2";
        case Regime::dim_above_p2: return "N>p^2";
    }
    return "?";
}

std::optional<double> ProblemSpec::sobolev_exponent() const {
    if (!(static_cast<double>(dim) > p)) return std::nullopt;
    return dim * p / (dim - p);
}

void ProblemSpec::validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("ProblemSpec: p must exceed 1");
    if (dim < 1) throw std::invalid_argument("ProblemSpec: N must be >= 1");
    if (p >= static_cast<double>(dim) && !V.is_zero)
        throw std::invalid_argument(
            "ProblemSpec: p >= N is permitted only with V identically zero");
    if (!V.value || !W.value) throw std::invalid_argument("ProblemSpec: missing potential");
}

RadialField effective_potential(const ProblemSpec& spec, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    RadialField v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = spec.V.value(grid.r[i]);
    if (!spec.ground_state || n < 2) return v;

    // Well-prepared variant: assemble the cell-form kinetic gradient of the
    // sampled profile and read off the nodal potential that balances it.
    const RadialField phi = spec.ground_state->sample(grid);
    RadialField kin(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = grid.r[i + 1] - grid.r[i];
        const double vol = grid.sphere_area *
                           (std::pow(grid.r[i + 1], grid.dim) -
                            std::pow(grid.r[i], grid.dim)) /
                           grid.dim;
        const double s = (phi[i + 1] - phi[i]) / h;
        const double flow = vol * degenerate_weight(s, spec.p) * s / h;
        kin[i] -= flow;
        kin[i + 1] += flow;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double mp = degenerate_weight(phi[i], spec.p) * phi[i];
        if (grid.w[i] > 0.0 && mp != 0.0 && std::isfinite(kin[i]))
            v[i] = -kin[i] / (grid.w[i] * mp);
    }
    return v;
}

EnergyBreakdown energy(const ProblemSpec& spec, const RadialGrid& grid,
                       const RadialField& u) {
    if (u.size() != grid.size())
        throw std::invalid_argument("energy: field size does not match grid");
    EnergyBreakdown b;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid.r[i + 1] - grid.r[i];
        const double vol = grid.sphere_area *
                           (std::pow(grid.r[i + 1], grid.dim) -
                            std::pow(grid.r[i], grid.dim)) /
                           grid.dim;
        b.kinetic += vol * std::pow(std::fabs((u[i + 1] - u[i]) / h), spec.p);
    }
    const RadialField vnodes = effective_potential(spec, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.r[i];
        const double up = std::pow(std::fabs(u[i]), spec.p);
        b.potential_V += grid.w[i] * vnodes[i] * up;
        b.potential_W += grid.w[i] * spec.W.value(r) * up;
        b.mass += grid.w[i] * up;
    }
    b.total = b.kinetic + b.potential_V - spec.alpha * b.potential_W;
    return b;
}

double rayleigh(const ProblemSpec& spec, const RadialGrid& grid,
                const RadialField& u) {
    const EnergyBreakdown b = energy(spec, grid, u);
    if (!(b.mass > 0.0))
        throw std::invalid_argument("rayleigh: zero field has no Rayleigh quotient");
    return b.total / b.mass;
}

double simplified_energy(const RadialGrid& grid, const RadialField& phi0,
                         const RadialField& u, double p) {
    if (phi0.size() != grid.size() || u.size() != grid.size())
        throw std::invalid_argument("simplified_energy: field size mismatch");
    RadialField v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = phi0[i] > 1e-300 ? u[i] / phi0[i] : 0.0;
    const RadialField dphi = radial_gradient(grid, phi0);
    const RadialField dv = radial_gradient(grid, v);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(phi0[i] > 1e-300)) continue;
        const double core = std::fabs(v[i]) * std::fabs(dphi[i]) +
                            phi0[i] * std::fabs(dv[i]);
        acc += grid.w[i] * phi0[i] * phi0[i] * dv[i] * dv[i] *
               degenerate_weight(core, p);
    }
    return acc;
}

TwoSidedReport two_sided_check(const ProblemSpec& spec, const RadialGrid& grid,
                               const RadialField& phi0,
                               const std::vector<RadialField>& trials) {
    ProblemSpec zero_coupling = spec;
    zero_coupling.alpha = 0.0;
    TwoSidedReport rep;
    bool first = true;
    for (const auto& u : trials) {
        const EnergyBreakdown b = energy(zero_coupling, grid, u);
        const double q0 = b.kinetic + b.potential_V;
        const double simple = simplified_energy(grid, phi0, u, spec.p);
        if (std::fabs(q0) < 1e-12 && std::fabs(simple) < 1e-12) {
            ++rep.skipped;
            continue;
        }
        const double ratio = q0 / simple;
        if (first) {
            rep.lo = rep.hi = ratio;
            first = false;
        } else {
            rep.lo = std::min(rep.lo, ratio);
            rep.hi = std::max(rep.hi, ratio);
        }
        ++rep.used;
    }
    return rep;
}

}  // namespace wcpl
