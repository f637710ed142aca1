#pragma once

#include <optional>
#include <string>

#include "wcpl/radial.hpp"

namespace wcpl {

/// Radial potential term. `value` must be defined for all r >= 0.
/// `support_radius` is set when the potential vanishes beyond it;
/// `decay_certificate` is a constant C with |V(r)| <= C (1+r^2)^{-p/2}.
struct Potential {
    std::function<double(double)> value;
    std::optional<double> support_radius;
    std::optional<double> decay_certificate;
    bool is_zero = false;

    static Potential zero();
};

/// Positive radial profile normalized to 1 at the origin, carrying its
/// first two derivatives and the power tail phi(r) ~ tail_coefficient *
/// r^{-tail_exponent} that it approaches at large r. The tail exponent is
/// (N-p)/(p-1), the decay rate of the fundamental profile of the radial
/// p-Laplacian.
struct GroundStateProfile {
    RadialProfile profile;
    double p = 2.0;
    int dim = 0;
    double tail_exponent = 0.0;
    double tail_coefficient = 1.0;
    // Set for glued profiles: the profile is constant inside blend_inner and
    // exactly a power tail outside blend_outer.
    std::optional<double> blend_inner;
    std::optional<double> blend_outer;

    RadialField sample(const RadialGrid& grid) const;
};

/// phi(r) = (1 + r^2)^{-nu/2} with nu = (N-p)/(p-1). Requires 1 < p < N.
GroundStateProfile smooth_tail_profile(double p, int dim);

/// Profile equal to 1 on [0, R0/2] and to c r^{-nu} for r >= R0, joined on
/// [R0/2, R0] by a C^2 blend: log phi = s(r) * log(c r^{-nu}) with s the
/// quintic smoothstep, which matches value, slope, and curvature at both
/// ends of the blend window and is monotone decreasing. Continuity of the
/// tail at the start of the blend fixes c = (R0/2)^{nu}.
/// Requires 1 < p < N and R0 > 0.
GroundStateProfile glued_power_profile(double p, int dim, double r0);

/// Inverse construction of the potential that makes `gs` an exact positive
/// solution of -div(|grad u|^{p-2} grad u) + V |u|^{p-2} u = 0:
///   V(r) = (Delta_p phi)(r) / phi(r)^{p-1}.
/// The support radius is set for glued profiles (V vanishes outside the
/// blend window) and a Fuchsian decay certificate is computed by sampling.
Potential potential_from_profile(const GroundStateProfile& gs);

/// Compactly supported C^1 bump amplitude * max(0, 1 - (r/radius)^2)^2.
/// A negative amplitude gives a repulsive perturbation.
Potential bump_perturbation(double radius, double amplitude);

/// Smoothed indicator of the ball of the given radius: equal to `amplitude`
/// up to radius*(1 - delta), descending to zero at radius*(1 + delta)
/// through a quintic smoothstep, with delta = 0.05. The transition band is
/// centred on the nominal edge, so the volume under the smoothed well
/// matches the sharp one to second order in delta.
Potential well_perturbation(double radius, double amplitude);

/// Sign test of the coupling integral over the ball covered by `grid`:
///   omega = integral W phi0^p dx.
struct ConditionReport {
    double integral = 0.0;
    bool positive = false;
};
ConditionReport check_condition(const Potential& W, const GroundStateProfile& gs,
                                const RadialGrid& grid);

/// Plain-text table: a header line `# radial-potential p=<p> N=<N>`,
/// optional further `#` comment lines, then one `r value` pair per line.
struct PotentialTable {
    double p = 0.0;
    int dim = 0;
    std::vector<double> r;
    std::vector<double> value;
};

void write_potential_table(const std::string& path, const PotentialTable& table,
                           const std::vector<std::string>& comments = {});
PotentialTable load_potential_table(const std::string& path);

/// Potential backed by linear interpolation of a table; zero beyond the
/// last tabulated radius.
Potential potential_from_table(const PotentialTable& table);

}  // namespace wcpl
