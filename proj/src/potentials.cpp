#include "wcpl/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wcpl {

Potential Potential::zero() {
    Potential v;
    v.value = [](double) { return 0.0; };
    v.support_radius = 0.0;
    v.decay_certificate = 0.0;
    v.is_zero = true;
    return v;
}

RadialField GroundStateProfile::sample(const RadialGrid& grid) const {
    RadialField out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = profile.value(grid.r[i]);
    return out;
}

static double fundamental_exponent(double p, int dim) {
    if (!(p > 1.0)) throw std::invalid_argument("profile: p must exceed 1");
    if (!(static_cast<double>(dim) > p))
        throw std::invalid_argument("profile: requires p < N");
    return (dim - p) / (p - 1.0);
}

GroundStateProfile smooth_tail_profile(double p, int dim) {
    const double nu = fundamental_exponent(p, dim);
    GroundStateProfile gs;
    gs.p = p;
    gs.dim = dim;
    gs.tail_exponent = nu;
    gs.tail_coefficient = 1.0;
    gs.profile.value = [nu](double r) { return std::pow(1.0 + r * r, -0.5 * nu); };
    gs.profile.d1 = [nu](double r) {
        return -nu * r * std::pow(1.0 + r * r, -0.5 * nu - 1.0);
    };
    gs.profile.d2 = [nu](double r) {
        const double q = 1.0 + r * r;
        return -nu * std::pow(q, -0.5 * nu - 2.0) * (1.0 - (nu + 1.0) * r * r);
    };
    return gs;
}

namespace {

// Quintic smoothstep on [a, b] with vanishing first and second derivatives
// at both ends.
struct Smoothstep {
    double a, b;
    double t(double r) const { return (r - a) / (b - a); }
    double s(double r) const {
        const double x = t(r);
        return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    }
    double s1(double r) const {
        const double x = t(r);
        return 30.0 * x * x * (1.0 - x) * (1.0 - x) / (b - a);
    }
    double s2(double r) const {
        const double x = t(r);
        return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x) / ((b - a) * (b - a));
    }
};

}  // namespace

GroundStateProfile glued_power_profile(double p, int dim, double r0) {
    const double nu = fundamental_exponent(p, dim);
    if (!(r0 > 0.0)) throw std::invalid_argument("glued_power_profile: R0 must be positive");
    const double a = 0.5 * r0;
    const double c = std::pow(a, nu);

    GroundStateProfile gs;
    gs.p = p;
    gs.dim = dim;
    gs.tail_exponent = nu;
    gs.tail_coefficient = c;
    gs.blend_inner = a;
    gs.blend_outer = r0;

    const Smoothstep step{a, r0};
    // log phi = s(r) L(r) on the blend window, L(r) = -nu log(r/a).
    auto logtail = [nu, a](double r) { return -nu * std::log(r / a); };
    auto H = [=](double r) { return step.s(r) * logtail(r); };
    auto H1 = [=](double r) { return step.s1(r) * logtail(r) - step.s(r) * nu / r; };
    auto H2 = [=](double r) {
        return step.s2(r) * logtail(r) - 2.0 * step.s1(r) * nu / r +
               step.s(r) * nu / (r * r);
    };

    gs.profile.value = [=](double r) {
        if (r <= a) return 1.0;
        if (r >= r0) return c * std::pow(r, -nu);
        return std::exp(H(r));
    };
    gs.profile.d1 = [=](double r) {
        if (r <= a) return 0.0;
        if (r >= r0) return -nu * c * std::pow(r, -nu - 1.0);
        return H1(r) * std::exp(H(r));
    };
    gs.profile.d2 = [=](double r) {
        if (r <= a) return 0.0;
        if (r >= r0) return nu * (nu + 1.0) * c * std::pow(r, -nu - 2.0);
        const double h1 = H1(r);
        return (H2(r) + h1 * h1) * std::exp(H(r));
    };
    return gs;
}

Potential potential_from_profile(const GroundStateProfile& gs) {
    const double p = gs.p;
    const int dim = gs.dim;
    const RadialProfile prof = gs.profile;
    // For p < 2 a profile with nonzero curvature at its origin critical point
    // produces a potential growing like r^{p-2}; the value at r = 0 itself is
    // then undefined.
    const bool singular_at_zero = p < 2.0 && prof.d2(0.0) != 0.0;
    Potential v;
    v.value = [prof, p, dim, singular_at_zero](double r) {
        if (r == 0.0 && singular_at_zero)
            throw std::domain_error(
                "potential_from_profile: potential unbounded at r = 0 for p < 2");
        const double phi = prof.value(r);
        if (!(phi > 0.0))
            throw std::domain_error("potential_from_profile: profile not positive");
        return -radial_p_laplacian(prof, p, dim, r) / std::pow(phi, p - 1.0);
    };

    if (gs.blend_outer) {
        // Constant inside the blend window, exactly p-harmonic outside:
        // the potential lives on the blend annulus only.
        v.support_radius = *gs.blend_outer;
        double cert = 0.0;
        const double lo = *gs.blend_inner, hi = *gs.blend_outer;
        for (int k = 0; k <= 2000; ++k) {
            const double r = lo + (hi - lo) * k / 2000.0;
            cert = std::max(cert,
                            std::fabs(v.value(r)) * std::pow(1.0 + r * r, 0.5 * p));
        }
        v.decay_certificate = cert;
    } else if (p >= 2.0) {
        // Fuchsian certificate sup |V| (1+r^2)^{p/2} by log-spaced sampling.
        double cert = std::fabs(v.value(0.0));
        for (int k = 0; k <= 4000; ++k) {
            const double r = std::pow(10.0, -3.0 + 7.0 * k / 4000.0);
            cert = std::max(cert,
                            std::fabs(v.value(r)) * std::pow(1.0 + r * r, 0.5 * p));
        }
        v.decay_certificate = cert;
    }
    return v;
}

Potential bump_perturbation(double radius, double amplitude) {
    if (!(radius > 0.0))
        throw std::invalid_argument("bump_perturbation: radius must be positive");
    Potential w;
    w.value = [amplitude, radius](double r) {
        const double q = 1.0 - (r / radius) * (r / radius);
        return q > 0.0 ? amplitude * q * q : 0.0;
    };
    w.support_radius = radius;
    w.is_zero = amplitude == 0.0;
    return w;
}

Potential well_perturbation(double radius, double amplitude) {
    if (!(radius > 0.0))
        throw std::invalid_argument("well_perturbation: radius must be positive");
    const double delta = 0.05;
    const double lo = radius * (1.0 - delta);
    const double hi = radius * (1.0 + delta);
    Potential w;
    w.value = [amplitude, lo, hi](double r) {
        if (r <= lo) return amplitude;
        if (r >= hi) return 0.0;
        const Smoothstep step{lo, hi};
        return amplitude * (1.0 - step.s(r));
    };
    w.support_radius = hi;
    w.is_zero = amplitude == 0.0;
    return w;
}

ConditionReport check_condition(const Potential& W, const GroundStateProfile& gs,
                                const RadialGrid& grid) {
    RadialField f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.r[i];
        f[i] = W.value(r) * std::pow(gs.profile.value(r), gs.p);
    }
    ConditionReport rep;
    rep.integral = integrate(grid, f);
    rep.positive = rep.integral > 0.0;
    return rep;
}

void write_potential_table(const std::string& path, const PotentialTable& table,
                           const std::vector<std::string>& comments) {
    if (table.r.size() != table.value.size())
        throw std::invalid_argument("write_potential_table: column size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_potential_table: cannot open " + path);
    char line[128];
    std::snprintf(line, sizeof line, "# radial-potential p=%.17g N=%d\n", table.p,
                  table.dim);
    out << line;
    for (const auto& c : comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < table.r.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g %.17g\n", table.r[i], table.value[i]);
        out << line;
    }
}

PotentialTable load_potential_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_potential_table: cannot open " + path);
    std::string header;
    std::getline(in, header);
    PotentialTable t;
    if (std::sscanf(header.c_str(), "# radial-potential p=%lf N=%d", &t.p, &t.dim) != 2)
        throw std::runtime_error("load_potential_table: bad header in " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double r, v;
        if (!(ss >> r >> v))
            throw std::runtime_error("load_potential_table: bad row in " + path);
        t.r.push_back(r);
        t.value.push_back(v);
    }
    if (t.r.size() < 2)
        throw std::runtime_error("load_potential_table: table needs at least 2 rows");
    for (std::size_t i = 1; i < t.r.size(); ++i)
        if (!(t.r[i] > t.r[i - 1]))
            throw std::runtime_error("load_potential_table: radii not increasing");
    return t;
}

Potential potential_from_table(const PotentialTable& table) {
    Potential v;
    auto r = table.r;
    auto val = table.value;
    v.value = [r, val](double x) {
        if (x <= r.front()) return val.front();
        if (x >= r.back()) return 0.0;
        const auto it = std::upper_bound(r.begin(), r.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - r.begin());
        const double tt = (x - r[i - 1]) / (r[i] - r[i - 1]);
        return (1.0 - tt) * val[i - 1] + tt * val[i];
    };
    v.support_radius = r.back();
    return v;
}

}  // namespace wcpl
