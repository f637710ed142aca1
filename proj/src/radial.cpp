#include "wcpl/radial.hpp"

#include <cmath>
#include <stdexcept>

namespace wcpl {

double unit_sphere_area(int dim) {
    if (dim < 1) throw std::invalid_argument("unit_sphere_area: dim must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double ball_volume(int dim, double radius) {
    return unit_sphere_area(dim) / dim * std::pow(radius, dim);
}

RadialGrid make_grid(int dim, double r_max, std::size_t cells, Grading grading,
                     double ratio) {
    if (dim < 1) throw std::invalid_argument("make_grid: dim must be >= 1");
    if (!(r_max > 0.0)) throw std::invalid_argument("make_grid: r_max must be positive");
    if (cells < 16) throw std::invalid_argument("make_grid: need at least 16 cells");
    if (grading == Grading::geometric && !(ratio > 1.0 && ratio <= 1.2))
        throw std::invalid_argument("make_grid: geometric ratio must lie in (1, 1.2]");

    RadialGrid g;
    g.dim = dim;
    g.sphere_area = unit_sphere_area(dim);
    g.r.resize(cells + 1);
    g.r[0] = 0.0;
    if (grading == Grading::uniform) {
        for (std::size_t i = 1; i <= cells; ++i)
            g.r[i] = r_max * static_cast<double>(i) / static_cast<double>(cells);
    } else {
        // First spacing h0 from h0 (ratio^M - 1)/(ratio - 1) = r_max.
        const double h0 = r_max * (ratio - 1.0) / (std::pow(ratio, static_cast<double>(cells)) - 1.0);
        double h = h0;
        for (std::size_t i = 1; i <= cells; ++i) {
            g.r[i] = g.r[i - 1] + h;
            h *= ratio;
        }
    }
    g.r[cells] = r_max;  // remove accumulation roundoff at the boundary

    g.w.resize(cells + 1);
    // Trapezoid coefficients on the transformed integrand f(r) r^{N-1}.
    for (std::size_t i = 1; i <= cells; ++i) {
        const double hl = g.r[i] - g.r[i - 1];
        const double hr = (i < cells) ? g.r[i + 1] - g.r[i] : 0.0;
        g.w[i] = g.sphere_area * 0.5 * (hl + hr) * std::pow(g.r[i], dim - 1);
    }
    // Origin: exact volume of [0, r_1/2] keeps the weight positive even
    // though r^{N-1} vanishes at the node itself.
    g.w[0] = g.sphere_area * std::pow(0.5 * g.r[1], dim) / dim;
    return g;
}

double integrate(const RadialGrid& grid, const RadialField& f) {
    if (f.size() != grid.size())
        throw std::invalid_argument("integrate: field size does not match grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += grid.w[i] * f[i];
    return acc;
}

RadialField radial_gradient(const RadialGrid& grid, const RadialField& f) {
    if (f.size() != grid.size())
        throw std::invalid_argument("radial_gradient: field size does not match grid");
    const std::size_t n = f.size();
    RadialField d(n);
    d[0] = 0.0;  // even extension at the origin
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = grid.r[i] - grid.r[i - 1];
        const double hp = grid.r[i + 1] - grid.r[i];
        d[i] = -hp / (hm * (hm + hp)) * f[i - 1]
             + (hp - hm) / (hm * hp) * f[i]
             + hm / (hp * (hm + hp)) * f[i + 1];
    }
    if (n >= 3) {
        const std::size_t m = n - 1;
        const double h2 = grid.r[m] - grid.r[m - 1];
        const double h1 = grid.r[m - 1] - grid.r[m - 2];
        d[m] = f[m - 2] * h2 / (h1 * (h1 + h2))
             - f[m - 1] * (h1 + h2) / (h1 * h2)
             + f[m] * (h1 + 2.0 * h2) / ((h1 + h2) * h2);
    }
    return d;
}

double degenerate_weight(double s, double p) {
    double a = std::fabs(s);
    if (p == 2.0) return 1.0;
    if (p < 2.0 && a < kGradientFloor) a += kGradientFloor;
    return std::pow(a, p - 2.0);
}

double radial_p_laplacian(const RadialProfile& u, double p, int dim, double r) {
    const double du = u.d1(r);
    const double ddu = u.d2(r);
    const double slope_over_r = (r > 0.0) ? du / r : ddu;
    return -degenerate_weight(du, p) * ((p - 1.0) * ddu + (dim - 1) * slope_over_r);
}

RadialField radial_p_laplacian(const RadialProfile& u, double p,
                               const RadialGrid& grid) {
    RadialField out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = radial_p_laplacian(u, p, grid.dim, grid.r[i]);
    return out;
}

RadialField radial_p_laplacian_fd(const RadialGrid& grid, const RadialField& f,
                                  double p) {
    const RadialField d = radial_gradient(grid, f);
    const std::size_t n = grid.size();
    RadialField q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = std::pow(grid.r[i], grid.dim - 1) * degenerate_weight(d[i], p) * d[i];
    RadialField dq = radial_gradient(grid, q);
    RadialField out(n);
    for (std::size_t i = 1; i < n; ++i)
        out[i] = -dq[i] / std::pow(grid.r[i], grid.dim - 1);
    out[0] = n > 1 ? out[1] : 0.0;
    return out;
}

}  // namespace wcpl
