#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wcpl {

/// Node grading for radial meshes on [0, r_max].
enum class Grading { uniform, geometric };

/// Discretization of [0, r_max] together with quadrature weights for
/// integrals of radial functions over the ball in R^N:
///   integral f dx  ~=  sum_i w[i] f(r[i]).
/// Conventions: r[0] = 0, nodes strictly increasing, all weights positive.
struct RadialGrid {
    int dim = 0;                  // ambient dimension N >= 1
    std::vector<double> r;        // nodes
    std::vector<double> w;        // quadrature weights (volume measure included)
    double sphere_area = 0.0;     // |S^{N-1}|

    std::size_t size() const { return r.size(); }
    double r_max() const { return r.back(); }
};

/// Nodal samples of a radial function on a RadialGrid.
using RadialField = std::vector<double>;

/// Surface area of the unit sphere S^{N-1} in R^N (N=1 gives 2).
double unit_sphere_area(int dim);

/// Volume of the ball of given radius in R^N.
double ball_volume(int dim, double radius);

/// Build a grid with `cells` intervals on [0, r_max].
/// Geometric grading uses a constant spacing ratio h_{i+1}/h_i = ratio,
/// which concentrates nodes near the origin and spreads them toward r_max.
/// Weights come from the composite trapezoid rule applied to f(r) r^{N-1};
/// the origin node instead carries the exact volume of the cell [0, r_1/2]
/// so that every weight stays positive.
/// Throws std::invalid_argument for dim < 1, r_max <= 0, cells < 16, or a
/// geometric ratio outside (1, 1.2].
RadialGrid make_grid(int dim, double r_max, std::size_t cells,
                     Grading grading = Grading::uniform, double ratio = 1.005);

/// Quadrature sum over the ball; sizes must match.
double integrate(const RadialGrid& grid, const RadialField& f);

/// Nodal derivative df/dr: three-point second-order stencils on the
/// (possibly nonuniform) grid, one-sided at r_max. The origin uses the
/// even-extension convention f'(0) = 0 appropriate for radial profiles.
RadialField radial_gradient(const RadialGrid& grid, const RadialField& f);

/// Analytic radial profile: value and first two derivatives in r.
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

/// Guarded |s|^{p-2}. For p < 2 the factor blows up as s -> 0; slopes with
/// |s| below this floor are shifted by it to keep the value finite.
inline constexpr double kGradientFloor = 1e-14;
double degenerate_weight(double s, double p);

/// Pointwise -div(|grad u|^{p-2} grad u) for a radial profile:
///   -|u'|^{p-2} ((p-1) u'' + (N-1) u'/r),
/// with u'/r replaced by its limit u''(0) at r = 0.
double radial_p_laplacian(const RadialProfile& u, double p, int dim, double r);

/// Same operator sampled on the nodes of a grid.
RadialField radial_p_laplacian(const RadialProfile& u, double p,
                               const RadialGrid& grid);

/// Finite-difference version for nodal data, composed from radial_gradient
/// in divergence form: q = r^{N-1} |f'|^{p-2} f', result = -(q')/r^{N-1}.
/// Second-order away from the endpoints; the origin node reuses the first
/// interior value since the divergence form is singular there.
RadialField radial_p_laplacian_fd(const RadialGrid& grid, const RadialField& f,
                                  double p);

}  // namespace wcpl
