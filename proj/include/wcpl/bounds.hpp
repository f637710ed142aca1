#pragma once

#include "wcpl/energy.hpp"

namespace wcpl {

/// Coefficients of the closed-form p-Laplacian of r^{-nu} e^{-m r}:
///   -Delta_p u = m^p (1 + nu/(m r))^{p-2}
///                [A/(m r) + B/(m^2 r^2) - (p-1)] u^{p-1},
/// with A = (N-1) - 2 nu (p-1) and B = nu (N - p - nu (p-1)).
struct SupersolutionConstants {
    double A = 0.0;
    double B = 0.0;
};
SupersolutionConstants constants_A_B(double p, int dim, double nu);

/// Profile r^{-nu} e^{-mu beta r} together with the eigenvalue it is
/// measured against. Requires lambda < 0.
struct Supersolution {
    double p = 2.0;
    int dim = 0;
    double nu = 0.0;
    double mu = 0.0;
    double beta = 1.0;
    double lambda = 0.0;

    double rate() const { return mu * beta; }
    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
    RadialProfile profile() const;

    /// -Delta_p via the A/B closed form.
    double p_laplacian_closed(double r) const;
    /// -Delta_p via radial_p_laplacian on the analytic derivatives.
    double p_laplacian_direct(double r) const;
    /// -Delta_p u - lambda u^{p-1} in a factored form whose sign is exact
    /// in floating point.
    double residual_closed(double r) const;
    double residual_direct(double r) const;
};

/// nu = (N-1)/(p-1), rate mu = (lambda/(1-p))^{1/p}: supersolution on all
/// of r > 0. Decays slowest of the three families.
Supersolution slow_decay_supersolution(double p, int dim, double lambda);

/// nu = (N-p)/(p-1), rate (2 lambda/(1-p))^{1/p}: supersolution for
/// r >= L/mu, with L from validity_radius_factor.
Supersolution fast_decay_supersolution(double p, int dim, double lambda);

/// nu = (N-p)/(p-1), rate beta (lambda/(1-p))^{1/p} with beta >= 1.
Supersolution scaled_decay_supersolution(double p, int dim, double lambda,
                                         double beta);

/// Smallest L such that the fast-decay residual is nonpositive for all
/// sampled r >= L/mu (0 when every sample already qualifies).
double validity_radius_factor(double p, int dim, double lambda);

/// Smallest power of two beta making the scaled-decay residual nonpositive
/// on [r_inner, 1000]. Throws std::runtime_error if 2^20 does not suffice.
double smallest_valid_beta(double p, int dim, double lambda, double r_inner);

struct ResidualSample {
    double r = 0.0;
    double closed = 0.0;     // residual via the A/B form
    double direct = 0.0;     // residual via radial_p_laplacian
    double relative_gap = 0.0;  // |closed - direct| Delta_p paths, relative
};
std::vector<ResidualSample> supersolution_residual(const Supersolution& s,
                                                   const std::vector<double>& radii);

/// Cutoff profile equal to 1 up to the crossover radius 1/s and exp(1 - s r)
/// beyond, with s = t alpha^{(p-1)/(N-p)}.
struct TestFunctionFamily {
    double p = 2.0;
    int dim = 0;
    double alpha = 0.0;
    double t = 1.0;

    double scale() const;             // s
    double crossover_radius() const;  // 1/s
    double value(double r) const;
    double d1(double r) const;
};

/// integral f^p phi0^p dx by quadrature on an internally built grid.
double test_mass(const TestFunctionFamily& f, const GroundStateProfile& gs);

/// Rayleigh quotient of the trial field f_{alpha,t} phi0 (phi0 alone when
/// N > p^2), an upper bound for the principal eigenvalue at coupling alpha.
/// The quadrature domain extends past max(10/s, 10/mu) with mu estimated
/// from the bound itself.
double upper_bound_lambda(const ProblemSpec& spec, double t);

struct UpperBoundOptimum {
    double t = 1.0;
    double bound = 0.0;
    bool unimodal = true;  // false when the coarse scan was not unimodal and
                           // the best sampled t was returned instead
};
/// Golden-section minimization of t -> upper_bound_lambda over [1e-3, 10].
UpperBoundOptimum optimize_upper_bound(const ProblemSpec& spec);

/// Weighted annulus capacity
///   min { integral_1^R |u'|^p rho^{d-1} drho : u(1) = 1, u(R) = 0 }
/// with d = (p^2 - N)/(p - 1) and nu = (N - p)/(p - 1)^2.
struct CapacityProblem {
    double p = 2.0;
    int dim = 0;
    double R = 2.0;

    double d() const { return (p * p - dim) / (p - 1.0); }
    double nu() const { return (dim - p) / ((p - 1.0) * (p - 1.0)); }
};
/// nu^{p-1} (R^nu - 1)^{1-p}, attained by (R^nu - rho^nu)/(R^nu - 1).
double capacity_closed_form(const CapacityProblem& c);
/// Exact minimum over piecewise-linear fields on a log-spaced mesh, from the
/// one-dimensional Euler-Lagrange system (constant discrete flux).
double capacity_discrete_min(const CapacityProblem& c, std::size_t cells);
RadialProfile capacity_minimizer(const CapacityProblem& c);

/// Gamma(0, x) = integral_x^infty e^{-s}/s ds. Power series below 1 and a
/// continued fraction above; x <= 0 throws std::domain_error.
double incomplete_gamma_zero(double x);

/// Predicted growth of the mass |phi|_p^p (normalized phi(0) = 1) as the
/// eigenvalue tends to zero: (-lambda)^{nu0 - N/p}, or log(1/(-lambda))
/// when N = p^2.
struct MassGrowth {
    double exponent = 0.0;
    bool logarithmic = false;
    double factor = 0.0;
};
MassGrowth lower_bound_mass(double p, int dim, double lambda);

}  // namespace wcpl
