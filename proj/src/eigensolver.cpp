#include "wcpl/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wcpl {

double decay_rate(double lambda, double p) {
    return std::pow(std::fabs(lambda) / (p - 1.0), 1.0 / p);
}

RadialGrid grid_for_radius(const GridPolicy& policy, int dim, double r_max) {
    return make_grid(dim, r_max, policy.cells, policy.grading, policy.ratio);
}

namespace {

// Discrete objective the solver descends on. The kinetic term lives on
// staggered cells, sum_i vol_i |(u_{i+1}-u_i)/h_i|^p with vol_i the exact
// shell volume, and the potential/mass terms are nodal. The cell form keeps
// every difference mode visibly stiff (a node-centered difference is nearly
// blind to the finest sawtooth, which stalls quotient descent), and its
// Hessian is exactly the tridiagonal matrix the preconditioner assembles.
// The reported eigenvalue is re-evaluated through rayleigh() on the result.
class Objective {
  public:
    Objective(const ProblemSpec& spec, const RadialGrid& grid)
        : g_(grid), p_(spec.p) {
        const std::size_t n = grid.size();
        veff_ = effective_potential(spec, grid);
        for (std::size_t i = 0; i < n; ++i)
            veff_[i] -= spec.alpha * spec.W.value(grid.r[i]);
        h_.resize(n - 1);
        vol_.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h_[i] = grid.r[i + 1] - grid.r[i];
            vol_[i] = grid.sphere_area *
                      (std::pow(grid.r[i + 1], grid.dim) - std::pow(grid.r[i], grid.dim)) /
                      grid.dim;
        }
    }

    std::size_t size() const { return g_.size(); }
    double p() const { return p_; }
    const RadialGrid& grid() const { return g_; }
    const std::vector<double>& veff() const { return veff_; }

    // Energy and mass of the field.
    void value(const RadialField& u, double& energy, double& mass) const {
        energy = 0.0;
        mass = 0.0;
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            const double s = (u[i + 1] - u[i]) / h_[i];
            energy += vol_[i] * std::pow(std::fabs(s), p_);
        }
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double up = std::pow(std::fabs(u[i]), p_);
            energy += g_.w[i] * veff_[i] * up;
            mass += g_.w[i] * up;
        }
    }

    double quotient(const RadialField& u) const {
        double e, m;
        value(u, e, m);
        return e / m;
    }

    // Gradients of energy and mass (factor p dropped from both, which leaves
    // descent directions and the stationarity residual unchanged). When scale
    // is given it receives the sum of the magnitudes of the contributions to
    // grad_e — the rounding floor of the assembly, below which cancellation
    // noise makes the gradient unmeasurable.
    void gradients(const RadialField& u, RadialField& grad_e, RadialField& grad_m,
                   RadialField* scale = nullptr) const {
        const std::size_t n = u.size();
        grad_e.assign(n, 0.0);
        grad_m.assign(n, 0.0);
        if (scale) scale->assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double s = (u[i + 1] - u[i]) / h_[i];
            // vol_i |s|^{p-2} s / h_i, the discrete flux through cell i
            const double flow = vol_[i] * degenerate_weight(s, p_) * s / h_[i];
            grad_e[i] -= flow;
            grad_e[i + 1] += flow;
            if (scale) {
                (*scale)[i] += std::fabs(flow);
                (*scale)[i + 1] += std::fabs(flow);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double mp = degenerate_weight(u[i], p_) * u[i];  // |u|^{p-2} u
            grad_m[i] = g_.w[i] * mp;
            grad_e[i] += g_.w[i] * veff_[i] * mp;
            if (scale) (*scale)[i] += g_.w[i] * std::fabs(veff_[i]) * mp;
        }
    }

  private:
    const RadialGrid& g_;
    double p_;
    std::vector<double> veff_;
    std::vector<double> h_, vol_;
};

// Tridiagonal shifted Hessian of the objective at the current iterate, on
// the unknowns (the Dirichlet node at r_max is excluded). Assembled either
// clamped — the well region held at zero so the matrix stays SPD and can
// precondition descent — or signed, which preserves the inertia of
// He - lambda*Hm: by Sylvester's law the number of negative LDL^T pivots
// counts the eigenvalues below lambda, certifying whether the iterate is the
// ground state or a stationary excited-state trap.
class ShiftedHessian {
  public:
    void assemble(const Objective& obj, const RadialField& u, double lambda,
                  bool clamp) {
        const RadialGrid& g = obj.grid();
        const double p = obj.p();
        const std::size_t n = g.size();
        const std::size_t unknowns = n - 1;
        diag_.assign(unknowns, 0.0);
        off_.assign(unknowns, 0.0);  // off_[j] couples j and j+1

        double smax = 0.0, umax = 0.0;
        slopes_.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            slopes_[i] = (u[i + 1] - u[i]) / (g.r[i + 1] - g.r[i]);
            smax = std::max(smax, std::fabs(slopes_[i]));
            umax = std::max(umax, std::fabs(u[i]));
        }
        const double sfloor = std::max(1e-6 * smax, 1e-300);
        const double ufloor = std::max(1e-6 * umax, 1e-300);

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = g.r[i + 1] - g.r[i];
            const double vol = g.sphere_area *
                               (std::pow(g.r[i + 1], g.dim) - std::pow(g.r[i], g.dim)) /
                               g.dim;
            const double a = (p - 1.0) *
                             std::pow(std::max(std::fabs(slopes_[i]), sfloor), p - 2.0);
            const double k = a * vol / (h * h);
            diag_[i] += k;
            if (i + 1 < unknowns) {
                diag_[i + 1] += k;
                off_[i] -= k;
            }
        }
        const auto& veff = obj.veff();
        for (std::size_t i = 0; i < unknowns; ++i) {
            const double shift =
                clamp ? std::max(veff[i] - lambda, 0.0) : veff[i] - lambda;
            const double b = g.w[i] * (p - 1.0) *
                             std::pow(std::max(std::fabs(u[i]), ufloor), p - 2.0) *
                             shift;
            diag_[i] += b;
        }
    }

    // dir = -T^{-1} grad on the unknowns, zero at the Dirichlet node.
    // Meaningful for the clamped (SPD) assembly.
    void apply_inverse_negated(const RadialField& grad, RadialField& dir) const {
        const std::size_t k = diag_.size();
        dir.assign(k + 1, 0.0);
        cw_.resize(k);
        dw_.resize(k);
        cw_[0] = off_[0] / diag_[0];
        dw_[0] = -grad[0] / diag_[0];
        for (std::size_t i = 1; i < k; ++i) {
            const double m = diag_[i] - off_[i - 1] * cw_[i - 1];
            cw_[i] = i + 1 < k ? off_[i] / m : 0.0;
            dw_[i] = (-grad[i] - off_[i - 1] * dw_[i - 1]) / m;
        }
        dir[k - 1] = dw_[k - 1];
        for (std::size_t i = k - 1; i-- > 0;) dir[i] = dw_[i] - cw_[i] * dir[i + 1];
    }

    // LDL^T elimination, counting negative pivots. By Sylvester's law this
    // is the number of pencil eigenvalues below the shift the matrix was
    // assembled at (Sturm count).
    int negative_pivots() const {
        const std::size_t k = diag_.size();
        double piv_prev = 0.0;
        int negatives = 0;
        double tmax = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            tmax = std::max(tmax, std::fabs(diag_[i]) + 2.0 * std::fabs(off_[i]));
        const double guard = 1e-300 + 1e-18 * tmax;
        for (std::size_t i = 0; i < k; ++i) {
            double piv = diag_[i];
            if (i > 0) {
                const double m = off_[i - 1] /
                                 (std::fabs(piv_prev) > guard
                                      ? piv_prev
                                      : (piv_prev < 0.0 ? -guard : guard));
                piv -= m * off_[i - 1];
            }
            if (piv < 0.0) ++negatives;
            piv_prev = piv;
        }
        return negatives;
    }

    // Thomas solve T x = rhs on the unknowns (indefinite allowed; used for
    // inverse iteration, where elimination error aligns with the target
    // eigenvector). x is sized like the full field with a Dirichlet zero.
    void solve(const RadialField& rhs, RadialField& x) const {
        const std::size_t k = diag_.size();
        x.assign(k + 1, 0.0);
        cw_.resize(k);
        dw_.resize(k);
        double m0 = diag_[0];
        if (m0 == 0.0) m0 = 1e-300;
        cw_[0] = off_[0] / m0;
        dw_[0] = rhs[0] / m0;
        for (std::size_t i = 1; i < k; ++i) {
            double m = diag_[i] - off_[i - 1] * cw_[i - 1];
            if (m == 0.0) m = 1e-300;
            cw_[i] = i + 1 < k ? off_[i] / m : 0.0;
            dw_[i] = (rhs[i] - off_[i - 1] * dw_[i - 1]) / m;
        }
        x[k - 1] = dw_[k - 1];
        for (std::size_t i = k - 1; i-- > 0;) x[i] = dw_[i] - cw_[i] * x[i + 1];
    }

  private:
    std::vector<double> diag_, off_, slopes_;
    mutable std::vector<double> cw_, dw_;
};

void project_and_normalize(const Objective& obj, RadialField& u) {
    for (auto& x : u) x = std::fabs(x);
    u.back() = 0.0;
    double e, m;
    obj.value(u, e, m);
    const double scale = std::pow(m, -1.0 / obj.p());
    for (auto& x : u) x *= scale;
}

double effective_tolerance(double lambda, const SolverConfig& cfg) {
    if (std::fabs(lambda) >= 1e-5) return cfg.tolerance_lambda;
    return std::max(cfg.tolerance_lambda, 1e-3 * std::fabs(lambda));
}

}  // namespace

SpectralResult solve_ground_state(const ProblemSpec& spec, const RadialGrid& grid,
                                  const SolverConfig& config,
                                  const RadialField* warm_start) {
    spec.validate();
    const std::size_t n = grid.size();
    if (n < 3) throw std::invalid_argument("solve_ground_state: grid too small");
    Objective obj(spec, grid);

    RadialField u;
    if (warm_start) {
        if (warm_start->size() != n)
            throw std::invalid_argument("solve_ground_state: warm start size mismatch");
        u = *warm_start;
    } else {
        u.resize(n);
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const bool has_gs = spec.ground_state.has_value();
        for (std::size_t i = 0; i < n; ++i) {
            const double base =
                (has_gs ? spec.ground_state->profile.value(grid.r[i]) : 1.0) *
                std::exp(-grid.r[i] / grid.r_max());
            u[i] = base * (1.0 + config.perturbation * unit(rng));
        }
    }
    project_and_normalize(obj, u);

    double e, m;
    obj.value(u, e, m);
    double lambda = e / m;

    RadialField grad_e, grad_m, gscale, g, dir, trial;
    ShiftedHessian prec, probe;

    double step = config.step_init;
    double residual = 1.0;
    std::size_t iter = 0;
    int fail_streak = 0;
    int settle_streak = 0;
    bool converged = false;

    // A stationarity test alone cannot tell the ground state from an excited
    // eigenvector: the quotient is stationary at every eigenvector, and near
    // degeneracy the pull toward the true bottom can sit below any gradient
    // tolerance. Before accepting a stop, run a Sturm count on the signed
    // Hessian pencil (He, Hm) at the iterate: no eigenvalue below the
    // current quotient (beyond half a tolerance) certifies the stop. If one
    // exists, locate it by bisection, extract its eigenvector by inverse
    // iteration, and restart from that field — for the quadratic case this
    // jumps straight to the lower state; in general it is a descent restart.
    const auto pencil_count = [&](double sigma) {
        probe.assemble(obj, u, sigma, /*clamp=*/false);
        return probe.negative_pivots();
    };
    const auto certify_or_escape = [&]() -> bool {
        const double gap = 0.5 * effective_tolerance(lambda, config);
        if (pencil_count(lambda - gap) == 0) return true;

        // Bracket and bisect the lowest pencil eigenvalue mu0 < lambda - gap.
        double hi = lambda - gap;
        double span = std::max(1.0, 2.0 * std::fabs(lambda));
        double lo = lambda - span;
        for (int t = 0; t < 60 && pencil_count(lo) > 0; ++t) {
            span *= 4.0;
            lo = lambda - span;
        }
        for (int t = 0; t < 80 && hi - lo > 1e-6 * gap + 1e-18 * std::fabs(hi); ++t) {
            const double mid = 0.5 * (lo + hi);
            if (pencil_count(mid) >= 1)
                hi = mid;
            else
                lo = mid;
        }
        const double mu0 = hi;

        // Inverse iteration just below mu0; the mass matrix of the pencil is
        // diag(w_i |u_i|^{p-2}) up to the constant p-1 dropped throughout.
        const double offset = std::max(1e-3 * (lambda - mu0), 1e-12 * std::fabs(mu0) + 1e-30);
        probe.assemble(obj, u, mu0 - offset, /*clamp=*/false);
        RadialField y(n, 1.0), rhs(n - 1, 0.0);
        y.back() = 0.0;
        for (int it = 0; it < 4; ++it) {
            double ymax = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                ymax = std::max(ymax, std::fabs(y[i]));
            for (std::size_t i = 0; i + 1 < n; ++i)
                rhs[i] = grid.w[i] * degenerate_weight(u[i], spec.p) * (y[i] / ymax);
            probe.solve(rhs, y);
        }
        // The extracted field is exact for the quadratic case, where the
        // best candidate is the field itself. For general p it is a
        // negative-curvature direction of the true objective (y^T T y < 0),
        // so mixtures u + sigma*y descend quadratically in sigma even when
        // the field alone scores worse; scan both signs geometrically.
        double ymax = 0.0, umax = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            ymax = std::max(ymax, std::fabs(y[i]));
            umax = std::max(umax, std::fabs(u[i]));
        }
        if (!(ymax > 0.0)) return true;
        double best = lambda;
        RadialField best_u;
        trial = y;
        project_and_normalize(obj, trial);
        double lt = obj.quotient(trial);
        if (lt < best) {
            best = lt;
            best_u = trial;
        }
        for (const double sign : {1.0, -1.0}) {
            double sigma = 0.7 * umax / ymax;
            for (int t = 0; t < 30; ++t, sigma *= 0.5) {
                trial = u;
                for (std::size_t i = 0; i + 1 < n; ++i)
                    trial[i] += sign * sigma * y[i];
                project_and_normalize(obj, trial);
                lt = obj.quotient(trial);
                if (lt < best) {
                    best = lt;
                    best_u = trial;
                }
            }
        }
        if (!(best < lambda - 0.1 * effective_tolerance(lambda, config)))
            return true;  // nothing measurably better is reachable
        u = std::move(best_u);
        lambda = best;
        settle_streak = 0;
        fail_streak = 0;
        step = config.step_init;
        return false;
    };

    for (iter = 0; iter < config.max_iterations; ++iter) {
        obj.gradients(u, grad_e, grad_m, &gscale);
        double gnorm = 0.0, enorm = 0.0, mnorm = 0.0, snorm = 0.0;
        g.resize(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            g[i] = grad_e[i] - lambda * grad_m[i];
            gnorm += g[i] * g[i];
            enorm += grad_e[i] * grad_e[i];
            mnorm += grad_m[i] * grad_m[i];
            snorm += gscale[i] * gscale[i];
        }
        g[n - 1] = 0.0;
        // Stationarity relative to the size of the two gradient pieces. The
        // assembly-scale floor keeps the denominator measurable when both
        // pieces collapse by cancellation (critical potentials, lambda -> 0)
        // without loosening the test away from that regime.
        const double denom = std::sqrt(enorm) +
                             std::fabs(lambda) * std::sqrt(mnorm) +
                             1e-9 * std::sqrt(snorm) + 1e-300;
        residual = std::sqrt(gnorm) / denom;

        prec.assemble(obj, u, lambda, /*clamp=*/true);
        prec.apply_inverse_negated(g, dir);
        double slope = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) slope += g[i] * dir[i];
        // Newton-model bound on the quotient improvement still available:
        // a full step along dir = -P^{-1} g lowers the quotient by about
        // slope/2 per unit mass, and the mass is normalized to one. Once the
        // quotient has been flat for three accepted steps and either the
        // gradient test passes or no improvement beyond the quotient
        // tolerance remains, further iterations only polish eigenvector
        // directions the eigenvalue is quadratically insensitive to.
        const double predicted_drop = 0.5 * obj.p() * std::max(-slope, 0.0);
        if (settle_streak >= 3 &&
            (residual <= config.tolerance_residual ||
             predicted_drop <= 0.5 * effective_tolerance(lambda, config))) {
            if (certify_or_escape()) {
                converged = true;
                break;
            }
            continue;
        }
        if (!(slope < 0.0)) {  // numerically stationary (or NaN data)
            if (!std::isfinite(slope)) {
                converged = false;
                break;
            }
            if (certify_or_escape()) {
                converged = true;
                break;
            }
            continue;
        }

        double sigma = step;
        bool accepted = false;
        int backtracks = 0;
        double lambda_try = lambda;
        while (sigma > 1e-18) {
            trial = u;
            for (std::size_t i = 0; i + 1 < n; ++i) trial[i] += sigma * dir[i];
            project_and_normalize(obj, trial);
            lambda_try = obj.quotient(trial);
            if (lambda_try <= lambda + 1e-4 * sigma * slope) {
                accepted = true;
                break;
            }
            sigma *= config.backtrack;
            ++backtracks;
        }

        if (!accepted) {
            // No step along the SPD-preconditioned descent direction gave a
            // measurable decrease. If the fully backtracked candidate is flat
            // to rounding, the quotient has reached the floor that floating
            // point can certify: convergence, with the residual reported as
            // achieved. A candidate that still *increases* measurably marks
            // genuine divergence and feeds the failure streak.
            if (residual <= config.tolerance_residual ||
                lambda_try <= lambda + 1e-12 * std::fabs(lambda) + 1e-300) {
                if (certify_or_escape()) {
                    converged = true;
                    break;
                }
                continue;
            }
            ++fail_streak;
            step = std::max(step * 0.1, 1e-12);
            if (fail_streak >= 20)
                throw SolverFailure("solve_ground_state: quotient stopped decreasing",
                                    u, lambda);
            continue;
        }
        fail_streak = 0;
        if (std::fabs(lambda_try - lambda) <= effective_tolerance(lambda_try, config))
            ++settle_streak;
        else
            settle_streak = 0;
        lambda = lambda_try;
        u = trial;
        step = backtracks == 0 ? std::min(sigma * 1.6, 1e3) : sigma;
        if (config.on_iterate) config.on_iterate(iter, lambda, residual);
    }

    SpectralResult res;
    res.alpha = spec.alpha;
    // Report the eigenvalue through the same quadrature-based quotient that
    // rayleigh() exposes, so the two agree exactly on the returned field.
    res.lambda = rayleigh(spec, grid, u);
    res.eigenfunction = u;
    res.value_at_zero = u[0];
    res.residual = residual;
    res.iterations = iter;
    res.converged = converged;
    res.r_max = grid.r_max();
    EnergyBreakdown b = energy(spec, grid, u);
    const double scale = std::pow(std::fabs(u[0]), spec.p);  // to phi(0) = 1
    if (scale > 0.0) {
        b.kinetic /= scale;
        b.potential_V /= scale;
        b.potential_W /= scale;
        b.total /= scale;
        b.mass /= scale;
    }
    res.breakdown = b;
    return res;
}

RadialField transfer_field(const RadialGrid& from, const RadialField& u,
                           const RadialGrid& to, double p, double mu) {
    // Anchor the decay continuation slightly inside the old boundary, away
    // from the Dirichlet zero.
    std::size_t anchor = from.size() - 1;
    while (anchor > 0 && (u[anchor] <= 0.0 || from.r[anchor] > 0.97 * from.r_max()))
        --anchor;
    const double ra = from.r[anchor];
    const double ua = u[anchor];
    const double nu1 = (from.dim - 1) / (p - 1.0);

    RadialField out(to.size());
    for (std::size_t i = 0; i < to.size(); ++i) {
        const double r = to.r[i];
        if (r <= ra) {
            const auto it = std::upper_bound(from.r.begin(), from.r.end(), r);
            std::size_t j = static_cast<std::size_t>(it - from.r.begin());
            if (j == 0) j = 1;
            if (j >= from.size()) j = from.size() - 1;
            const double t = (r - from.r[j - 1]) / (from.r[j] - from.r[j - 1]);
            out[i] = (1.0 - t) * u[j - 1] + t * u[j];
        } else if (ua > 0.0) {
            out[i] = ua * std::pow(r / ra, -nu1) * std::exp(-mu * (r - ra));
        } else {
            out[i] = 0.0;
        }
    }
    out.back() = 0.0;
    return out;
}

ExtrapolationResult solve_with_domain_extrapolation(const ProblemSpec& spec,
                                                    const std::vector<double>& r_schedule,
                                                    const GridPolicy& policy,
                                                    const SolverConfig& config) {
    if (r_schedule.size() < 2)
        throw std::invalid_argument(
            "solve_with_domain_extrapolation: schedule needs at least 2 radii");
    for (std::size_t i = 1; i < r_schedule.size(); ++i)
        if (!(r_schedule[i] > r_schedule[i - 1]))
            throw std::invalid_argument(
                "solve_with_domain_extrapolation: radii must increase");

    ExtrapolationResult out;
    RadialGrid grid;
    RadialField warm;
    double mu_prev = 0.0;
    for (std::size_t k = 0; k < r_schedule.size(); ++k) {
        RadialGrid next = grid_for_radius(policy, spec.dim, r_schedule[k]);
        SpectralResult stage;
        if (k == 0) {
            stage = solve_ground_state(spec, next, config);
        } else {
            warm = transfer_field(grid, out.stages.back().eigenfunction, next,
                                  spec.p, mu_prev);
            stage = solve_ground_state(spec, next, config, &warm);
        }
        grid = std::move(next);
        mu_prev = decay_rate(stage.lambda, spec.p);
        out.stages.push_back(std::move(stage));
    }
    const std::size_t last = out.stages.size() - 1;
    const double l1 = out.stages[last].lambda, l0 = out.stages[last - 1].lambda;
    out.truncation_converged =
        std::fabs(l1 - l0) <= 0.01 * std::max(std::fabs(l1), 1e-300);
    const double mu_rule = decay_rate(out.stages[last - 1].lambda, spec.p);
    out.schedule_adequate =
        mu_rule > 0.0 && r_schedule.back() * policy.safety >= 10.0 / mu_rule;
    return out;
}

std::vector<SpectralResult> lambda_curve(
    const ProblemSpec& base, std::vector<double> alphas,
    const GridPolicy& policy, const SolverConfig& config,
    const std::function<void(const SpectralResult&)>& on_result) {
    std::sort(alphas.begin(), alphas.end(), std::greater<double>());
    std::vector<SpectralResult> results;
    const auto commit = [&](SpectralResult res) {
        if (on_result) on_result(res);
        results.push_back(std::move(res));
    };
    RadialGrid grid;
    RadialField carried;
    double mu_carried = 0.0;
    double r_current = policy.r_min;

    for (const double alpha : alphas) {
        ProblemSpec spec = base;
        spec.alpha = alpha;
        for (int attempt = 0; attempt < 6; ++attempt) {
            RadialGrid next = grid_for_radius(policy, spec.dim, r_current);
            SpectralResult res;
            try {
                if (carried.empty()) {
                    res = solve_ground_state(spec, next, config);
                } else {
                    RadialField warm =
                        transfer_field(grid, carried, next, spec.p, mu_carried);
                    res = solve_ground_state(spec, next, config, &warm);
                }
            } catch (const SolverFailure& f) {
                // Record the stalled iterate and move on; the curve continues.
                res.alpha = spec.alpha;
                res.lambda = f.lambda;
                res.eigenfunction = f.last_iterate;
                res.value_at_zero =
                    f.last_iterate.empty() ? 0.0 : f.last_iterate.front();
                res.residual = 1.0;
                res.iterations = config.max_iterations;
                res.converged = false;
                res.r_max = next.r_max();
                grid = std::move(next);
                carried = res.eigenfunction;
                mu_carried = decay_rate(res.lambda, spec.p);
                commit(std::move(res));
                break;
            }
            grid = std::move(next);
            carried = res.eigenfunction;
            mu_carried = decay_rate(res.lambda, spec.p);
            // lambda >= 0 certifies no decay scale yet: keep growing the
            // domain (a too-small Dirichlet box inflates the eigenvalue).
            const double required =
                res.lambda < 0.0 && mu_carried > 0.0
                    ? policy.safety * 10.0 / mu_carried
                    : policy.r_cap;
            if (r_current >= required || r_current >= policy.r_cap) {
                commit(std::move(res));
                break;
            }
            r_current = std::min(std::max(1.25 * required, 1.6 * r_current), policy.r_cap);
            if (attempt == 5) commit(std::move(res));
        }
    }
    std::sort(results.begin(), results.end(),
              [](const SpectralResult& a, const SpectralResult& b) {
                  return a.alpha < b.alpha;
              });
    return results;
}

}  // namespace wcpl
