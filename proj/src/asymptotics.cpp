#include "wcpl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wcpl {

namespace {

struct DecaySamples {
    std::vector<double> alpha;
    std::vector<double> lambda;
    bool dropped_nonnegative = false;
};

DecaySamples collect_decay_samples(const std::vector<double>& alpha,
                                   const std::vector<double>& lambda) {
    if (alpha.size() != lambda.size())
        throw std::invalid_argument("fit: alpha/lambda size mismatch");
    DecaySamples out;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] > 0.0))
            throw std::invalid_argument("fit: alpha must be positive");
        if (lambda[i] < 0.0) {
            out.alpha.push_back(alpha[i]);
            out.lambda.push_back(lambda[i]);
        } else {
            out.dropped_nonnegative = true;
        }
    }
    if (out.alpha.size() < 2)
        throw std::invalid_argument("fit: need at least two decaying samples");
    return out;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (out.intercept + out.slope * x[i]);
        ss_res += e * e;
    }
    out.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return out;
}

double r_squared_against(const std::vector<double>& y,
                         const std::vector<double>& model) {
    const std::size_t n = y.size();
    double my = 0.0;
    for (double v : y) my += v;
    my /= n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_res += (y[i] - model[i]) * (y[i] - model[i]);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace

Prediction predict(const ProblemSpec& spec, const RadialGrid& grid) {
    spec.validate();
    Prediction out;
    out.regime = spec.regime();
    switch (out.regime) {
        case Regime::dim_below_p:
            out.exponent = spec.p / (spec.p - spec.dim);
            break;
        case Regime::dim_equal_p:
            throw std::invalid_argument(
                "predict: no small-coupling model for dim == p");
        case Regime::dim_between:
            out.exponent = spec.p * (spec.p - 1.0) / (spec.dim - spec.p);
            break;
        case Regime::dim_equal_p2:
            out.logarithmic = true;
            out.exponent = 1.0;
            break;
        case Regime::dim_above_p2: {
            out.exponent = 1.0;
            if (!spec.ground_state)
                throw std::invalid_argument(
                    "predict: constant above the critical dimension needs the "
                    "ground-state profile");
            const GroundStateProfile& gs = *spec.ground_state;
            RadialField phi = gs.sample(grid);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double up = std::pow(phi[i], spec.p);
                num += grid.w[i] * spec.W.value(grid.r[i]) * up;
                den += grid.w[i] * up;
            }
            out.has_constant = true;
            out.constant = -num / den;
            break;
        }
    }
    return out;
}

AsymptoticFit fit_power(const std::vector<double>& alpha_in,
                        const std::vector<double>& lambda_in) {
    const DecaySamples s = collect_decay_samples(alpha_in, lambda_in);
    const std::vector<double>& alpha = s.alpha;
    const std::vector<double>& lambda = s.lambda;
    const std::size_t n = alpha.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(alpha[i]);
        y[i] = std::log(-lambda[i]);
    }
    const LineFit line = least_squares_line(x, y);

    AsymptoticFit out;
    out.model = "power";
    out.regime_violation = s.dropped_nonnegative;
    out.exponent = line.slope;
    out.constant = std::exp(line.intercept);
    out.r_squared = line.r_squared;
    out.samples = n;
    const auto [amin, amax] = std::minmax_element(alpha.begin(), alpha.end());
    out.alpha_min = *amin;
    out.alpha_max = *amax;
    out.window_valid = n >= 4 && std::log10(out.alpha_max / out.alpha_min) >= 1.5;

    if (n >= 3) {
        double spread = 0.0;
        std::vector<double> xs, ys;
        xs.reserve(n - 1);
        ys.reserve(n - 1);
        for (std::size_t drop = 0; drop < n; ++drop) {
            xs.clear();
            ys.clear();
            for (std::size_t i = 0; i < n; ++i) {
                if (i == drop) continue;
                xs.push_back(x[i]);
                ys.push_back(y[i]);
            }
            const LineFit sub = least_squares_line(xs, ys);
            spread = std::max(spread, std::fabs(sub.slope - line.slope));
        }
        out.spread = spread;
    }
    return out;
}

AsymptoticFit fit_power_pinned(const std::vector<double>& alpha_in,
                               const std::vector<double>& lambda_in,
                               double exponent) {
    const DecaySamples s = collect_decay_samples(alpha_in, lambda_in);
    const std::vector<double>& alpha = s.alpha;
    const std::vector<double>& lambda = s.lambda;
    const std::size_t n = alpha.size();

    std::vector<double> x(n), y(n);
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(alpha[i]);
        y[i] = std::log(-lambda[i]);
        shift += y[i] - exponent * x[i];
    }
    shift /= n;

    AsymptoticFit out;
    out.model = "power";
    out.regime_violation = s.dropped_nonnegative;
    out.exponent = exponent;
    out.constant = std::exp(shift);
    out.samples = n;
    const auto [amin, amax] = std::minmax_element(alpha.begin(), alpha.end());
    out.alpha_min = *amin;
    out.alpha_max = *amax;
    out.window_valid = n >= 4 && std::log10(out.alpha_max / out.alpha_min) >= 1.5;

    std::vector<double> model(n);
    for (std::size_t i = 0; i < n; ++i) model[i] = shift + exponent * x[i];
    out.r_squared = r_squared_against(y, model);
    return out;
}

AsymptoticFit fit_log_corrected(const std::vector<double>& alpha_in,
                                const std::vector<double>& lambda_in) {
    const DecaySamples s = collect_decay_samples(alpha_in, lambda_in);
    const std::vector<double>& alpha = s.alpha;
    const std::vector<double>& lambda = s.lambda;
    const std::size_t n = alpha.size();
    for (double a : alpha)
        if (!(a < 1.0))
            throw std::invalid_argument(
                "fit_log_corrected: needs alpha < 1 so |log alpha| > 0");

    std::vector<double> c(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = -lambda[i] * std::fabs(std::log(alpha[i])) / alpha[i];
        mean += c[i];
    }
    mean /= n;

    AsymptoticFit out;
    out.model = "log_corrected";
    out.regime_violation = s.dropped_nonnegative;
    out.exponent = 1.0;
    out.constant = mean;
    out.samples = n;
    const auto [amin, amax] = std::minmax_element(alpha.begin(), alpha.end());
    out.alpha_min = *amin;
    out.alpha_max = *amax;
    out.window_valid = n >= 4 && std::log10(out.alpha_max / out.alpha_min) >= 1.5;

    double var = 0.0;
    for (double v : c) var += (v - mean) * (v - mean);
    const double spread = std::sqrt(var / n);
    out.spread = mean != 0.0 ? spread / std::fabs(mean) : spread;

    std::vector<double> y(n), model(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::log(-lambda[i]);
        model[i] = std::log(mean * alpha[i] / std::fabs(std::log(alpha[i])));
    }
    out.r_squared = r_squared_against(y, model);
    return out;
}

AsymptoticFit fit_for_regime(Regime regime, const std::vector<double>& alpha,
                             const std::vector<double>& lambda) {
    if (regime == Regime::dim_equal_p2) return fit_log_corrected(alpha, lambda);
    return fit_power(alpha, lambda);
}

ScalingCheck check_W_scaling(const ProblemSpec& base,
                             const std::vector<double>& amplitudes,
                             const std::vector<double>& alphas,
                             const GridPolicy& policy, const SolverConfig& config) {
    base.validate();
    if (amplitudes.empty())
        throw std::invalid_argument("check_W_scaling: needs amplitudes");
    for (double a : amplitudes)
        if (!(a > 0.0))
            throw std::invalid_argument("check_W_scaling: amplitudes must be > 0");

    const Regime regime = base.regime();
    ScalingCheck out;
    for (double a : amplitudes) {
        ProblemSpec scaled = base;
        auto w0 = base.W.value;
        Potential w = base.W;
        w.value = [w0, a](double r) { return a * w0(r); };
        if (base.W.decay_certificate)
            w.decay_certificate = a * *base.W.decay_certificate;
        scaled.W = w;

        ScalingRow row;
        row.amplitude = a;
        for (const SpectralResult& res : lambda_curve(scaled, alphas, policy, config)) {
            row.alphas.push_back(res.alpha);
            row.lambdas.push_back(res.lambda);
        }
        row.fit = fit_for_regime(regime, row.alphas, row.lambdas);
        out.rows.push_back(std::move(row));
    }

    std::vector<double> la, lc;
    for (const ScalingRow& row : out.rows) {
        la.push_back(std::log(row.amplitude));
        lc.push_back(std::log(row.fit.constant));
    }
    if (la.size() >= 2) {
        const LineFit line = least_squares_line(la, lc);
        out.slope = line.slope;
        out.r_squared = line.r_squared;
    }
    return out;
}

}  // namespace wcpl
