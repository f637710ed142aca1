#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wcpl/potentials.hpp"
#include "wcpl/radial.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace wcpl;

namespace {

// Least-squares slope of log f against log r over [r_lo, r_hi].
double log_log_slope(const std::function<double(double)>& f, double r_lo,
                     double r_hi, int n = 40) {
    std::vector<double> x, y;
    for (int i = 0; i < n; ++i) {
        const double r =
            r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n - 1));
        x.push_back(std::log(r));
        y.push_back(std::log(f(r)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("smooth-tail profile: closed-form value and derivatives") {
    const GroundStateProfile gs = smooth_tail_profile(2.0, 3);
    CHECK(gs.tail_exponent == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gs.profile.value(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // phi = (1+r^2)^{-1/2}
    CHECK(gs.profile.value(1.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    // Derivatives agree with central differences.
    const double h = 1e-5;
    for (double r : {0.3, 1.0, 2.7, 10.0}) {
        const double d1_fd =
            (gs.profile.value(r + h) - gs.profile.value(r - h)) / (2 * h);
        const double d2_fd = (gs.profile.value(r + h) - 2 * gs.profile.value(r) +
                              gs.profile.value(r - h)) /
                             (h * h);
        CHECK(gs.profile.d1(r) == doctest::Approx(d1_fd).epsilon(1e-7));
        CHECK(gs.profile.d2(r) == doctest::Approx(d2_fd).epsilon(1e-5));
    }
}

TEST_CASE("profiles require p < N") {
    CHECK_THROWS_AS(smooth_tail_profile(3.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(smooth_tail_profile(2.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(glued_power_profile(4.0, 3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(glued_power_profile(2.0, 3, -1.0), std::invalid_argument);
}

TEST_CASE("glued profile: flat core, exact power tail, C^1 blend") {
    const GroundStateProfile gs = glued_power_profile(2.0, 3, 2.0);
    CHECK(gs.blend_inner == doctest::Approx(1.0));
    CHECK(gs.blend_outer == doctest::Approx(2.0));
    // Flat inside the inner radius.
    CHECK(gs.profile.value(0.0) == 1.0);
    CHECK(gs.profile.value(0.99) == 1.0);
    CHECK(gs.profile.d1(0.5) == 0.0);
    // Exact r^{-1} tail beyond the outer radius with coefficient 1 (= a^nu).
    CHECK(gs.profile.value(2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gs.profile.value(4.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(gs.profile.value(100.0) == doctest::Approx(0.01).epsilon(1e-12));
    // Continuity across both seams.
    for (double seam : {1.0, 2.0}) {
        const double eps = 1e-9;
        CHECK(gs.profile.value(seam - eps) ==
              doctest::Approx(gs.profile.value(seam + eps)).epsilon(1e-6));
        CHECK(gs.profile.d1(seam - eps) ==
              doctest::Approx(gs.profile.d1(seam + eps)).epsilon(1e-4));
    }
    // Monotone nonincreasing.
    double prev = gs.profile.value(0.0);
    for (double r = 0.05; r < 20.0; r += 0.05) {
        const double v = gs.profile.value(r);
        CHECK(v <= prev + 1e-14);
        prev = v;
    }
}

TEST_CASE("both profile families share the same far-field decay rate") {
    for (auto pn : {std::pair<double, int>{2.0, 3}, {2.0, 5}, {3.0, 7}}) {
        const double nu = (pn.second - pn.first) / (pn.first - 1.0);
        const GroundStateProfile smooth = smooth_tail_profile(pn.first, pn.second);
        const GroundStateProfile glued =
            glued_power_profile(pn.first, pn.second, 2.0);
        CHECK(log_log_slope(smooth.profile.value, 50.0, 200.0) ==
              doctest::Approx(-nu).epsilon(0.02));
        CHECK(log_log_slope(glued.profile.value, 50.0, 200.0) ==
              doctest::Approx(-nu).epsilon(1e-10));  // exact power tail
    }
}

TEST_CASE("potential recovered from the smooth-tail profile") {
    const GroundStateProfile gs = smooth_tail_profile(2.0, 3);
    const Potential V = potential_from_profile(gs);
    // phi = (1+r^2)^{-1/2} solves -phi'' - (2/r) phi' + V phi = 0 with
    // V(r) = (3 - ... )/(1+r^2)...; at the origin V(0) = Delta phi / phi = -3.
    CHECK(V.value(0.0) == doctest::Approx(-3.0).epsilon(1e-9));
    // V decays: far out the profile is nearly exactly power-like.
    CHECK(std::fabs(V.value(100.0)) < 1e-2);
    CHECK(std::fabs(V.value(100.0)) < std::fabs(V.value(10.0)));
}

TEST_CASE("potential from the glued profile is supported on the blend band") {
    const GroundStateProfile gs = glued_power_profile(2.0, 3, 2.0);
    const Potential V = potential_from_profile(gs);
    CHECK(V.support_radius == doctest::Approx(2.0));
    // Constant core and exact power tail are both annihilated, so V = 0 there.
    CHECK(std::fabs(V.value(0.5)) < 1e-12);
    CHECK(std::fabs(V.value(0.9)) < 1e-12);
    CHECK(std::fabs(V.value(2.1)) < 1e-12);
    CHECK(std::fabs(V.value(50.0)) < 1e-12);
    // Nontrivial inside the band.
    double peak = 0.0;
    for (double r = 1.0; r <= 2.0; r += 0.01)
        peak = std::max(peak, std::fabs(V.value(r)));
    CHECK(peak > 0.1);
}

TEST_CASE("bump perturbation shape") {
    const Potential W = bump_perturbation(2.0, 1.5);
    CHECK(W.value(0.0) == doctest::Approx(1.5).epsilon(1e-14));
    // Quartic profile a*(1-(r/rho)^2)^2.
    CHECK(W.value(1.0) == doctest::Approx(1.5 * 0.5625).epsilon(1e-14));
    CHECK(W.value(2.0) == 0.0);
    CHECK(W.value(3.0) == 0.0);
    CHECK(W.support_radius == doctest::Approx(2.0));
    CHECK_FALSE(W.is_zero);
    CHECK(bump_perturbation(1.0, 0.0).is_zero);
    CHECK_THROWS_AS(bump_perturbation(0.0, 1.0), std::invalid_argument);
    // Negative amplitude flips the sign pointwise.
    const Potential Wm = bump_perturbation(2.0, -1.5);
    for (double r : {0.0, 0.5, 1.0, 1.9})
        CHECK(Wm.value(r) == doctest::Approx(-W.value(r)).epsilon(1e-15));
}

TEST_CASE("well perturbation: plateau, smooth shoulder, compact support") {
    const Potential W = well_perturbation(1.0, 2.0);
    CHECK(W.value(0.0) == 2.0);
    CHECK(W.value(0.94) == 2.0);        // inside the plateau
    CHECK(W.value(1.06) == 0.0);        // beyond the shoulder
    CHECK(W.value(1.0) == doctest::Approx(1.0).epsilon(1e-12));  // midpoint
    CHECK(W.support_radius == doctest::Approx(1.05));
    // Monotone nonincreasing through the shoulder.
    double prev = W.value(0.9);
    for (double r = 0.9; r <= 1.1; r += 1e-3) {
        const double v = W.value(r);
        CHECK(v <= prev + 1e-14);
        prev = v;
    }
    CHECK_THROWS_AS(well_perturbation(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("coupling-sign report responds linearly to the perturbation") {
    const GroundStateProfile gs = smooth_tail_profile(2.0, 3);
    const RadialGrid grid = make_grid(3, 50.0, 2000);
    const ConditionReport plus =
        check_condition(bump_perturbation(1.0, 1.0), gs, grid);
    const ConditionReport minus =
        check_condition(bump_perturbation(1.0, -1.0), gs, grid);
    CHECK(plus.integral > 0.0);
    CHECK(plus.positive);
    CHECK(minus.integral == doctest::Approx(-plus.integral).epsilon(1e-12));
    CHECK_FALSE(minus.positive);
    // The integral is a volume integral of W phi^p, so it is insensitive to
    // the grid once the support is resolved.
    const RadialGrid fine = make_grid(3, 50.0, 4000);
    const ConditionReport plus_fine =
        check_condition(bump_perturbation(1.0, 1.0), gs, fine);
    CHECK(plus_fine.integral == doctest::Approx(plus.integral).epsilon(1e-3));
}

TEST_CASE("potential tables round-trip through files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "wcpl_pot_test";
    fs::create_directories(dir);
    const std::string path = (dir / "table.tsv").string();

    const GroundStateProfile gs = smooth_tail_profile(2.0, 4);
    const Potential V = potential_from_profile(gs);
    const RadialGrid grid = make_grid(4, 30.0, 400);

    PotentialTable t;
    t.p = 2.0;
    t.dim = 4;
    t.r.assign(grid.r.begin(), grid.r.end());
    t.value.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) t.value[i] = V.value(grid.r[i]);

    write_potential_table(path, t);
    const PotentialTable back = load_potential_table(path);
    REQUIRE(back.r.size() == t.r.size());
    CHECK(back.p == t.p);
    CHECK(back.dim == t.dim);
    for (std::size_t i = 0; i < t.r.size(); ++i) {
        CHECK(back.r[i] == t.r[i]);          // %.17g round-trips doubles
        CHECK(back.value[i] == t.value[i]);  // exactly
    }

    const Potential Vt = potential_from_table(back);
    // Exact at the nodes, zero beyond the last radius.
    for (std::size_t i = 0; i < t.r.size(); i += 37)
        CHECK(Vt.value(t.r[i]) == doctest::Approx(t.value[i]).epsilon(1e-14));
    CHECK(Vt.value(t.r.back() + 5.0) == 0.0);
    // Linear interpolation between nodes stays between neighbouring values.
    const double mid = 0.5 * (t.r[10] + t.r[11]);
    const double lo = std::min(t.value[10], t.value[11]);
    const double hi = std::max(t.value[10], t.value[11]);
    CHECK(Vt.value(mid) >= lo - 1e-15);
    CHECK(Vt.value(mid) <= hi + 1e-15);

    fs::remove_all(dir);
}

TEST_CASE("table loader rejects malformed input") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "wcpl_pot_bad";
    fs::create_directories(dir);
    const std::string path = (dir / "bad.tsv").string();
    {
        FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("# not a valid table\n0.0\tabc\n", f);
        std::fclose(f);
    }
    CHECK_THROWS(load_potential_table(path));
    CHECK_THROWS(load_potential_table((dir / "missing.tsv").string()));
    fs::remove_all(dir);
}
