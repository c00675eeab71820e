#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rydsim/analysis.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/rng.hpp"

using namespace rydsim;
using Catch::Approx;

namespace {
std::vector<double> grid_us(double max_us, int points) {
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = max_us * 1e-6 * i / (points - 1);
    return t;
}
std::vector<double> synth(const FitModel& m, const std::vector<double>& t) {
    std::vector<double> y(t.size());
    for (size_t i = 0; i < t.size(); ++i) y[i] = m.eval(t[i]);
    return y;
}
}

TEST_CASE("model evaluation", "[analysis]") {
    FitModel m{0.5, 8e-6, phys::two_pi * 0.49e6};
    CHECK(m.eval(0.0) == Approx(1.0).margin(1e-15));
    const double t = 3.7e-6;
    CHECK(m.eval(t) ==
          Approx(0.5 + 0.5 * std::exp(-t / 8e-6) * std::cos(phys::two_pi * 0.49e6 * t))
              .margin(1e-15));
}

TEST_CASE("noiseless fits round-trip to high accuracy", "[analysis]") {
    const struct {
        double a, tau_us, f_mhz, span_us;
        int n;
    } cases[] = {
        {0.5, 8.0, 0.49, 16.0, 321},
        {0.9, 30.0, 1.0, 10.0, 201},
        {0.3, 4.0, 0.25, 20.0, 161},
        {0.75, 12.0, 2.3, 6.0, 301},
        {1.0, 100.0, 0.49, 16.0, 161},
        {0.45, 2.5, 0.8, 8.0, 241},
    };
    for (const auto& c : cases) {
        const FitModel truth{c.a, c.tau_us * 1e-6, phys::two_pi * c.f_mhz * 1e6};
        const auto t = grid_us(c.span_us, c.n);
        const auto y = synth(truth, t);
        const FitResult r = fit_damped_cosine(t, y);
        INFO("a=" << c.a << " tau=" << c.tau_us << " f=" << c.f_mhz);
        REQUIRE(r.converged);
        REQUIRE_FALSE(r.degenerate);
        CHECK(r.model.a == Approx(truth.a).epsilon(1e-6));
        CHECK(r.model.tau_s == Approx(truth.tau_s).epsilon(1e-5));
        CHECK(r.model.omega_rad_s == Approx(truth.omega_rad_s).epsilon(1e-6));
        CHECK(r.sse < 1e-10);
    }
}

TEST_CASE("noisy fits recover frequency and damping", "[analysis]") {
    const FitModel truth{0.5, 8e-6, phys::two_pi * 0.49e6};
    const auto t = grid_us(16.0, 321);
    const auto clean = synth(truth, t);

    std::vector<double> omega_err, tau_err;
    for (unsigned seed = 0; seed < 100; ++seed) {
        RandomStream rng(seed, 99);
        std::vector<double> y(clean);
        for (double& v : y) v += rng.normal(0.0, 0.02);
        const FitResult r = fit_damped_cosine(t, y);
        if (!r.converged || r.degenerate) continue;
        omega_err.push_back(std::abs(r.model.omega_rad_s / truth.omega_rad_s - 1.0));
        tau_err.push_back(std::abs(r.model.tau_s / truth.tau_s - 1.0));
    }
    REQUIRE(omega_err.size() >= 95);
    std::sort(omega_err.begin(), omega_err.end());
    std::sort(tau_err.begin(), tau_err.end());
    CHECK(omega_err[omega_err.size() / 2] < 0.02);
    CHECK(tau_err[tau_err.size() / 2] < 0.25);
}

TEST_CASE("weighted fit uses the supplied uncertainties", "[analysis]") {
    const FitModel truth{0.6, 10e-6, phys::two_pi * 0.7e6};
    const auto t = grid_us(12.0, 241);
    auto y = synth(truth, t);
    std::vector<double> sigma(t.size(), 0.01);
    // corrupt one point but mark it as nearly worthless
    y[120] += 5.0;
    sigma[120] = 100.0;
    const FitResult r = fit_damped_cosine(t, y, sigma);
    REQUIRE(r.converged);
    CHECK(r.model.omega_rad_s == Approx(truth.omega_rad_s).epsilon(1e-4));
    CHECK(r.model.a == Approx(truth.a).epsilon(1e-3));
    CHECK(r.omega_err_rad_s > 0.0);
    CHECK(r.a_err > 0.0);
}

TEST_CASE("degenerate data are flagged", "[analysis]") {
    const auto t = grid_us(16.0, 64);
    SECTION("flat signal") {
        std::vector<double> y(t.size(), 0.75);
        const FitResult r = fit_damped_cosine(t, y);
        CHECK(r.degenerate);
    }
    SECTION("fraction of a period") {
        const FitModel slow{0.5, 1.0, phys::two_pi * 1e4};  // 100 us period, 16 us span
        const FitResult r = fit_damped_cosine(t, synth(slow, t));
        CHECK(r.degenerate);
    }
}

TEST_CASE("fit preconditions", "[analysis]") {
    std::vector<double> t{0.0, 1e-6, 2e-6};
    std::vector<double> y{1.0, 0.5, 0.2};
    CHECK_THROWS_AS(fit_damped_cosine(t, y), std::invalid_argument);  // too few points
    std::vector<double> t8(8, 1e-6), y8(8, 0.5);
    CHECK_THROWS_AS(fit_damped_cosine(t8, y8), std::invalid_argument);  // zero span
    std::vector<double> ybad(8, 0.5);
    std::vector<double> t9{0, 1, 2, 3, 4, 5, 6, 7, 8};
    CHECK_THROWS_AS(fit_damped_cosine(t9, ybad), std::invalid_argument);  // size mismatch
}

TEST_CASE("visibility of a synthetic fringe", "[analysis]") {
    const double period = 1.0 / 0.49e6;
    const auto t = grid_us(16.0, 641);
    // the period/8 boxcar smoothing attenuates a pure cosine by sinc(pi/8)
    const double alpha = std::sin(phys::pi / 8.0) / (phys::pi / 8.0);
    SECTION("full contrast") {
        std::vector<double> y;
        for (double ti : t) y.push_back(0.5 + 0.5 * std::cos(phys::two_pi * ti / period));
        CHECK(visibility(t, y, period) == Approx(alpha).margin(0.01));
    }
    SECTION("reduced contrast with offset") {
        std::vector<double> y;
        for (double ti : t) y.push_back(0.6 + 0.2 * std::cos(phys::two_pi * ti / period));
        // (0.8 - 0.4) / (0.8 + 0.4) = 1/3, times the smoothing attenuation
        CHECK(visibility(t, y, period) == Approx(alpha / 3.0).margin(0.01));
    }
    SECTION("damped signal measured over the early window") {
        std::vector<double> y;
        for (double ti : t)
            y.push_back(0.5 + 0.5 * std::exp(-ti / 3e-6) * std::cos(phys::two_pi * ti / period));
        const double v = visibility(t, y, period, 1.0);
        CHECK(v > 0.4);
        CHECK(v < 1.0);
    }
    SECTION("window must fit in the data") {
        std::vector<double> yshort{1, 0, 1, 0, 1, 0, 1, 0};
        std::vector<double> tshort = grid_us(0.5, 8);
        CHECK_THROWS_AS(visibility(tshort, yshort, period, 2.0), std::invalid_argument);
    }
}
