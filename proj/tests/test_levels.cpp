#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rydsim/constants.hpp"
#include "rydsim/levels.hpp"
#include "support/numerov.hpp"

using namespace rydsim;
using Catch::Approx;

namespace {
const QuantumDefectModel& rb_model() {
    static QuantumDefectModel m(AtomicConstants::rb87());
    return m;
}
HalfInt hw(int t) { return half_twice(t); }
}

TEST_CASE("RydbergLevel validation and labels", "[levels]") {
    CHECK(RydbergLevel(43, 2, hw(5)).label() == "43d5/2");
    CHECK(RydbergLevel(45, 1, hw(3)).label() == "45p3/2");
    CHECK(RydbergLevel(41, 3, hw(7)).label() == "41f7/2");
    CHECK_THROWS_AS(RydbergLevel(5, 5, hw(9)), std::invalid_argument);   // l >= n
    CHECK_THROWS_AS(RydbergLevel(5, 2, hw(1)), std::invalid_argument);   // j != l +/- 1/2
    CHECK_THROWS_AS(RydbergLevel(0, 0, hw(1)), std::invalid_argument);   // n < 1
}

TEST_CASE("effective principal quantum numbers", "[levels]") {
    const auto& m = rb_model();
    CHECK(m.nstar(RydbergLevel(43, 2, hw(5))) == Approx(41.653878).epsilon(1e-7));
    CHECK(m.nstar(RydbergLevel(45, 1, hw(3))) == Approx(42.358162).epsilon(1e-7));
    CHECK(m.nstar(RydbergLevel(41, 3, hw(5))) == Approx(40.983531).epsilon(1e-7));
    CHECK(m.nstar(RydbergLevel(41, 3, hw(7))) == Approx(40.983508).epsilon(1e-7));
    CHECK(m.nstar(RydbergLevel(5, 1, hw(3))) == Approx(2.305285).epsilon(1e-6));
    // hydrogenic model has no defects at all
    CHECK(QuantumDefectModel::hydrogenic().nstar(RydbergLevel(43, 2, hw(5))) == 43.0);
    // defects are not tabulated above l=3 and default to zero there
    CHECK(m.defect(20, 4, hw(9)) == 0.0);
}

TEST_CASE("pair resonance defects for the 43d5/2 channels", "[levels]") {
    const auto& m = rb_model();
    const RydbergLevel d(43, 2, hw(5)), p(45, 1, hw(3));
    const ForsterChannel via_f5{d, d, p, RydbergLevel(41, 3, hw(5))};
    const ForsterChannel via_f7{d, d, p, RydbergLevel(41, 3, hw(7))};
    const double d5 = forster_defect_hz(m, via_f5);
    const double d7 = forster_defect_hz(m, via_f7);
    CHECK(d5 == Approx(-6.049532e6).epsilon(1e-5));
    CHECK(d7 == Approx(-8.334371e6).epsilon(1e-5));
    CHECK(d7 / d5 == Approx(1.37768851).epsilon(1e-7));

    // channel validation: both atoms must take an electric-dipole step
    const ForsterChannel bad{d, d, RydbergLevel(45, 1, hw(3)), RydbergLevel(41, 2, hw(5))};
    CHECK_THROWS_AS(forster_defect_hz(m, bad), std::invalid_argument);
}

TEST_CASE("magnetic shift of the optical resonance", "[levels]") {
    CHECK(lande_gj(2, hw(5)) == Approx(1.2).epsilon(1e-12));
    CHECK(lande_gj(1, hw(3)) == Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(lande_gj(0, hw(1)) == Approx(2.0).epsilon(1e-12));
    ZeemanStatePair p;
    p.m_f = HalfInt(2);
    p.j_r = hw(5);
    p.m_j = hw(1);
    const double shift = zeeman_resonance_shift_hz(p, 1e-3);
    CHECK(shift == Approx(-5.598498e6).epsilon(1e-6));
    CHECK(zeeman_resonance_shift_hz(p, 0.0) == 0.0);
}

TEST_CASE("semiclassical radial matrix elements: frozen values", "[levels][radial]") {
    const auto& m = rb_model();
    const RydbergLevel d(43, 2, hw(5));
    CHECK(radial_matrix_element_a0(m, d, RydbergLevel(45, 1, hw(3))) ==
          Approx(1348.205544).epsilon(1e-6));
    CHECK(radial_matrix_element_a0(m, d, RydbergLevel(41, 3, hw(5))) ==
          Approx(1373.724272).epsilon(1e-6));
    CHECK(radial_matrix_element_a0(m, d, RydbergLevel(41, 3, hw(7))) ==
          Approx(1373.657851).epsilon(1e-6));
    CHECK(radial_matrix_element_a0(m, RydbergLevel(5, 1, hw(3)), d) ==
          Approx(0.09834726).epsilon(1e-5));
    // symmetry under argument exchange
    CHECK(radial_matrix_element_a0(m, d, RydbergLevel(45, 1, hw(3))) ==
          Approx(radial_matrix_element_a0(m, RydbergLevel(45, 1, hw(3)), d))
              .epsilon(1e-12));
}

TEST_CASE("semiclassical degenerate limits match exact hydrogen", "[levels][radial]") {
    const auto h = QuantumDefectModel::hydrogenic();
    // 2s -> 2p: exact 3*sqrt(3)
    CHECK(radial_matrix_element_a0(h, RydbergLevel(2, 0, hw(1)), RydbergLevel(2, 1, hw(3))) ==
          Approx(3.0 * std::sqrt(3.0)).epsilon(1e-9));
    // 10g -> 10h: exact value from the analytic n,l formula
    CHECK(radial_matrix_element_a0(h, RydbergLevel(10, 4, hw(9)),
                                   RydbergLevel(10, 5, hw(11))) ==
          Approx(129.9038105676658).epsilon(3e-6));
}

TEST_CASE("independent grid integration confirms the radial elements", "[levels][radial]") {
    const auto& m = rb_model();
    const RydbergLevel d(43, 2, hw(5));
    struct Row {
        RydbergLevel b;
        double expect;
    };
    const Row rows[] = {
        {RydbergLevel(45, 1, hw(3)), 1348.205544},
        {RydbergLevel(41, 3, hw(5)), 1373.724272},
        {RydbergLevel(41, 3, hw(7)), 1373.657851},
    };
    for (const auto& row : rows) {
        const double grid = testsupport::numerov_matrix_element(
            m.nstar(d), d.l, m.nstar(row.b), row.b.l);
        CHECK(grid == Approx(row.expect).epsilon(2e-4));
    }
    // hydrogen 1s -> 2p against the exact 128*sqrt(6)/243
    const double h12 = testsupport::numerov_matrix_element(1.0, 0, 2.0, 1, 0.002, 0.01);
    CHECK(h12 == Approx(128.0 * std::sqrt(6.0) / 243.0).epsilon(2e-3));
}

TEST_CASE("level energies and dipole scale", "[levels]") {
    const auto& m = rb_model();
    const double e43 = level_energy_hz(m, RydbergLevel(43, 2, hw(5)));
    const double e45 = level_energy_hz(m, RydbergLevel(45, 1, hw(3)));
    CHECK(e43 < 0.0);
    CHECK(e45 > e43);  // higher n* binds less
    CHECK(dipole_scale_estimate_ea0(m, RydbergLevel(43, 2, hw(5))) ==
          Approx(41.653878 * 41.653878).epsilon(1e-6));
}
