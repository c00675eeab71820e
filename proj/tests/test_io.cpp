#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rydsim/config.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/trace.hpp"
#include "rydsim/version.hpp"

using namespace rydsim;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("ini parsing", "[io]") {
    const std::string text =
        "# leading comment\n"
        "[run]\n"
        "seed = 7\n"
        "; alt comment\n"
        "name=  spaced value  \n"
        "[beams]\n"
        "power_lower_uw = 1.85\n";
    const IniDoc doc = IniDoc::parse(text);
    CHECK(doc.get("run", "seed") == "7");
    CHECK(doc.get("run", "name") == "spaced value");
    CHECK(doc.get_double("beams", "power_lower_uw") == Approx(1.85));
    CHECK(doc.get_int("run", "seed") == 7);
    CHECK(doc.has("run", "seed"));
    CHECK_FALSE(doc.has("run", "missing"));
    CHECK(doc.get_or("run", "missing", "x") == "x");
    CHECK(doc.get_double_or("run", "missing", 2.5) == 2.5);
    CHECK(doc.get_int_or("run", "missing", 4) == 4);
}

TEST_CASE("ini parse errors carry line numbers", "[io]") {
    CHECK_THROWS_WITH(IniDoc::parse("[run\n"), ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(IniDoc::parse("[run]\nnot a pair\n"), ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(IniDoc::parse("[]\n"), ContainsSubstring("empty section"));
    CHECK_THROWS_WITH(IniDoc::parse("[a]\n= 3\n"), ContainsSubstring("empty key"));
    CHECK_THROWS_AS(IniDoc::parse("[x\n"), ConfigError);
}

TEST_CASE("ini typed getter errors", "[io]") {
    IniDoc doc;
    doc.set("a", "word", "hello");
    doc.set("a", "flag", "maybe");
    CHECK_THROWS_AS(doc.get("a", "nope"), ConfigError);
    CHECK_THROWS_AS(doc.get_double("a", "word"), ConfigError);
    CHECK_THROWS_AS(doc.get_int("a", "word"), ConfigError);
    CHECK_THROWS_AS(doc.get_bool_or("a", "flag", true), ConfigError);
    doc.set("a", "on", "YES");
    doc.set("a", "off", "0");
    CHECK(doc.get_bool_or("a", "on", false));
    CHECK_FALSE(doc.get_bool_or("a", "off", true));
}

TEST_CASE("dotted overrides", "[io]") {
    IniDoc doc;
    doc.set_dotted("run.seed=9");
    doc.set_dotted(" pulse.t_max_us = 12 ");
    CHECK(doc.get("run", "seed") == "9");
    CHECK(doc.get("pulse", "t_max_us") == "12");
    CHECK_THROWS_AS(doc.set_dotted("no_dot=3"), ConfigError);
    CHECK_THROWS_AS(doc.set_dotted("a.b"), ConfigError);
    CHECK_THROWS_AS(doc.set_dotted(".key=3"), ConfigError);
    CHECK_THROWS_AS(doc.set_dotted("sec.=3"), ConfigError);
}

TEST_CASE("serialization is canonical and hashed", "[io]") {
    IniDoc a, b;
    a.set("z", "k2", "1");
    a.set("z", "k1", "2");
    a.set("m", "x", "3");
    b.set("m", "x", "3");
    b.set("z", "k1", "2");
    b.set("z", "k2", "1");
    CHECK(a.serialize() == b.serialize());
    CHECK(a.hash() == b.hash());
    b.set("z", "k1", "99");
    CHECK(a.hash() != b.hash());
    // parse(serialize) round trip
    const IniDoc c = IniDoc::parse(a.serialize());
    CHECK(c.serialize() == a.serialize());
}

TEST_CASE("trace CSV bytes are exact and parse back", "[io]") {
    TraceResult tr;
    tr.t_s = {0.0, 0.5e-6, 1.0e-6};
    tr.value = {1.0, 0.25, 0.0625};
    tr.stderr_ = {0.0, 0.01, 0.002};
    tr.n_trials = 42;
    tr.truncated_fraction = 0.125;
    const std::string csv = trace_to_csv(tr, 0xabcdef0123456789ull, 7, "p_ground");
    CHECK(csv ==
          "# config_hash=abcdef0123456789\n"
          "# seed=7\n"
          "# trials=42\n"
          "# truncated_fraction=0.125\n"
          "t_us,p_ground,stderr\n"
          "0,1,0\n"
          "0.5,0.25,0.01\n"
          "1,0.0625,0.002\n");

    const TraceResult back = trace_from_csv_text(csv);
    REQUIRE(back.size() == 3);
    CHECK(back.t_s[1] == Approx(0.5e-6).epsilon(1e-12));
    CHECK(back.value[2] == 0.0625);
    CHECK(back.stderr_[1] == 0.01);

    CHECK_THROWS_AS(trace_from_csv_text("t_us,v\n1,notanumber\n"), ConfigError);
    CHECK_THROWS_AS(trace_from_csv_text("t_us\n1\n"), ConfigError);
}

TEST_CASE("csv tables", "[io]") {
    CsvTable tab;
    tab.header = "m,d,weight";
    tab.comments = {"note"};
    tab.rows = {{0.0, 0.0031921900, 0.217377}, {5.0, 12.0 / 35.0, 25.0 / 256.0}};
    const std::string csv = tab.to_csv(1, 2);
    CHECK_THAT(csv, ContainsSubstring("# config_hash=0000000000000001\n"));
    CHECK_THAT(csv, ContainsSubstring("# seed=2\n"));
    CHECK_THAT(csv, ContainsSubstring("# note\n"));
    CHECK_THAT(csv, ContainsSubstring("m,d,weight\n"));
    CHECK_THAT(csv, ContainsSubstring("5,0.3428571429,0.09765625\n"));
}

TEST_CASE("run configuration defaults and overrides", "[io]") {
    const RunConfig rc = RunConfig::from(IniDoc{});
    CHECK(rc.seed() == 1);
    CHECK(rc.threads() == 0);
    CHECK(rc.atoms().name == "rb87");

    IniDoc overlay;
    overlay.set("run", "seed", "99");
    overlay.set("pulse", "rabi_mhz", "0.49");
    const RunConfig rc2 = RunConfig::from(overlay);
    CHECK(rc2.seed() == 99);
    CHECK(rc2.hash() != rc.hash());
    CHECK(rc2.single_pulse().rabi_rad_s() ==
          Approx(phys::two_pi * 0.49e6).epsilon(1e-12));

    IniDoc bad_section;
    bad_section.set("nonsense", "x", "1");
    CHECK_THROWS_AS(RunConfig::from(bad_section), ConfigError);
    IniDoc bad_key;
    bad_key.set("run", "seeed", "1");
    CHECK_THROWS_WITH(RunConfig::from(bad_key), ContainsSubstring("seeed"));
    IniDoc bad_channel;
    bad_channel.set("interaction", "reference_channel", "g9");
    CHECK_THROWS_AS(RunConfig::from(bad_channel).reference_channel(), ConfigError);
}

TEST_CASE("config-derived couplings", "[io]") {
    const RunConfig rc = RunConfig::from(IniDoc{});
    // the upper-leg effective dipole from the calibrated scale factor
    CHECK(rc.dipole_upper_ea0() == Approx(0.01961237).epsilon(1e-5));
    // with default beams the two-photon coupling lands at 0.55 MHz
    const PulseParams p = rc.pulse_from_beams("beams", 3.4, 0.0);
    CHECK(p.rabi_rad_s() / phys::two_pi == Approx(0.55e6).epsilon(1e-4));
    // derived pulse from the beams when no override is set
    CHECK(rc.single_pulse().rabi_rad_s() / phys::two_pi == Approx(0.55e6).epsilon(1e-4));

    const auto grid = rc.time_grid_s("pulse", "t_max_us", "t_points");
    REQUIRE(grid.size() == 321);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == Approx(16e-6).epsilon(1e-12));

    // doppler can be disabled
    IniDoc overlay;
    overlay.set("doppler", "enabled", "false");
    const RunConfig cold = RunConfig::from(overlay);
    CHECK(cold.doppler().sigma_delta_rad_s() == 0.0);
    CHECK(rc.doppler().sigma_delta_rad_s() > 0.0);
}

TEST_CASE("random streams are reproducible and well behaved", "[io][rng]") {
    RandomStream a(123, 5), b(123, 5), c(123, 6);
    for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());
    bool differs = false;
    for (int i = 0; i < 100; ++i) differs |= (a.bits() != c.bits());
    CHECK(differs);

    RandomStream r(2718, 0);
    const int n = 200000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        acc += u;
        acc2 += u * u;
    }
    CHECK(acc / n == Approx(0.5).margin(0.005));
    CHECK(acc2 / n == Approx(1.0 / 3.0).margin(0.005));

    double nacc = 0.0, nacc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = r.normal();
        nacc += g;
        nacc2 += g * g;
    }
    CHECK(nacc / n == Approx(0.0).margin(0.01));
    CHECK(nacc2 / n == Approx(1.0).margin(0.02));

    double eacc = 0.0;
    for (int i = 0; i < n; ++i) eacc += r.exponential(2.0);
    CHECK(eacc / n == Approx(0.5).margin(0.01));

    for (double mean : {0.3, 1.7, 8.0, 400.0}) {
        double pacc = 0.0, pacc2 = 0.0;
        const int np = 100000;
        for (int i = 0; i < np; ++i) {
            const double k = static_cast<double>(r.poisson(mean));
            pacc += k;
            pacc2 += k * k;
        }
        const double m = pacc / np;
        const double var = pacc2 / np - m * m;
        CHECK(m == Approx(mean).epsilon(0.03));
        CHECK(var == Approx(mean).epsilon(0.06));
    }
}

TEST_CASE("library version string", "[io]") {
    CHECK(std::string(version()) == RYDSIM_VERSION_STRING);
    CHECK_FALSE(std::string(version()).empty());
}
