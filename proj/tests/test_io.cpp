#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "shellfield/io.hpp"

using namespace shellfield;
using nlohmann::json;

namespace {

std::mt19937_64 prng(314159);

TestFunction random_packet() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<TestFunction::PacketTermSpec> specs;
    const int terms = 1 + static_cast<int>(prng() % 3);
    for (int t = 0; t < terms; ++t) {
        TestFunction::PacketTermSpec s;
        s.amplitude = {u(prng), u(prng)};
        s.center = Vec{2.0 * u(prng), 2.0 * u(prng)};
        s.widths = Vec{0.7 + 0.5 * std::fabs(u(prng)), 0.7 + 0.5 * std::fabs(u(prng))};
        s.carrier = Vec{2.0 * u(prng), 2.0 * u(prng)};
        specs.push_back(std::move(s));
    }
    return TestFunction::gaussian_packet(2, specs);
}

}  // namespace

TEST_CASE("roundtrip property: packets survive serialization pointwise") {
    for (int rep = 0; rep < 20; ++rep) {
        TestFunction f = random_packet();
        TestFunction back = io::testfn_from_json(io::to_json(f));
        CHECK(back.dim() == f.dim());
        CHECK(back.mask() == f.mask());
        for (double t : {-0.7, 0.2, 1.1})
            for (double x : {-0.4, 0.9}) {
                const SpacetimePoint p{Vec{t, x}};
                CHECK(std::abs(evaluate(back, p) - evaluate(f, p)) <= 1e-14);
            }
        const WaveVector k{Vec{0.8, -1.3}};
        CHECK(std::abs(spectrum(back, k) - spectrum(f, k)) <= 1e-14);
    }
}

TEST_CASE("roundtrip: grid bump with ellipsoid metadata") {
    TestFunction b = TestFunction::mollifier(Vec{0.4, -0.3}, Vec{1.0, 1.5}, {0.8, 0.1}, 33);
    const json j = io::to_json(b);
    CHECK(j.at("type") == "grid");
    CHECK(j.contains("ellipsoid"));
    TestFunction back = io::testfn_from_json(j);
    for (double t : {-0.5, 0.4, 1.2})
        for (double x : {-1.2, 0.0, 0.9}) {
            const SpacetimePoint p{Vec{t, x}};
            CHECK(evaluate(back, p) == evaluate(b, p));
        }
}

TEST_CASE("mollifier input sugar expands to a grid") {
    const json j = {{"type", "mollifier"},
                    {"center", {0.0, 0.0}},
                    {"radius", {1.0, 1.0}},
                    {"samples_per_axis", 41}};
    TestFunction b = io::testfn_from_json(j);
    CHECK(b.is_grid());
    const Complex center = evaluate(b, SpacetimePoint{Vec{0.0, 0.0}});
    CHECK(center.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("unknown keys are rejected with the offending path") {
    json j = io::to_json(TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 0.0}}}));
    j["extra"] = 1;
    CHECK_THROWS_WITH_AS(io::testfn_from_json(j),
                         "packet test function: unknown key 'extra'", std::invalid_argument);
    json bad_term = j;
    bad_term.erase("extra");
    bad_term["terms"][0]["carier"] = {0.0, 0.0};  // typo must be caught
    CHECK_THROWS_AS(io::testfn_from_json(bad_term), std::invalid_argument);
}

TEST_CASE("packet terms accept exactly one of widths/precision") {
    json term = {{"amplitude", {1.0, 0.0}},
                 {"center", {0.0, 0.0}},
                 {"carrier", {0.0, 0.0}},
                 {"widths", {1.0, 1.0}},
                 {"precision", {{1.0, 0.0}, {0.0, 1.0}}}};
    json j = {{"type", "packet"}, {"dimension", 2}, {"terms", {term}}};
    CHECK_THROWS_AS(io::testfn_from_json(j), std::invalid_argument);
}

TEST_CASE("shell config roundtrip and validation") {
    ShellConfig cfg;
    cfg.mass = 0.5;
    cfg.hbar = 2.0;
    cfg.dimension = 3;
    cfg.quadrature.cutoff = 12.0;
    cfg.quadrature.nodes = 64;
    cfg.quadrature.rule = QuadratureRule::Trapezoid;
    const ShellConfig back = io::shell_config_from_json(io::to_json(cfg));
    CHECK(back.mass == cfg.mass);
    CHECK(back.hbar == cfg.hbar);
    CHECK(back.dimension == cfg.dimension);
    CHECK(back.quadrature.cutoff == cfg.quadrature.cutoff);
    CHECK(back.quadrature.nodes == cfg.quadrature.nodes);
    CHECK(back.quadrature.rule == cfg.quadrature.rule);

    json j = io::to_json(cfg);
    j["masss"] = 1.0;
    CHECK_THROWS_AS(io::shell_config_from_json(j), std::invalid_argument);
    json invalid = io::to_json(cfg);
    invalid["mass"] = -2.0;
    CHECK_THROWS_AS(io::shell_config_from_json(invalid), std::invalid_argument);
}

TEST_CASE("masked packets roundtrip through the frequency_mask field") {
    TestFunction f = positive_frequency_projection(TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{2.0, 0.0}}}));
    const json j = io::to_json(f);
    CHECK(j.at("frequency_mask") == "positive");
    TestFunction back = io::testfn_from_json(j);
    CHECK(back.positive_frequency());
    CHECK(spectrum(back, WaveVector{Vec{-1.0, 0.0}}) == Complex{0.0, 0.0});
}

TEST_CASE("report serialization carries the documented columns") {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 16.0;
    cfg.quadrature.nodes = 128;
    ModeSet ms;
    ms.modes.push_back({"f", TestFunction::gaussian_packet(
                                 2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0},
                                      Vec{0.0, 0.0}}})});
    const CompareReport rep = compare_to_fock(ms, {2}, 2000, 8, cfg);
    const json j = io::to_json(rep);
    REQUIRE(j.at("moments").size() == 1);
    const json& row = j.at("moments")[0];
    for (const char* key : {"mode_id", "order", "predicted", "empirical", "stderr", "z"})
        CHECK(row.contains(key));
    CHECK(j.at("rng") == "splitmix64-boxmuller-v1");

    const std::string csv = io::to_csv(rep);
    CHECK(csv.rfind("mode_id,order,predicted,empirical,stderr,z\n", 0) == 0);
    CHECK(csv.find("\nf,2,") != std::string::npos);
}
