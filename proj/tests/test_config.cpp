#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chemotax/config.hpp"

using namespace chemotax;

namespace {

const char* minimal = R"(
[model]
variant = local
tau = 0

[grid]
dimension = 1
lengths = 3.14159
cells = 64

[time]
T = 2.0
)";

} // namespace

TEST_CASE("minimal config fills the documented defaults") {
    const RunSpec spec = parse_config(minimal);
    CHECK(spec.model.variant == Variant::local);
    CHECK(spec.time.cfl == 0.4);
    CHECK(spec.time.record_interval == doctest::Approx(2.0 / 500.0));
    CHECK(spec.time.blowup_threshold == 1e6);
    CHECK(spec.time.dt_min == 1e-12);
    CHECK(spec.output.dir == "out");
    CHECK(spec.output.p_list == std::vector<double>{2.0});
    CHECK(std::holds_alternative<ConstantInit>(spec.init.preset));
    CHECK(spec.model.n == 1);
    CHECK_FALSE(spec.sweep.has_value());
}

TEST_CASE("semantic model errors surface via validation, not parsing") {
    std::string text(minimal);
    text.replace(text.find("variant = local"), 15, "variant = nonlocal");
    text.replace(text.find("tau = 0"), 7, "tau = 1");
    const RunSpec spec = parse_config(text); // parse accepts the fields
    const auto issues = validate(spec.model);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("nonlocal requires tau=0") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers") {
    std::string dup(minimal);
    dup += "cfl = 0.5\ncfl = 0.6\n"; // appended into [time]
    try {
        parse_config(dup);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() > 0);
        CHECK(std::string(e.what()).find("duplicate key 'cfl'") != std::string::npos);
    }

    std::string unknown(minimal);
    unknown += "mystery = 1\n";
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);

    CHECK_THROWS_AS(parse_config("[model]\ntau = 0\n"), ConfigError); // no [grid]/[time]

    std::string bad_type(minimal);
    bad_type.replace(bad_type.find("T = 2.0"), 7, "T = soon");
    try {
        parse_config(bad_type);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("not a number") != std::string::npos);
        CHECK(e.line() > 0);
    }

    CHECK_THROWS_AS(parse_config("chi = 1\n"), ConfigError);       // key before section
    CHECK_THROWS_AS(parse_config("[mystery]\nx = 1\n"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text = "# leading comment\n";
    text += minimal;
    text += "\n[output]\ndir = results # trailing comment\n";
    const RunSpec spec = parse_config(text);
    CHECK(spec.output.dir == "results");
}

TEST_CASE("sweep section round trip and validation") {
    std::string text(minimal);
    text += R"(
[sweep]
k = 0.5:3:6
chi = 1:2:2
simulate = true
budget = 64
)";
    const RunSpec spec = parse_config(text);
    REQUIRE(spec.sweep.has_value());
    REQUIRE(spec.sweep->parameters.size() == 2);
    // Parameters come back in key order.
    CHECK(spec.sweep->parameters[0].name == "chi");
    CHECK(spec.sweep->parameters[1].name == "k");
    CHECK(spec.sweep->parameters[1].start == 0.5);
    CHECK(spec.sweep->parameters[1].stop == 3.0);
    CHECK(spec.sweep->parameters[1].count == 6);
    CHECK(spec.sweep->simulate);
    CHECK(spec.sweep->budget == 64);

    std::string bad(minimal);
    bad += "[sweep]\nk = 1:2\n";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    std::string unknown_param(minimal);
    unknown_param += "[sweep]\ncells = 1:2:2\n";
    CHECK_THROWS_AS(parse_config(unknown_param), ConfigError);
}

TEST_CASE("render/parse round trip over randomized specs") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> pos(0.1, 7.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> cells(4, 120);
    std::uniform_int_distribution<int> preset_pick(0, 3);

    for (int trial = 0; trial < 200; ++trial) {
        RunSpec spec;
        spec.model.variant = coin(rng) ? Variant::local : Variant::nonlocal;
        spec.model.tau = spec.model.variant == Variant::nonlocal ? 0 : coin(rng);
        spec.model.chi = pos(rng);
        spec.model.xi = pos(rng);
        spec.model.lambda = pos(rng);
        spec.model.mu = pos(rng);
        spec.model.r = 1.0 + pos(rng);
        spec.model.m1 = pos(rng) - 3.0;
        spec.model.m2 = pos(rng) - 3.0;
        spec.model.m3 = pos(rng) - 3.0;
        spec.model.beta = pos(rng);
        spec.model.delta = pos(rng);
        spec.model.test_mode = coin(rng) != 0;
        spec.model.attractant = ProductionLaw::prototype_attractant(pos(rng), pos(rng));
        const double g0 = pos(rng);
        spec.model.repellent =
            ProductionLaw::prototype_repellent(g0, g0 + pos(rng), pos(rng));

        spec.domain.dimension = 1 + coin(rng);
        spec.domain.lengths = {pos(rng), pos(rng)};
        spec.domain.cells = {cells(rng), cells(rng)};
        if (spec.domain.dimension == 1) {
            // Axis 1 is not rendered in 1D; keep the defaults comparable.
            spec.domain.lengths[1] = DomainSpec{}.lengths[1];
            spec.domain.cells[1] = DomainSpec{}.cells[1];
        }
        spec.model.n = spec.domain.dimension;

        spec.time.horizon = pos(rng);
        spec.time.cfl = 0.1 + 0.05 * coin(rng);
        spec.time.dt_min = 1e-12;
        spec.time.dt_max = coin(rng) ? 0.5 : std::numeric_limits<double>::infinity();
        spec.time.record_interval = spec.time.horizon / 100.0;
        spec.time.blowup_threshold = 1e5 + pos(rng);

        switch (preset_pick(rng)) {
            case 0: spec.init.preset = ConstantInit{pos(rng)}; break;
            case 1: {
                GaussianInit g;
                g.center = {pos(rng), spec.domain.dimension == 2 ? pos(rng) : 0.0};
                g.width = pos(rng);
                g.amplitude = pos(rng);
                g.floor = 0.25;
                spec.init.preset = g;
                break;
            }
            case 2: {
                PerturbedConstantInit p;
                p.c = 1.0 + pos(rng);
                p.amplitude = 0.5;
                p.seed = static_cast<std::uint64_t>(cells(rng));
                spec.init.preset = p;
                break;
            }
            default: spec.init.preset = FromFileInit{"state.txt"}; break;
        }
        spec.init.signals.v0 = pos(rng);
        spec.init.signals.w0 = pos(rng);

        spec.output.dir = "runs/out_" + std::to_string(trial);
        spec.output.snapshot_every = coin(rng) ? 0.0 : pos(rng);
        spec.output.p_list = {2.0, 1.0 + pos(rng)};

        if (coin(rng)) {
            SweepBlock sweep;
            sweep.parameters.push_back({"chi", pos(rng), pos(rng) + 1.0, 3});
            sweep.parameters.push_back({"k", 0.5, 2.5, 4});
            sweep.simulate = coin(rng) != 0;
            sweep.budget = 128;
            spec.sweep = sweep;
        }

        const std::string text = render_config(spec);
        const RunSpec reparsed = parse_config(text);
        CHECK(reparsed == spec);
    }
}
