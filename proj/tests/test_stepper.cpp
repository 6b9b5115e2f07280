#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "chemotax/stepper.hpp"

using namespace chemotax;

namespace {

Grid grid_1d(int cells, double length = M_PI) {
    DomainSpec domain;
    domain.dimension = 1;
    domain.lengths = {length, 1.0};
    domain.cells = {cells, 1};
    return Grid::build(domain);
}

Grid grid_2d(int nx, int ny, double lx, double ly) {
    DomainSpec domain;
    domain.dimension = 2;
    domain.lengths = {lx, ly};
    domain.cells = {nx, ny};
    return Grid::build(domain);
}

ModelSpec local_model() {
    ModelSpec spec;
    spec.variant = Variant::local;
    spec.tau = 0;
    spec.n = 1;
    return spec;
}

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

} // namespace

TEST_CASE("grid geometry") {
    const Grid g1 = grid_1d(100);
    CHECK(g1.hx() == doctest::Approx(M_PI / 100).epsilon(1e-15));
    CHECK(g1.measure() == doctest::Approx(M_PI).epsilon(1e-14));

    const Grid g2 = grid_2d(10, 20, 1.0, 2.0);
    CHECK(g2.cell_measure() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(g2.measure() == doctest::Approx(2.0).epsilon(1e-14));

    DomainSpec bad;
    bad.dimension = 1;
    bad.cells = {2, 1};
    CHECK_THROWS_AS(Grid::build(bad), TooFewCells);
}

TEST_CASE("init presets") {
    const Grid grid = grid_1d(64);
    const ValidatedModel model{local_model()};

    SimState state = init_state(grid, ConstantInit{1.0}, model);
    CHECK(total_mass(state.u) == doctest::Approx(grid.measure()).epsilon(1e-14));
    // tau=0: signals already equilibrated, v = f(1)/beta = 2.
    CHECK(state.v.values[3] == doctest::Approx(2.0).epsilon(1e-10));

    GaussianInit bump;
    bump.center = {M_PI / 2, 0.0};
    bump.width = 0.03;
    bump.amplitude = 2.0;
    bump.floor = 0.0;
    state = init_state(grid, bump, model);
    double min_u = 1e300, oracle_mass = 0.0;
    for (int i = 0; i < grid.nx(); ++i) {
        min_u = std::min(min_u, state.u.values[i]);
        const double d = grid.x_center(i) - M_PI / 2;
        oracle_mass += 2.0 * std::exp(-d * d / (2 * 0.03 * 0.03)) * grid.cell_measure();
    }
    CHECK(min_u == 0.0); // narrow bump underflows far from the center
    CHECK(total_mass(state.u) == doctest::Approx(oracle_mass).epsilon(1e-13));

    CHECK_THROWS_AS(init_state(grid, ConstantInit{-1.0}, model), NegativeInitialData);
    bump.width = 0.0;
    CHECK_THROWS_AS(init_state(grid, bump, model), NegativeInitialData);

    PerturbedConstantInit pert{1.0, 0.25, 42};
    state = init_state(grid, pert, model);
    for (double u : state.u.values) {
        CHECK(u >= 0.75);
        CHECK(u <= 1.25);
    }
    const SimState again = init_state(grid, pert, model);
    CHECK(again.u == state.u); // seeded, reproducible
    CHECK_THROWS_AS(init_state(grid, PerturbedConstantInit{0.5, 0.6, 1}, model),
                    NegativeInitialData);
}

TEST_CASE("fluxes vanish for constant u without taxis") {
    ModelSpec spec = local_model();
    spec.test_mode = true;
    spec.chi = spec.xi = 0.0;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(32);
    const SimState state = init_state(grid, ConstantInit{2.5}, model);
    const FaceFluxes fluxes = compute_fluxes(state, model);
    for (double g : fluxes.x) CHECK(g == 0.0);
}

TEST_CASE("advective flux out of an empty donor cell is zero") {
    ModelSpec spec = local_model();
    spec.m1 = 1.0;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(8, 8.0); // h = 1

    SimState state;
    state.u = Field(grid, 0.0);
    state.v = Field(grid, 0.0);
    state.w = Field(grid, 0.0);
    // v increasing in x: a_f = -chi*(vR-vL)/h < 0, donor is the left cell.
    for (int i = 0; i < grid.nx(); ++i) state.v.values[i] = i * 1.0;
    state.u.values[4] = 3.0; // only cell 4 occupied

    const FaceFluxes fluxes = compute_fluxes(state, model);
    // Face between cells 3(left, empty) and 4: donor left, u=0: pure diffusion.
    const double d34 = std::pow(0.5 * 3.0 + 1.0, 0.0);
    CHECK(fluxes.x[4] == doctest::Approx(d34 * 3.0)); // (uR-uL)/h = 3
    // Face between 4(left, donor, u=3) and 5: advective part active.
    CHECK(fluxes.x[5] == doctest::Approx(-3.0 + (-1.0) * 3.0));
}

TEST_CASE("face fluxes telescope to zero total") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> draw(0.0, 3.0);
    ModelSpec spec = local_model();
    spec.chi = 2.0;
    spec.xi = 1.0;
    spec.m1 = 1.5;
    spec.m2 = 0.5;
    spec.m3 = 2.0;
    const ValidatedModel model{spec};
    const Grid grid = grid_2d(12, 9, 1.0, 1.5);

    SimState state;
    state.u = Field(grid);
    state.v = Field(grid);
    state.w = Field(grid);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        state.u[c] = draw(rng);
        state.v[c] = draw(rng) - 1.0;
        state.w[c] = draw(rng) - 1.0;
    }
    const FaceFluxes fluxes = compute_fluxes(state, model);

    double total = 0.0, scale = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const std::size_t fx = i + static_cast<std::size_t>(grid.nx() + 1) * j;
            const std::size_t fy = i + static_cast<std::size_t>(grid.nx()) * j;
            const double div = (fluxes.x[fx + 1] - fluxes.x[fx]) / grid.hx() +
                               (fluxes.y[fy + grid.nx()] - fluxes.y[fy]) / grid.hy();
            total += div * grid.cell_measure();
            scale += std::abs(div) * grid.cell_measure();
        }
    }
    CHECK(std::abs(total) <= 1e-13 * (scale + 1.0));
}

TEST_CASE("stable dt formula and clamps") {
    ModelSpec spec = local_model();
    spec.test_mode = true;
    spec.chi = spec.xi = 0.0;
    spec.lambda = 0.5;
    spec.mu = 1.0;
    spec.m1 = 1.0;
    const ValidatedModel model{spec};

    const Grid grid = grid_1d(32);
    SimState state = init_state(grid, ConstantInit{0.0}, model);
    const double h = grid.hx();
    // u=0: D_max = 1, no advection, reaction bound 1/(lambda+1).
    const double expected = 0.4 * std::min(h * h / 2.0, 1.0 / (spec.lambda + 1.0));
    CHECK(stable_dt(state, model, 0.4) == doctest::Approx(expected).epsilon(1e-14));

    // Doubling h quadruples the diffusive bound.
    const Grid coarse = grid_1d(16);
    SimState coarse_state = init_state(coarse, ConstantInit{0.0}, model);
    CHECK(stable_dt(coarse_state, model, 0.4) ==
          doctest::Approx(4.0 * 0.4 * h * h / 2.0).epsilon(1e-14));

    // A huge sup u collapses the reaction bound below dt_min.
    state.u = Field(grid, 1e15);
    CHECK_THROWS_AS(stable_dt(state, model, 0.4), DtUnderflow);

    CHECK_THROWS_AS(stable_dt(coarse_state, model, 0.0), NonPositiveParameter);
    CHECK_THROWS_AS(stable_dt(coarse_state, model, 1.5), NonPositiveParameter);
}

TEST_CASE("homogeneous steady state is preserved, tau=0 and tau=1") {
    for (int tau : {0, 1}) {
        ModelSpec spec = local_model();
        spec.tau = tau;
        spec.lambda = 1.0;
        spec.mu = 1.0;
        spec.r = 2.0;
        spec.beta = 0.7;
        spec.delta = 1.3;
        spec.chi = 2.0;
        spec.xi = 1.5;
        spec.m1 = 1.2;
        spec.m2 = 0.8;
        spec.m3 = 1.9;
        const ValidatedModel model{spec};
        const Grid grid = grid_1d(48);

        const double u_star = 1.0; // (lambda/mu)^(1/(r-1))
        SignalInit signals;
        signals.v0 = spec.attractant(u_star) / spec.beta;
        signals.w0 = spec.repellent(u_star) / spec.delta;
        SimState state = init_state(grid, ConstantInit{u_star}, model, signals);

        for (int i = 0; i < 200; ++i) {
            const SimState next = step(state, model);
            CHECK(max_abs_diff(next.u, state.u) <= 1e-12);
            CHECK(max_abs_diff(next.v, state.v) <= 1e-12);
            CHECK(max_abs_diff(next.w, state.w) <= 1e-12);
            state = next;
        }
        CHECK(std::abs(state.u.values[7] - u_star) <= 1e-10);
    }
}

TEST_CASE("nonlocal constant state reduces to the logistic ODE exactly") {
    ModelSpec spec = local_model();
    spec.variant = Variant::nonlocal;
    spec.lambda = 0.8;
    spec.mu = 0.5;
    spec.r = 1.7;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(32);

    SimState state = init_state(grid, ConstantInit{2.0}, model);
    CHECK(sup_norm(state.v) == 0.0);
    CHECK(sup_norm(state.w) == 0.0);

    const double dt = stable_dt(state, model, 0.4);
    const SimState next = step(state, model);
    CHECK(next.dt == dt);
    const double expected =
        2.0 + dt * (0.0 + (spec.lambda * 2.0 - spec.mu * std::pow(2.0, spec.r)));
    for (double u : next.u.values) CHECK(u == expected);
}

TEST_CASE("mass is conserved in test mode") {
    ModelSpec spec = local_model();
    spec.test_mode = true;
    spec.lambda = spec.mu = 0.0;
    spec.chi = 1.5;
    spec.xi = 0.7;
    spec.m1 = 1.3;
    spec.m2 = 1.1;
    spec.m3 = 0.6;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(40);

    GaussianInit bump;
    bump.center = {M_PI / 2, 0.0};
    bump.width = 0.4;
    bump.amplitude = 1.5;
    bump.floor = 0.2;
    SimState state = init_state(grid, bump, model);
    const double mass0 = total_mass(state.u);
    double previous = mass0;
    for (int i = 0; i < 400; ++i) {
        state = step(state, model);
        const double mass = total_mass(state.u);
        CHECK(std::abs(mass - previous) <= 1e-13 * std::max(1.0, previous));
        previous = mass;
    }
    CHECK(std::abs(previous - mass0) <= 1e-10 * mass0);
}

TEST_CASE("positivity across random models and data") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> m_draw(-0.5, 2.5);
    std::uniform_real_distribution<double> coeff(0.0, 4.0);
    std::uniform_real_distribution<double> cfl_draw(0.05, 1.0);
    std::uniform_real_distribution<double> r_draw(1.2, 3.0);
    std::uniform_int_distribution<int> tau_draw(0, 1);
    std::uniform_int_distribution<int> variant_draw(0, 1);

    for (int trial = 0; trial < 25; ++trial) {
        ModelSpec spec = local_model();
        spec.test_mode = true; // admit zero coefficients in the draw
        spec.variant = variant_draw(rng) == 0 ? Variant::local : Variant::nonlocal;
        spec.tau = spec.variant == Variant::nonlocal ? 0 : tau_draw(rng);
        spec.chi = coeff(rng);
        spec.xi = coeff(rng);
        spec.lambda = coeff(rng);
        spec.mu = coeff(rng);
        spec.r = r_draw(rng);
        spec.m1 = m_draw(rng);
        spec.m2 = m_draw(rng);
        spec.m3 = m_draw(rng);
        const ValidatedModel model{spec};
        const Grid grid = grid_1d(24);

        GaussianInit bump;
        bump.center = {M_PI * 0.3, 0.0};
        bump.width = 0.25;
        bump.amplitude = 3.0;
        bump.floor = 0.0;
        SimState state = init_state(grid, bump, model, SignalInit{0.5, 0.5});

        StepOptions options;
        options.cfl = cfl_draw(rng);
        for (int i = 0; i < 60; ++i) {
            state = step(state, model, options);
            double min_u = 1e300;
            for (double u : state.u.values) min_u = std::min(min_u, u);
            CHECK(min_u >= 0.0);
        }
    }
}

TEST_CASE("run records, completes, and conserves in test mode") {
    ModelSpec spec = local_model();
    spec.test_mode = true;
    spec.lambda = spec.mu = 0.0;
    spec.chi = spec.xi = 0.0;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(32);

    GaussianInit bump;
    bump.center = {1.0, 0.0};
    bump.width = 0.3;
    bump.amplitude = 1.0;
    bump.floor = 0.1;

    RunOptions options;
    options.horizon = 0.5;
    options.record_interval = 0.05;
    int hook_calls = 0;
    RunHooks hooks;
    hooks.on_sample = [&](const SimState&) { ++hook_calls; };

    const RunResult result = run(model, grid, bump, options, {}, hooks);
    CHECK(result.verdict == RunVerdict::completed);
    CHECK(result.final_state.t == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(result.series.samples.size() >= 10);
    CHECK(hook_calls == static_cast<int>(result.series.samples.size()));

    const double mass0 = result.series.samples.front().mass;
    for (const auto& s : result.series.samples) {
        CHECK(std::abs(s.mass - mass0) <= 1e-8 * mass0);
    }
    for (std::size_t i = 1; i < result.series.samples.size(); ++i) {
        CHECK(result.series.samples[i].t > result.series.samples[i - 1].t);
    }
    CHECK(result.series.verdict == "Completed");
}

TEST_CASE("aggressive aggregation trips the blow-up escape") {
    // Aggregation-favoring corner not covered by any criterion at n=1:
    // m2+k = 2 = m1+2, m3+l = 1.5, r = 1.1, with strong attraction and a
    // growth-dominated logistic term.
    ModelSpec spec = local_model();
    spec.variant = Variant::nonlocal;
    spec.chi = 10.0;
    spec.xi = 0.1;
    spec.lambda = 5.0;
    spec.mu = 0.05;
    spec.r = 1.1;
    spec.m1 = 0.0;
    spec.m2 = 1.0;
    spec.m3 = 1.0;
    spec.repellent = ProductionLaw::prototype_repellent(0.5, 0.5, 0.5);
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(48);

    GaussianInit spike;
    spike.center = {M_PI / 2, 0.0};
    spike.width = 0.15;
    spike.amplitude = 25.0;
    spike.floor = 0.0;

    RunOptions options;
    options.horizon = 5.0;
    options.blowup_threshold = 300.0; // desk-scale escape hatch
    options.record_interval = 0.005;

    const RunResult result = run(model, grid, spike, options);
    CHECK(result.verdict == RunVerdict::blowup_suspected);
    CHECK_FALSE(result.reason.empty());
    CHECK(result.series.verdict == result.verdict_string());
    CHECK(detect_blowup(result.series, {300.0, 1e-12, 10.0, 1e-3}) ==
          SeriesVerdict::blowup_suspected);
}

TEST_CASE("attraction sharpens a bump that diffusion alone would flatten") {
    ModelSpec taxis = local_model();
    taxis.test_mode = true;
    taxis.lambda = taxis.mu = 0.0;
    taxis.chi = 8.0;
    taxis.xi = 0.0;
    ModelSpec diffusion_only = taxis;
    diffusion_only.chi = 0.0;

    const Grid grid = grid_1d(48);
    GaussianInit bump;
    bump.center = {M_PI / 2, 0.0};
    bump.width = 0.4;
    bump.amplitude = 2.0;
    bump.floor = 0.1;

    auto sup_after = [&](const ModelSpec& spec) {
        const ValidatedModel model{spec};
        SimState state = init_state(grid, bump, model);
        double t_end = 0.3;
        while (state.t < t_end) state = step(state, model, {}, t_end - state.t);
        return sup_norm(state.u);
    };

    const double sup_taxis = sup_after(taxis);
    const double sup_diffusion = sup_after(diffusion_only);
    CHECK(sup_diffusion < 2.0);            // diffusion flattens
    CHECK(sup_taxis > sup_diffusion * 1.2); // attraction fights back
}

TEST_CASE("aborted runs count as suspect in the consistency report") {
    // Flat samples but a run verdict carrying an abort: the report must not
    // read it as agreement with a boundedness claim.
    ModelSpec spec = local_model();
    spec.repellent = ProductionLaw::prototype_repellent(1.0, 1.0, 2.5);
    const ValidatedModel model{spec};
    const auto regime = theory::classify(model);
    REQUIRE(regime.bounded());

    TimeSeries series;
    Sample s;
    s.t = 0.1;
    s.mass = 1.0;
    s.sup_u = 1.0;
    s.dt = 1e-3;
    series.append(s);
    series.verdict = "BlowupSuspected(dt underflow)";
    const auto report = boundedness_report(series, regime, model, M_PI);
    CHECK(report.flag == Consistency::tension);
    CHECK(report.sim_verdict == SeriesVerdict::blowup_suspected);
}

TEST_CASE("nonlocal signals keep zero mean through stepping") {
    ModelSpec spec = local_model();
    spec.variant = Variant::nonlocal;
    spec.chi = 2.0;
    spec.xi = 1.0;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(32);

    GaussianInit bump;
    bump.center = {1.0, 0.0};
    bump.width = 0.3;
    bump.amplitude = 2.0;
    bump.floor = 0.1;
    SimState state = init_state(grid, bump, model);
    for (int i = 0; i < 50; ++i) {
        state = step(state, model);
        CHECK(std::abs(mean(state.v)) <= 1e-10 * (1.0 + sup_norm(state.v)));
        CHECK(std::abs(mean(state.w)) <= 1e-10 * (1.0 + sup_norm(state.w)));
    }
    // The deviations really do change sign.
    double vmin = 1e300, vmax = -1e300;
    for (double v : state.v.values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    CHECK(vmin < 0.0);
    CHECK(vmax > 0.0);
}

TEST_CASE("from_file preset restores a saved state") {
    ModelSpec spec = local_model();
    spec.tau = 1;
    const ValidatedModel model{spec};
    const Grid grid = grid_1d(16);

    SimState saved = init_state(grid, PerturbedConstantInit{1.0, 0.3, 5}, model,
                                SignalInit{0.7, 0.2});
    saved = step(saved, model);
    saved = step(saved, model);

    const auto path = std::filesystem::temp_directory_path() / "chemotax_state.txt";
    {
        std::ofstream out(path);
        write_snapshot(out, saved);
    }
    const SimState loaded = init_state(grid, FromFileInit{path.string()}, model);
    CHECK(loaded.u == saved.u);
    // tau=1 keeps the stored signals instead of re-deriving them.
    CHECK(loaded.v == saved.v);
    CHECK(loaded.w == saved.w);

    // tau=0 re-equilibrates the signals from the loaded u.
    ModelSpec elliptic = local_model();
    const ValidatedModel model0{elliptic};
    const SimState loaded0 = init_state(grid, FromFileInit{path.string()}, model0);
    CHECK(loaded0.u == saved.u);
    Field residual(grid);
    apply_shifted_laplacian(grid, elliptic.beta, loaded0.v, residual);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double fu = elliptic.attractant(loaded0.u[c]);
        CHECK(residual[c] == doctest::Approx(fu).epsilon(1e-7));
    }
    std::filesystem::remove(path);
}

TEST_CASE("snapshot round trip") {
    ModelSpec spec = local_model();
    const ValidatedModel model{spec};

    for (int dim : {1, 2}) {
        const Grid grid = dim == 1 ? grid_1d(8) : grid_2d(6, 5, 1.0, 1.0);
        SimState state;
        state.t = 1.25;
        state.u = Field(grid);
        state.v = Field(grid);
        state.w = Field(grid);
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> draw(0.0, 2.0);
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            state.u[c] = draw(rng);
            state.v[c] = draw(rng) - 0.5;
            state.w[c] = draw(rng) - 0.5;
        }
        std::stringstream buffer;
        write_snapshot(buffer, state);
        const std::string text = buffer.str();
        CHECK(text.rfind("# t=1.25 dim=" + std::to_string(dim), 0) == 0);

        std::istringstream in(text);
        const SimState loaded = read_snapshot(in, grid);
        CHECK(loaded.t == state.t);
        CHECK(loaded.u == state.u);
        CHECK(loaded.v == state.v);
        CHECK(loaded.w == state.w);
    }

    const Grid grid = grid_1d(8);
    std::istringstream garbage("not a snapshot\n");
    CHECK_THROWS_AS(read_snapshot(garbage, grid), FileFormatError);
    std::istringstream wrong("# t=0 dim=1 nx=9\n");
    CHECK_THROWS_AS(read_snapshot(wrong, grid), FileFormatError);
}
