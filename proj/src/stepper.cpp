#include "chemotax/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace chemotax {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Field production_field(const Grid& grid, const Field& u, const ProductionLaw& law) {
    Field out(grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.values[i] = law(u.values[i]);
    return out;
}

// Signal update shared by init and step: elliptic solves for tau=0 and the
// nonlocal variant, one implicit Euler step for tau=1.
void update_signals(const Grid& grid, const ModelSpec& spec, const Field& u, double dt,
                    const Field* v_prev, const Field* w_prev, Field& v, Field& w,
                    const LinearSolveOptions& linsolve) {
    const Field fu = production_field(grid, u, spec.attractant);
    const Field gu = production_field(grid, u, spec.repellent);
    if (spec.variant == Variant::nonlocal) {
        v = solve_elliptic_nonlocal(grid, fu, linsolve, v_prev);
        w = solve_elliptic_nonlocal(grid, gu, linsolve, w_prev);
    } else if (spec.tau == 0) {
        v = solve_elliptic_local(grid, spec.beta, fu, linsolve, v_prev);
        w = solve_elliptic_local(grid, spec.delta, gu, linsolve, w_prev);
    } else {
        v = parabolic_signal_step(grid, *v_prev, dt, spec.beta, fu, linsolve);
        w = parabolic_signal_step(grid, *w_prev, dt, spec.delta, gu, linsolve);
    }
}

// Face velocity a and diffusivity D at the face between cells L and R.
struct FaceCoeffs {
    double diffusivity;
    double velocity;
};

inline FaceCoeffs face_coeffs(const ModelSpec& spec, double uL, double uR,
                              double vL, double vR, double wL, double wR, double h) {
    const double ubar1 = 0.5 * (uL + uR) + 1.0;
    FaceCoeffs c;
    c.diffusivity = std::pow(ubar1, spec.m1 - 1.0);
    c.velocity = -spec.chi * std::pow(ubar1, spec.m2 - 1.0) * (vR - vL) / h +
                 spec.xi * std::pow(ubar1, spec.m3 - 1.0) * (wR - wL) / h;
    return c;
}

inline double face_flux(const ModelSpec& spec, double uL, double uR,
                        double vL, double vR, double wL, double wR, double h) {
    const FaceCoeffs c = face_coeffs(spec, uL, uR, vL, vR, wL, wR, h);
    // a > 0 transports mass toward -x: the donor cell is the right one.
    const double donor = c.velocity > 0.0 ? uR : uL;
    return c.diffusivity * (uR - uL) / h + c.velocity * donor;
}

} // namespace

FaceFluxes compute_fluxes(const SimState& state, const ValidatedModel& model) {
    const ModelSpec& spec = model.spec();
    const Grid& grid = state.u.grid;
    if (!all_finite(state.u) || !all_finite(state.v) || !all_finite(state.w)) {
        throw NonFiniteField("flux evaluation on non-finite fields");
    }
    const int nx = grid.nx();
    const int ny = grid.ny();
    FaceFluxes fluxes;
    fluxes.x.assign(static_cast<std::size_t>(nx + 1) * ny, 0.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const std::size_t l = grid.index(i - 1, j);
            const std::size_t r = grid.index(i, j);
            fluxes.x[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * j] =
                face_flux(spec, state.u[l], state.u[r], state.v[l], state.v[r],
                          state.w[l], state.w[r], grid.hx());
        }
    }
    if (grid.dimension() == 2) {
        fluxes.y.assign(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t l = grid.index(i, j - 1);
                const std::size_t r = grid.index(i, j);
                fluxes.y[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j] =
                    face_flux(spec, state.u[l], state.u[r], state.v[l], state.v[r],
                              state.w[l], state.w[r], grid.hy());
            }
        }
    }
    return fluxes;
}

double stable_dt(const SimState& state, const ValidatedModel& model, double cfl,
                 double dt_min, double dt_max) {
    const ModelSpec& spec = model.spec();
    const Grid& grid = state.u.grid;
    if (!(cfl > 0.0) || cfl > 1.0) throw NonPositiveParameter("cfl must lie in (0,1]");

    double sup_u = 0.0;
    double d_max = 0.0;
    for (double u : state.u.values) {
        sup_u = std::max(sup_u, u);
        d_max = std::max(d_max, std::pow(u + 1.0, spec.m1 - 1.0));
    }

    double a_max = 0.0;
    const int nx = grid.nx();
    const int ny = grid.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const std::size_t l = grid.index(i - 1, j);
            const std::size_t r = grid.index(i, j);
            const FaceCoeffs c =
                face_coeffs(spec, state.u[l], state.u[r], state.v[l], state.v[r],
                            state.w[l], state.w[r], grid.hx());
            a_max = std::max(a_max, std::abs(c.velocity));
        }
    }
    if (grid.dimension() == 2) {
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t l = grid.index(i, j - 1);
                const std::size_t r = grid.index(i, j);
                const FaceCoeffs c =
                    face_coeffs(spec, state.u[l], state.u[r], state.v[l], state.v[r],
                                state.w[l], state.w[r], grid.hy());
                a_max = std::max(a_max, std::abs(c.velocity));
            }
        }
    }

    const double h = grid.min_spacing();
    const double dim = static_cast<double>(grid.dimension());
    const double diffusive = h * h / (2.0 * dim * std::max(d_max, 1e-300));
    const double advective =
        a_max > 0.0 ? h / (2.0 * dim * a_max) : std::numeric_limits<double>::infinity();
    const double reaction =
        1.0 / (spec.lambda + spec.mu * spec.r * std::pow(sup_u, spec.r - 1.0) + 1.0);

    double dt = cfl * std::min({diffusive, advective, reaction});
    if (!(dt >= dt_min)) {
        throw DtUnderflow("stable dt " + std::to_string(dt) + " fell below dt_min " +
                          std::to_string(dt_min));
    }
    return std::min(dt, dt_max);
}

SimState step(const SimState& state, const ValidatedModel& model,
              const StepOptions& options, double dt_cap) {
    const ModelSpec& spec = model.spec();
    const Grid& grid = state.u.grid;
    const double dt =
        std::min(stable_dt(state, model, options.cfl, options.dt_min, options.dt_max), dt_cap);

    const FaceFluxes fluxes = compute_fluxes(state, model);
    const int nx = grid.nx();
    const int ny = grid.ny();

    SimState next;
    next.t = state.t + dt;
    next.dt = dt;
    next.step_count = state.step_count + 1;
    next.u = Field(grid);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = grid.index(i, j);
            const std::size_t fx = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * j;
            double div = (fluxes.x[fx + 1] - fluxes.x[fx]) / grid.hx();
            if (grid.dimension() == 2) {
                const std::size_t fy = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
                div += (fluxes.y[fy + nx] - fluxes.y[fy]) / grid.hy();
            }
            const double up = std::max(state.u[c], 0.0);
            const double reaction = spec.lambda * up - spec.mu * std::pow(up, spec.r);
            double u_new = state.u[c] + dt * (div + reaction);
            if (u_new < 0.0) u_new = 0.0; // upwind keeps this a rounding-level fix
            next.u[c] = u_new;
        }
    }
    if (!all_finite(next.u)) throw NonFiniteField("u became non-finite during the step");

    update_signals(grid, spec, next.u, dt, &state.v, &state.w, next.v, next.w,
                   options.linsolve);
    if (!all_finite(next.v) || !all_finite(next.w)) {
        throw NonFiniteField("signals became non-finite during the step");
    }
    return next;
}

SimState init_state(const Grid& grid, const InitPreset& preset, const ValidatedModel& model,
                    const SignalInit& signals, const LinearSolveOptions& linsolve) {
    const ModelSpec& spec = model.spec();
    SimState state;
    state.u = Field(grid);

    bool have_signals = false;
    if (const auto* c = std::get_if<ConstantInit>(&preset)) {
        if (!(c->c >= 0.0)) throw NegativeInitialData("constant preset needs c >= 0");
        std::fill(state.u.values.begin(), state.u.values.end(), c->c);
    } else if (const auto* gauss = std::get_if<GaussianInit>(&preset)) {
        if (!(gauss->width > 0.0)) throw NegativeInitialData("gaussian width must be positive");
        if (!(gauss->amplitude >= 0.0) || !(gauss->floor >= 0.0)) {
            throw NegativeInitialData("gaussian amplitude and floor must be nonnegative");
        }
        const double iw2 = 1.0 / (2.0 * gauss->width * gauss->width);
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                double d2 = (grid.x_center(i) - gauss->center[0]) *
                            (grid.x_center(i) - gauss->center[0]);
                if (grid.dimension() == 2) {
                    d2 += (grid.y_center(j) - gauss->center[1]) *
                          (grid.y_center(j) - gauss->center[1]);
                }
                state.u.at(i, j) = gauss->floor + gauss->amplitude * std::exp(-d2 * iw2);
            }
        }
    } else if (const auto* pert = std::get_if<PerturbedConstantInit>(&preset)) {
        if (!(pert->c >= 0.0)) throw NegativeInitialData("perturbed preset needs c >= 0");
        if (!(pert->amplitude >= 0.0) || pert->amplitude > pert->c) {
            throw NegativeInitialData("perturbation amplitude must lie in [0, c]");
        }
        std::mt19937_64 rng(pert->seed);
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        for (double& u : state.u.values) u = pert->c + pert->amplitude * noise(rng);
    } else if (const auto* file = std::get_if<FromFileInit>(&preset)) {
        std::ifstream in(file->path);
        if (!in) throw FileFormatError("cannot open initial data file " + file->path);
        SimState loaded = read_snapshot(in, grid);
        state.u = std::move(loaded.u);
        state.v = std::move(loaded.v);
        state.w = std::move(loaded.w);
        have_signals = true;
    }

    for (double u : state.u.values) {
        if (!(u >= 0.0)) throw NegativeInitialData("initial u must be nonnegative");
    }
    if (!all_finite(state.u)) throw NonFiniteField("initial u must be finite");

    if (spec.tau == 0 || spec.variant == Variant::nonlocal) {
        // Signals equilibrate instantly; overrides whatever a file provided.
        update_signals(grid, spec, state.u, 0.0, nullptr, nullptr, state.v, state.w, linsolve);
    } else if (!have_signals) {
        if (!(signals.v0 >= 0.0) || !(signals.w0 >= 0.0)) {
            throw NegativeInitialData("tau=1 initial signals must be nonnegative");
        }
        state.v = Field(grid, signals.v0);
        state.w = Field(grid, signals.w0);
    }
    return state;
}

std::string RunResult::verdict_string() const {
    if (verdict == RunVerdict::completed) return "Completed";
    return "BlowupSuspected(" + reason + ")";
}

RunResult run(const ValidatedModel& model, const Grid& grid, const InitPreset& preset,
              const RunOptions& options, const SignalInit& signals, const RunHooks& hooks) {
    if (!(options.horizon > 0.0)) throw NonPositiveParameter("horizon must be positive");
    const double record_interval =
        options.record_interval > 0.0 ? options.record_interval : options.horizon / 500.0;

    RunResult result;
    result.series.p_list = options.p_list;
    result.series.phi_exponent = options.phi_exponent;

    SimState state = init_state(grid, preset, model, signals, options.step.linsolve);

    auto record = [&](const SimState& s) {
        Sample sample;
        sample.t = s.t;
        sample.dt = s.dt;
        sample.mass = total_mass(s.u);
        sample.sup_u = sup_norm(s.u);
        sample.sup_v = sup_norm(s.v);
        sample.sup_w = sup_norm(s.w);
        sample.phi_p = phi_functional(s.u, options.phi_exponent);
        sample.lp.reserve(options.p_list.size());
        for (double p : options.p_list) sample.lp.push_back(lp_norm(s.u, p));
        result.series.append(std::move(sample));
        if (hooks.on_sample) hooks.on_sample(s);
    };

    record(state);
    double next_record = record_interval;
    bool recorded_last = true;

    while (state.t < options.horizon) {
        try {
            state = step(state, model, options.step, options.horizon - state.t);
        } catch (const DtUnderflow& e) {
            result.verdict = RunVerdict::blowup_suspected;
            result.reason = std::string("dt underflow: ") + e.what();
            break;
        }
        recorded_last = false;
        const double slack = 1e-12 * options.horizon;
        if (state.t >= next_record - slack) {
            record(state);
            recorded_last = true;
            while (next_record <= state.t + slack) next_record += record_interval;
        }
        if (sup_norm(state.u) > options.blowup_threshold) {
            result.verdict = RunVerdict::blowup_suspected;
            result.reason = "sup-norm threshold crossed";
            break;
        }
    }
    if (!recorded_last) record(state);
    result.final_state = std::move(state);
    result.series.verdict = result.verdict_string();
    return result;
}

void write_snapshot(std::ostream& out, const SimState& state) {
    const Grid& grid = state.u.grid;
    out << "# t=" << g17(state.t) << " dim=" << grid.dimension() << " nx=" << grid.nx();
    if (grid.dimension() == 2) out << " ny=" << grid.ny();
    out << '\n';
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const std::size_t c = grid.index(i, j);
            out << g17(grid.x_center(i));
            if (grid.dimension() == 2) out << ',' << g17(grid.y_center(j));
            out << ',' << g17(state.u[c]) << ',' << g17(state.v[c]) << ','
                << g17(state.w[c]) << '\n';
        }
    }
}

SimState read_snapshot(std::istream& in, const Grid& grid) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# t=", 0) != 0) {
        throw FileFormatError("snapshot must start with a '# t=...' header");
    }
    SimState state;
    state.u = Field(grid);
    state.v = Field(grid);
    state.w = Field(grid);
    {
        std::istringstream hs(header.substr(2));
        std::string token;
        int nx = -1, ny = -1, dim = -1;
        while (hs >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            try {
                if (key == "t") state.t = std::stod(value);
                else if (key == "dim") dim = std::stoi(value);
                else if (key == "nx") nx = std::stoi(value);
                else if (key == "ny") ny = std::stoi(value);
            } catch (const std::exception&) {
                throw FileFormatError("malformed snapshot header token: " + token);
            }
        }
        if (dim != grid.dimension() || nx != grid.nx() ||
            (grid.dimension() == 2 && ny != grid.ny())) {
            throw FileFormatError("snapshot grid does not match the configured grid");
        }
    }
    std::string line;
    std::size_t cell = 0;
    const std::size_t expected = grid.cell_count();
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (cell >= expected) throw FileFormatError("snapshot has more rows than cells");
        std::istringstream ls(line);
        std::vector<double> cols;
        std::string item;
        while (std::getline(ls, item, ',')) {
            try {
                cols.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw FileFormatError("malformed snapshot value: " + item);
            }
        }
        const std::size_t want = grid.dimension() == 2 ? 5u : 4u;
        if (cols.size() != want) {
            throw FileFormatError("snapshot row has " + std::to_string(cols.size()) +
                                  " columns, expected " + std::to_string(want));
        }
        state.u[cell] = cols[want - 3];
        state.v[cell] = cols[want - 2];
        state.w[cell] = cols[want - 1];
        ++cell;
    }
    if (cell != expected) {
        throw FileFormatError("snapshot has " + std::to_string(cell) + " rows, expected " +
                              std::to_string(expected));
    }
    return state;
}

} // namespace chemotax
