#include "chemotax/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "chemotax/diagnostics.hpp"
#include "chemotax/stepper.hpp"
#include "chemotax/theory.hpp"

namespace chemotax {
namespace cli {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* b2s(bool b) { return b ? "true" : "false"; }

ModelSpec model_from_classify_params(const ClassifyParams& params) {
    ModelSpec spec;
    if (params.variant == "local") {
        spec.variant = Variant::local;
    } else if (params.variant == "nonlocal") {
        spec.variant = Variant::nonlocal;
    } else {
        throw InvalidHypothesisParameter("variant must be 'local' or 'nonlocal'");
    }
    spec.tau = params.tau;
    spec.m1 = params.m1;
    spec.m2 = params.m2;
    spec.m3 = params.m3;
    spec.r = params.r;
    spec.n = params.n;
    spec.attractant = ProductionLaw::prototype_attractant(1.0, params.k);
    spec.repellent = ProductionLaw::prototype_repellent(1.0, 1.0, params.l);
    return spec;
}

std::string classify_row(const theory::RegimeReport& report) {
    const auto& a = report.assumptions;
    std::ostringstream row;
    row << b2s(a.a1) << ',' << b2s(a.a2) << ',' << b2s(a.a3) << ',' << b2s(a.a4) << ','
        << b2s(a.a5) << ','
        << (report.verdict == theory::Verdict::bounded ? "Bounded" : "NotCovered") << ','
        << report.witness_string();
    return row.str();
}

unsigned parse_relation_list(const std::string& text) {
    if (text.empty()) return theory::all_relations;
    unsigned mask = 0;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        bool matched = false;
        for (unsigned bit = 1; bit <= theory::rel_theta3; bit <<= 1) {
            if (item == theory::relation_name(static_cast<theory::Relation>(bit))) {
                mask |= bit;
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw InvalidHypothesisParameter("unknown relation name: " + item);
        }
    }
    return mask;
}

void write_regime_sidecar(std::ostream& out, const theory::RegimeReport& report,
                          const BoundednessReport& bounds) {
    out << "a1,a2,a3,a4,a5,verdict,witness\n";
    out << classify_row(report) << '\n';
    out << "# criterion=" << report.criterion << '\n';
    out << "# notes=" << report.notes << '\n';
    out << "# sim_verdict=" << to_string(bounds.sim_verdict) << '\n';
    out << "# consistency=" << to_string(bounds.flag) << '\n';
    out << "# mass_bound=" << g17(bounds.mass_bound) << '\n';
    out << "# mass_margin=" << g17(bounds.mass_margin) << '\n';
    if (!bounds.advice.empty()) out << "# advice=" << bounds.advice << '\n';
}

RunOptions run_options_from(const RunSpec& spec) {
    RunOptions options;
    options.horizon = spec.time.horizon;
    options.step.cfl = spec.time.cfl;
    options.step.dt_min = spec.time.dt_min;
    options.step.dt_max = spec.time.dt_max;
    options.record_interval = spec.time.record_interval;
    options.blowup_threshold = spec.time.blowup_threshold;
    options.p_list = spec.output.p_list;
    options.phi_exponent = 2.0;
    for (double p : spec.output.p_list) {
        if (p > 1.0) {
            options.phi_exponent = p;
            break;
        }
    }
    return options;
}

struct SimColumns {
    double sup_u = 0.0;
    double mass_margin = 0.0;
    std::string run_verdict;
};

// One full simulation; writes timeseries.csv (and snapshots when asked).
std::pair<RunResult, SimColumns> simulate(const RunSpec& spec, const ValidatedModel& model,
                                          const fs::path& outdir, double snapshot_every) {
    const Grid grid = Grid::build(spec.domain);
    const RunOptions options = run_options_from(spec);

    fs::create_directories(outdir);
    long snap_index = 0;
    double next_snap = snapshot_every;
    RunHooks hooks;
    if (snapshot_every > 0.0) {
        hooks.on_sample = [&](const SimState& state) {
            if (state.t + 1e-12 * options.horizon < next_snap) return;
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%06ld.txt", snap_index++);
            std::ofstream snap(outdir / name);
            write_snapshot(snap, state);
            while (next_snap <= state.t) next_snap += snapshot_every;
        };
    }

    RunResult result = run(model, grid, spec.init.preset, options, spec.init.signals, hooks);

    {
        std::ofstream series(outdir / "timeseries.csv");
        write_timeseries_csv(series, result.series);
    }
    {
        std::ofstream snap(outdir / "snapshot_final.txt");
        write_snapshot(snap, result.final_state);
    }

    SimColumns columns;
    columns.sup_u = sup_norm(result.final_state.u);
    columns.run_verdict = result.verdict_string();
    columns.mass_margin = std::numeric_limits<double>::quiet_NaN();
    const ModelSpec& m = model.spec();
    if (m.lambda > 0.0 && m.mu > 0.0 && !result.series.samples.empty() &&
        result.series.samples.front().mass > 0.0) {
        const double bound = theory::mass_bound(m.lambda, m.mu, m.r, grid.measure(),
                                                result.series.samples.front().mass);
        double max_mass = 0.0;
        for (const auto& s : result.series.samples) max_mass = std::max(max_mass, s.mass);
        columns.mass_margin = max_mass / bound;
    }
    return {std::move(result), std::move(columns)};
}

void apply_override(ModelSpec& model, const std::string& name, double value) {
    if (name == "chi") model.chi = value;
    else if (name == "xi") model.xi = value;
    else if (name == "lambda") model.lambda = value;
    else if (name == "mu") model.mu = value;
    else if (name == "r") model.r = value;
    else if (name == "m1") model.m1 = value;
    else if (name == "m2") model.m2 = value;
    else if (name == "m3") model.m3 = value;
    else if (name == "beta") model.beta = value;
    else if (name == "delta") model.delta = value;
    else if (name == "alpha") {
        model.attractant = ProductionLaw::prototype_attractant(value, model.attractant.k());
    } else if (name == "k") {
        model.attractant = ProductionLaw::prototype_attractant(model.attractant.alpha(), value);
    } else if (name == "gamma0") {
        model.repellent = ProductionLaw::prototype_repellent(value, model.repellent.gamma1(),
                                                             model.repellent.l());
    } else if (name == "gamma1") {
        model.repellent = ProductionLaw::prototype_repellent(model.repellent.gamma0(), value,
                                                             model.repellent.l());
    } else if (name == "l") {
        model.repellent = ProductionLaw::prototype_repellent(model.repellent.gamma0(),
                                                             model.repellent.gamma1(), value);
    } else {
        throw ConfigError("unknown sweep parameter '" + name + "'");
    }
}

std::string sanitize_csv(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n') c = ';';
    }
    return s;
}

} // namespace

int cmd_classify(const ClassifyParams& params, std::ostream& out, std::ostream& err) {
    try {
        const ValidatedModel model(model_from_classify_params(params));
        const theory::RegimeReport report = theory::classify(model);
        out << classify_row(report) << '\n';
        return report.bounded() ? exit_ok : exit_not_covered;
    } catch (const Error& e) {
        err << "classify: " << e.what() << '\n';
        return exit_error;
    }
}

int cmd_exponents(const ExponentsParams& params, std::ostream& out, std::ostream& err) {
    try {
        const double q = params.q > 0.0 ? params.q : theory::default_q(params.l, params.m3);
        if (params.find_pbar) {
            const unsigned required = parse_relation_list(params.require);
            const theory::PbarResult result =
                theory::find_pbar(q, params.n, params.m1, params.m2, params.m3, params.k,
                                  params.l, required);
            out << g17(result.pbar) << '\n';
            return exit_ok;
        }
        const theory::ExponentSet set = theory::gn_exponents(
            params.p, q, params.n, params.m1, params.m2, params.m3, params.k, params.l);
        out << "# p,q,theta,sigma,theta1,sigma1,theta2,theta3,theta4,sigma2,"
               "sigma_theta_half,sigma1_theta1_half,sigma1_theta2_half,sigma2_theta4_half,"
               "ok_theta,ok_sigma_theta,ok_theta1,ok_sigma1_theta1,ok_theta2,"
               "ok_sigma1_theta2,ok_theta4,ok_sigma2_theta4,ok_theta3\n";
        out << g17(set.p) << ',' << g17(set.q) << ',' << g17(set.theta) << ','
            << g17(set.sigma) << ',' << g17(set.theta1) << ',' << g17(set.sigma1) << ','
            << g17(set.theta2) << ',' << g17(set.theta3) << ',' << g17(set.theta4) << ','
            << g17(set.sigma2) << ',' << g17(0.5 * set.sigma * set.theta) << ','
            << g17(0.5 * set.sigma1 * set.theta1) << ','
            << g17(set.has_theta2 ? 0.5 * set.sigma1 * set.theta2
                                  : std::numeric_limits<double>::quiet_NaN())
            << ',' << g17(0.5 * set.sigma2 * set.theta4) << ','
            << b2s(set.holds(theory::rel_theta)) << ','
            << b2s(set.holds(theory::rel_sigma_theta)) << ','
            << b2s(set.holds(theory::rel_theta1)) << ','
            << b2s(set.holds(theory::rel_sigma1_theta1)) << ','
            << b2s(set.holds(theory::rel_theta2)) << ','
            << b2s(set.holds(theory::rel_sigma1_theta2)) << ','
            << b2s(set.holds(theory::rel_theta4)) << ','
            << b2s(set.holds(theory::rel_sigma2_theta4)) << ','
            << b2s(set.holds(theory::rel_theta3)) << '\n';
        return exit_ok;
    } catch (const Error& e) {
        err << "exponents: " << e.what() << '\n';
        return exit_error;
    }
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream file(config_path);
        if (!file) {
            err << "run: cannot open config " << config_path << '\n';
            return exit_error;
        }
        std::stringstream buffer;
        buffer << file.rdbuf();
        const RunSpec spec = parse_config(buffer.str());
        const ValidatedModel model(spec.model);

        const fs::path outdir(spec.output.dir);
        auto [result, columns] = simulate(spec, model, outdir, spec.output.snapshot_every);

        // Regime sidecar; test-mode specs are not classifiable.
        {
            std::ofstream sidecar(outdir / "regime_report.csv");
            try {
                const theory::RegimeReport regime = theory::classify(model);
                const Grid grid = Grid::build(spec.domain);
                BlowupThresholds thresholds;
                thresholds.sup_threshold = spec.time.blowup_threshold;
                thresholds.dt_min = spec.time.dt_min;
                const BoundednessReport bounds = boundedness_report(
                    result.series, regime, model, grid.measure(), thresholds);
                write_regime_sidecar(sidecar, regime, bounds);
            } catch (const InvalidHypothesisParameter& e) {
                sidecar << "# not classified: " << e.what() << '\n';
            }
        }

        out << "verdict=" << result.verdict_string() << " samples="
            << result.series.samples.size() << " output=" << outdir.string() << '\n';
        return result.verdict == RunVerdict::completed ? exit_ok : exit_blowup;
    } catch (const Error& e) {
        err << "run: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "run: " << e.what() << '\n';
        return exit_error;
    }
}

int resolve_jobs(int jobs_flag) {
    if (const char* env = std::getenv("CHEMO_JOBS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    if (jobs_flag > 0) return jobs_flag;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int cmd_sweep(const std::string& config_path, int jobs, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream file(config_path);
        if (!file) {
            err << "sweep: cannot open config " << config_path << '\n';
            return exit_error;
        }
        std::stringstream buffer;
        buffer << file.rdbuf();
        const RunSpec base = parse_config(buffer.str());
        if (!base.sweep) {
            err << "sweep: config has no [sweep] section\n";
            return exit_error;
        }
        const SweepBlock& sweep = *base.sweep;

        long total = 1;
        for (const auto& param : sweep.parameters) total *= param.count;
        if (total > sweep.budget) {
            throw BudgetExceeded("sweep wants " + std::to_string(total) +
                                 " runs, budget is " + std::to_string(sweep.budget));
        }

        // Deterministic point list: last parameter varies fastest.
        struct Point {
            std::vector<double> values;
        };
        std::vector<Point> points(static_cast<std::size_t>(total));
        for (long index = 0; index < total; ++index) {
            long rest = index;
            Point point;
            point.values.resize(sweep.parameters.size());
            for (std::size_t pi = sweep.parameters.size(); pi-- > 0;) {
                const auto& param = sweep.parameters[pi];
                const long step_index = rest % param.count;
                rest /= param.count;
                const double t = param.count > 1
                                     ? static_cast<double>(step_index) / (param.count - 1)
                                     : 0.0;
                point.values[pi] = param.start + t * (param.stop - param.start);
            }
            points[static_cast<std::size_t>(index)] = std::move(point);
        }

        struct Row {
            std::string text;
        };
        std::vector<Row> rows(points.size());
        std::atomic<std::size_t> cursor{0};

        auto work = [&]() {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= points.size()) return;
                std::ostringstream row;
                for (double v : points[i].values) row << g17(v) << ',';
                std::string status = "ok";
                try {
                    RunSpec spec = base;
                    spec.sweep.reset();
                    for (std::size_t pi = 0; pi < sweep.parameters.size(); ++pi) {
                        apply_override(spec.model, sweep.parameters[pi].name,
                                       points[i].values[pi]);
                    }
                    if (auto* pert = std::get_if<PerturbedConstantInit>(&spec.init.preset)) {
                        pert->seed += i; // decorrelate points, still deterministic
                    }
                    const ValidatedModel model(spec.model);
                    const theory::RegimeReport report = theory::classify(model);
                    row << classify_row(report);
                    if (sweep.simulate) {
                        char sub[32];
                        std::snprintf(sub, sizeof(sub), "point_%06zu", i);
                        const auto [result, columns] =
                            simulate(spec, model, fs::path(base.output.dir) / sub, 0.0);
                        row << ',' << g17(columns.sup_u) << ',' << g17(columns.mass_margin)
                            << ',' << columns.run_verdict;
                    }
                } catch (const std::exception& e) {
                    row << ",,,,,,";
                    if (sweep.simulate) row << ",,,";
                    status = "error: " + sanitize_csv(e.what());
                }
                row << ',' << status;
                rows[i].text = row.str();
            }
        };

        const int worker_count =
            std::max(1, static_cast<int>(std::min<long>(resolve_jobs(jobs), total)));
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(worker_count));
        for (int t = 0; t < worker_count; ++t) workers.emplace_back(work);
        for (auto& w : workers) w.join();

        fs::create_directories(base.output.dir);
        const fs::path map_path = fs::path(base.output.dir) / "regime_map.csv";
        std::ofstream map(map_path);
        const std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        map << "# generated_at=" << stamp << '\n';
        for (const auto& param : sweep.parameters) map << param.name << ',';
        map << "a1,a2,a3,a4,a5,verdict,witness";
        if (sweep.simulate) map << ",sup_u,mass_margin,run_verdict";
        map << ",status\n";
        for (const Row& row : rows) map << row.text << '\n';

        out << "points=" << total << " map=" << map_path.string() << '\n';
        return exit_ok;
    } catch (const Error& e) {
        err << "sweep: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "sweep: " << e.what() << '\n';
        return exit_error;
    }
}

} // namespace cli
} // namespace chemotax
