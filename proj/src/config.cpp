#include "chemotax/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace chemotax {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// '#' starts a comment at line start or after whitespace, so values such as
// file paths may contain an embedded '#'.
std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' &&
            (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
            return line.substr(0, i);
        }
    }
    return line;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

class Parsed {
public:
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_lines;

    bool has(const std::string& section) const { return sections.count(section) != 0; }

    Section& require(const std::string& section) {
        auto it = sections.find(section);
        if (it == sections.end()) {
            throw ConfigError("missing required section [" + section + "]");
        }
        return it->second;
    }
};

Parsed parse_raw(const std::string& text) {
    Parsed parsed;
    std::istringstream in(text);
    std::string raw;
    Section* current = nullptr;
    std::string current_name;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", lineno);
            current_name = trim(line.substr(1, line.size() - 2));
            if (current_name.empty()) throw ConfigError("empty section name", lineno);
            if (parsed.sections.count(current_name)) {
                throw ConfigError("duplicate section [" + current_name + "]", lineno);
            }
            current = &parsed.sections[current_name];
            parsed.section_lines[current_name] = lineno;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value", lineno);
        }
        if (current == nullptr) {
            throw ConfigError("key outside any section", lineno);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        auto [it, inserted] = current->emplace(key, Entry{value, lineno, false});
        if (!inserted) {
            throw ConfigError("duplicate key '" + key + "' in [" + current_name + "]", lineno);
        }
    }
    return parsed;
}

double parse_double(const Entry& e, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not a number: " + e.value, e.line);
    }
}

long parse_int(const Entry& e, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not an integer: " + e.value, e.line);
    }
}

bool parse_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError("value of '" + key + "' is not a boolean: " + e.value, e.line);
}

std::vector<double> parse_double_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::istringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError("value of '" + key + "' has a bad list entry: " + item, e.line);
        }
    }
    if (out.empty()) throw ConfigError("value of '" + key + "' is an empty list", e.line);
    return out;
}

class SectionReader {
public:
    SectionReader(Section& section, std::string name)
        : section_(section), name_(std::move(name)) {}

    const Entry* find(const std::string& key) {
        auto it = section_.find(key);
        if (it == section_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    bool get(const std::string& key, double& out) {
        if (const Entry* e = find(key)) {
            out = parse_double(*e, key);
            return true;
        }
        return false;
    }

    bool get(const std::string& key, int& out) {
        if (const Entry* e = find(key)) {
            out = static_cast<int>(parse_int(*e, key));
            return true;
        }
        return false;
    }

    bool get(const std::string& key, bool& out) {
        if (const Entry* e = find(key)) {
            out = parse_bool(*e, key);
            return true;
        }
        return false;
    }

    bool get(const std::string& key, std::string& out) {
        if (const Entry* e = find(key)) {
            out = e->value;
            return true;
        }
        return false;
    }

    bool get(const std::string& key, std::vector<double>& out) {
        if (const Entry* e = find(key)) {
            out = parse_double_list(*e, key);
            return true;
        }
        return false;
    }

    double require_double(const std::string& key) {
        if (const Entry* e = find(key)) return parse_double(*e, key);
        throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
    }

    void reject_unused() const {
        for (const auto& [key, entry] : section_) {
            if (!entry.used) {
                throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", entry.line);
            }
        }
    }

private:
    Section& section_;
    std::string name_;
};

void read_model(Parsed& parsed, ModelSpec& model) {
    SectionReader sec(parsed.require("model"), "model");
    std::string variant;
    if (sec.get("variant", variant)) {
        if (variant == "local") model.variant = Variant::local;
        else if (variant == "nonlocal") model.variant = Variant::nonlocal;
        else throw ConfigError("variant must be 'local' or 'nonlocal', got " + variant);
    }
    sec.get("tau", model.tau);
    sec.get("chi", model.chi);
    sec.get("xi", model.xi);
    sec.get("lambda", model.lambda);
    sec.get("mu", model.mu);
    sec.get("r", model.r);
    sec.get("m1", model.m1);
    sec.get("m2", model.m2);
    sec.get("m3", model.m3);
    sec.get("beta", model.beta);
    sec.get("delta", model.delta);
    sec.get("test_mode", model.test_mode);

    double alpha = 1.0, k = 1.0, gamma0 = 1.0, gamma1 = 1.0, l = 1.0;
    sec.get("alpha", alpha);
    sec.get("k", k);
    sec.get("gamma0", gamma0);
    sec.get("gamma1", gamma1);
    sec.get("l", l);
    model.attractant = ProductionLaw::prototype_attractant(alpha, k);
    model.repellent = ProductionLaw::prototype_repellent(gamma0, gamma1, l);
    sec.reject_unused();
}

void read_grid(Parsed& parsed, RunSpec& spec) {
    SectionReader sec(parsed.require("grid"), "grid");
    sec.get("dimension", spec.domain.dimension);
    std::vector<double> lengths;
    if (sec.get("lengths", lengths)) {
        if (static_cast<int>(lengths.size()) != spec.domain.dimension) {
            throw ConfigError("lengths must list one value per axis");
        }
        for (std::size_t i = 0; i < lengths.size(); ++i) spec.domain.lengths[i] = lengths[i];
    }
    std::vector<double> cells;
    if (sec.get("cells", cells)) {
        if (static_cast<int>(cells.size()) != spec.domain.dimension) {
            throw ConfigError("cells must list one value per axis");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i] != std::floor(cells[i])) {
                throw ConfigError("cell counts must be integers");
            }
            spec.domain.cells[i] = static_cast<int>(cells[i]);
        }
    }
    spec.model.n = spec.domain.dimension;
    sec.reject_unused();
}

void read_time(Parsed& parsed, TimeBlock& time) {
    SectionReader sec(parsed.require("time"), "time");
    time.horizon = sec.require_double("T");
    sec.get("cfl", time.cfl);
    sec.get("dt_min", time.dt_min);
    sec.get("dt_max", time.dt_max);
    if (!sec.get("record_interval", time.record_interval)) {
        time.record_interval = time.horizon / 500.0;
    }
    sec.get("blowup_threshold", time.blowup_threshold);
    sec.reject_unused();
}

void read_init(Parsed& parsed, InitBlock& init) {
    if (!parsed.has("init")) return;
    SectionReader sec(parsed.require("init"), "init");
    std::string preset = "constant";
    sec.get("preset", preset);
    if (preset == "constant") {
        ConstantInit c;
        sec.get("c", c.c);
        init.preset = c;
    } else if (preset == "gaussian") {
        GaussianInit g;
        std::vector<double> center;
        if (sec.get("center", center)) {
            for (std::size_t i = 0; i < center.size() && i < 2; ++i) g.center[i] = center[i];
        }
        sec.get("width", g.width);
        sec.get("amplitude", g.amplitude);
        sec.get("floor", g.floor);
        init.preset = g;
    } else if (preset == "perturbed_constant") {
        PerturbedConstantInit p;
        sec.get("c", p.c);
        sec.get("amplitude", p.amplitude);
        int seed = 0;
        if (sec.get("seed", seed)) p.seed = static_cast<std::uint64_t>(seed);
        init.preset = p;
    } else if (preset == "from_file") {
        FromFileInit f;
        if (!sec.get("path", f.path)) throw ConfigError("from_file preset needs 'path'");
        init.preset = f;
    } else {
        throw ConfigError("unknown preset '" + preset + "'");
    }
    sec.get("v0", init.signals.v0);
    sec.get("w0", init.signals.w0);
    sec.reject_unused();
}

void read_output(Parsed& parsed, OutputBlock& output) {
    if (!parsed.has("output")) return;
    SectionReader sec(parsed.require("output"), "output");
    sec.get("dir", output.dir);
    sec.get("snapshot_every", output.snapshot_every);
    sec.get("p_list", output.p_list);
    sec.reject_unused();
}

const std::vector<std::string>& sweepable_keys() {
    static const std::vector<std::string> keys = {
        "chi", "xi", "lambda", "mu", "r", "m1", "m2", "m3",
        "beta", "delta", "alpha", "k", "gamma0", "gamma1", "l"};
    return keys;
}

void read_sweep(Parsed& parsed, std::optional<SweepBlock>& sweep) {
    if (!parsed.has("sweep")) return;
    Section& section = parsed.require("sweep");
    SweepBlock block;
    for (auto& [key, entry] : section) {
        if (key == "simulate") {
            block.simulate = parse_bool(entry, key);
            entry.used = true;
            continue;
        }
        if (key == "budget") {
            block.budget = static_cast<int>(parse_int(entry, key));
            entry.used = true;
            continue;
        }
        bool known = false;
        for (const auto& candidate : sweepable_keys()) {
            if (key == candidate) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown key '" + key + "' in [sweep]", entry.line);
        }
        // start:stop:count
        SweepParameter param;
        param.name = key;
        std::istringstream ss(entry.value);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
            throw ConfigError("sweep entries use start:stop:count", entry.line);
        }
        try {
            param.start = std::stod(trim(a));
            param.stop = std::stod(trim(b));
            param.count = std::stoi(trim(c));
        } catch (const std::exception&) {
            throw ConfigError("malformed sweep range: " + entry.value, entry.line);
        }
        if (param.count < 1) throw ConfigError("sweep count must be >= 1", entry.line);
        block.parameters.push_back(std::move(param));
        entry.used = true;
    }
    if (block.parameters.empty()) {
        throw ConfigError("[sweep] must list at least one parameter range");
    }
    sweep = std::move(block);
}

} // namespace

bool InitBlock::operator==(const InitBlock& other) const {
    return preset == other.preset && signals.v0 == other.signals.v0 &&
           signals.w0 == other.signals.w0;
}

RunSpec parse_config(const std::string& text) {
    Parsed parsed = parse_raw(text);
    for (const auto& [name, _] : parsed.sections) {
        if (name != "model" && name != "grid" && name != "time" && name != "init" &&
            name != "output" && name != "sweep") {
            throw ConfigError("unknown section [" + name + "]", parsed.section_lines[name]);
        }
    }
    RunSpec spec;
    read_model(parsed, spec.model);
    read_grid(parsed, spec);
    read_time(parsed, spec.time);
    read_init(parsed, spec.init);
    read_output(parsed, spec.output);
    read_sweep(parsed, spec.sweep);
    return spec;
}

std::string render_config(const RunSpec& spec) {
    std::ostringstream out;
    const ModelSpec& m = spec.model;
    out << "[model]\n";
    out << "variant = " << (m.variant == Variant::local ? "local" : "nonlocal") << '\n';
    out << "tau = " << m.tau << '\n';
    out << "chi = " << g17(m.chi) << '\n';
    out << "xi = " << g17(m.xi) << '\n';
    out << "lambda = " << g17(m.lambda) << '\n';
    out << "mu = " << g17(m.mu) << '\n';
    out << "r = " << g17(m.r) << '\n';
    out << "m1 = " << g17(m.m1) << '\n';
    out << "m2 = " << g17(m.m2) << '\n';
    out << "m3 = " << g17(m.m3) << '\n';
    out << "beta = " << g17(m.beta) << '\n';
    out << "delta = " << g17(m.delta) << '\n';
    out << "alpha = " << g17(m.attractant.alpha()) << '\n';
    out << "k = " << g17(m.attractant.k()) << '\n';
    out << "gamma0 = " << g17(m.repellent.gamma0()) << '\n';
    out << "gamma1 = " << g17(m.repellent.gamma1()) << '\n';
    out << "l = " << g17(m.repellent.l()) << '\n';
    if (m.test_mode) out << "test_mode = true\n";

    out << "\n[grid]\n";
    out << "dimension = " << spec.domain.dimension << '\n';
    out << "lengths = " << g17(spec.domain.lengths[0]);
    if (spec.domain.dimension == 2) out << ',' << g17(spec.domain.lengths[1]);
    out << '\n';
    out << "cells = " << spec.domain.cells[0];
    if (spec.domain.dimension == 2) out << ',' << spec.domain.cells[1];
    out << '\n';

    out << "\n[time]\n";
    out << "T = " << g17(spec.time.horizon) << '\n';
    out << "cfl = " << g17(spec.time.cfl) << '\n';
    out << "dt_min = " << g17(spec.time.dt_min) << '\n';
    out << "dt_max = " << g17(spec.time.dt_max) << '\n';
    out << "record_interval = " << g17(spec.time.record_interval) << '\n';
    out << "blowup_threshold = " << g17(spec.time.blowup_threshold) << '\n';

    out << "\n[init]\n";
    if (const auto* c = std::get_if<ConstantInit>(&spec.init.preset)) {
        out << "preset = constant\n";
        out << "c = " << g17(c->c) << '\n';
    } else if (const auto* g = std::get_if<GaussianInit>(&spec.init.preset)) {
        out << "preset = gaussian\n";
        out << "center = " << g17(g->center[0]);
        if (spec.domain.dimension == 2) out << ',' << g17(g->center[1]);
        out << '\n';
        out << "width = " << g17(g->width) << '\n';
        out << "amplitude = " << g17(g->amplitude) << '\n';
        out << "floor = " << g17(g->floor) << '\n';
    } else if (const auto* p = std::get_if<PerturbedConstantInit>(&spec.init.preset)) {
        out << "preset = perturbed_constant\n";
        out << "c = " << g17(p->c) << '\n';
        out << "amplitude = " << g17(p->amplitude) << '\n';
        out << "seed = " << p->seed << '\n';
    } else if (const auto* f = std::get_if<FromFileInit>(&spec.init.preset)) {
        out << "preset = from_file\n";
        out << "path = " << f->path << '\n';
    }
    out << "v0 = " << g17(spec.init.signals.v0) << '\n';
    out << "w0 = " << g17(spec.init.signals.w0) << '\n';

    out << "\n[output]\n";
    out << "dir = " << spec.output.dir << '\n';
    out << "snapshot_every = " << g17(spec.output.snapshot_every) << '\n';
    out << "p_list = ";
    for (std::size_t i = 0; i < spec.output.p_list.size(); ++i) {
        if (i) out << ',';
        out << g17(spec.output.p_list[i]);
    }
    out << '\n';

    if (spec.sweep) {
        out << "\n[sweep]\n";
        for (const auto& param : spec.sweep->parameters) {
            out << param.name << " = " << g17(param.start) << ':' << g17(param.stop) << ':'
                << param.count << '\n';
        }
        out << "simulate = " << (spec.sweep->simulate ? "true" : "false") << '\n';
        out << "budget = " << spec.sweep->budget << '\n';
    }
    return out.str();
}

} // namespace chemotax
