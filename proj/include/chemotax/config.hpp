#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chemotax/model.hpp"
#include "chemotax/stepper.hpp"

namespace chemotax {

struct TimeBlock {
    double horizon = 1.0; // key "T"
    double cfl = 0.4;
    double dt_min = 1e-12;
    double dt_max = std::numeric_limits<double>::infinity();
    double record_interval = 0.0; // filled with T/500 when not given
    double blowup_threshold = 1e6;

    bool operator==(const TimeBlock&) const = default;
};

struct OutputBlock {
    std::string dir = "out";
    double snapshot_every = 0.0; // simulated-time interval; 0 = final only
    std::vector<double> p_list{2.0};

    bool operator==(const OutputBlock&) const = default;
};

struct InitBlock {
    InitPreset preset = ConstantInit{1.0};
    SignalInit signals{}; // keys "v0","w0", tau=1 only

    bool operator==(const InitBlock& other) const;
};

struct SweepParameter {
    std::string name; // a [model] numeric key
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    bool operator==(const SweepParameter&) const = default;
};

struct SweepBlock {
    std::vector<SweepParameter> parameters;
    bool simulate = false;
    int budget = 1000;

    bool operator==(const SweepBlock&) const = default;
};

/// Everything one batch run needs. Parsed from the sectioned key=value
/// format; see README for the key reference.
struct RunSpec {
    ModelSpec model;
    DomainSpec domain;
    TimeBlock time;
    InitBlock init;
    OutputBlock output;
    std::optional<SweepBlock> sweep;

    bool operator==(const RunSpec&) const = default;
};

/// Parses the sectioned config text. Unknown keys, duplicate keys, missing
/// sections and type errors throw ConfigError with the offending line.
RunSpec parse_config(const std::string& text);

/// Renders a RunSpec so that parse_config(render_config(s)) == s.
std::string render_config(const RunSpec& spec);

} // namespace chemotax
