#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chemotax {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveParameter : public Error {
public:
    using Error::Error;
};

class RNotGreaterThanOne : public Error {
public:
    using Error::Error;
};

class EnvelopeViolated : public Error {
public:
    using Error::Error;
};

class NegativeArgument : public Error {
public:
    using Error::Error;
};

// Carries the full list of invariant violations found by model validation.
class InvalidModel : public Error {
public:
    explicit InvalidModel(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string msg = "invalid model:";
        for (const auto& s : issues) {
            msg += "\n  - " + s;
        }
        return msg;
    }

    std::vector<std::string> issues_;
};

class InvalidHypothesisParameter : public Error {
public:
    using Error::Error;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

class NotFoundWithinScan : public Error {
public:
    using Error::Error;
};

class TooFewCells : public Error {
public:
    using Error::Error;
};

class NegativeInitialData : public Error {
public:
    using Error::Error;
};

class FileFormatError : public Error {
public:
    using Error::Error;
};

class NonPositiveEta : public Error {
public:
    using Error::Error;
};

class SolverDiverged : public Error {
public:
    using Error::Error;
};

class NonFiniteField : public Error {
public:
    using Error::Error;
};

class DtUnderflow : public Error {
public:
    using Error::Error;
};

class ExponentDegenerate : public Error {
public:
    using Error::Error;
};

class PLessThanOne : public Error {
public:
    using Error::Error;
};

class PNotGreaterThanOne : public Error {
public:
    using Error::Error;
};

class EmptySeries : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

// Configuration parse error; remembers the offending line (1-based, 0 = n/a).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_ = 0;
};

} // namespace chemotax
