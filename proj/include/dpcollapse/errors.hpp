#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dpcollapse {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two quantities (or a quantity and a unit) of different dimension met.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain where a formula is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid configuration / material text.
class ConfigError : public Error {
public:
    ConfigError(std::string key, int line, const std::string& what)
        : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, int line, const std::string& what) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + what;
    }

    std::string key_;
    int line_;
};

/// An iterative numerical method failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// The reduction condition was not met before the configured horizon.
class NoReductionError : public Error {
public:
    using Error::Error;
};

/// A quantity that must grow with the spacetime-border time decreased.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

}  // namespace dpcollapse
