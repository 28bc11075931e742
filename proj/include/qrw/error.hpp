#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qrw {

// Broad failure classes; the CLI maps each to its own exit code.
enum class ErrorCategory { validation, integration, statistics, io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

class IntegrationDiverged : public Error {
public:
    explicit IntegrationDiverged(double t)
        : Error(ErrorCategory::integration,
                "integration diverged: non-finite derivative at t=" + std::to_string(t)),
          time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class StatisticsError : public Error {
public:
    explicit StatisticsError(const std::string& what) : Error(ErrorCategory::statistics, what) {}
};

/// Config validation failure carrying one diagnostic per offending field.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> diagnostics)
        : ValidationError(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    static std::string join(const std::vector<std::string>& lines) {
        std::string out = "invalid config:";
        for (const auto& l : lines) {
            out += "\n  " + l;
        }
        return out;
    }

    std::vector<std::string> diagnostics_;
};

}  // namespace qrw
