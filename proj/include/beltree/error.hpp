#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace beltree {

/// Base class for all library errors. `code()` is a stable, machine-readable
/// reason string; the CLI prints it as `error: <code>: <message>`.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& m) : Error("shape", m) {}
};

struct InvalidMatrixError : Error {
    explicit InvalidMatrixError(const std::string& m) : Error("invalid-matrix", m) {}
};

struct NotPsdError : Error {
    explicit NotPsdError(const std::string& m) : Error("not-psd", m) {}
};

struct UnknownNodeError : Error {
    explicit UnknownNodeError(const std::string& m) : Error("unknown-node", m) {}
};

struct DuplicateNodeError : Error {
    explicit DuplicateNodeError(const std::string& m) : Error("duplicate-node", m) {}
};

struct CycleError : Error {
    explicit CycleError(const std::string& m) : Error("cycle", m) {}
};

struct NoPathError : Error {
    explicit NoPathError(const std::string& m) : Error("no-path", m) {}
};

struct StalePlanError : Error {
    explicit StalePlanError(const std::string& m) : Error("stale-plan", m) {}
};

struct PlanMismatchError : Error {
    explicit PlanMismatchError(const std::string& m) : Error("plan-mismatch", m) {}
};

struct InvalidPruneError : Error {
    explicit InvalidPruneError(const std::string& m) : Error("invalid-prune", m) {}
};

struct InvalidRootError : Error {
    explicit InvalidRootError(const std::string& m) : Error("invalid-root", m) {}
};

struct DegenerateRatioError : Error {
    explicit DegenerateRatioError(const std::string& m) : Error("degenerate-ratio", m) {}
};

struct OracleSizeError : Error {
    explicit OracleSizeError(const std::string& m) : Error("oracle-too-large", m) {}
};

struct InvalidModelError : Error {
    explicit InvalidModelError(const std::string& m) : Error("invalid-model", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};

/// Parse failure with 1-based source location.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error("parse",
                "line " + std::to_string(line) + ", col " + std::to_string(column) +
                    ": " + message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace beltree
