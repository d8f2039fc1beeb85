#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace imog {

/// Bad arguments: non-finite coordinates, dimension mismatch, out-of-range parameters.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Lipschitz bound is needed but neither supplied nor estimable.
class MissingLipschitz : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedSize : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called outside its mathematical domain of definition (e.g. at a critical point).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Expression text that does not parse. `offset` is the byte offset of the failure.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t offset, const std::string& message)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + message),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside a function's domain (log of nonpositive, division by zero, overflow).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, const std::string& message)
        : std::runtime_error(message), time_(time) {}

    /// Time of the state the failed step started from.
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Every schema violation found in a configuration, each prefixed by its JSON path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& s : issues) {
            if (!out.empty()) out += "\n";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace imog
