#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgporo {

// Precondition violated by a caller (bad rank, grid too small, bad parameter).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A deformation gradient (or placement gradient) is not invertible.
class SingularConfiguration : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit SingularConfiguration(const std::string& what) : std::runtime_error(what), node_(npos) {}
    SingularConfiguration(const std::string& what, std::size_t node)
        : std::runtime_error(what + " at node " + std::to_string(node)), node_(node) {}
    std::size_t node() const { return node_; }

private:
    std::size_t node_;
};

class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DegenerateMass : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two independent evaluation routes disagree.
class InternalConsistency : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LineSearchFailure : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sgporo
