#pragma once

#include <stdexcept>
#include <string>

namespace morselab {

// Bad arguments: negative radii, modes, out-of-range indices, ...
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A constructed object failed its own invariants.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Requested tolerance not reached; carries the achieved error estimate.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Improper integral that does not converge under the tail model.
class IntegrabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Divergent construction (bounded harmonic functions with log ends, n = 3).
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Not enough asymptotic range for a decay fit.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Symmetric factorization hit an exactly singular shift repeatedly.
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degenerate input (identically zero field, empty families, ...).
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace morselab
