#pragma once

#include <stdexcept>
#include <string>

namespace spectral_da {

// Base class for domain-rule violations (as opposed to malformed input).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// A coefficient-sequence operation would leave the closed sequence universe
// (incompatible decay tails, colliding adversarial continuations, ...).
class TailMismatch : public DomainError {
public:
    explicit TailMismatch(const std::string& what_arg) : DomainError(what_arg) {}
};

// The prior covariance must have a convergent eigenvalue sum to be a
// probability measure; classification refuses to guess otherwise.
class PriorNotTraceClass : public DomainError {
public:
    explicit PriorNotTraceClass(const std::string& what_arg) : DomainError(what_arg) {}
};

// Adversarial data generation requires the noise eigenvalues to get
// arbitrarily small; with a positive lower bound no bad data exists.
class LowerBoundPositive : public DomainError {
public:
    explicit LowerBoundPositive(const std::string& what_arg) : DomainError(what_arg) {}
};

// Minimization requested for a cost that is infinite everywhere.
class InfeasibleProblem : public DomainError {
public:
    explicit InfeasibleProblem(const std::string& what_arg) : DomainError(what_arg) {}
};

// A series outside the decidable universe reached the classifier. Kept as a
// hard error so no convergence verdict is ever guessed from float samples.
class UnsupportedSeries : public DomainError {
public:
    explicit UnsupportedSeries(const std::string& what_arg) : DomainError(what_arg) {}
};

// Malformed or schema-violating input document.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace spectral_da
