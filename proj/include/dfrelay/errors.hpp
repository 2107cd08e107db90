#pragma once

#include <stdexcept>
#include <string>

namespace dfrelay {

/// Argument outside the mathematical domain of an operation (negative SNR, s at a pole, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke an operation's structural contract (atom in a CDF product, unequal C in an equal-C form).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A closed form that needs integer fading figures was asked for with a non-integer m.
class IntegralityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Combinatorial enumeration would exceed its size budget.
class ResourceGuardError : public std::length_error {
public:
    using std::length_error::length_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dfrelay
