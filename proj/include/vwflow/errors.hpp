#pragma once

#include <stdexcept>
#include <string>

namespace vwflow {

/// Evaluation at a point where the singular kernel is undefined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Query outside the sampled time interval of a path.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Operation requires metadata or a contract the object does not carry.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Inputs that violate a documented precondition (bad step size, mismatched grids, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace vwflow
