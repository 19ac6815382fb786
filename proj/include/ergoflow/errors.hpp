#pragma once

#include <stdexcept>
#include <string>

namespace ergoflow {

/// Input violates a type invariant or an operation precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A dense representation was requested above the configured size cap.
class CapExceededError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// The separable form only exists for steps whose pair differs at one site.
class CertificateNotApplicable : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ergoflow
