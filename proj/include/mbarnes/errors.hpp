#pragma once

#include <stdexcept>
#include <string>

namespace mb {

/// Base class for every error thrown by this library.
class MbError : public std::runtime_error {
public:
    explicit MbError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation hit a pole of the gamma function (argument within tolerance of a
/// nonpositive integer).
class PoleError : public MbError {
public:
    using MbError::MbError;
};

/// Result magnitude exceeds the representable double range.
class OverflowError : public MbError {
public:
    using MbError::MbError;
};

/// A rational linear-form prefactor evaluated to zero in a denominator.
class DivisionByZero : public MbError {
public:
    using MbError::MbError;
};

/// The integrand does not decay along the vertical line (net gamma count <= 0).
class DivergentTailError : public MbError {
public:
    using MbError::MbError;
};

/// An expression does not have the exact shape a rewrite rule requires.
class PatternMismatch : public MbError {
public:
    using MbError::MbError;
};

/// Residue extraction was requested at a point that is not the n=0 member of a
/// right pole family.
class NotARightPole : public MbError {
public:
    using MbError::MbError;
};

/// Two factors of the integrand are singular at the same point; residues of
/// higher-order poles are out of scope.
class HigherOrderPole : public MbError {
public:
    using MbError::MbError;
};

/// The requested contour is not admissible for the integrand.
class NotAdmissible : public MbError {
public:
    using MbError::MbError;
};

/// Text input (expression, complex literal, command line) failed to parse.
class ParseError : public MbError {
public:
    using MbError::MbError;
};

} // namespace mb
