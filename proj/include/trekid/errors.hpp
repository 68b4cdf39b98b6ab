#pragma once

#include <stdexcept>
#include <string>

namespace trekid {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A directed or bidirected edge joins a vertex to itself.
struct SelfLoopError : Error {
    using Error::Error;
};

// The directed part of the graph contains a cycle.
struct DirectedCycleError : Error {
    using Error::Error;
};

// A vertex index lies outside 1..n.
struct VertexOutOfRangeError : Error {
    using Error::Error;
};

// An enumeration-backed operation was asked to handle a graph above its size limit.
struct InstanceTooLargeError : Error {
    using Error::Error;
};

// A matrix factorization or other numeric step failed unexpectedly.
struct NumericError : Error {
    using Error::Error;
};

// Parameter recovery was given a certificate step it cannot invert from plain
// covariance submatrices.
struct UnsupportedCertificatePhaseError : Error {
    using Error::Error;
};

// The linear system of a recovery step is (near-)singular; the parameter draw
// was non-generic and the caller should resample.
struct SingularSystemError : Error {
    using Error::Error;
};

// Malformed input file; the message carries the offending line number.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace trekid
