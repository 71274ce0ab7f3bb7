#pragma once

#include <stdexcept>
#include <string>

namespace mcflab {

/// Base class for every domain error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Non-manifold edges or vertices, broken boundary loops.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Zero-length edges, zero-area faces, collapsed one-rings.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// An operation was called on an input outside its domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Loops too close to each other, or a point too close to a curve to decide.
class GeometryError : public Error {
public:
    using Error::Error;
};

class AmbiguityError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

/// The pushed-in curve left the collar of the boundary.
class CollarError : public Error {
public:
    using Error::Error;
};

/// A curve that was required to stay simple did not.
class SimplicityError : public Error {
public:
    SimplicityError(const std::string& what, double separation)
        : Error(what), separation_(separation) {}

    /// Smallest distance found between non-adjacent edges.
    double separation() const { return separation_; }

private:
    double separation_;
};

class PositioningError : public Error {
public:
    PositioningError(const std::string& what, double total_curvature)
        : Error(what), total_curvature_(total_curvature) {}

    double total_curvature() const { return total_curvature_; }

private:
    double total_curvature_;
};

/// Two independent computations of the same integer disagreed. Never
/// caught inside the library.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace mcflab
