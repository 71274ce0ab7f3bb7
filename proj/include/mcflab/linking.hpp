#pragma once

#include "mcflab/curve.hpp"
#include "mcflab/mesh.hpp"

#include <cstdint>
#include <optional>

namespace mcflab {

/// Simple closed polygon in R^3; the vertex order is the orientation.
class OrientedLoop {
public:
    /// Throws PreconditionError / DegeneracyError / SimplicityError.
    explicit OrientedLoop(Eigen::Matrix3Xd points);
    explicit OrientedLoop(const DiscreteCurve& curve);

    const Eigen::Matrix3Xd& points() const { return points_; }
    Eigen::Index size() const { return points_.cols(); }
    Vec3 point(Eigen::Index i) const { return points_.col(((i % size()) + size()) % size()); }

    OrientedLoop reversed() const;
    DiscreteCurve curve() const { return DiscreteCurve(points_); }

private:
    Eigen::Matrix3Xd points_;
};

/// Gauss double sum over segment pairs, each pair contributing its signed
/// solid angle over 4 pi. Compensated summation, not rounded.
double gauss_linking_sum(const OrientedLoop& a, const OrientedLoop& b);

/// Half the sum of crossing signs between the two loops in the projection
/// along `direction`. Returns std::nullopt when the projection is not
/// generic (a crossing within `margin` of a segment end, or parallel overlap).
std::optional<int> crossing_linking_number(const OrientedLoop& a, const OrientedLoop& b,
                                           const Vec3& direction, double margin = 1e-6);

/// Integer linking number, computed by the Gauss sum and by crossing
/// signs in a random generic projection. Disagreement throws InternalError;
/// loops closer than the simplicity tolerance throw GeometryError.
int linking_number(const OrientedLoop& a, const OrientedLoop& b, std::uint64_t seed = 42);

/// The boundary loop pushed a distance epsilon into the mesh, following the
/// orientation of the extracted boundary loop. Requires exactly one
/// boundary loop. Throws CollarError when the offset leaves the collar.
OrientedLoop pushed_in_curve(const TriangleMesh& mesh, double epsilon);

/// Twice the mean length of edges incident to boundary vertices.
double default_push_distance(const TriangleMesh& mesh);

struct LambdaResult {
    int lambda = 0;
    /// Push distance actually used (after any halving forced by the collar).
    double epsilon = 0.0;
};

/// Linking number of the boundary with its pushed-in copy, cross-checked at
/// epsilon and epsilon/2 and with both orientations reversed.
LambdaResult lambda_invariant_detailed(const TriangleMesh& mesh,
                                       std::optional<double> epsilon = std::nullopt);

inline int lambda_invariant(const TriangleMesh& mesh, std::optional<double> epsilon = std::nullopt)
{
    return lambda_invariant_detailed(mesh, epsilon).lambda;
}

/// Exactly one boundary loop and nonzero lambda.
bool is_generalized_mobius(const TriangleMesh& mesh);

} // namespace mcflab
