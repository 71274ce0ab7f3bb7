#pragma once

#include "mcflab/curve.hpp"
#include "mcflab/mesh.hpp"

#include <cstdint>

// Canonical curves and meshes used by the tests, the verify suite and the
// Python smoke tests.
namespace mcflab::shapes {

// --- curves (all in R^3 unless noted) ---

/// Regular n-gon inscribed in the circle of given radius in the xy-plane.
DiscreteCurve circle(double radius, int n, const Vec3& center = Vec3::Zero());
DiscreteCurve ellipse(double a, double b, int n);
DiscreteCurve circle2d(double radius, int n);

/// ((2+cos 3s)cos 2s, (2+cos 3s)sin 2s, sin 3s).
DiscreteCurve trefoil(int n);

/// (cos s, sin s, h cos(k s)): a closed curve on a cylinder that oscillates k times.
DiscreteCurve saddle(double height, int k, int n);

/// Planar star r(s) = 1 + a cos(k s).
DiscreteCurve star(double amplitude, int k, int n);

/// Star-shaped planar curve with random Fourier radius plus a random height
/// profile; always simple.
DiscreteCurve random_smooth(std::uint64_t seed, int n);

/// Square of side 2 in the xy-plane with corner (1,1) lifted to height h.
DiscreteCurve twisted_quadrilateral(double height, int points_per_side);

// --- meshes ---

/// Flat disk of concentric rings around a center vertex; rings == 1 is a fan.
TriangleMesh disk(double radius, int boundary_vertices, int rings);

/// Disk z = amplitude (1 - r^2)(1 + r cos s) over the unit disk.
TriangleMesh perturbed_disk(double amplitude, int boundary_vertices, int rings);

TriangleMesh annulus(double inner, double outer, int segments, int rings);

TriangleMesh icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());

/// Open tube of given radius over z in [-half_length, half_length].
TriangleMesh cylinder(double radius, double half_length, int segments, int rows);

/// Axis-aligned square of side `side` centered at the origin in the xy-plane.
TriangleMesh square(double side, int cells);

/// Half disk {x >= 0, |x| <= radius} in the xy-plane, graded geometrically
/// from `inner` at the origin outward. Its boundary contains the y-axis segment.
TriangleMesh half_disk(double radius, double inner, int angular);

/// Band around the circle of radius `radius` with `half_twists` half turns.
/// An odd count gives a non-orientable band with one boundary loop.
TriangleMesh twisted_band(double radius, double half_width, int half_twists, int segments,
                          int across);

inline TriangleMesh mobius_strip(int segments = 64, int across = 5)
{
    return twisted_band(1.0, 0.3, 1, segments, across);
}

/// Torus with one grid quad removed: orientable, genus one, one boundary loop.
TriangleMesh punctured_torus(double major, double minor, int nu, int nv);

/// One round of 1-to-4 midpoint subdivision. Positions are not smoothed.
TriangleMesh subdivide(const TriangleMesh& mesh);

/// Applies x -> R x + t to every vertex.
TriangleMesh rigid_motion(const TriangleMesh& mesh, const Eigen::Matrix3d& rotation,
                          const Vec3& shift);

} // namespace mcflab::shapes
