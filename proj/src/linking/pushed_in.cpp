#include "mcflab/errors.hpp"
#include "mcflab/linking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mcflab {

namespace {

// Closest point to p on triangle abc.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c)
{
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        return a;
    }
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        return b;
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        return a + (d1 / (d1 - d3)) * ab;
    }
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        return c;
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        return a + (d2 / (d2 - d6)) * ac;
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

Vec3 closest_on_mesh(const TriangleMesh& mesh, const Vec3& p)
{
    const auto& x = mesh.vertices();
    double best = std::numeric_limits<double>::infinity();
    Vec3 result = p;
    for (const Face& f : mesh.faces()) {
        const Vec3& a = x[f[0]];
        const Vec3& b = x[f[1]];
        const Vec3& c = x[f[2]];
        // Cheap rejection by a bounding sphere around the centroid.
        const Vec3 g = (a + b + c) / 3.0;
        const double rad = std::max({(a - g).norm(), (b - g).norm(), (c - g).norm()});
        const double lower = (p - g).norm() - rad;
        if (lower > 0.0 && lower * lower >= best) {
            continue;
        }
        const Vec3 q = closest_on_triangle(p, a, b, c);
        const double d2 = (q - p).squaredNorm();
        if (d2 < best) {
            best = d2;
            result = q;
        }
    }
    return result;
}

const std::vector<int>& single_loop(const TriangleMesh& mesh)
{
    if (mesh.boundary_loops().size() != 1) {
        std::ostringstream msg;
        msg << "mesh has " << mesh.boundary_loops().size()
            << " boundary loops; exactly one is required";
        throw PreconditionError(msg.str());
    }
    return mesh.boundary_loops().front();
}

// Unit inward normal of the boundary edge (a,b) within its face.
Vec3 inward_normal(const TriangleMesh& mesh, int a, int b)
{
    const auto& x = mesh.vertices();
    for (const MeshEdge& e : mesh.edges()) {
        if (!e.is_boundary() || !((e.a == a && e.b == b) || (e.a == b && e.b == a))) {
            continue;
        }
        const Face& f = mesh.faces()[e.f0];
        int c = f[0];
        for (int v : f) {
            if (v != a && v != b) {
                c = v;
            }
        }
        const Vec3 t = (x[b] - x[a]).normalized();
        Vec3 n = x[c] - x[a];
        n -= n.dot(t) * t;
        return n.normalized();
    }
    throw InternalError("pushed-in curve: boundary edge not found");
}

double distance_to_loop(const Vec3& p, const Eigen::Matrix3Xd& loop)
{
    double best = std::numeric_limits<double>::infinity();
    const Eigen::Index n = loop.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec3 a = loop.col(i);
        const Vec3 b = loop.col((i + 1) % n);
        const Vec3 ab = b - a;
        const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        best = std::min(best, (a + t * ab - p).norm());
    }
    return best;
}

} // namespace

double default_push_distance(const TriangleMesh& mesh)
{
    double total = 0.0;
    int count = 0;
    for (const MeshEdge& e : mesh.edges()) {
        if (mesh.is_boundary_vertex(e.a) || mesh.is_boundary_vertex(e.b)) {
            total += (mesh.vertices()[e.a] - mesh.vertices()[e.b]).norm();
            ++count;
        }
    }
    if (count == 0) {
        throw PreconditionError("mesh has no boundary");
    }
    return 2.0 * total / count;
}

OrientedLoop pushed_in_curve(const TriangleMesh& mesh, double epsilon)
{
    const std::vector<int>& loop = single_loop(mesh);
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw PreconditionError("pushed-in curve: epsilon must be positive");
    }
    const auto& x = mesh.vertices();
    const Eigen::Matrix3Xd boundary = mesh.loop_points(0);
    const std::size_t n = loop.size();

    std::vector<Vec3> edge_normal(n);
    for (std::size_t i = 0; i < n; ++i) {
        edge_normal[i] = inward_normal(mesh, loop[i], loop[(i + 1) % n]);
    }

    Eigen::Matrix3Xd pushed(3, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& prev = edge_normal[(i + n - 1) % n];
        const Vec3& next = edge_normal[i];
        Vec3 dir = prev + next;
        if (dir.norm() < 1e-8) {
            throw CollarError("pushed-in curve: boundary folds back on itself");
        }
        dir.normalize();
        // Only corners where the mesh angle is below pi need the longer step.
        const Vec3 t_next = (x[loop[(i + 1) % n]] - x[loop[i]]).normalized();
        const double c = t_next.dot(prev) > 0.0 ? std::max(dir.dot(next), 0.5) : 1.0;
        const Vec3 target = closest_on_mesh(mesh, x[loop[i]] + (epsilon / c) * dir);
        const double dist = distance_to_loop(target, boundary);
        if (std::abs(dist - epsilon) > 0.25 * epsilon) {
            std::ostringstream msg;
            msg << "pushed-in curve: point " << i << " lands at distance " << dist
                << " from the boundary, expected " << epsilon;
            throw CollarError(msg.str());
        }
        pushed.col(static_cast<Eigen::Index>(i)) = target;
    }
    try {
        return OrientedLoop(std::move(pushed));
    } catch (const Error& e) {
        throw CollarError(std::string("pushed-in curve is not a simple loop: ") + e.what());
    }
}

LambdaResult lambda_invariant_detailed(const TriangleMesh& mesh, std::optional<double> epsilon)
{
    single_loop(mesh);
    double eps = epsilon ? *epsilon : default_push_distance(mesh);
    const OrientedLoop boundary(mesh.loop_points(0));
    for (int attempt = 0;; ++attempt) {
        try {
            const OrientedLoop c1 = pushed_in_curve(mesh, eps);
            const OrientedLoop c2 = pushed_in_curve(mesh, 0.5 * eps);
            const int l1 = linking_number(boundary, c1);
            const int l2 = linking_number(boundary, c2);
            const int l3 = linking_number(boundary.reversed(), c1.reversed());
            if (l1 != l2 || l1 != l3) {
                std::ostringstream msg;
                msg << "lambda invariant: inconsistent linking numbers " << l1 << ", " << l2
                    << ", " << l3;
                throw InternalError(msg.str());
            }
            return {l1, eps};
        } catch (const CollarError&) {
            if (attempt >= 6) {
                throw;
            }
            eps *= 0.5;
        }
    }
}

bool is_generalized_mobius(const TriangleMesh& mesh)
{
    return mesh.boundary_loops().size() == 1 && lambda_invariant(mesh) != 0;
}

} // namespace mcflab
