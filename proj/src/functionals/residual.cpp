#include "mcflab/functionals.hpp"

namespace mcflab {

ShrinkerResidual shrinker_residual(const TriangleMesh& mesh, double max_radius)
{
    const std::size_t n = mesh.num_vertices();
    std::vector<bool> skip(n);
    for (std::size_t v = 0; v < n; ++v) {
        skip[v] = mesh.is_boundary_vertex(static_cast<int>(v));
    }
    std::vector<Vec3> H;
    std::vector<double> area;
    detail::mean_curvature_vectors(mesh.vertices(), mesh.faces(), skip, H, area);
    const std::vector<Vec3> normals = vertex_normals(mesh);

    ShrinkerResidual out;
    out.per_vertex.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        const Vec3& x = mesh.vertices()[v];
        if (skip[v] || x.norm() > max_radius) {
            continue;
        }
        const Vec3 x_perp = x.dot(normals[v]) * normals[v];
        const double r = (H[v] + 0.5 * x_perp).norm();
        out.per_vertex[v] = r;
        out.sup = std::max(out.sup, r);
    }
    return out;
}

DoublingCheck doubling_check(const TriangleMesh& candidate)
{
    DoublingCheck out;
    out.value = 0.5 + gaussian_area(candidate, GaussianKernel(Vec3::Zero(), 1.0));
    out.applicable = !is_orientable(candidate) && shrinker_residual(candidate).sup < 0.05;
    out.exceeds_three_halves = out.value > 1.5;
    return out;
}

} // namespace mcflab
