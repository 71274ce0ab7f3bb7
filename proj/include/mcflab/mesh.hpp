#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

namespace mcflab {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// An undirected mesh edge with its incident faces (f1 = -1 on the boundary).
struct MeshEdge {
    int a = -1;
    int b = -1;
    int f0 = -1;
    int f1 = -1;

    bool is_boundary() const { return f1 < 0; }
};

/// Triangle mesh whose boundary edges form disjoint simple loops. Every
/// constructed instance is valid; construction throws otherwise.
class TriangleMesh {
public:
    /// The empty mesh.
    TriangleMesh() = default;

    TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<MeshEdge>& edges() const { return edges_; }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    bool empty() const { return faces_.empty(); }

    /// Ordered vertex loops. Each loop is traversed so that its first edge
    /// agrees with the orientation of the face containing it.
    const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }

    /// Vertices held in place by the flows. Defaults to the boundary vertices.
    const std::vector<bool>& fixed_mask() const { return fixed_; }
    void set_fixed_mask(std::vector<bool> mask);

    bool is_boundary_vertex(int v) const { return on_boundary_[static_cast<std::size_t>(v)]; }

    /// Faces incident to vertex v.
    std::vector<int> vertex_faces(int v) const;

    /// Same topology and fixed mask, new positions. Re-checks face areas.
    TriangleMesh with_positions(std::vector<Vec3> positions) const;

    double area() const;
    double face_area(int f) const;
    double bbox_diagonal() const;
    double min_edge_length() const;
    double max_edge_length() const;

    /// The boundary loop as a 3 x N point matrix, suitable for DiscreteCurve.
    Eigen::Matrix3Xd loop_points(std::size_t loop) const;

private:
    void build_topology();
    void check_areas() const;

    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<MeshEdge> edges_;
    std::vector<std::vector<int>> boundary_loops_;
    std::vector<bool> on_boundary_;
    std::vector<bool> fixed_;
    // CSR vertex -> incident faces.
    std::vector<int> vf_offsets_;
    std::vector<int> vf_faces_;
};

/// Relative area below which a face counts as degenerate (times bbox
/// diagonal squared).
inline constexpr double kDegenerateAreaTolerance = 1e-14;

/// Reads the OBJ subset `v x y z`, `f i j k` (1-based), `#` comments.
TriangleMesh load_mesh(const std::filesystem::path& path);
TriangleMesh parse_obj(const std::string& text);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

bool is_orientable(const TriangleMesh& mesh);

/// Mean curvature vector per vertex: minus the cotangent area gradient
/// divided by the mixed Voronoi vertex area. Boundary vertices get
/// std::nullopt. Throws DegeneracyError on collapsed one-rings.
std::vector<std::optional<Vec3>> discrete_mean_curvature(const TriangleMesh& mesh);

/// Unit vertex normals from area-weighted face normals, with the faces of
/// each one-ring aligned locally so non-orientable meshes work too.
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh);

namespace detail {

/// Fills `H` with the mean curvature vector at every vertex not in `skip`
/// (others are left zero) for the given positions and connectivity. Also
/// returns the mixed Voronoi vertex areas. Throws DegeneracyError.
void mean_curvature_vectors(const std::vector<Vec3>& x, const std::vector<Face>& faces,
                            const std::vector<bool>& skip, std::vector<Vec3>& H,
                            std::vector<double>& vertex_area);

std::vector<Vec3> vertex_normals(const std::vector<Vec3>& x, const std::vector<Face>& faces);

} // namespace detail

} // namespace mcflab
