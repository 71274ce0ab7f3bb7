#include "mcflab/mesh.hpp"

#include "mcflab/errors.hpp"
#include "mcflab/version.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

namespace mcflab {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces))
{
    for (const Vec3& p : vertices_) {
        if (!p.allFinite()) {
            throw PreconditionError("mesh: non-finite vertex coordinate");
        }
    }
    const int n = static_cast<int>(vertices_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        for (int v : faces_[f]) {
            if (v < 0 || v >= n) {
                throw PreconditionError("mesh: face " + std::to_string(f) +
                                        " references vertex " + std::to_string(v) +
                                        " out of range");
            }
        }
        const Face& t = faces_[f];
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw DegeneracyError("mesh: face " + std::to_string(f) + " repeats a vertex");
        }
    }
    check_areas();
    build_topology();
}

void TriangleMesh::check_areas() const
{
    if (faces_.empty()) {
        return;
    }
    const double diag = bbox_diagonal();
    const double tol = kDegenerateAreaTolerance * diag * diag;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        if (!(face_area(static_cast<int>(f)) > tol)) {
            throw DegeneracyError("mesh: face " + std::to_string(f) + " has (near) zero area");
        }
    }
}

void TriangleMesh::build_topology()
{
    const std::size_t n = vertices_.size();

    std::vector<std::tuple<int, int, int>> half;
    half.reserve(faces_.size() * 3);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int a = faces_[f][k];
            const int b = faces_[f][(k + 1) % 3];
            half.emplace_back(std::min(a, b), std::max(a, b), static_cast<int>(f));
        }
    }
    std::sort(half.begin(), half.end());

    edges_.clear();
    for (std::size_t i = 0; i < half.size();) {
        std::size_t j = i;
        while (j < half.size() && std::get<0>(half[j]) == std::get<0>(half[i]) &&
               std::get<1>(half[j]) == std::get<1>(half[i])) {
            ++j;
        }
        if (j - i > 2) {
            throw TopologyError("mesh: non-manifold edge (" + std::to_string(std::get<0>(half[i])) +
                                "," + std::to_string(std::get<1>(half[i])) + ") is shared by " +
                                std::to_string(j - i) + " faces");
        }
        MeshEdge e;
        e.a = std::get<0>(half[i]);
        e.b = std::get<1>(half[i]);
        e.f0 = std::get<2>(half[i]);
        e.f1 = (j - i == 2) ? std::get<2>(half[i + 1]) : -1;
        if (e.f0 == e.f1) {
            throw TopologyError("mesh: face uses an edge twice");
        }
        edges_.push_back(e);
        i = j;
    }

    std::vector<std::vector<int>> bnbr(n);
    on_boundary_.assign(n, false);
    for (const MeshEdge& e : edges_) {
        if (e.is_boundary()) {
            bnbr[e.a].push_back(e.b);
            bnbr[e.b].push_back(e.a);
            on_boundary_[e.a] = on_boundary_[e.b] = true;
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!bnbr[v].empty() && bnbr[v].size() != 2) {
            throw TopologyError("mesh: boundary loops touch at vertex " + std::to_string(v));
        }
    }

    // Face-consistent direction of boundary edge a->b.
    auto face_has_directed = [this](int f, int a, int b) {
        const Face& t = faces_[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] == a && t[(k + 1) % 3] == b) {
                return true;
            }
        }
        return false;
    };
    auto boundary_face = [this](int a, int b) {
        const auto lo = std::min(a, b), hi = std::max(a, b);
        auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(lo, hi),
                                   [](const MeshEdge& e, const std::pair<int, int>& key) {
                                       return std::make_pair(e.a, e.b) < key;
                                   });
        return it->f0;
    };

    boundary_loops_.clear();
    std::vector<bool> visited(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (!on_boundary_[start] || visited[start]) {
            continue;
        }
        const int s = static_cast<int>(start);
        int next = bnbr[s][0];
        if (!face_has_directed(boundary_face(s, next), s, next)) {
            next = bnbr[s][1];
        }
        std::vector<int> loop{s};
        visited[s] = true;
        int prev = s;
        int cur = next;
        while (cur != s) {
            if (visited[cur]) {
                throw TopologyError("mesh: boundary edges do not close into loops");
            }
            visited[cur] = true;
            loop.push_back(cur);
            const int nxt = bnbr[cur][0] == prev ? bnbr[cur][1] : bnbr[cur][0];
            prev = cur;
            cur = nxt;
        }
        boundary_loops_.push_back(std::move(loop));
    }

    fixed_ = on_boundary_;

    vf_offsets_.assign(n + 1, 0);
    for (const Face& t : faces_) {
        for (int v : t) {
            ++vf_offsets_[v + 1];
        }
    }
    std::partial_sum(vf_offsets_.begin(), vf_offsets_.end(), vf_offsets_.begin());
    vf_faces_.assign(faces_.size() * 3, 0);
    std::vector<int> fill(vf_offsets_.begin(), vf_offsets_.end() - 1);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        for (int v : faces_[f]) {
            vf_faces_[fill[v]++] = static_cast<int>(f);
        }
    }
}

void TriangleMesh::set_fixed_mask(std::vector<bool> mask)
{
    if (mask.size() != vertices_.size()) {
        throw PreconditionError("mesh: fixed mask size does not match vertex count");
    }
    fixed_ = std::move(mask);
}

std::vector<int> TriangleMesh::vertex_faces(int v) const
{
    return {vf_faces_.begin() + vf_offsets_[v], vf_faces_.begin() + vf_offsets_[v + 1]};
}

TriangleMesh TriangleMesh::with_positions(std::vector<Vec3> positions) const
{
    if (positions.size() != vertices_.size()) {
        throw PreconditionError("mesh: position count does not match vertex count");
    }
    TriangleMesh out(*this);
    out.vertices_ = std::move(positions);
    out.check_areas();
    return out;
}

double TriangleMesh::face_area(int f) const
{
    const Face& t = faces_[f];
    return 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
}

double TriangleMesh::area() const
{
    double total = 0.0;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        total += face_area(static_cast<int>(f));
    }
    return total;
}

double TriangleMesh::bbox_diagonal() const
{
    if (vertices_.empty()) {
        return 0.0;
    }
    Vec3 lo = vertices_.front();
    Vec3 hi = vertices_.front();
    for (const Vec3& p : vertices_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

double TriangleMesh::min_edge_length() const
{
    double best = std::numeric_limits<double>::infinity();
    for (const MeshEdge& e : edges_) {
        best = std::min(best, (vertices_[e.a] - vertices_[e.b]).norm());
    }
    return best;
}

double TriangleMesh::max_edge_length() const
{
    double best = 0.0;
    for (const MeshEdge& e : edges_) {
        best = std::max(best, (vertices_[e.a] - vertices_[e.b]).norm());
    }
    return best;
}

Eigen::Matrix3Xd TriangleMesh::loop_points(std::size_t loop) const
{
    const std::vector<int>& idx = boundary_loops_.at(loop);
    Eigen::Matrix3Xd pts(3, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        pts.col(static_cast<Eigen::Index>(i)) = vertices_[idx[i]];
    }
    return pts;
}

TriangleMesh parse_obj(const std::string& text)
{
    std::istringstream in(text);
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::string line;
    int line_no = 0;
    auto fail = [&line_no](const std::string& why) {
        throw ParseError("obj line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream tokens(line);
        std::string tag;
        if (!(tokens >> tag)) {
            continue;
        }
        std::vector<std::string> fields;
        for (std::string f; tokens >> f;) {
            fields.push_back(f);
        }
        if (fields.size() != 3) {
            fail("expected exactly 3 fields after '" + tag + "'");
        }
        if (tag == "v") {
            Vec3 p;
            for (int k = 0; k < 3; ++k) {
                std::size_t used = 0;
                try {
                    p[k] = std::stod(fields[k], &used);
                } catch (const std::exception&) {
                    fail("bad coordinate '" + fields[k] + "'");
                }
                if (used != fields[k].size()) {
                    fail("bad coordinate '" + fields[k] + "'");
                }
            }
            vertices.push_back(p);
        } else if (tag == "f") {
            Face t;
            for (int k = 0; k < 3; ++k) {
                std::size_t used = 0;
                long idx = 0;
                try {
                    idx = std::stol(fields[k], &used);
                } catch (const std::exception&) {
                    fail("bad face index '" + fields[k] + "'");
                }
                if (used != fields[k].size() || idx < 1) {
                    fail("bad face index '" + fields[k] + "'");
                }
                t[k] = static_cast<int>(idx - 1);
            }
            faces.push_back(t);
        } else {
            fail("unsupported statement '" + tag + "'");
        }
    }
    return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open mesh file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_obj(buffer.str());
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << "# mcflab " << kVersion << '\n' << std::setprecision(17);
    for (const Vec3& p : mesh.vertices()) {
        out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    for (const Face& t : mesh.faces()) {
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

namespace {

bool has_directed(const Face& t, int a, int b)
{
    for (int k = 0; k < 3; ++k) {
        if (t[k] == a && t[(k + 1) % 3] == b) {
            return true;
        }
    }
    return false;
}

} // namespace

bool is_orientable(const TriangleMesh& mesh)
{
    const std::size_t nf = mesh.num_faces();
    std::vector<std::vector<std::pair<int, bool>>> adj(nf);
    for (const MeshEdge& e : mesh.edges()) {
        if (e.is_boundary()) {
            continue;
        }
        // Consistent orientations traverse a shared edge in opposite directions.
        const bool same_direction =
            has_directed(mesh.faces()[e.f0], e.a, e.b) == has_directed(mesh.faces()[e.f1], e.a, e.b);
        adj[e.f0].emplace_back(e.f1, same_direction);
        adj[e.f1].emplace_back(e.f0, same_direction);
    }
    std::vector<int> flip(nf, 0);
    std::vector<int> stack;
    for (std::size_t seed = 0; seed < nf; ++seed) {
        if (flip[seed] != 0) {
            continue;
        }
        flip[seed] = 1;
        stack.push_back(static_cast<int>(seed));
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            for (auto [g, same] : adj[f]) {
                const int want = same ? -flip[f] : flip[f];
                if (flip[g] == 0) {
                    flip[g] = want;
                    stack.push_back(g);
                } else if (flip[g] != want) {
                    return false;
                }
            }
        }
    }
    return true;
}

namespace detail {

void mean_curvature_vectors(const std::vector<Vec3>& x, const std::vector<Face>& faces,
                            const std::vector<bool>& skip, std::vector<Vec3>& H,
                            std::vector<double>& vertex_area)
{
    const std::size_t n = x.size();
    std::vector<Vec3> grad(n, Vec3::Zero());
    vertex_area.assign(n, 0.0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        const Vec3 cross = (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]);
        const double twice_area = cross.norm();
        double longest = 0.0;
        for (int k = 0; k < 3; ++k) {
            longest = std::max(longest, (x[t[(k + 1) % 3]] - x[t[k]]).squaredNorm());
        }
        if (!(twice_area > 1e-12 * longest)) {
            if (!skip[t[0]] || !skip[t[1]] || !skip[t[2]]) {
                throw DegeneracyError("mean curvature: collapsed triangle " + std::to_string(f));
            }
            continue;
        }
        std::array<double, 3> cot{};
        bool obtuse = false;
        for (int k = 0; k < 3; ++k) {
            const int i = t[(k + 1) % 3];
            const int j = t[(k + 2) % 3];
            const Vec3 ei = x[i] - x[t[k]];
            const Vec3 ej = x[j] - x[t[k]];
            cot[k] = ei.dot(ej) / twice_area;
            obtuse = obtuse || cot[k] < 0.0;
            const Vec3 d = 0.5 * cot[k] * (x[i] - x[j]);
            grad[i] += d;
            grad[j] -= d;
        }
        // Mixed Voronoi areas: circumcentric cells for non-obtuse triangles,
        // otherwise half the area to the obtuse corner and a quarter to the others.
        const double area = 0.5 * twice_area;
        for (int k = 0; k < 3; ++k) {
            if (obtuse) {
                vertex_area[t[k]] += cot[k] < 0.0 ? 0.5 * area : 0.25 * area;
            } else {
                const int i = t[(k + 1) % 3];
                const int j = t[(k + 2) % 3];
                const double li = (x[i] - x[t[k]]).squaredNorm();
                const double lj = (x[j] - x[t[k]]).squaredNorm();
                vertex_area[t[k]] += (li * cot[(k + 2) % 3] + lj * cot[(k + 1) % 3]) / 8.0;
            }
        }
    }
    H.assign(n, Vec3::Zero());
    for (std::size_t v = 0; v < n; ++v) {
        if (skip[v]) {
            continue;
        }
        if (!(vertex_area[v] > 0.0)) {
            throw DegeneracyError("mean curvature: vertex " + std::to_string(v) +
                                  " has an empty one-ring");
        }
        H[v] = -grad[v] / vertex_area[v];
    }
}

std::vector<Vec3> vertex_normals(const std::vector<Vec3>& x, const std::vector<Face>& faces)
{
    std::vector<Vec3> sum(x.size(), Vec3::Zero());
    for (const Face& t : faces) {
        const Vec3 nf = (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]);
        for (int v : t) {
            sum[v] += sum[v].dot(nf) < 0.0 ? Vec3(-nf) : nf;
        }
    }
    for (Vec3& n : sum) {
        const double len = n.norm();
        n = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    }
    return sum;
}

} // namespace detail

std::vector<std::optional<Vec3>> discrete_mean_curvature(const TriangleMesh& mesh)
{
    std::vector<bool> skip(mesh.num_vertices());
    for (std::size_t v = 0; v < skip.size(); ++v) {
        skip[v] = mesh.is_boundary_vertex(static_cast<int>(v));
    }
    std::vector<Vec3> H;
    std::vector<double> area;
    detail::mean_curvature_vectors(mesh.vertices(), mesh.faces(), skip, H, area);
    std::vector<std::optional<Vec3>> out(mesh.num_vertices());
    for (std::size_t v = 0; v < out.size(); ++v) {
        if (!skip[v]) {
            out[v] = H[v];
        }
    }
    return out;
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh)
{
    return detail::vertex_normals(mesh.vertices(), mesh.faces());
}

} // namespace mcflab
