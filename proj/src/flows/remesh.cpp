#include "mcflab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <unordered_map>

namespace mcflab::detail {

namespace {

constexpr double kSplitRatio = 2.5;
constexpr double kCollapseRatio = 0.2;
// Split edges longer than kResolution times the local curvature radius, or
// longer than kAnisotropicResolution times it when much longer than their
// neighbours.
constexpr double kResolution = 0.8;
constexpr double kAnisotropicResolution = 0.3;

std::uint64_t edge_key(int a, int b)
{
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct Work {
    std::vector<Vec3> x;
    std::vector<Face> f;
    std::vector<bool> fixed;
    std::vector<bool> anchored; // fixed or on the boundary
    std::vector<bool> face_alive;
    std::vector<bool> vertex_alive;

    std::unordered_map<std::uint64_t, std::vector<int>> edge_faces() const
    {
        std::unordered_map<std::uint64_t, std::vector<int>> map;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!face_alive[i]) {
                continue;
            }
            for (int k = 0; k < 3; ++k) {
                map[edge_key(f[i][k], f[i][(k + 1) % 3])].push_back(static_cast<int>(i));
            }
        }
        return map;
    }

    Vec3 normal(const Face& g) const { return (x[g[1]] - x[g[0]]).cross(x[g[2]] - x[g[0]]); }
    double area(const Face& g) const { return 0.5 * normal(g).norm(); }
    double length(int a, int b) const { return (x[a] - x[b]).norm(); }
};

int opposite(const Face& g, int a, int b)
{
    for (int v : g) {
        if (v != a && v != b) {
            return v;
        }
    }
    return -1;
}

double angle_at(const Work& w, int apex, int a, int b)
{
    const Vec3 u = w.x[a] - w.x[apex];
    const Vec3 v = w.x[b] - w.x[apex];
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

// Shortest edge of the faces around edge (a,b), excluding (a,b) itself.
double shortest_other(const Work& w, const std::vector<int>& faces, int a, int b)
{
    double s = std::numeric_limits<double>::infinity();
    for (int fi : faces) {
        const int c = opposite(w.f[fi], a, b);
        s = std::min({s, w.length(a, c), w.length(b, c)});
    }
    return s;
}

bool collapse_pass(Work& w, double tiny_area)
{
    bool changed = false;
    auto map = w.edge_faces();
    std::vector<std::vector<int>> vf(w.x.size());
    for (std::size_t i = 0; i < w.f.size(); ++i) {
        if (w.face_alive[i]) {
            for (int v : w.f[i]) {
                vf[v].push_back(static_cast<int>(i));
            }
        }
    }
    std::vector<std::uint64_t> keys;
    for (const auto& entry : map) {
        keys.push_back(entry.first);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<bool> touched(w.x.size(), false);
    for (std::uint64_t key : keys) {
        const std::vector<int>& faces = map[key];
        if (faces.size() != 2) {
            continue;
        }
        const int a0 = static_cast<int>(key >> 32);
        const int b0 = static_cast<int>(key & 0xffffffffu);
        if (touched[a0] || touched[b0] || !w.vertex_alive[a0] || !w.vertex_alive[b0]) {
            continue;
        }
        if (!w.face_alive[faces[0]] || !w.face_alive[faces[1]]) {
            continue;
        }
        if (w.length(a0, b0) >= kCollapseRatio * shortest_other(w, faces, a0, b0)) {
            continue;
        }
        if (w.anchored[a0] && w.anchored[b0]) {
            continue;
        }
        // Keep `keep`, remove `gone`.
        int keep = a0;
        int gone = b0;
        if (w.anchored[b0]) {
            std::swap(keep, gone);
        }
        const Vec3 target = w.anchored[keep] ? w.x[keep] : Vec3(0.5 * (w.x[a0] + w.x[b0]));

        // Link condition.
        std::set<int> nk;
        std::set<int> ng;
        for (int fi : vf[keep]) {
            for (int v : w.f[fi]) {
                nk.insert(v);
            }
        }
        for (int fi : vf[gone]) {
            for (int v : w.f[fi]) {
                ng.insert(v);
            }
        }
        std::set<int> common;
        for (int v : nk) {
            if (v != keep && v != gone && ng.count(v)) {
                common.insert(v);
            }
        }
        const std::set<int> expected{opposite(w.f[faces[0]], a0, b0), opposite(w.f[faces[1]], a0, b0)};
        if (common != expected) {
            continue;
        }

        // Trial geometry: every surviving face must keep its orientation and
        // the local area must not grow.
        std::set<int> ring(vf[keep].begin(), vf[keep].end());
        ring.insert(vf[gone].begin(), vf[gone].end());
        double old_area = 0.0;
        double new_area = 0.0;
        bool ok = true;
        std::vector<std::pair<int, Face>> updates;
        for (int fi : ring) {
            const Face& g = w.f[fi];
            old_area += w.area(g);
            if (fi == faces[0] || fi == faces[1]) {
                continue;
            }
            Face h = g;
            for (int& v : h) {
                if (v == gone) {
                    v = keep;
                }
            }
            const Vec3 saved = w.x[keep];
            w.x[keep] = target;
            const Vec3 n_new = w.normal(h);
            w.x[keep] = saved;
            const Vec3 n_old = w.normal(g);
            if (0.5 * n_new.norm() <= tiny_area || n_new.normalized().dot(n_old.normalized()) < 0.2) {
                ok = false;
                break;
            }
            new_area += 0.5 * n_new.norm();
            updates.emplace_back(fi, h);
        }
        if (!ok || new_area > old_area * (1.0 + 1e-12)) {
            continue;
        }
        w.x[keep] = target;
        for (const auto& [fi, h] : updates) {
            w.f[fi] = h;
        }
        w.face_alive[faces[0]] = false;
        w.face_alive[faces[1]] = false;
        w.vertex_alive[gone] = false;
        for (int v : nk) {
            touched[v] = true;
        }
        for (int v : ng) {
            touched[v] = true;
        }
        changed = true;
    }
    return changed;
}

bool split_pass(Work& w, const std::vector<double>& curvature, std::size_t max_vertices)
{
    auto map = w.edge_faces();
    struct Candidate {
        double length;
        int a;
        int b;
    };
    std::vector<Candidate> candidates;
    for (const auto& [key, faces] : map) {
        if (faces.size() != 2) {
            continue;
        }
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffu);
        const double len = w.length(a, b);
        const double k = std::max(curvature[a], curvature[b]);
        if (len * k > kResolution || (len * k > kAnisotropicResolution && len > kSplitRatio * shortest_other(w, faces, a, b))) {
            candidates.push_back({len, a, b});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& p, const Candidate& q) {
        return p.length > q.length || (p.length == q.length && edge_key(p.a, p.b) < edge_key(q.a, q.b));
    });
    std::vector<bool> face_touched(w.f.size(), false);
    bool changed = false;
    for (const Candidate& c : candidates) {
        if (w.x.size() >= max_vertices) {
            break;
        }
        const std::vector<int>& faces = map[edge_key(c.a, c.b)];
        if (face_touched[faces[0]] || face_touched[faces[1]]) {
            continue;
        }
        const int m = static_cast<int>(w.x.size());
        w.x.push_back(0.5 * (w.x[c.a] + w.x[c.b]));
        w.fixed.push_back(false);
        w.anchored.push_back(false);
        w.vertex_alive.push_back(true);
        for (int fi : faces) {
            Face g = w.f[fi];
            // Rotate so the split edge is g[0]-g[1] in either direction.
            while (!((g[0] == c.a && g[1] == c.b) || (g[0] == c.b && g[1] == c.a))) {
                std::rotate(g.begin(), g.begin() + 1, g.end());
            }
            w.f[fi] = {g[0], m, g[2]};
            w.f.push_back({m, g[1], g[2]});
            w.face_alive.push_back(true);
            face_touched[fi] = true;
        }
        face_touched.resize(w.f.size(), true);
        changed = true;
    }
    return changed;
}

bool flip_pass(Work& w, double tiny_area)
{
    auto map = w.edge_faces();
    std::vector<std::uint64_t> keys;
    keys.reserve(map.size());
    for (const auto& [key, faces] : map) {
        if (faces.size() == 2) {
            keys.push_back(key);
        }
    }
    std::sort(keys.begin(), keys.end());
    std::vector<bool> face_touched(w.f.size(), false);
    bool changed = false;
    for (std::uint64_t key : keys) {
        const std::vector<int>& faces = map[key];
        const int f1 = faces[0];
        const int f2 = faces[1];
        if (face_touched[f1] || face_touched[f2]) {
            continue;
        }
        Face g = w.f[f1];
        const int ka = static_cast<int>(key >> 32);
        const int kb = static_cast<int>(key & 0xffffffffu);
        while (!((g[0] == ka && g[1] == kb) || (g[0] == kb && g[1] == ka))) {
            std::rotate(g.begin(), g.begin() + 1, g.end());
        }
        const int a = g[0];
        const int b = g[1];
        const int c = g[2];
        const int d = opposite(w.f[f2], a, b);
        if (c == d || map.count(edge_key(c, d))) {
            continue;
        }
        if (angle_at(w, c, a, b) + angle_at(w, d, a, b) <= std::numbers::pi + 1e-9) {
            continue;
        }
        const Face n1{a, d, c};
        const Face n2{b, c, d};
        const double old_area = w.area(w.f[f1]) + w.area(w.f[f2]);
        const double new_area = w.area(n1) + w.area(n2);
        if (w.area(n1) <= tiny_area || w.area(n2) <= tiny_area || new_area > old_area) {
            continue;
        }
        if (std::abs(w.normal(n1).normalized().dot(w.normal(n2).normalized())) < 0.5) {
            continue;
        }
        w.f[f1] = n1;
        w.f[f2] = n2;
        face_touched[f1] = true;
        face_touched[f2] = true;
        changed = true;
    }
    return changed;
}

} // namespace

TriangleMesh remesh(const TriangleMesh& mesh, const std::vector<double>& curvature, std::size_t max_vertices)
{
    Work w;
    w.x = mesh.vertices();
    w.f = mesh.faces();
    w.fixed = mesh.fixed_mask();
    w.anchored.resize(w.x.size());
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        w.anchored[i] = w.fixed[i] || mesh.is_boundary_vertex(static_cast<int>(i));
    }
    w.face_alive.assign(w.f.size(), true);
    w.vertex_alive.assign(w.x.size(), true);
    const double diag = mesh.bbox_diagonal();
    const double tiny_area = 1e-12 * diag * diag;

    // Anchored vertices carry no curvature of their own; borrow the largest
    // value among their neighbours.
    std::vector<double> k = curvature;
    for (const Face& f : w.f) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (w.anchored[f[i]]) {
                    k[f[i]] = std::max(k[f[i]], curvature[f[j]]);
                }
            }
        }
    }
    collapse_pass(w, tiny_area);
    split_pass(w, k, max_vertices);
    for (int pass = 0; pass < 5; ++pass) {
        if (!flip_pass(w, tiny_area)) {
            break;
        }
    }

    std::vector<int> remap(w.x.size(), -1);
    std::vector<Vec3> x;
    std::vector<bool> fixed;
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        if (w.vertex_alive[i]) {
            remap[i] = static_cast<int>(x.size());
            x.push_back(w.x[i]);
            fixed.push_back(w.fixed[i]);
        }
    }
    std::vector<Face> faces;
    for (std::size_t i = 0; i < w.f.size(); ++i) {
        if (w.face_alive[i]) {
            faces.push_back({remap[w.f[i][0]], remap[w.f[i][1]], remap[w.f[i][2]]});
        }
    }
    TriangleMesh out(std::move(x), std::move(faces));
    out.set_fixed_mask(std::move(fixed));
    return out;
}

} // namespace mcflab::detail
