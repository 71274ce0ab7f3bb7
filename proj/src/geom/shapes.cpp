#include "mcflab/shapes.hpp"

#include "mcflab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace mcflab::shapes {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename F>
DiscreteCurve sample_curve(int n, F&& f)
{
    Eigen::MatrixXd m(3, n);
    for (int i = 0; i < n; ++i) {
        m.col(i) = f(2.0 * kPi * i / n);
    }
    return DiscreteCurve(std::move(m));
}

// Triangulates the band between two concentric rings with possibly
// different vertex counts; both rings start at angle 0 and run CCW.
void zip_rings(const std::vector<int>& inner, const std::vector<int>& outer,
               std::vector<Face>& faces)
{
    const std::size_t ni = inner.size();
    const std::size_t no = outer.size();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ni || j < no) {
        const double next_inner = static_cast<double>(i + 1) / ni;
        const double next_outer = static_cast<double>(j + 1) / no;
        if (j < no && (i == ni || next_outer <= next_inner)) {
            faces.push_back({inner[i % ni], outer[j], outer[(j + 1) % no]});
            ++j;
        } else {
            faces.push_back({inner[i], outer[j % no], inner[(i + 1) % ni]});
            ++i;
        }
    }
}

} // namespace

DiscreteCurve circle(double radius, int n, const Vec3& center)
{
    return sample_curve(n, [&](double s) {
        return Eigen::VectorXd(center + Vec3(radius * std::cos(s), radius * std::sin(s), 0.0));
    });
}

DiscreteCurve ellipse(double a, double b, int n)
{
    return sample_curve(n, [&](double s) {
        return Eigen::VectorXd(Vec3(a * std::cos(s), b * std::sin(s), 0.0));
    });
}

DiscreteCurve circle2d(double radius, int n)
{
    Eigen::MatrixXd m(2, n);
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * kPi * i / n;
        m.col(i) << radius * std::cos(s), radius * std::sin(s);
    }
    return DiscreteCurve(std::move(m));
}

DiscreteCurve trefoil(int n)
{
    return sample_curve(n, [](double s) {
        const double r = 2.0 + std::cos(3.0 * s);
        return Eigen::VectorXd(Vec3(r * std::cos(2.0 * s), r * std::sin(2.0 * s), std::sin(3.0 * s)));
    });
}

DiscreteCurve saddle(double height, int k, int n)
{
    return sample_curve(n, [&](double s) {
        return Eigen::VectorXd(Vec3(std::cos(s), std::sin(s), height * std::cos(k * s)));
    });
}

DiscreteCurve star(double amplitude, int k, int n)
{
    return sample_curve(n, [&](double s) {
        const double r = 1.0 + amplitude * std::cos(k * s);
        return Eigen::VectorXd(Vec3(r * std::cos(s), r * std::sin(s), 0.0));
    });
}

DiscreteCurve random_smooth(std::uint64_t seed, int n)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::array<double, 4> ra{}, rp{}, za{}, zp{};
    for (int k = 0; k < 4; ++k) {
        ra[k] = 0.1 * unit(rng);
        rp[k] = 2.0 * kPi * unit(rng);
        za[k] = 0.5 * unit(rng);
        zp[k] = 2.0 * kPi * unit(rng);
    }
    const double scale = 0.5 + unit(rng);
    return sample_curve(n, [&](double s) {
        double r = 1.0;
        double z = 0.0;
        for (int k = 0; k < 4; ++k) {
            r += ra[k] * std::cos((k + 2) * s + rp[k]);
            z += za[k] * std::cos((k + 1) * s + zp[k]);
        }
        return Eigen::VectorXd(scale * Vec3(r * std::cos(s), r * std::sin(s), z));
    });
}

DiscreteCurve twisted_quadrilateral(double height, int points_per_side)
{
    const std::array<Vec3, 4> corners{Vec3(1, 1, height), Vec3(-1, 1, -height),
                                      Vec3(-1, -1, height), Vec3(1, -1, -height)};
    Eigen::MatrixXd m(3, 4 * points_per_side);
    for (int c = 0; c < 4; ++c) {
        for (int k = 0; k < points_per_side; ++k) {
            const double u = static_cast<double>(k) / points_per_side;
            m.col(c * points_per_side + k) = (1.0 - u) * corners[c] + u * corners[(c + 1) % 4];
        }
    }
    return DiscreteCurve(std::move(m));
}

TriangleMesh disk(double radius, int boundary_vertices, int rings)
{
    if (rings < 1 || boundary_vertices < 3) {
        throw PreconditionError("disk: need at least one ring and three boundary vertices");
    }
    std::vector<Vec3> v{Vec3::Zero()};
    std::vector<Face> faces;
    std::vector<int> previous;
    for (int k = 1; k <= rings; ++k) {
        const double r = radius * k / rings;
        const int count =
            k == rings ? boundary_vertices
                       : std::max(6, static_cast<int>(std::lround(double(boundary_vertices) * k / rings)));
        std::vector<int> ring;
        for (int i = 0; i < count; ++i) {
            const double s = 2.0 * kPi * i / count;
            ring.push_back(static_cast<int>(v.size()));
            v.emplace_back(r * std::cos(s), r * std::sin(s), 0.0);
        }
        if (k == 1) {
            for (int i = 0; i < count; ++i) {
                faces.push_back({0, ring[i], ring[(i + 1) % count]});
            }
        } else {
            zip_rings(previous, ring, faces);
        }
        previous = std::move(ring);
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh perturbed_disk(double amplitude, int boundary_vertices, int rings)
{
    const TriangleMesh flat = disk(1.0, boundary_vertices, rings);
    std::vector<Vec3> v = flat.vertices();
    for (Vec3& p : v) {
        const double r2 = p.x() * p.x() + p.y() * p.y();
        p.z() = amplitude * (1.0 - r2) * (1.0 + p.x());
    }
    return TriangleMesh(std::move(v), flat.faces());
}

TriangleMesh annulus(double inner, double outer, int segments, int rings)
{
    std::vector<Vec3> v;
    std::vector<Face> faces;
    std::vector<int> previous;
    for (int k = 0; k <= rings; ++k) {
        const double r = inner + (outer - inner) * k / rings;
        std::vector<int> ring;
        for (int i = 0; i < segments; ++i) {
            const double s = 2.0 * kPi * i / segments;
            ring.push_back(static_cast<int>(v.size()));
            v.emplace_back(r * std::cos(s), r * std::sin(s), 0.0);
        }
        if (k > 0) {
            zip_rings(previous, ring, faces);
        }
        previous = std::move(ring);
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh icosphere(double radius, int subdivisions, const Vec3& center)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<Face> faces{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (Vec3& p : v) {
        p.normalize();
    }
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) {
                return it->second;
            }
            v.push_back((v[a] + v[b]).normalized());
            const int id = static_cast<int>(v.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Face> next;
        next.reserve(faces.size() * 4);
        for (const Face& f : faces) {
            const int a = mid(f[0], f[1]);
            const int b = mid(f[1], f[2]);
            const int c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    for (Vec3& p : v) {
        p = center + radius * p;
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh cylinder(double radius, double half_length, int segments, int rows)
{
    std::vector<Vec3> v;
    std::vector<Face> faces;
    for (int r = 0; r <= rows; ++r) {
        const double z = -half_length + 2.0 * half_length * r / rows;
        for (int i = 0; i < segments; ++i) {
            const double s = 2.0 * kPi * i / segments;
            v.emplace_back(radius * std::cos(s), radius * std::sin(s), z);
        }
    }
    auto id = [segments](int r, int i) { return r * segments + (i % segments); };
    for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < segments; ++i) {
            faces.push_back({id(r, i), id(r, i + 1), id(r + 1, i + 1)});
            faces.push_back({id(r, i), id(r + 1, i + 1), id(r + 1, i)});
        }
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh square(double side, int cells)
{
    std::vector<Vec3> v;
    std::vector<Face> faces;
    for (int j = 0; j <= cells; ++j) {
        for (int i = 0; i <= cells; ++i) {
            v.emplace_back(side * (double(i) / cells - 0.5), side * (double(j) / cells - 0.5), 0.0);
        }
    }
    auto id = [cells](int i, int j) { return j * (cells + 1) + i; };
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh half_disk(double radius, double inner, int angular)
{
    const int rings =
        std::max(1, static_cast<int>(std::ceil(std::log(radius / inner) / std::log1p(kPi / angular))));
    const double q = std::pow(radius / inner, 1.0 / rings);
    std::vector<Vec3> v{Vec3::Zero()};
    std::vector<Face> faces;
    auto id = [angular](int k, int j) { return 1 + k * (angular + 1) + j; };
    for (int k = 0; k <= rings; ++k) {
        const double r = inner * std::pow(q, k);
        for (int j = 0; j <= angular; ++j) {
            const double s = -kPi / 2 + kPi * j / angular;
            v.emplace_back(r * std::cos(s), r * std::sin(s), 0.0);
        }
    }
    for (int j = 0; j < angular; ++j) {
        faces.push_back({0, id(0, j), id(0, j + 1)});
    }
    for (int k = 0; k < rings; ++k) {
        for (int j = 0; j < angular; ++j) {
            faces.push_back({id(k, j), id(k + 1, j), id(k + 1, j + 1)});
            faces.push_back({id(k, j), id(k + 1, j + 1), id(k, j + 1)});
        }
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh twisted_band(double radius, double half_width, int half_twists, int segments,
                          int across)
{
    if (across < 2 || segments < 3) {
        throw PreconditionError("twisted_band: need at least 2 vertices across and 3 segments");
    }
    std::vector<Vec3> v;
    for (int i = 0; i < segments; ++i) {
        const double u = 2.0 * kPi * i / segments;
        const double c = std::cos(0.5 * half_twists * u);
        const double s = std::sin(0.5 * half_twists * u);
        for (int j = 0; j < across; ++j) {
            const double w = -half_width + 2.0 * half_width * j / (across - 1);
            v.emplace_back((radius + w * c) * std::cos(u), (radius + w * c) * std::sin(u), w * s);
        }
    }
    const bool flips = half_twists % 2 != 0;
    auto id = [&](int i, int j) {
        if (i == segments) {
            return flips ? (across - 1 - j) : j;
        }
        return i * across + j;
    };
    std::vector<Face> faces;
    for (int i = 0; i < segments; ++i) {
        for (int j = 0; j + 1 < across; ++j) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh punctured_torus(double major, double minor, int nu, int nv)
{
    std::vector<Vec3> v;
    for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * kPi * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double w = 2.0 * kPi * j / nv;
            v.emplace_back((major + minor * std::cos(w)) * std::cos(u),
                           (major + minor * std::cos(w)) * std::sin(u), minor * std::sin(w));
        }
    }
    auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
    std::vector<Face> faces;
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            if (i == 0 && j == 0) {
                continue;
            }
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh subdivide(const TriangleMesh& mesh)
{
    std::vector<Vec3> v = mesh.vertices();
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        if (auto it = midpoint.find(key); it != midpoint.end()) {
            return it->second;
        }
        v.push_back(0.5 * (v[a] + v[b]));
        const int id = static_cast<int>(v.size()) - 1;
        midpoint.emplace(key, id);
        return id;
    };
    std::vector<Face> faces;
    faces.reserve(mesh.num_faces() * 4);
    for (const Face& f : mesh.faces()) {
        const int a = mid(f[0], f[1]);
        const int b = mid(f[1], f[2]);
        const int c = mid(f[2], f[0]);
        faces.push_back({f[0], a, c});
        faces.push_back({f[1], b, a});
        faces.push_back({f[2], c, b});
        faces.push_back({a, b, c});
    }
    return TriangleMesh(std::move(v), std::move(faces));
}

TriangleMesh rigid_motion(const TriangleMesh& mesh, const Eigen::Matrix3d& rotation,
                          const Vec3& shift)
{
    std::vector<Vec3> v = mesh.vertices();
    for (Vec3& p : v) {
        p = rotation * p + shift;
    }
    return TriangleMesh(std::move(v), mesh.faces());
}

} // namespace mcflab::shapes
