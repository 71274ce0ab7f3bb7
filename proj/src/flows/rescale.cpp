#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcflab {

namespace {

constexpr std::size_t kFitWindow = 20;
constexpr double kResidualRadius = 3.0;
constexpr double kBoundaryFactor = 5.0;

constexpr double kGoodQuality = 0.5;

// 4 sqrt(3) area / (sum of squared edges): 1 for equilateral triangles.
double min_face_quality(const TriangleMesh& mesh)
{
    double q = 1.0;
    const auto& x = mesh.vertices();
    for (const Face& f : mesh.faces()) {
        const Vec3 a = x[f[1]] - x[f[0]];
        const Vec3 b = x[f[2]] - x[f[0]];
        const Vec3 c = x[f[2]] - x[f[1]];
        const double s = a.squaredNorm() + b.squaredNorm() + c.squaredNorm();
        q = std::min(q, 2.0 * std::sqrt(3.0) * a.cross(b).norm() / s);
    }
    return q;
}

double distance_to_boundary(const TriangleMesh& mesh, const Vec3& p)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < mesh.boundary_loops().size(); ++l) {
        const Eigen::Matrix3Xd pts = mesh.loop_points(l);
        const Eigen::Index n = pts.cols();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vec3 a = pts.col(i);
            const Vec3 ab = Vec3(pts.col((i + 1) % n)) - a;
            const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
            best = std::min(best, (a + s * ab - p).norm());
        }
    }
    return best;
}

} // namespace

ShrinkerCandidate detect_and_rescale(const FlowTrace& trace)
{
    if (trace.termination != Termination::Singularity || trace.meshes.empty()) {
        throw PreconditionError("detect_and_rescale: trace did not end with a singularity flag (ended by " +
                                to_string(trace.termination) + ")");
    }

    // Fit 1/max|H|^2 = c0 + c1 t on kFitWindow samples spread over
    // the tail where max|H| is within a factor 8 of its final value. Steps
    // shrink with the curvature, so the last raw steps span too little time.
    const std::size_t n = trace.times.size();
    const double h_final = trace.max_curvature.empty() ? 0.0 : trace.max_curvature.back();
    std::size_t first = n;
    while (first > 0 && trace.max_curvature[first - 1] >= h_final / 8.0) {
        --first;
    }
    std::vector<std::size_t> picks;
    if (n > first) {
        const std::size_t span = n - 1 - first;
        const std::size_t count = std::min(kFitWindow, span + 1);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t i = count == 1 ? n - 1 : first + (span * k) / (count - 1);
            if (picks.empty() || picks.back() != i) {
                picks.push_back(i);
            }
        }
    }
    // Theil-Sen fit: remeshing leaves isolated spikes in max|H|.
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t i : picks) {
        const double h = trace.max_curvature[i];
        if (h > 0.0) {
            ts.push_back(trace.times[i] - trace.times.back());
            ys.push_back(1.0 / (h * h));
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    double T = std::numeric_limits<double>::quiet_NaN();
    if (ts.size() >= 3) {
        std::vector<double> slopes;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            for (std::size_t j = i + 1; j < ts.size(); ++j) {
                if (ts[j] > ts[i]) {
                    slopes.push_back((ys[j] - ys[i]) / (ts[j] - ts[i]));
                }
            }
        }
        if (!slopes.empty()) {
            const double c1 = median(slopes);
            std::vector<double> offsets;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                offsets.push_back(ys[i] - c1 * ts[i]);
            }
            const double c0 = median(offsets);
            if (c1 < 0.0) {
                T = trace.times.back() - c0 / c1;
            }
        }
    }

    // The last snapshot before T whose triangles are still well shaped.
    std::size_t chosen = trace.meshes.size() - 1;
    if (std::isfinite(T)) {
        for (std::size_t k = trace.meshes.size(); k-- > 0;) {
            if (trace.meshes[k].t < T && min_face_quality(trace.meshes[k].mesh) >= kGoodQuality) {
                chosen = k;
                break;
            }
        }
    }
    const MeshSnapshot& last = trace.meshes[chosen];
    const TriangleMesh& mesh = last.mesh;

    ShrinkerCandidate cand;
    cand.snapshot_time = last.t;
    cand.orientable = is_orientable(mesh);

    std::vector<Vec3> H;
    std::vector<double> area;
    std::vector<bool> skip(mesh.num_vertices());
    for (std::size_t i = 0; i < skip.size(); ++i) {
        skip[i] = mesh.is_boundary_vertex(static_cast<int>(i));
    }
    detail::mean_curvature_vectors(mesh.vertices(), mesh.faces(), skip, H, area);
    double hmax = 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (!skip[i] && H[i].norm() > hmax) {
            hmax = H[i].norm();
            argmax = i;
        }
    }

    if (!(T > last.t) || !std::isfinite(T)) {
        cand.mesh = mesh;
        cand.center = mesh.vertices()[argmax];
        cand.singular_time = last.t;
        cand.rescale_factor = 1.0;
        cand.residual_sup = std::numeric_limits<double>::infinity();
        cand.boundary_flag = distance_to_boundary(mesh, cand.center) == 0.0;
        return cand;
    }

    // Each high-curvature vertex x predicts the shrinker centre x + 2 (T - t) H.
    const double tau = T - last.t;
    Vec3 p = Vec3::Zero();
    int count = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (!skip[i] && H[i].norm() >= 0.9 * hmax) {
            p += mesh.vertices()[i] + 2.0 * tau * H[i];
            ++count;
        }
    }
    p /= count;

    const double scale = 1.0 / std::sqrt(tau);
    std::vector<Vec3> y = mesh.vertices();
    for (Vec3& v : y) {
        v = scale * (v - p);
    }
    cand.mesh = mesh.with_positions(std::move(y));
    cand.center = p;
    cand.singular_time = T;
    cand.rescale_factor = scale;
    const ShrinkerResidual r = shrinker_residual(cand.mesh, kResidualRadius);
    bool any = false;
    for (const auto& v : r.per_vertex) {
        any = any || v.has_value();
    }
    cand.residual_sup = any ? r.sup : std::numeric_limits<double>::infinity();
    cand.boundary_flag = distance_to_boundary(mesh, p) < kBoundaryFactor * std::sqrt(tau);
    return cand;
}

} // namespace mcflab
