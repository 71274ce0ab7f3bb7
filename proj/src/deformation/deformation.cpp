#include "mcflab/deformation.hpp"
#include "mcflab/flows.hpp"
#include "mcflab/version.hpp"

#include "../common/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace mcflab {

namespace {

constexpr double kTcSlack = 1e-6;
constexpr int kMaxHalvings = 30;
constexpr int kMaxPieces = 4096;

// Arclength fractions of the vertices, with a closing 1.0 entry.
std::vector<double> arclength_fractions(const DiscreteCurve& c)
{
    std::vector<double> u(static_cast<std::size_t>(c.size()) + 1, 0.0);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        u[i + 1] = u[i] + (c.vertex(i + 1) - c.vertex(i)).norm();
    }
    const double total = u.back();
    for (double& v : u) {
        v /= total;
    }
    u.back() = 1.0;
    return u;
}

Eigen::VectorXd point_at_fraction(const DiscreteCurve& c, const std::vector<double>& u, double s)
{
    if (s >= 1.0) {
        return c.vertex(0);
    }
    const auto it = std::upper_bound(u.begin(), u.end(), s);
    const Eigen::Index i = std::max<Eigen::Index>(0, (it - u.begin()) - 1);
    const double len = u[i + 1] - u[i];
    const double w = len > 0.0 ? std::clamp((s - u[i]) / len, 0.0, 1.0) : 0.0;
    return (1.0 - w) * c.vertex(i) + w * c.vertex(i + 1);
}

std::vector<double> heights(const DiscreteCurve& c) 
{
    const Eigen::VectorXd h = c.vertices().row(c.dimension() - 1).transpose();
    return {h.data(), h.data() + h.size()};
}

// Curve-shortening smoothing of a sample for time eps, on an arclength
// resampling so that short edges do not throttle the time step.
DiscreteCurve smooth(const DiscreteCurve& c, double eps, int vertices)
{
    const DiscreteCurve start = resample_uniform(c, std::max<Eigen::Index>(vertices, c.size()));
    // Simplicity is checked once on the result; per-step checks are quadratic
    // and sharp corners force many small steps.
    CurveFlowOptions opt;
    opt.check_simplicity = false;
    const FlowTrace trace = csf_run(start, eps, opt);
    if (trace.termination != Termination::TimeBudget) {
        throw SimplicityError("smoothing flow stopped early: " + trace.message, 0.0);
    }
    return trace.curves.back().curve;
}

} // namespace

std::string to_string(Stage stage)
{
    switch (stage) {
    case Stage::Polygonalize:
        return "polygonalize";
    case Stage::Truncate:
        return "truncate";
    case Stage::Smooth:
        return "smooth";
    }
    return "unknown";
}

double DeformationPath::worst_tc_increase() const
{
    double worst = 0.0;
    for (std::size_t i = 1; i < tc.size(); ++i) {
        worst = std::max(worst, tc[i] - tc[i - 1]);
    }
    return worst;
}

void DeformationPath::write_audit_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.precision(15);
    out << "# mcflab " << kVersion << " smoothing_time: " << smoothing_time << '\n';
    out << "s,stage,tc,simple,planarity,smoothed_tc,smoothed_simple\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s[i] << ',' << to_string(stage[i]) << ',' << tc[i] << ',' << (simple[i] ? 1 : 0) << ','
            << planarity[i] << ',';
        if (i < smoothed_tc.size()) {
            out << smoothed_tc[i] << ',' << (smoothed_simple[i] ? 1 : 0);
        } else {
            out << ',';
        }
        out << '\n';
    }
}

DiscreteCurve polygonalize_homotopy(const DiscreteCurve& dense, int pieces, double t)
{
    if (pieces < 3) {
        throw PreconditionError("polygonalize: need at least 3 pieces");
    }
    if (dense.size() < 8 * static_cast<Eigen::Index>(pieces)) {
        std::ostringstream msg;
        msg << "polygonalize: curve has " << dense.size() << " vertices, need at least 8N = " << 8 * pieces;
        throw PreconditionError(msg.str());
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw PreconditionError("polygonalize: t must lie in [0,1]");
    }
    if (t == 0.0) {
        return dense;
    }
    const std::vector<double> u = arclength_fractions(dense);
    const double n = pieces;
    const double eps = 1e-12;
    std::vector<Eigen::VectorXd> pts;
    for (int k = 0; k < pieces; ++k) {
        const double a = k / n;
        const double b = (k + t) / n;
        const double c = (k + 1) / n;
        pts.push_back(point_at_fraction(dense, u, a));
        if (b < c - eps) {
            pts.push_back(point_at_fraction(dense, u, b));
            for (Eigen::Index j = 0; j < dense.size(); ++j) {
                if (u[j] > b + eps && u[j] < c - eps) {
                    pts.push_back(dense.vertex(j));
                }
            }
        }
    }
    Eigen::MatrixXd m(dense.dimension(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    DiscreteCurve out(std::move(m));
    require_simple(out);
    return out;
}

DiscreteCurve MilnorPosition::to_original(const DiscreteCurve& positioned) const
{
    Eigen::MatrixXd m = positioned.vertices();
    m.colwise() += shift;
    return DiscreteCurve(Eigen::MatrixXd(rotation.transpose() * (m / scale)));
}

MilnorPosition milnor_position(const DiscreteCurve& polygon, std::uint64_t seed, int budget)
{
    const Eigen::Index dim = polygon.dimension();
    const Eigen::Index n = polygon.size();
    const double diam = polygon.bbox_diagonal();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int attempt = 1; attempt <= budget; ++attempt) {
        Eigen::VectorXd e(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            e(i) = normal(rng);
        }
        if (e.norm() < 1e-6) {
            continue;
        }
        e.normalize();
        const Eigen::VectorXd h = polygon.vertices().transpose() * e;
        int maxima = 0;
        int minima = 0;
        bool generic = true;
        for (Eigen::Index i = 0; i < n && generic; ++i) {
            const double prev = h((i + n - 1) % n);
            const double next = h((i + 1) % n);
            if (std::abs(h(i) - next) <= 1e-12 * diam) {
                generic = false;
            }
            maxima += h(i) > prev && h(i) > next;
            minima += h(i) < prev && h(i) < next;
        }
        if (!generic || maxima != 1 || minima != 1) {
            continue;
        }

        // Reflection taking e to the last axis, made a rotation by flipping
        // the first row.
        Eigen::MatrixXd R = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd target = Eigen::VectorXd::Zero(dim);
        target(dim - 1) = 1.0;
        const Eigen::VectorXd v = e - target;
        if (v.norm() > 1e-12) {
            R -= 2.0 * v * v.transpose() / v.squaredNorm();
            R.row(0) *= -1.0;
        }
        const double scale = 1.0 / (h.maxCoeff() - h.minCoeff());
        Eigen::VectorXd shift = scale * (R * polygon.centroid());
        shift(dim - 1) = scale * h.minCoeff();
        Eigen::MatrixXd m = scale * (R * polygon.vertices());
        m.colwise() -= shift;
        return MilnorPosition{DiscreteCurve(std::move(m)), e, R, scale, shift, attempt};
    }
    const double tc = exterior_angle_sum(polygon);
    std::ostringstream msg;
    msg << "milnor position: no direction with a single maximum and minimum in " << budget
        << " tries (total curvature " << tc << ")";
    throw PositioningError(msg.str(), tc);
}

double triangle_height(const DiscreteCurve& positioned)
{
    std::vector<double> h = heights(positioned);
    std::sort(h.begin(), h.end());
    return h[h.size() - 2];
}

DiscreteCurve milnor_truncation(const DiscreteCurve& positioned, double t)
{
    if (!(t >= 0.0 && t < 1.0)) {
        throw PreconditionError("milnor truncation: t must lie in [0,1)");
    }
    if (t == 0.0) {
        return positioned;
    }
    const std::vector<double> h = heights(positioned);
    const Eigen::Index n = positioned.size();
    bool hit = true;
    while (hit) {
        hit = false;
        for (double v : h) {
            if (std::abs(v - t) < 1e-12) {
                t += 1e-9;
                hit = true;
                break;
            }
        }
    }
    Eigen::Index up = -1;
    Eigen::Index down = -1;
    int crossings = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = h[i] - t;
        const double b = h[(i + 1) % n] - t;
        if (a * b < 0.0) {
            ++crossings;
            (a < 0.0 ? up : down) = i;
        }
    }
    if (crossings != 2 || up < 0 || down < 0) {
        std::ostringstream msg;
        msg << "milnor truncation: level " << t << " meets the curve " << crossings
            << " times; the curve is not in Milnor position";
        throw PreconditionError(msg.str());
    }
    auto cross_point = [&](Eigen::Index i) {
        const double a = h[i];
        const double b = h[(i + 1) % n];
        const double w = (t - a) / (b - a);
        return Eigen::VectorXd((1.0 - w) * positioned.vertex(i) + w * positioned.vertex(i + 1));
    };
    std::vector<Eigen::VectorXd> pts;
    pts.push_back(cross_point(up));
    for (Eigen::Index i = (up + 1) % n; i != (down + 1) % n; i = (i + 1) % n) {
        pts.push_back(positioned.vertex(i));
    }
    pts.push_back(cross_point(down));
    Eigen::MatrixXd m(positioned.dimension(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return DiscreteCurve(std::move(m));
}

DeformationPath deform_to_convex(const DiscreteCurve& curve, double alpha, const DeformOptions& options)
{
    if (!(alpha < 4.0 * std::numbers::pi)) {
        throw PreconditionError("deform: alpha must be below 4 pi");
    }
    if (options.samples_per_stage < 2) {
        throw PreconditionError("deform: need at least 2 samples per stage");
    }
    require_simple(curve);
    const double tc0 = exterior_angle_sum(curve);
    if (tc0 > alpha) {
        std::ostringstream msg;
        msg << "deform: total curvature " << tc0 << " exceeds alpha " << alpha;
        throw PreconditionError(msg.str());
    }
    const int S = options.samples_per_stage;
    DeformationPath path;

    auto append = [&](double s, Stage stage, DiscreteCurve c) {
        path.s.push_back(s);
        path.stage.push_back(stage);
        path.tc.push_back(exterior_angle_sum(c));
        path.simple.push_back(is_simple(c));
        path.planarity.push_back(planarity_deviation(c));
        path.curves.push_back(std::move(c));
    };

    // Polygonalize, doubling the piece count until every sample is simple.
    int pieces = options.pieces;
    std::vector<std::optional<DiscreteCurve>> stage1(static_cast<std::size_t>(S));
    while (true) {
        const int per_edge = static_cast<int>((8 * pieces + curve.size() - 1) / curve.size());
        const DiscreteCurve dense = subdivide_edges(curve, std::max(1, per_edge));
        std::vector<double> failure(static_cast<std::size_t>(S), -1.0);
        detail::parallel_for(static_cast<std::size_t>(S), options.threads, [&](std::size_t k) {
            try {
                stage1[k] = polygonalize_homotopy(dense, pieces, static_cast<double>(k) / (S - 1));
            } catch (const SimplicityError& e) {
                stage1[k].reset();
                failure[k] = e.separation();
            }
        });
        const bool ok = std::all_of(stage1.begin(), stage1.end(), [](const auto& c) { return c.has_value(); });
        if (ok) {
            break;
        }
        pieces *= 2;
        if (pieces > kMaxPieces) {
            throw DeformationError("deform: polygonal approximation is not simple even with " +
                                       std::to_string(pieces / 2) + " pieces",
                                   path);
        }
    }
    path.polygon_vertices = pieces;
    for (int k = 0; k < S; ++k) {
        append(static_cast<double>(k) / (S - 1), Stage::Polygonalize, std::move(*stage1[k]));
    }

    // Truncate to a triangle in Milnor position, reported in the original frame.
    std::optional<MilnorPosition> found;
    try {
        found = milnor_position(path.curves.back(), options.seed);
    } catch (const PositioningError& e) {
        throw DeformationError(e.what(), path);
    }
    const MilnorPosition& mp = *found;
    const double t_end = triangle_height(mp.curve) + 0.5 * (1.0 - triangle_height(mp.curve));
    std::vector<std::optional<DiscreteCurve>> stage2(static_cast<std::size_t>(S));
    detail::parallel_for(static_cast<std::size_t>(S - 1), options.threads, [&](std::size_t i) {
        const double t = t_end * static_cast<double>(i + 1) / (S - 1);
        stage2[i + 1] = mp.to_original(milnor_truncation(mp.curve, t));
    });
    for (int k = 1; k < S; ++k) {
        append(1.0 + static_cast<double>(k) / (S - 1), Stage::Truncate, std::move(*stage2[k]));
        if (!path.simple.back()) {
            throw DeformationError("deform: truncated curve is not simple", path);
        }
    }

    // Smoothing: pick eps so that every smoothed companion stays simple with
    // tc <= alpha, then flow the triangle itself for time eps.
    const DiscreteCurve triangle = path.curves.back();
    // Scaled to the triangle, the smallest curve on the path; anything larger
    // would shrink it to a point.
    const double diam = triangle.bbox_diagonal();
    double eps = 1e-3 * diam * diam;
    const std::size_t raw = path.size();
    for (int attempt = 0;; ++attempt) {
        if (attempt > kMaxHalvings) {
            throw DeformationError("deform: no smoothing time keeps every sample simple", path);
        }
        std::vector<DiscreteCurve> flow3;
        bool ok = true;
        try {
            DiscreteCurve c = resample_uniform(triangle, options.smoothing_vertices);
            for (int k = 1; k < S; ++k) {
                CurveFlowOptions opt;
                opt.check_simplicity = false;
                const FlowTrace tr = csf_run(c, eps / (S - 1), opt);
                if (tr.termination != Termination::TimeBudget) {
                    ok = false;
                    break;
                }
                c = tr.curves.back().curve;
                flow3.push_back(c);
            }
        } catch (const Error&) {
            ok = false;
        }
        const std::size_t total = raw + flow3.size();
        std::vector<std::optional<DiscreteCurve>> comp(total);
        if (ok) {
            detail::parallel_for(total, options.threads, [&](std::size_t i) {
                const DiscreteCurve& c = i < raw ? path.curves[i] : flow3[i - raw];
                try {
                    comp[i] = smooth(c, eps, options.smoothing_vertices);
                } catch (const Error&) {
                    comp[i].reset();
                }
            });
            for (const auto& c : comp) {
                ok = ok && c && is_simple(*c) && exterior_angle_sum(*c) <= alpha + kTcSlack;
            }
        }
        if (!ok) {
            eps *= 0.5;
            continue;
        }
        for (int k = 1; k < S; ++k) {
            append(2.0 + static_cast<double>(k) / (S - 1), Stage::Smooth, flow3[k - 1]);
        }
        for (auto& c : comp) {
            path.smoothed_tc.push_back(exterior_angle_sum(*c));
            path.smoothed_simple.push_back(true);
            path.smoothed.push_back(std::move(*c));
        }
        path.smoothing_time = eps;
        break;
    }

    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!path.simple[i]) {
            throw DeformationError("deform: sample " + std::to_string(i) + " is not simple", path);
        }
        if (path.tc[i] > alpha + kTcSlack) {
            throw DeformationError("deform: sample " + std::to_string(i) + " exceeds alpha", path);
        }
    }
    if (path.worst_tc_increase() > kTcSlack) {
        std::ostringstream msg;
        msg << "deform: total curvature increased by " << path.worst_tc_increase() << " along the path";
        throw InternalError(msg.str());
    }
    if (!is_planar_convex(path.curves.back())) {
        throw DeformationError("deform: endpoint is not planar convex", path);
    }
    return path;
}

} // namespace mcflab
