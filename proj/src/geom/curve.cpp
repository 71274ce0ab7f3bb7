#include "mcflab/curve.hpp"

#include "mcflab/errors.hpp"
#include "mcflab/version.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace mcflab {

DiscreteCurve::DiscreteCurve(Eigen::MatrixXd vertices) : vertices_(std::move(vertices))
{
    if (vertices_.rows() < 2) {
        throw PreconditionError("curve: ambient dimension must be at least 2");
    }
    if (vertices_.cols() < 3) {
        throw PreconditionError("curve: a closed curve needs at least 3 vertices");
    }
    if (!vertices_.allFinite()) {
        throw PreconditionError("curve: non-finite vertex coordinate");
    }
    for (Eigen::Index i = 0; i < size(); ++i) {
        if ((vertex(i + 1) - vertex(i)).squaredNorm() == 0.0) {
            throw DegeneracyError("curve: zero-length edge at vertex " + std::to_string(i));
        }
    }
}

DiscreteCurve DiscreteCurve::from_points(const std::vector<Eigen::VectorXd>& points)
{
    if (points.empty()) {
        throw PreconditionError("curve: no vertices");
    }
    Eigen::MatrixXd m(points.front().size(), static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != m.rows()) {
            throw PreconditionError("curve: vertices of mixed dimension");
        }
        m.col(static_cast<Eigen::Index>(i)) = points[i];
    }
    return DiscreteCurve(std::move(m));
}

double DiscreteCurve::length() const
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) {
        total += (vertex(i + 1) - vertex(i)).norm();
    }
    return total;
}

double DiscreteCurve::min_edge_length() const
{
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < size(); ++i) {
        best = std::min(best, (vertex(i + 1) - vertex(i)).norm());
    }
    return best;
}

double DiscreteCurve::max_edge_length() const
{
    double best = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) {
        best = std::max(best, (vertex(i + 1) - vertex(i)).norm());
    }
    return best;
}

double DiscreteCurve::bbox_diagonal() const
{
    return (vertices_.rowwise().maxCoeff() - vertices_.rowwise().minCoeff()).norm();
}

Eigen::VectorXd DiscreteCurve::centroid() const { return vertices_.rowwise().mean(); }

DiscreteCurve DiscreteCurve::reversed() const
{
    return DiscreteCurve(vertices_.rowwise().reverse());
}

DiscreteCurve DiscreteCurve::embedded(Eigen::Index dim) const
{
    if (dim < dimension()) {
        throw PreconditionError("curve: cannot embed into a lower dimension");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, size());
    m.topRows(dimension()) = vertices_;
    return DiscreteCurve(std::move(m));
}

namespace {

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const Eigen::VectorXd ua = a.normalized();
    const Eigen::VectorXd ub = b.normalized();
    return 2.0 * std::atan2((ua - ub).norm(), (ua + ub).norm());
}

} // namespace

double turning_angle(const DiscreteCurve& curve, Eigen::Index i)
{
    return angle_between(curve.edge(i - 1), curve.edge(i));
}

double exterior_angle_sum(const DiscreteCurve& curve)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        total += turning_angle(curve, i);
    }
    return total;
}

double segment_distance(const Eigen::Ref<const Eigen::VectorXd>& p0,
                        const Eigen::Ref<const Eigen::VectorXd>& p1,
                        const Eigen::Ref<const Eigen::VectorXd>& q0,
                        const Eigen::Ref<const Eigen::VectorXd>& q1)
{
    const Eigen::VectorXd d1 = p1 - p0;
    const Eigen::VectorXd d2 = q1 - q0;
    const Eigen::VectorXd r = p0 - q0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0) {
        return r.norm();
    }
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double min_nonadjacent_separation(const DiscreteCurve& curve, double cutoff)
{
    const Eigen::Index n = curve.size();
    if (n <= 3) {
        return std::numeric_limits<double>::infinity();
    }
    const Eigen::Index dim = curve.dimension();
    Eigen::MatrixXd lo(dim, n);
    Eigen::MatrixXd hi(dim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lo.col(i) = curve.vertex(i).cwiseMin(curve.vertex(i + 1));
        hi.col(i) = curve.vertex(i).cwiseMax(curve.vertex(i + 1));
    }
    double best = cutoff;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) {
                continue;
            }
            const Eigen::VectorXd gap =
                (lo.col(j) - hi.col(i)).cwiseMax(lo.col(i) - hi.col(j)).cwiseMax(0.0);
            if (gap.norm() >= best) {
                continue;
            }
            best = std::min(best, segment_distance(curve.vertex(i), curve.vertex(i + 1),
                                                   curve.vertex(j), curve.vertex(j + 1)));
        }
    }
    return best;
}

bool is_simple(const DiscreteCurve& curve, double rel_tol)
{
    const double tol = rel_tol * curve.bbox_diagonal();
    return min_nonadjacent_separation(curve, 2.0 * tol) > tol;
}

void require_simple(const DiscreteCurve& curve, double rel_tol)
{
    const double tol = rel_tol * curve.bbox_diagonal();
    const double sep = min_nonadjacent_separation(curve, 2.0 * tol);
    if (!(sep > tol)) {
        std::ostringstream msg;
        msg << "curve is not simple: non-adjacent edges " << sep << " apart (tolerance " << tol
            << ")";
        throw SimplicityError(msg.str(), sep);
    }
}

namespace {

// Principal axes of the vertex cloud, largest variance first.
Eigen::MatrixXd principal_axes(const DiscreteCurve& curve)
{
    const Eigen::MatrixXd centered = curve.vertices().colwise() - curve.centroid();
    const Eigen::MatrixXd cov = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    return eig.eigenvectors().rowwise().reverse();
}

} // namespace

double planarity_deviation(const DiscreteCurve& curve)
{
    if (curve.dimension() <= 2) {
        return 0.0;
    }
    const Eigen::MatrixXd axes = principal_axes(curve);
    const Eigen::MatrixXd centered = curve.vertices().colwise() - curve.centroid();
    const Eigen::MatrixXd in_plane = axes.leftCols(2) * (axes.leftCols(2).transpose() * centered);
    return (centered - in_plane).colwise().norm().maxCoeff();
}

bool is_planar_convex(const DiscreteCurve& curve, double rel_tol)
{
    const double diam = curve.bbox_diagonal();
    if (planarity_deviation(curve) > rel_tol * diam) {
        return false;
    }
    const Eigen::MatrixXd axes = principal_axes(curve);
    const Eigen::MatrixXd uv =
        axes.leftCols(2).transpose() * (curve.vertices().colwise() - curve.centroid());
    int sign = 0;
    const Eigen::Index n = curve.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d a = uv.col((i + n - 1) % n) - uv.col(i);
        const Eigen::Vector2d b = uv.col((i + 1) % n) - uv.col(i);
        const double cross = a.x() * b.y() - a.y() * b.x();
        if (std::abs(cross) <= 1e-14 * diam * diam) {
            continue;
        }
        const int s = cross > 0 ? 1 : -1;
        if (sign == 0) {
            sign = s;
        } else if (s != sign) {
            return false;
        }
    }
    // Rules out polygons that turn consistently but wind more than once.
    return std::abs(exterior_angle_sum(curve) - 2.0 * std::numbers::pi) < 1e-6;
}

Eigen::VectorXd point_at_arclength(const DiscreteCurve& curve, double s)
{
    const double total = curve.length();
    double target = (s - std::floor(s)) * total;
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        const double len = (curve.vertex(i + 1) - curve.vertex(i)).norm();
        if (target <= len || i + 1 == curve.size()) {
            const double u = std::clamp(target / len, 0.0, 1.0);
            return (1.0 - u) * curve.vertex(i) + u * curve.vertex(i + 1);
        }
        target -= len;
    }
    return curve.vertex(0);
}

DiscreteCurve resample_uniform(const DiscreteCurve& curve, Eigen::Index count)
{
    if (count < 3) {
        throw PreconditionError("resample: need at least 3 vertices");
    }
    const Eigen::Index n = curve.size();
    std::vector<double> cumulative(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        cumulative[i + 1] = cumulative[i] + (curve.vertex(i + 1) - curve.vertex(i)).norm();
    }
    const double total = cumulative.back();
    Eigen::MatrixXd out(curve.dimension(), count);
    Eigen::Index seg = 0;
    for (Eigen::Index k = 0; k < count; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(count);
        while (seg + 1 < n && cumulative[seg + 1] < target) {
            ++seg;
        }
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double u = std::clamp((target - cumulative[seg]) / len, 0.0, 1.0);
        out.col(k) = (1.0 - u) * curve.vertex(seg) + u * curve.vertex(seg + 1);
    }
    return DiscreteCurve(std::move(out));
}

DiscreteCurve subdivide_edges(const DiscreteCurve& curve, int pieces)
{
    if (pieces < 1) {
        throw PreconditionError("subdivide: pieces must be positive");
    }
    Eigen::MatrixXd out(curve.dimension(), curve.size() * pieces);
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        for (int k = 0; k < pieces; ++k) {
            const double u = static_cast<double>(k) / pieces;
            out.col(i * pieces + k) = (1.0 - u) * curve.vertex(i) + u * curve.vertex(i + 1);
        }
    }
    return DiscreteCurve(std::move(out));
}

DiscreteCurve transformed(const DiscreteCurve& curve, const Eigen::MatrixXd& rotation,
                          double scale, const Eigen::VectorXd& shift)
{
    Eigen::MatrixXd m = scale * (rotation * curve.vertices());
    m.colwise() += shift;
    return DiscreteCurve(std::move(m));
}

DiscreteCurve parse_curve_csv(const std::string& text)
{
    std::istringstream in(text);
    std::vector<Eigen::VectorXd> points;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<double> coords;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(field, &used);
            } catch (const std::exception&) {
                throw ParseError("curve csv line " + std::to_string(line_no) +
                                 ": not a number: '" + field + "'");
            }
            if (field.find_first_not_of(" \t\r", used) != std::string::npos) {
                throw ParseError("curve csv line " + std::to_string(line_no) +
                                 ": trailing characters in '" + field + "'");
            }
            coords.push_back(value);
        }
        if (!points.empty() && static_cast<Eigen::Index>(coords.size()) != points.front().size()) {
            throw ParseError("curve csv line " + std::to_string(line_no) +
                             ": inconsistent number of coordinates");
        }
        if (coords.size() < 2) {
            throw ParseError("curve csv line " + std::to_string(line_no) +
                             ": need at least 2 coordinates");
        }
        points.push_back(Eigen::Map<Eigen::VectorXd>(coords.data(),
                                                     static_cast<Eigen::Index>(coords.size())));
    }
    if (points.size() < 3) {
        throw ParseError("curve csv: need at least 3 vertices");
    }
    return DiscreteCurve::from_points(points);
}

DiscreteCurve load_curve_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open curve file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_curve_csv(buffer.str());
}

void save_curve_csv(const DiscreteCurve& curve, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << "# mcflab " << kVersion << " columns: ";
    for (Eigen::Index d = 0; d < curve.dimension(); ++d) {
        out << (d ? "," : "") << (d < 3 ? std::string(1, "xyz"[d]) : "x" + std::to_string(d));
    }
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        for (Eigen::Index d = 0; d < curve.dimension(); ++d) {
            out << (d ? "," : "") << curve.vertices()(d, i);
        }
        out << '\n';
    }
}

} // namespace mcflab
