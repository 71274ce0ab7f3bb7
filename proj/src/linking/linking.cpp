#include "mcflab/errors.hpp"
#include "mcflab/linking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mcflab {

OrientedLoop::OrientedLoop(Eigen::Matrix3Xd points) : points_(std::move(points))
{
    require_simple(DiscreteCurve(points_));
}

OrientedLoop::OrientedLoop(const DiscreteCurve& curve)
{
    if (curve.dimension() != 3) {
        throw PreconditionError("oriented loop: curve must lie in R^3");
    }
    require_simple(curve);
    points_ = curve.vertices();
}

OrientedLoop OrientedLoop::reversed() const { return OrientedLoop(Eigen::Matrix3Xd(points_.rowwise().reverse())); }

namespace {

// Neumaier summation.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

double safe_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }

// Signed solid angle subtended by segment pair (p1,p2), (q1,q2), divided by
// 4 pi: the exact Gauss integral over the two segments.
double segment_pair_linking(const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2)
{
    const Vec3 r13 = q1 - p1;
    const Vec3 r14 = q2 - p1;
    const Vec3 r23 = q1 - p2;
    const Vec3 r24 = q2 - p2;
    Vec3 n[4] = {r13.cross(r14), r14.cross(r24), r24.cross(r23), r23.cross(r13)};
    for (Vec3& v : n) {
        const double len = v.norm();
        if (len <= 0.0) {
            return 0.0;
        }
        v /= len;
    }
    const double omega = safe_asin(n[0].dot(n[1])) + safe_asin(n[1].dot(n[2])) +
                         safe_asin(n[2].dot(n[3])) + safe_asin(n[3].dot(n[0]));
    const double orient = (q2 - q1).cross(p2 - p1).dot(r13);
    if (orient == 0.0) {
        return 0.0;
    }
    return (orient > 0.0 ? omega : -omega) / (4.0 * std::numbers::pi);
}

double loop_diameter(const OrientedLoop& a, const OrientedLoop& b)
{
    const Vec3 lo = a.points().rowwise().minCoeff().cwiseMin(b.points().rowwise().minCoeff());
    const Vec3 hi = a.points().rowwise().maxCoeff().cwiseMax(b.points().rowwise().maxCoeff());
    return (hi - lo).norm();
}

} // namespace

double gauss_linking_sum(const OrientedLoop& a, const OrientedLoop& b)
{
    CompensatedSum sum;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Vec3 p1 = a.point(i);
        const Vec3 p2 = a.point(i + 1);
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            sum.add(segment_pair_linking(p1, p2, b.point(j), b.point(j + 1)));
        }
    }
    return sum.value();
}

std::optional<int> crossing_linking_number(const OrientedLoop& a, const OrientedLoop& b,
                                           const Vec3& direction, double margin)
{
    const Vec3 d = direction.normalized();
    Vec3 e1 = d.unitOrthogonal();
    Vec3 e2 = d.cross(e1);
    auto project = [&](const Vec3& p) { return Eigen::Vector2d(p.dot(e1), p.dot(e2)); };
    const double scale = loop_diameter(a, b);

    int twice = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Vec3 a0 = a.point(i);
        const Vec3 a1 = a.point(i + 1);
        const Eigen::Vector2d p = project(a0);
        const Eigen::Vector2d r = project(a1) - p;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            const Vec3 b0 = b.point(j);
            const Vec3 b1 = b.point(j + 1);
            const Eigen::Vector2d q = project(b0);
            const Eigen::Vector2d s = project(b1) - q;
            const double denom = r.x() * s.y() - r.y() * s.x();
            const Eigen::Vector2d qp = q - p;
            if (std::abs(denom) <= 1e-14 * r.norm() * s.norm()) {
                // Parallel in projection: non-generic only if the segments overlap.
                const double off = std::abs(qp.x() * r.y() - qp.y() * r.x()) / r.norm();
                if (off <= margin * scale) {
                    return std::nullopt;
                }
                continue;
            }
            const double t = (qp.x() * s.y() - qp.y() * s.x()) / denom;
            const double u = (qp.x() * r.y() - qp.y() * r.x()) / denom;
            if (t < -margin || t > 1.0 + margin || u < -margin || u > 1.0 + margin) {
                continue;
            }
            if (t < margin || t > 1.0 - margin || u < margin || u > 1.0 - margin) {
                return std::nullopt;
            }
            const double ha = (a0 + t * (a1 - a0)).dot(d);
            const double hb = (b0 + u * (b1 - b0)).dot(d);
            if (std::abs(ha - hb) <= margin * scale) {
                return std::nullopt;
            }
            const Vec3 over = ha > hb ? Vec3(a1 - a0) : Vec3(b1 - b0);
            const Vec3 under = ha > hb ? Vec3(b1 - b0) : Vec3(a1 - a0);
            twice += over.cross(under).dot(d) > 0.0 ? 1 : -1;
        }
    }
    if (twice % 2 != 0) {
        return std::nullopt;
    }
    return twice / 2;
}

int linking_number(const OrientedLoop& a, const OrientedLoop& b, std::uint64_t seed)
{
    const double scale = loop_diameter(a, b);
    const double tol = kSimplicityTolerance * scale;
    double closest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            closest = std::min(closest, segment_distance(a.point(i), a.point(i + 1), b.point(j),
                                                         b.point(j + 1)));
        }
    }
    if (closest <= tol) {
        std::ostringstream msg;
        msg << "linking number: loops come within " << closest << " of each other (tolerance "
            << tol << ")";
        throw GeometryError(msg.str());
    }

    const double gauss = gauss_linking_sum(a, b);
    const double rounded = std::round(gauss);
    if (std::abs(gauss - rounded) > 1e-3) {
        std::ostringstream msg;
        msg << "linking number: Gauss sum " << gauss << " is not an integer";
        throw InternalError(msg.str());
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::optional<int> crossings;
    for (int attempt = 0; attempt < 100 && !crossings; ++attempt) {
        const Vec3 dir(normal(rng), normal(rng), normal(rng));
        if (dir.norm() < 1e-3) {
            continue;
        }
        crossings = crossing_linking_number(a, b, dir);
    }
    if (!crossings) {
        throw GeometryError("linking number: no generic projection direction found");
    }
    if (*crossings != static_cast<int>(rounded)) {
        std::ostringstream msg;
        msg << "linking number: Gauss sum gives " << rounded << " but crossing count gives "
            << *crossings;
        throw InternalError(msg.str());
    }
    return *crossings;
}

} // namespace mcflab
