#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace mcflab {

/// Closed polygonal curve in R^n. Vertices are stored as the columns of a
/// dim x N matrix; the closing edge from the last vertex back to the first
/// is implicit.
class DiscreteCurve {
public:
    /// Validates: at least 3 vertices, finite coordinates, no zero-length
    /// edges (including the closing one). Throws DegeneracyError or
    /// PreconditionError otherwise.
    explicit DiscreteCurve(Eigen::MatrixXd vertices);

    static DiscreteCurve from_points(const std::vector<Eigen::VectorXd>& points);

    Eigen::Index size() const { return vertices_.cols(); }
    Eigen::Index dimension() const { return vertices_.rows(); }

    const Eigen::MatrixXd& vertices() const { return vertices_; }
    Eigen::MatrixXd::ConstColXpr vertex(Eigen::Index i) const { return vertices_.col(wrap(i)); }

    /// Vector from vertex i to vertex i+1 (cyclic).
    Eigen::VectorXd edge(Eigen::Index i) const { return vertex(i + 1) - vertex(i); }

    Eigen::Index wrap(Eigen::Index i) const
    {
        const Eigen::Index n = size();
        return ((i % n) + n) % n;
    }

    double length() const;
    double min_edge_length() const;
    double max_edge_length() const;
    double bbox_diagonal() const;
    Eigen::VectorXd centroid() const;

    DiscreteCurve reversed() const;

    /// Same curve in a higher ambient dimension, padded with zeros.
    DiscreteCurve embedded(Eigen::Index dim) const;

private:
    Eigen::MatrixXd vertices_;
};

/// Sum of turning angles. For a polygon this is its total curvature.
double exterior_angle_sum(const DiscreteCurve& curve);

/// Turning angle at vertex i, in [0, pi].
double turning_angle(const DiscreteCurve& curve, Eigen::Index i);

/// Euclidean distance between segments [p0,p1] and [q0,q1] in any dimension.
double segment_distance(const Eigen::Ref<const Eigen::VectorXd>& p0,
                        const Eigen::Ref<const Eigen::VectorXd>& p1,
                        const Eigen::Ref<const Eigen::VectorXd>& q0,
                        const Eigen::Ref<const Eigen::VectorXd>& q1);

/// Smallest distance between two non-adjacent edges. Pairs whose bounding
/// boxes are further apart than `cutoff` are skipped, in which case the
/// result is clamped to `cutoff`. Returns +inf for triangles.
double min_nonadjacent_separation(const DiscreteCurve& curve, double cutoff);

/// Relative simplicity tolerance: non-adjacent edges must stay this fraction
/// of the bounding-box diagonal apart.
inline constexpr double kSimplicityTolerance = 1e-7;

bool is_simple(const DiscreteCurve& curve, double rel_tol = kSimplicityTolerance);

/// Throws SimplicityError carrying the offending separation.
void require_simple(const DiscreteCurve& curve, double rel_tol = kSimplicityTolerance);

/// Maximum distance from a vertex to the least-squares plane through the
/// vertices. Zero for curves in R^2.
double planarity_deviation(const DiscreteCurve& curve);

/// Planar within `rel_tol * diameter`, and every turn in the same direction
/// inside the best-fit plane.
bool is_planar_convex(const DiscreteCurve& curve, double rel_tol = 1e-6);

/// Redistributes `count` vertices uniformly by arclength along the polygon.
/// The first vertex is kept in place.
DiscreteCurve resample_uniform(const DiscreteCurve& curve, Eigen::Index count);

/// Splits every edge into `pieces` equal parts. Geometry is unchanged.
DiscreteCurve subdivide_edges(const DiscreteCurve& curve, int pieces);

/// Point at normalized arclength parameter s in [0,1).
Eigen::VectorXd point_at_arclength(const DiscreteCurve& curve, double s);

/// Applies x -> scale * R x + shift.
DiscreteCurve transformed(const DiscreteCurve& curve, const Eigen::MatrixXd& rotation,
                          double scale, const Eigen::VectorXd& shift);

/// One vertex per line, comma separated coordinates; `#` starts a comment.
DiscreteCurve load_curve_csv(const std::filesystem::path& path);
DiscreteCurve parse_curve_csv(const std::string& text);
void save_curve_csv(const DiscreteCurve& curve, const std::filesystem::path& path);

} // namespace mcflab
