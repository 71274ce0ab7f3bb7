#pragma once

#include "mcflab/curve.hpp"
#include "mcflab/mesh.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mcflab {

/// Heat kernel (4 pi lambda)^{-1} exp(-|x - v|^2 / (4 lambda)) for surfaces.
struct GaussianKernel {
    Vec3 center = Vec3::Zero();
    double lambda = 1.0;

    GaussianKernel() = default;
    GaussianKernel(Vec3 c, double l);

    double operator()(const Vec3& x) const;
};

/// Value of a sup-type functional together with where it was attained.
struct FunctionalReport {
    std::string name;
    double value = 0.0;
    std::optional<Eigen::VectorXd> argmax_point;
    std::optional<double> argmax_scale;
    double error_estimate = 0.0;
    long evaluations = 0;
    /// Set when the maximizing scale sits on the edge of the search range.
    bool scale_at_search_bound = false;
};

inline constexpr const char* kReportCsvHeader = "name,value,vx,vy,vz,lambda,error,evals";

/// One CSV row following kReportCsvHeader. Missing fields are left empty.
std::string to_csv_row(const FunctionalReport& report);

// ---------------------------------------------------------------------------
// Cone density and vision number

/// Relative tolerance (times the curve's bbox diagonal) for deciding that a
/// point lies on the curve.
inline constexpr double kOnCurveTolerance = 1e-6;

/// Density of the cone over `curve` with vertex v, completed by 1/2 when v
/// lies on the curve. Equals the length of the radial projection of the
/// curve onto the unit sphere around v, divided by 2 pi. Throws
/// AmbiguityError when v is just outside the on-curve tolerance.
double cone_density(const DiscreteCurve& curve, const Eigen::VectorXd& v,
                    double rel_tol = kOnCurveTolerance);

struct VisionOptions {
    int starts = 5;
    long budget = 10000;
    int random_candidates = 200;
    std::uint64_t seed = 42;
    int threads = 1;
};

/// Supremum of cone_density over v, searched from candidates in the convex
/// hull of the curve.
FunctionalReport vision_number(const DiscreteCurve& curve, const VisionOptions& options = {});

// ---------------------------------------------------------------------------
// Gaussian integrals

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Integral of the kernel over the mesh. Triangles are split 1-to-4 while
/// they are wider than 0.2 sqrt(lambda) and can still contribute.
QuadratureResult gaussian_area_estimate(const TriangleMesh& mesh, const GaussianKernel& kernel);

inline double gaussian_area(const TriangleMesh& mesh, const GaussianKernel& kernel)
{
    return gaussian_area_estimate(mesh, kernel).value;
}

/// Integral of the kernel over the exterior cone {w + s (x - w) : x in curve,
/// s >= 1}, counted with multiplicity. The radial integral is done in
/// closed form, so there is no truncation; the angular integral uses
/// adaptive Gauss-Kronrod per edge.
QuadratureResult exterior_cone_gaussian_estimate(const DiscreteCurve& curve, const Vec3& cone_vertex,
                                                 const GaussianKernel& kernel);

inline double exterior_cone_gaussian(const DiscreteCurve& curve, const Vec3& cone_vertex,
                                     const GaussianKernel& kernel)
{
    return exterior_cone_gaussian_estimate(curve, cone_vertex, kernel).value;
}

struct EntropyOptions {
    int starts = 5;
    long budget = 10000;
    std::uint64_t seed = 42;
    int threads = 1;
    /// Search box for v is the bounding box of M and the curve scaled by this.
    double box_scale = 1.5;
    /// lambda ranges over [low, high] * diameter^2.
    double lambda_low = 1e-3;
    double lambda_high = 1e3;
};

/// sup over (v, lambda) of the Gaussian area of M plus the Gaussian integral
/// over the exterior cone of `boundary` with vertex v. An absent boundary
/// gives the entropy of M alone.
FunctionalReport entropy(const TriangleMesh& mesh, const std::optional<DiscreteCurve>& boundary,
                         const EntropyOptions& options = {});

/// Value of the entropy integrand at one (v, lambda).
double entropy_integrand(const TriangleMesh& mesh, const std::optional<DiscreteCurve>& boundary,
                         const GaussianKernel& kernel);

// ---------------------------------------------------------------------------
// Shrinkers

struct ShrinkerResidual {
    /// |H + x_perp / 2| per vertex; empty at boundary vertices and outside
    /// the evaluation radius.
    std::vector<std::optional<double>> per_vertex;
    double sup = 0.0;
};

/// Residual of the shrinker equation H + x_perp / 2 = 0 at interior vertices
/// with |x| <= max_radius.
ShrinkerResidual shrinker_residual(const TriangleMesh& mesh,
                                   double max_radius = std::numeric_limits<double>::infinity());

struct DoublingCheck {
    /// 1/2 + Gaussian area of the candidate at v = 0, lambda = 1.
    double value = 0.0;
    /// Non-orientable and shrinker residual below 5%.
    bool applicable = false;
    bool exceeds_three_halves = false;
};

DoublingCheck doubling_check(const TriangleMesh& candidate);

} // namespace mcflab
