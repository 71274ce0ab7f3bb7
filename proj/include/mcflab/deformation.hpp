#pragma once

#include "mcflab/curve.hpp"
#include "mcflab/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mcflab {

enum class Stage { Polygonalize, Truncate, Smooth };

std::string to_string(Stage stage);

/// Sampled one-parameter family of curves with its total-curvature audit.
/// Parameter s runs over [0,1] (polygonalize), [1,2] (truncate) and [2,3]
/// (flow of the final triangle). Every raw sample also has a companion
/// smoothed by curve-shortening flow for time `smoothing_time`.
struct DeformationPath {
    std::vector<double> s;
    std::vector<Stage> stage;
    std::vector<DiscreteCurve> curves;
    std::vector<double> tc;
    std::vector<bool> simple;
    std::vector<double> planarity;

    std::vector<DiscreteCurve> smoothed;
    std::vector<double> smoothed_tc;
    std::vector<bool> smoothed_simple;
    double smoothing_time = 0.0;

    /// Polygon vertex count used by the polygonalize stage.
    int polygon_vertices = 0;

    std::size_t size() const { return s.size(); }

    /// Largest increase of tc between consecutive samples.
    double worst_tc_increase() const;

    /// Columns s,stage,tc,simple,planarity,smoothed_tc,smoothed_simple.
    void write_audit_csv(const std::filesystem::path& path) const;
};

/// Raised when a stage fails; carries the samples produced so far.
class DeformationError : public Error {
public:
    DeformationError(const std::string& what, DeformationPath partial)
        : Error(what), partial_(std::move(partial)) {}

    const DeformationPath& partial() const { return partial_; }

private:
    DeformationPath partial_;
};

/// Replaces the arc over [k/N, (k+t)/N] of the arclength parameter by its
/// chord for every k. Requires at least 8N vertices. Throws SimplicityError
/// (carrying the separation) when the result is not simple.
DiscreteCurve polygonalize_homotopy(const DiscreteCurve& dense, int pieces, double t);

struct MilnorPosition {
    /// Rotated and scaled curve whose last coordinate has range [0,1] with a
    /// single local maximum and minimum over the vertices.
    DiscreteCurve curve;
    /// Unit height direction in the original frame.
    Eigen::VectorXd axis;
    /// positioned = scale * rotation * (original) - shift.
    Eigen::MatrixXd rotation;
    double scale = 1.0;
    Eigen::VectorXd shift;
    int attempts = 0;

    /// Maps a curve from the positioned frame back to the original one.
    DiscreteCurve to_original(const DiscreteCurve& positioned) const;
};

/// Randomized search (at most `budget` directions) for a height function with
/// one local max and one local min. Throws PositioningError otherwise.
MilnorPosition milnor_position(const DiscreteCurve& polygon, std::uint64_t seed = 42, int budget = 1000);

/// The part of a positioned polygon at height >= t closed by the horizontal
/// chord. A t equal to a vertex height is nudged up by 1e-9.
DiscreteCurve milnor_truncation(const DiscreteCurve& positioned, double t);

/// Height above which milnor_truncation returns a triangle.
double triangle_height(const DiscreteCurve& positioned);

struct DeformOptions {
    int samples_per_stage = 50;
    /// Initial polygon vertex count; doubled while the polygon is not simple.
    int pieces = 16;
    /// Vertices used when flowing a polygon by curve shortening.
    int smoothing_vertices = 192;
    std::uint64_t seed = 42;
    int threads = 1;
};

/// Total-curvature-nonincreasing deformation of a simple closed curve with
/// tc <= alpha < 4 pi to a planar convex curve. Every raw and smoothed
/// sample is certified simple with tc <= alpha + 1e-6.
DeformationPath deform_to_convex(const DiscreteCurve& curve, double alpha, const DeformOptions& options = {});

} // namespace mcflab
