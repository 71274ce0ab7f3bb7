#include "mcflab/deformation.hpp"
#include "mcflab/errors.hpp"
#include "mcflab/shapes.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace mcflab;

namespace {

constexpr double kPi = std::numbers::pi;

// Number of strict local maxima of the last coordinate, cyclically.
int local_maxima(const DiscreteCurve& c)
{
    const Eigen::Index d = c.dimension() - 1;
    int count = 0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double h = c.vertex(i)(d);
        if (h > c.vertex(i - 1)(d) && h > c.vertex(i + 1)(d)) {
            ++count;
        }
    }
    return count;
}

} // namespace

TEST_SUITE("deformation") {

TEST_CASE("polygonal homotopy endpoints")
{
    const DiscreteCurve dense = shapes::ellipse(2.0, 1.0, 256);
    const DiscreteCurve start = polygonalize_homotopy(dense, 16, 0.0);
    CHECK((start.vertices() - dense.vertices()).norm() == 0.0);
    const DiscreteCurve end = polygonalize_homotopy(dense, 16, 1.0);
    CHECK(end.size() == 16);
    CHECK(exterior_angle_sum(end) == doctest::Approx(2.0 * kPi).epsilon(1e-9));
    CHECK_THROWS_AS(polygonalize_homotopy(dense, 64, 0.5), PreconditionError);
}

TEST_CASE("inscribed polygons never gain total curvature")
{
    const DiscreteCurve dense = subdivide_edges(shapes::saddle(0.7, 2, 64), 4);
    double previous = exterior_angle_sum(dense);
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
        const double tc = exterior_angle_sum(polygonalize_homotopy(dense, 16, t));
        CHECK(tc <= previous + 1e-9);
        previous = tc;
    }
}

TEST_CASE("Milnor position has one maximum and one minimum")
{
    const DiscreteCurve poly = polygonalize_homotopy(subdivide_edges(shapes::saddle(0.5, 2, 64), 4), 32, 1.0);
    const MilnorPosition mp = milnor_position(poly);
    CHECK(local_maxima(mp.curve) == 1);
    CHECK(local_maxima(mp.curve.reversed()) == 1);
    const Eigen::VectorXd h = mp.curve.vertices().row(mp.curve.dimension() - 1);
    CHECK(h.minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    // The frame change round-trips.
    const DiscreteCurve back = mp.to_original(mp.curve);
    CHECK((back.vertices() - poly.vertices()).norm() < 1e-9);
    CHECK(exterior_angle_sum(mp.curve) == doctest::Approx(exterior_angle_sum(poly)).epsilon(1e-10));
}

TEST_CASE("polygons with total curvature at least 4 pi have no Milnor position")
{
    const DiscreteCurve knot = resample_uniform(shapes::trefoil(400), 60);
    REQUIRE(exterior_angle_sum(knot) >= 4.0 * kPi);
    CHECK_THROWS_AS(milnor_position(knot, 42, 200), PositioningError);
}

TEST_CASE("Milnor truncation shrinks to a triangle and lowers total curvature")
{
    const DiscreteCurve poly = polygonalize_homotopy(subdivide_edges(shapes::saddle(0.5, 2, 64), 4), 16, 1.0);
    const MilnorPosition mp = milnor_position(poly);
    const double th = triangle_height(mp.curve);
    double previous = exterior_angle_sum(mp.curve);
    for (int k = 1; k <= 20; ++k) {
        const double t = th * k / 20.0 + (k == 20 ? 0.5 * (1.0 - th) : 0.0);
        const DiscreteCurve cut = milnor_truncation(mp.curve, t);
        CHECK(is_simple(cut));
        const double tc = exterior_angle_sum(cut);
        CHECK(tc <= previous + 1e-9);
        previous = tc;
    }
    CHECK(milnor_truncation(mp.curve, th + 0.5 * (1.0 - th)).size() == 3);
    CHECK_THROWS_AS(milnor_truncation(mp.curve, 1.0), PreconditionError);
}

TEST_CASE("deform_to_convex certifies a nonplanar curve")
{
    const DiscreteCurve c = shapes::twisted_quadrilateral(2.0, 30);
    const double alpha = exterior_angle_sum(c) + 1e-9;
    DeformOptions opt;
    opt.samples_per_stage = 12;
    const DeformationPath path = deform_to_convex(c, alpha, opt);
    CHECK(path.size() == 12 + 11 + 11);
    CHECK(path.smoothed.size() == path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        CHECK(path.simple[i]);
        CHECK(path.smoothed_simple[i]);
        CHECK(path.tc[i] <= alpha + 1e-6);
        CHECK(path.smoothed_tc[i] <= alpha + 1e-6);
        CHECK(std::abs(exterior_angle_sum(path.curves[i]) - path.tc[i]) < 1e-12);
    }
    CHECK(path.worst_tc_increase() <= 1e-6);
    CHECK(is_planar_convex(path.curves.back()));
    CHECK(path.stage.front() == Stage::Polygonalize);
    CHECK(path.stage.back() == Stage::Smooth);

    const auto file = std::filesystem::temp_directory_path() / "mcflab_audit_test.csv";
    path.write_audit_csv(file);
    std::ifstream in(file);
    std::string first, header;
    std::getline(in, first);
    std::getline(in, header);
    CHECK(first.rfind("# mcflab ", 0) == 0);
    CHECK(header == "s,stage,tc,simple,planarity,smoothed_tc,smoothed_simple");
    std::filesystem::remove(file);
}

TEST_CASE("deform_to_convex rejects curves at or above 4 pi")
{
    const DiscreteCurve knot = shapes::trefoil(200);
    CHECK_THROWS_AS(deform_to_convex(knot, exterior_angle_sum(knot)), PreconditionError);
    CHECK_THROWS_AS(deform_to_convex(shapes::circle(1, 32), 3.0), PreconditionError);
}

} // TEST_SUITE
