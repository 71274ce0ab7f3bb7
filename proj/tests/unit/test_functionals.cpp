#include "mcflab/errors.hpp"
#include "mcflab/functionals.hpp"
#include "mcflab/shapes.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mcflab;

namespace {

constexpr double kPi = std::numbers::pi;

double heat(const Vec3& x, const Vec3& c, double lambda)
{
    return std::exp(-(x - c).squaredNorm() / (4.0 * lambda)) / (4.0 * kPi * lambda);
}

// Brute-force midpoint rule over the cone {v + s (x(theta) - v), s >= 1}
// for the round circle of radius r in the xy-plane.
double oracle_cone_integral(double r, const Vec3& v, const Vec3& c, double lambda)
{
    const int nt = 720;
    const int ns = 6000;
    const double s_max = 40.0;
    const double ds = (s_max - 1.0) / ns;
    double sum = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double th = 2.0 * kPi * (i + 0.5) / nt;
        const Vec3 x(r * std::cos(th), r * std::sin(th), 0.0);
        const Vec3 dx(-r * std::sin(th), r * std::cos(th), 0.0);
        const double jac = (x - v).cross(dx).norm();
        for (int k = 0; k < ns; ++k) {
            const double s = 1.0 + (k + 0.5) * ds;
            sum += heat(v + s * (x - v), c, lambda) * s * jac;
        }
    }
    return sum * ds * 2.0 * kPi / nt;
}

} // namespace

TEST_SUITE("functionals") {

TEST_CASE("heat kernel normalization")
{
    const GaussianKernel k(Vec3(1, 2, 3), 0.25);
    CHECK(k(Vec3(1, 2, 3)) == doctest::Approx(1.0 / kPi));
    CHECK_THROWS_AS(GaussianKernel(Vec3::Zero(), 0.0), PreconditionError);
}

TEST_CASE("Gaussian area of a flat disk matches the closed form")
{
    const double r = 3.0;
    const TriangleMesh disk = shapes::disk(r, 256, 24);
    for (double lambda : {0.05, 0.3, 1.0}) {
        const double exact = 1.0 - std::exp(-r * r / (4.0 * lambda));
        CHECK(gaussian_area(disk, GaussianKernel(Vec3::Zero(), lambda)) == doctest::Approx(exact).epsilon(2e-3));
    }
    // Kernel lifted off the plane by z multiplies by exp(-z^2 / 4 lambda).
    const double lambda = 0.2;
    const double z = 0.5;
    const double exact = (1.0 - std::exp(-r * r / (4.0 * lambda))) * std::exp(-z * z / (4.0 * lambda));
    CHECK(gaussian_area(disk, GaussianKernel(Vec3(0, 0, z), lambda)) == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("cone density closed forms for a round circle")
{
    const DiscreteCurve c = shapes::circle(1.0, 2048);
    for (double h : {0.3, 1.0, 4.0}) {
        CHECK(cone_density(c, Eigen::Vector3d(0, 0, h)) == doctest::Approx(1.0 / std::sqrt(1.0 + h * h)).epsilon(1e-5));
    }
    // In the plane outside the circle the projection covers an arc twice.
    for (double d : {1.5, 3.0}) {
        const double exact = 2.0 * std::asin(1.0 / d) / kPi;
        CHECK(cone_density(c, Eigen::Vector3d(d, 0, 0)) == doctest::Approx(exact).epsilon(1e-4));
    }
    CHECK(cone_density(c, Eigen::Vector3d(0.3, 0.2, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cone_density(c, Eigen::Vector3d(0, 0, 1e6)) < 1e-5);
    CHECK(cone_density(c, c.vertex(5)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("cone density near the curve is ambiguous")
{
    const DiscreteCurve c = shapes::circle(1.0, 64);
    // Between one and two tolerances away from the curve.
    const Eigen::Vector3d near = c.vertex(0) * (1.0 + 1.5 * kOnCurveTolerance * c.bbox_diagonal());
    CHECK_THROWS_AS(cone_density(c, near), AmbiguityError);
}

TEST_CASE("exterior cone integral against the closed form and brute force")
{
    const double r = 1.0;
    const DiscreteCurve c = shapes::circle(r, 512);
    for (double lambda : {0.1, 0.5, 2.0}) {
        // Vertex at the centre: the cone is the plane minus the disk.
        const double exact = std::exp(-r * r / (4.0 * lambda));
        CHECK(exterior_cone_gaussian(c, Vec3::Zero(), GaussianKernel(Vec3::Zero(), lambda)) ==
              doctest::Approx(exact).epsilon(1e-4));
    }
    const Vec3 v(0.2, -0.1, 0.7);
    const Vec3 center(0.3, 0.4, -0.5);
    const double lambda = 0.4;
    const double brute = oracle_cone_integral(r, v, center, lambda);
    CHECK(exterior_cone_gaussian(c, v, GaussianKernel(center, lambda)) == doctest::Approx(brute).epsilon(2e-3));
}

TEST_CASE("entropy of a flat disk with its boundary is one")
{
    const TriangleMesh disk = shapes::disk(1.0, 48, 6);
    const DiscreteCurve boundary(Eigen::MatrixXd(disk.loop_points(0)));
    EntropyOptions opt;
    opt.budget = 2000;
    const FunctionalReport r = entropy(disk, boundary, opt);
    CHECK(r.value == doctest::Approx(1.0).epsilon(0.02));
    // The integrand is one at any centre in the plane inside the disk.
    CHECK(entropy_integrand(disk, boundary, GaussianKernel(Vec3(0.1, 0.2, 0), 0.7)) ==
          doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("entropy of the radius-2 sphere is 4/e")
{
    EntropyOptions opt;
    opt.budget = 1500;
    opt.starts = 3;
    const FunctionalReport r = entropy(shapes::icosphere(2.0, 3), std::nullopt, opt);
    CHECK(r.value == doctest::Approx(4.0 / std::exp(1.0)).epsilon(0.01));
    REQUIRE(r.argmax_scale.has_value());
}

TEST_CASE("shrinker residuals")
{
    CHECK(shrinker_residual(shapes::square(6.0, 10)).sup < 1e-12);
    CHECK(shrinker_residual(shapes::icosphere(2.0, 4)).sup < 0.02);
    // Off the shrinker radius the residual is |2/R - R/2|.
    CHECK(shrinker_residual(shapes::icosphere(1.0, 4)).sup == doctest::Approx(1.5).epsilon(0.02));
    const ShrinkerResidual cyl = shrinker_residual(shapes::cylinder(std::sqrt(2.0), 3.0, 96, 40));
    CHECK(cyl.sup < 0.02);
}

TEST_CASE("vision number bound and equality on convex planar curves")
{
    VisionOptions opt;
    opt.budget = 2000;
    const FunctionalReport circle = vision_number(shapes::ellipse(2.0, 1.0, 200), opt);
    CHECK(circle.value == doctest::Approx(1.0).epsilon(1e-2));
    const DiscreteCurve s = shapes::saddle(0.8, 2, 200);
    CHECK(vision_number(s, opt).value <= exterior_angle_sum(s) / (2.0 * kPi) + 1e-3);
}

TEST_CASE("doubling check is not applicable to orientable shrinkers")
{
    const DoublingCheck d = doubling_check(shapes::icosphere(2.0, 3));
    CHECK_FALSE(d.applicable);
    CHECK(d.value == doctest::Approx(0.5 + 4.0 / std::exp(1.0)).epsilon(0.01));
}

TEST_CASE("report CSV row")
{
    FunctionalReport r;
    r.name = "entropy";
    r.value = 1.5;
    r.argmax_point = Eigen::Vector3d(1, 2, 3);
    r.argmax_scale = 0.5;
    r.evaluations = 7;
    CHECK(to_csv_row(r) == "entropy,1.5,1,2,3,0.5,0,7");
    FunctionalReport empty;
    empty.name = "vision";
    CHECK(to_csv_row(empty) == "vision,0,,,,,0,0");
}

} // TEST_SUITE
