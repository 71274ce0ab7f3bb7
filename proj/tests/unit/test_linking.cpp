#include "mcflab/errors.hpp"
#include "mcflab/linking.hpp"
#include "mcflab/shapes.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace mcflab;

namespace {

constexpr double kPi = std::numbers::pi;

using Param = std::function<Vec3(double)>;

Eigen::Matrix3Xd sample(const Param& f, int n)
{
    Eigen::Matrix3Xd p(3, n);
    for (int i = 0; i < n; ++i) {
        p.col(i) = f(2.0 * kPi * i / n);
    }
    return p;
}

// Midpoint rule for (1/4pi) \oint\oint (r1 - r2) . (dr1 x dr2) / |r1 - r2|^3
// on the smooth parametrizations.
double oracle_gauss_integral(const Param& a, const Param& b, int n)
{
    const double h = 2.0 * kPi / n;
    auto deriv = [h](const Param& f, double t) { return Vec3((f(t + 0.5 * h) - f(t - 0.5 * h)) / h); };
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * h;
        const Vec3 x = a(s);
        const Vec3 dx = deriv(a, s);
        for (int j = 0; j < n; ++j) {
            const double t = (j + 0.5) * h;
            const Vec3 r = x - b(t);
            sum += r.dot(dx.cross(deriv(b, t))) / std::pow(r.norm(), 3);
        }
    }
    return sum * h * h / (4.0 * kPi);
}

Vec3 hopf_a(double s) { return {std::cos(s), std::sin(s), 0.0}; }
Vec3 hopf_b(double s) { return {1.0 + std::cos(s), 0.0, std::sin(s)}; }

// Two (1,2) curves on a torus, half a turn apart: the (2,4) torus link.
Vec3 torus_a(double t) { return {(2 + std::cos(2 * t)) * std::cos(t), (2 + std::cos(2 * t)) * std::sin(t), std::sin(2 * t)}; }
Vec3 torus_b(double t) { return {(2 - std::cos(2 * t)) * std::cos(t), (2 - std::cos(2 * t)) * std::sin(t), -std::sin(2 * t)}; }

Vec3 far_circle(double s) { return {5.0 + std::cos(s), std::sin(s), 0.0}; }

} // namespace

TEST_SUITE("linking") {

TEST_CASE("linking numbers match the Gauss integral oracle")
{
    struct Case {
        Param a, b;
    };
    for (const Case& c : {Case{hopf_a, hopf_b}, Case{torus_a, torus_b}, Case{hopf_a, far_circle}}) {
        const double oracle = oracle_gauss_integral(c.a, c.b, 400);
        const int expected = static_cast<int>(std::lround(oracle));
        CHECK(std::abs(oracle - expected) < 1e-2);
        const OrientedLoop a(sample(c.a, 200));
        const OrientedLoop b(sample(c.b, 200));
        CHECK(linking_number(a, b) == expected);
        CHECK(gauss_linking_sum(a, b) == doctest::Approx(expected).epsilon(1e-6));
    }
    CHECK(std::abs(std::lround(oracle_gauss_integral(torus_a, torus_b, 400))) == 2);
}

TEST_CASE("symmetry and orientation reversal")
{
    const OrientedLoop a(sample(torus_a, 150));
    const OrientedLoop b(sample(torus_b, 170));
    const int ab = linking_number(a, b);
    CHECK(linking_number(b, a) == ab);
    CHECK(linking_number(a.reversed(), b) == -ab);
    CHECK(linking_number(a.reversed(), b.reversed()) == ab);
}

TEST_CASE("crossing count agrees with the Gauss sum for several directions")
{
    const OrientedLoop a(sample(hopf_a, 64));
    const OrientedLoop b(sample(hopf_b, 64));
    const int lk = linking_number(a, b);
    int counted = 0;
    for (const Vec3 d : {Vec3(0.1, 0.2, 1.0), Vec3(1.0, 0.3, 0.2), Vec3(-0.4, 1.0, 0.7)}) {
        const auto c = crossing_linking_number(a, b, d.normalized());
        if (c) {
            CHECK(*c == lk);
            ++counted;
        }
    }
    CHECK(counted > 0);
}

TEST_CASE("touching loops are rejected")
{
    const OrientedLoop a(sample(hopf_a, 64));
    const OrientedLoop b(sample([](double s) { return Vec3(2.0 + std::cos(s), std::sin(s), 0.0); }, 64));
    CHECK_THROWS_AS(linking_number(a, b), GeometryError);
}

TEST_CASE("lambda of disks, bands and the punctured torus")
{
    CHECK(lambda_invariant(shapes::disk(1.0, 32, 3)) == 0);
    CHECK(lambda_invariant(shapes::perturbed_disk(0.4, 32, 4)) == 0);
    CHECK(lambda_invariant(shapes::punctured_torus(1.0, 0.4, 32, 16)) == 0);
    const int mob = lambda_invariant(shapes::mobius_strip());
    CHECK(std::abs(mob) == 2);
    const int three = lambda_invariant(shapes::twisted_band(1.0, 0.3, 3, 96, 5));
    CHECK(std::abs(three) == 6);
    for (int l : {mob, three}) {
        CHECK(l % 2 == 0);
        CHECK(std::abs(l / 2) % 2 == 1);
    }
    CHECK(is_generalized_mobius(shapes::mobius_strip()));
    CHECK_FALSE(is_generalized_mobius(shapes::disk(1.0, 32, 3)));
}

TEST_CASE("lambda needs exactly one boundary loop")
{
    CHECK_THROWS_AS(lambda_invariant(shapes::annulus(0.5, 1.0, 32, 3)), PreconditionError);
    CHECK_THROWS_AS(lambda_invariant(shapes::icosphere(1.0, 1)), PreconditionError);
}

TEST_CASE("lambda is stable under refinement, rigid motion and epsilon")
{
    const TriangleMesh mob = shapes::mobius_strip();
    const LambdaResult base = lambda_invariant_detailed(mob, std::nullopt);
    CHECK(lambda_invariant(shapes::subdivide(mob)) == base.lambda);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(0.9, Eigen::Vector3d(1, -1, 2).normalized()).toRotationMatrix();
    CHECK(lambda_invariant(shapes::rigid_motion(mob, r, Vec3(4, 1, -2))) == base.lambda);
    CHECK(lambda_invariant(mob, base.epsilon * 0.5) == base.lambda);
}

TEST_CASE("pushed-in curve stays in the collar")
{
    const TriangleMesh mob = shapes::mobius_strip();
    const double eps = default_push_distance(mob);
    const OrientedLoop pushed = pushed_in_curve(mob, eps);
    const Eigen::Matrix3Xd boundary = mob.loop_points(0);
    CHECK(pushed.size() == boundary.cols());
    for (Eigen::Index i = 0; i < pushed.points().cols(); ++i) {
        double best = 1e300;
        for (Eigen::Index j = 0; j < boundary.cols(); ++j) {
            best = std::min(best, (pushed.points().col(i) - boundary.col(j)).norm());
        }
        CHECK(best > 0.5 * eps);
        CHECK(best < 1.5 * eps);
    }
}

} // TEST_SUITE
