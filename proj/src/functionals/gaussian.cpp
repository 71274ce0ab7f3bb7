#include "mcflab/errors.hpp"
#include "mcflab/functionals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace mcflab {

namespace {

constexpr double kPi = std::numbers::pi;

// Degree-5 seven-point rule (barycentric coordinates, weights sum to 1).
struct RulePoint {
    double l0, l1, l2, w;
};
constexpr std::array<RulePoint, 7> kRule7{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
}};
// Degree-2 three-point rule, used for the error estimate.
constexpr std::array<RulePoint, 3> kRule3{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
}};

constexpr double kContributionCutoff = 1e-17;
constexpr int kMaxDepth = 20;

class TriangleIntegrator {
public:
    explicit TriangleIntegrator(const GaussianKernel& kernel)
        : kernel_(kernel), split_diameter_(0.2 * std::sqrt(kernel.lambda)),
          norm_(1.0 / (4.0 * kPi * kernel.lambda)), inv4l_(1.0 / (4.0 * kernel.lambda))
    {
    }

    void integrate(const Vec3& a, const Vec3& b, const Vec3& c, int depth, QuadratureResult& acc) const
    {
        const double area = 0.5 * (b - a).cross(c - a).norm();
        const Vec3 g = (a + b + c) / 3.0;
        const double radius =
            std::sqrt(std::max({(a - g).squaredNorm(), (b - g).squaredNorm(), (c - g).squaredNorm()}));
        const double gap = std::max(0.0, (g - kernel_.center).norm() - radius);
        const double bound = area * norm_ * std::exp(-gap * gap * inv4l_);
        if (bound < kContributionCutoff) {
            acc.error += bound;
            return;
        }
        const double diam = std::sqrt(
            std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()}));
        if (diam > split_diameter_ && depth < kMaxDepth) {
            const Vec3 ab = 0.5 * (a + b);
            const Vec3 bc = 0.5 * (b + c);
            const Vec3 ca = 0.5 * (c + a);
            integrate(a, ab, ca, depth + 1, acc);
            integrate(ab, b, bc, depth + 1, acc);
            integrate(ca, bc, c, depth + 1, acc);
            integrate(ab, bc, ca, depth + 1, acc);
            return;
        }
        double q7 = 0.0;
        for (const RulePoint& r : kRule7) {
            q7 += r.w * density(r.l0 * a + r.l1 * b + r.l2 * c);
        }
        double q3 = 0.0;
        for (const RulePoint& r : kRule3) {
            q3 += r.w * density(r.l0 * a + r.l1 * b + r.l2 * c);
        }
        acc.value += area * q7;
        acc.error += area * std::abs(q7 - q3);
    }

private:
    double density(const Vec3& x) const
    {
        return norm_ * std::exp(-(x - kernel_.center).squaredNorm() * inv4l_);
    }

    const GaussianKernel& kernel_;
    double split_diameter_;
    double norm_;
    double inv4l_;
};

} // namespace

GaussianKernel::GaussianKernel(Vec3 c, double l) : center(std::move(c)), lambda(l)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw PreconditionError("gaussian kernel: lambda must be positive and finite");
    }
    if (!center.allFinite()) {
        throw PreconditionError("gaussian kernel: non-finite center");
    }
}

double GaussianKernel::operator()(const Vec3& x) const
{
    return std::exp(-(x - center).squaredNorm() / (4.0 * lambda)) / (4.0 * kPi * lambda);
}

QuadratureResult gaussian_area_estimate(const TriangleMesh& mesh, const GaussianKernel& kernel)
{
    QuadratureResult acc;
    const TriangleIntegrator integrator(kernel);
    const auto& x = mesh.vertices();
    for (const Face& f : mesh.faces()) {
        integrator.integrate(x[f[0]], x[f[1]], x[f[2]], 0, acc);
    }
    return acc;
}

QuadratureResult exterior_cone_gaussian_estimate(const DiscreteCurve& curve, const Vec3& cone_vertex,
                                                 const GaussianKernel& kernel)
{
    if (curve.dimension() != 3) {
        throw PreconditionError("exterior cone: curve must lie in R^3");
    }
    const double tol = kOnCurveTolerance * curve.bbox_diagonal();
    const double lambda = kernel.lambda;
    const Vec3 offset = kernel.center - cone_vertex;
    const double c_term = offset.squaredNorm() / (4.0 * lambda);
    QuadratureResult total;

    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        const Vec3 a = curve.vertex(i);
        const Vec3 b = curve.vertex(i + 1);
        const Vec3 p = a - cone_vertex;
        const Vec3 q = b - cone_vertex;
        const Vec3 e = b - a;
        const double u = std::clamp(-p.dot(e) / e.squaredNorm(), 0.0, 1.0);
        if ((p + u * e).norm() <= tol) {
            continue; // the cone over an edge through its vertex has no area
        }
        const double p_len = p.norm();
        const Vec3 p_hat = p / p_len;
        const Vec3 t = q - q.dot(p_hat) * p_hat;
        const double t_len = t.norm();
        if (t_len <= 1e-15 * q.norm()) {
            continue; // edge seen end-on
        }
        const Vec3 t_hat = t / t_len;
        const double theta = std::atan2(t_len, q.dot(p_hat));
        // Interior angle of the triangle (w, a, b) at a.
        const double alpha = std::atan2((-p).cross(e).norm(), (-p).dot(e));
        const double sin_alpha = std::sin(alpha);

        // Parametrize the edge by the angle phi it subtends at the cone
        // vertex; the cone area element is then r^2 s ds dphi.
        auto integrand = [&](double phi) {
            const double r = p_len * sin_alpha / std::sin(alpha + phi);
            const Vec3 d = r * (std::cos(phi) * p_hat + std::sin(phi) * t_hat);
            const double A = r * r / (4.0 * lambda);
            const double B = d.dot(offset) / (4.0 * lambda);
            const double m = B / A;
            const double q1 = A - 2.0 * B + c_term;
            const double perp = std::max(0.0, c_term - B * m);
            // r^2 * int_1^inf s exp(-(A s^2 - 2 B s + C)) ds, in closed form.
            double radial = 2.0 * lambda * std::exp(-q1);
            if (m != 0.0) {
                radial += r * r * m * 0.5 * std::sqrt(kPi / A) *
                          std::erfc(std::sqrt(A) * (1.0 - m)) * std::exp(-perp);
            }
            return radial / (4.0 * kPi * lambda);
        };
        double err = 0.0;
        const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            integrand, 0.0, theta, 12, 1e-11, &err);
        total.value += value;
        total.error += err;
    }
    return total;
}

} // namespace mcflab
