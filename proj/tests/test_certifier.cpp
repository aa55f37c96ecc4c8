#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "synclab/certifier.hpp"
#include "synclab/errors.hpp"
#include "synclab/product.hpp"
#include "synclab/rng.hpp"
#include "synclab/systems.hpp"

using namespace synclab;

namespace {

PlanarMap polar_map(double mu = 1e-7) {
    return PlanarPolarMap(mu).as_planar_map();
}

ProductStructure axis_split() { return ProductStructure::identity(2, {0}); }

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

std::size_t count_kind(const std::vector<SectionFixedPoint>& pts,
                       FixedPointKind k) {
    std::size_t n = 0;
    for (const auto& p : pts) n += (p.kind == k);
    return n;
}

}  // namespace

TEST_CASE("fixed point search lands on the attracting center") {
    PlanarMap F = polar_map();
    Vec2 z = find_fixed_point(F, {0.0, 0.0}, 0.9, 1e-11);
    // The radial multiplier at the origin is 1 - 14400 mu, so Newton parks
    // within residual / 0.00144 of the exact fixed point.
    CHECK(norm(z) < 1e-8);
    Vec2 img = F(z);
    CHECK(norm({img.x - z.x, img.y - z.y}) < 1e-11);
}

TEST_CASE("fixed point search accepts an identity map and rejects a shift") {
    PlanarMap id{[](const Vec2& p) { return p; }, {}};
    Vec2 z = find_fixed_point(id, {0.2, -0.1}, 0.5, 1e-11);
    Vec2 img = id(z);
    CHECK(img.x == z.x);
    CHECK(img.y == z.y);

    PlanarMap shift{[](const Vec2& p) { return Vec2{p.x + 1.0, p.y}; }, {}};
    CHECK_THROWS_AS(find_fixed_point(shift, {0.0, 0.0}, 0.9, 1e-11),
                    not_found_error);
    CHECK_THROWS_AS(find_fixed_point(id, {0.0, 0.0}, 0.0, 1e-11), config_error);
    CHECK_THROWS_AS(find_fixed_point(id, {0.0, 0.0}, 0.9, 0.0), config_error);
}

TEST_CASE("section along the vertical leaf matches the closed form") {
    PlanarPolarMap polar;
    PlanarMap F = polar.as_planar_map();
    auto psi = slave_section(F, axis_split(), {0.0, 0.0});
    // Leaf x = 0: the point (0, t) sits at angle pi/2 and radius t, so the
    // image response coordinate is alpha(t) cos(2 pi t^2).
    for (int k = 0; k <= 5 * 256; ++k) {
        double t = k / 256.0;
        double ref = polar.alpha(t) * std::cos(2.0 * std::numbers::pi * t * t);
        REQUIRE(std::abs(psi(t) - ref) < 1e-12);
    }
    CHECK(psi(0.0) == 0.0);
    CHECK(psi(2.0) == 2.0);
}

TEST_CASE("section requires a planar structure with a one dimensional drive") {
    PlanarMap F = polar_map();
    CHECK_THROWS_AS(slave_section(F, ProductStructure::identity(3, {0}), {0.0, 0.0}),
                    config_error);
}

TEST_CASE("fixed point scan separates crossings from touch points") {
    auto linear = [](double t) { return 0.5 * t; };
    auto pts = count_fixed_points(linear, {-1.0, 1.0}, 1e-4, 1e-12);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].kind == FixedPointKind::transversal);
    CHECK(std::abs(pts[0].t) < 1e-10);

    // Pure twist: the radius is preserved, so the vertical leaf touches the
    // diagonal exactly where the rotation closes up, at integer grid points.
    // Touch points off the grid stay invisible to a sign-change scan.
    auto psi0 = slave_section(polar_map(0.0), axis_split(), {0.0, 0.0});
    auto touch = count_fixed_points(psi0, {0.05, 4.95}, 1e-4, 1e-12);
    REQUIRE(touch.size() == 4);
    for (std::size_t i = 0; i < touch.size(); ++i) {
        CHECK(touch[i].kind == FixedPointKind::tangential);
        CHECK(touch[i].t == doctest::Approx(static_cast<double>(i + 1)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(count_fixed_points(linear, {1.0, -1.0}, 1e-4, 1e-12),
                    config_error);
    CHECK_THROWS_AS(count_fixed_points(linear, {-1.0, 1.0}, 2e-4, 1e-12),
                    config_error);
    CHECK_THROWS_AS(count_fixed_points(linear, {-1.0, 1.0}, 1e-4, 0.0),
                    config_error);
}

TEST_CASE("section census at the default parameters") {
    auto psi = slave_section(polar_map(), axis_split(), {0.0, 0.0});
    auto pts = count_fixed_points(psi, {0.0, 5.0}, 1e-4, 1e-12);
    REQUIRE(pts.size() == 22);
    CHECK(count_kind(pts, FixedPointKind::transversal) == 16);
    CHECK(count_kind(pts, FixedPointKind::tangential) == 6);
    // Touch points at the invariant integer radii, including both endpoints.
    std::size_t next_int = 0;
    for (const auto& p : pts)
        if (p.kind == FixedPointKind::tangential) {
            CHECK(p.t == doctest::Approx(static_cast<double>(next_int)).epsilon(1e-12));
            ++next_int;
        }
    CHECK(next_int == 6);

    // The crossing pair around sqrt(2), pinned to reference values computed
    // with an independent high-precision bisection.
    double lo_root = 0.0, hi_root = 0.0;
    for (const auto& p : pts) {
        if (p.t > 1.40 && p.t < 1.414) lo_root = p.t;
        if (p.t > 1.414 && p.t < 1.42) hi_root = p.t;
    }
    CHECK(lo_root == doctest::Approx(1.4125242664272009).epsilon(1e-9));
    CHECK(hi_root == doctest::Approx(1.4159027949446331).epsilon(1e-9));

    // Every reported point solves psi(t) = t to scan accuracy.
    for (const auto& p : pts) REQUIRE(std::abs(psi(p.t) - p.t) < 1e-10);
}

TEST_CASE("certify anchors the section and reports the census") {
    PlanarMap F = polar_map();
    auto certs = certify(F, {axis_split()}, {0.0, 5.0}, CertifyConfig{});
    REQUIRE(certs.size() == 1);
    const auto& c = certs[0];
    CHECK(c.structure_id == 0);
    CHECK(c.verdict == CertVerdict::non_synchronizing_for_structure);
    CHECK(norm(c.fixed_point) < 1e-8);
    CHECK(c.fixed_points.size() >= 2);

    // The anchored leaf coordinate appears in the reported list.
    bool anchored_listed = false;
    for (const auto& p : c.fixed_points)
        anchored_listed |= std::abs(p.t - c.anchor_t) < 1e-9;
    CHECK(anchored_listed);

    // Re-evaluate the section at each reported point.
    auto psi = slave_section(F, axis_split(), c.fixed_point);
    for (const auto& p : c.fixed_points) REQUIRE(std::abs(psi(p.t) - p.t) < 1e-10);
}

TEST_CASE("certify verdict is invariant across the rotation family") {
    PlanarMap F = polar_map();
    auto family = rotation_family(13);
    REQUIRE(family.size() == 13);
    auto certs = certify(F, family, {0.0, 5.0}, CertifyConfig{});
    REQUIRE(certs.size() == 13);
    for (std::size_t i = 0; i < certs.size(); ++i) {
        CHECK(certs[i].structure_id == i);
        CHECK(certs[i].verdict == CertVerdict::non_synchronizing_for_structure);
        CHECK(certs[i].fixed_points.size() >= 2);
    }
    CHECK_THROWS_AS(rotation_family(0), config_error);
    CHECK_THROWS_AS(certify(F, {}, {0.0, 5.0}, CertifyConfig{}), config_error);
}

TEST_CASE("certify is inconclusive when the section has a single fixed point") {
    PlanarMap half{[](const Vec2& p) { return Vec2{0.5 * p.x, 0.5 * p.y}; }, {}};
    auto certs = certify(half, {axis_split()}, {0.0, 5.0}, CertifyConfig{});
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].verdict == CertVerdict::inconclusive);
    CHECK(certs[0].fixed_points.size() == 1);
    CHECK(certs[0].note.find("fewer than two") != std::string::npos);
}

TEST_CASE("certify flags a degenerate section where every leaf point is fixed") {
    PlanarMap id{[](const Vec2& p) { return p; }, {}};
    auto certs = certify(id, {axis_split()}, {0.0, 5.0}, CertifyConfig{});
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].verdict == CertVerdict::non_synchronizing_for_structure);
    CHECK(certs[0].note.find("degenerate section") != std::string::npos);
}

TEST_CASE("certify survives a failed fixed point search") {
    PlanarMap shift{[](const Vec2& p) { return Vec2{p.x + 1.0, p.y}; }, {}};
    auto certs = certify(shift, {axis_split()}, {0.0, 5.0}, CertifyConfig{});
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].verdict == CertVerdict::inconclusive);
    CHECK(certs[0].fixed_points.empty());
    CHECK(certs[0].note.find("fixed point search failed") != std::string::npos);
}

TEST_CASE("certify verdicts agree across affine changes of coordinates") {
    PlanarPolarMap polar;
    PlanarMap F = polar.as_planar_map();
    auto base = certify(F, {axis_split()}, {0.0, 5.0}, CertifyConfig{});

    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(substream(1234, s));
        Mat A(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                A(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * rng.symmetric();
        Vec b = {0.2 * rng.symmetric(), 0.2 * rng.symmetric()};
        double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        REQUIRE(std::abs(det) > 0.3);
        Mat Ai(2, 2);
        Ai(0, 0) = A(1, 1) / det;
        Ai(0, 1) = -A(0, 1) / det;
        Ai(1, 0) = -A(1, 0) / det;
        Ai(1, 1) = A(0, 0) / det;
        // G = C^-1 o F o C for the coordinate change C(p) = A p + b, so the
        // section of G in the transported structure equals the section of F
        // in the identity structure.
        PlanarMap G{[=](const Vec2& p) {
                        Vec2 q{A(0, 0) * p.x + A(0, 1) * p.y + b[0],
                               A(1, 0) * p.x + A(1, 1) * p.y + b[1]};
                        Vec2 w = F(q);
                        Vec2 u{w.x - b[0], w.y - b[1]};
                        return Vec2{Ai(0, 0) * u.x + Ai(0, 1) * u.y,
                                    Ai(1, 0) * u.x + Ai(1, 1) * u.y};
                    },
                    {}};
        ProductStructure S(A, b, {0});
        auto moved = certify(G, {S}, {0.0, 5.0}, CertifyConfig{});
        REQUIRE(moved.size() == 1);
        CHECK(moved[0].verdict == base[0].verdict);
        CHECK(moved[0].fixed_points.size() >= 2);
    }
}

TEST_CASE("perturbations respect the amplitude bound and the support disk") {
    const double eps = 0.37;
    for (std::uint64_t s = 0; s < 50; ++s) {
        Perturbation eta = make_perturbation({eps, 3, s});
        REQUIRE(eta.ax.size() == 4);
        double sup = 0.0;
        for (int i = 0; i <= 120; ++i)
            for (int j = 0; j < 120; ++j) {
                double r = 6.0 * i / 120.0;
                double th = 2.0 * std::numbers::pi * j / 120.0;
                Vec2 v = eta({r * std::cos(th), r * std::sin(th)});
                sup = std::max(sup, norm(v));
            }
        REQUIRE(sup <= eps * (1.0 + 1e-12));
        REQUIRE(sup > 0.05 * eps);
        // Vanishes identically outside radius 6.
        CHECK(norm(eta({6.0001, 0.0})) == 0.0);
        CHECK(norm(eta({-5.0, 4.0})) == 0.0);
    }

    // Seed determinism, bit for bit.
    Perturbation a = make_perturbation({0.2, 3, 77});
    Perturbation b = make_perturbation({0.2, 3, 77});
    Vec2 pa = a({1.3, -0.4}), pb = b({1.3, -0.4});
    CHECK(pa.x == pb.x);
    CHECK(pa.y == pb.y);
    Perturbation c = make_perturbation({0.2, 3, 78});
    Vec2 pc = c({1.3, -0.4});
    CHECK(pa.x != pc.x);

    Perturbation zero = make_perturbation({0.0, 3, 5});
    CHECK(norm(zero({1.0, 2.0})) == 0.0);
    CHECK_THROWS_AS(make_perturbation({-0.1, 3, 0}), config_error);
}

TEST_CASE("perturbed map is forward only and keeps a nearby fixed point") {
    PlanarMap F = polar_map();
    Perturbation eta = make_perturbation({1e-5, 3, 1});
    PlanarMap G = perturbed_map(F, eta);
    CHECK_FALSE(G.has_inverse());
    Vec2 z = find_fixed_point(G, {0.0, 0.0}, 0.9, 1e-11);
    CHECK(norm(z) < 0.05);
    Vec2 img = G(z);
    CHECK(norm({img.x - z.x, img.y - z.y}) < 1e-10);
}

TEST_CASE("perturbation sweep reports one cell per epsilon sample structure") {
    PlanarMap F = polar_map();
    auto rep = perturbation_sweep(F, {1e-4, 1e-3, 1e-2, 1e-1}, 20, {axis_split()},
                                  7, {0.0, 5.0}, CertifyConfig{});
    CHECK(rep.eps_list.size() == 4);
    REQUIRE(rep.cells.size() == 80);
    REQUIRE(rep.success_fraction.size() == 4);
    // Small perturbations never destroy the certificate; at amplitude 0.1 a
    // quarter of the sampled directions push every secondary crossing below
    // the diagonal.
    CHECK(rep.success_fraction[0] == 1.0);
    CHECK(rep.success_fraction[1] == 1.0);
    CHECK(rep.success_fraction[2] == 1.0);
    CHECK(rep.success_fraction[3] == doctest::Approx(0.75).epsilon(1e-12));
    for (const auto& cell : rep.cells) {
        CHECK(cell.structure_id == 0);
        if (cell.verdict == CertVerdict::non_synchronizing_for_structure)
            CHECK(cell.n_fixed_points >= 2);
    }

    CHECK_THROWS_AS(perturbation_sweep(F, {1e-2, 1e-3}, 2, {axis_split()}, 7,
                                       {0.0, 5.0}, CertifyConfig{}),
                    config_error);
    CHECK_THROWS_AS(perturbation_sweep(F, {}, 2, {axis_split()}, 7, {0.0, 5.0},
                                       CertifyConfig{}),
                    config_error);
    CHECK_THROWS_AS(perturbation_sweep(F, {1e-3}, 0, {axis_split()}, 7,
                                       {0.0, 5.0}, CertifyConfig{}),
                    config_error);
}

TEST_CASE("critical amplitude bracket for a seeded direction is reproducible") {
    PlanarMap F = polar_map();
    auto br = estimate_critical_epsilon(F, axis_split(), 23, 1e-4, 1e-1, 12,
                                        {0.0, 5.0}, CertifyConfig{});
    CHECK(br.lo == doctest::Approx(0.0182215087890625).epsilon(1e-12));
    CHECK(br.hi == doctest::Approx(0.0182458984375).epsilon(1e-12));
    CHECK(br.hi - br.lo ==
          doctest::Approx((1e-1 - 1e-4) / 4096.0).epsilon(1e-9));

    // Both bracket preconditions are enforced.
    CHECK_THROWS_WITH_AS(estimate_critical_epsilon(F, axis_split(), 23, 0.05,
                                                   1e-1, 4, {0.0, 5.0},
                                                   CertifyConfig{}),
                         "certificate already fails at eps_lo", config_error);
    CHECK_THROWS_WITH_AS(estimate_critical_epsilon(F, axis_split(), 0, 1e-4,
                                                   1e-1, 4, {0.0, 5.0},
                                                   CertifyConfig{}),
                         "certificate still holds at eps_hi", config_error);
    CHECK_THROWS_AS(estimate_critical_epsilon(F, axis_split(), 23, 1e-1, 1e-4,
                                              4, {0.0, 5.0}, CertifyConfig{}),
                    config_error);
}

TEST_CASE("radial push destroys the certificate while a tangential swirl cannot") {
    PlanarPolarMap polar;
    PlanarMap F = polar.as_planar_map();
    auto weight = [](const Vec2& p) {
        double w = 36.0 - (p.x * p.x + p.y * p.y);
        return w > 0.0 ? w * w / 1296.0 : 0.0;
    };
    // Same magnitude profile, orthogonal directions.
    PerturbationFn radial = [&](const Vec2& p) {
        double w = weight(p);
        return Vec2{-w * p.x, -w * p.y};
    };
    PerturbationFn tangent = [&](const Vec2& p) {
        double w = weight(p);
        return Vec2{-w * p.y, w * p.x};
    };

    // Pulling inward shrinks every image radius; the last crossing to survive
    // sits near radius sqrt(14), where the radial polynomial bump is tallest
    // relative to the cutoff weight.  Balancing the two terms there puts the
    // critical amplitude near 3.8e-3.
    auto br = estimate_critical_epsilon_dir(F, axis_split(), radial, 1e-4, 1.0,
                                            16, {0.0, 5.0}, CertifyConfig{});
    CHECK(br.lo == doctest::Approx(0.0038227722167968742).epsilon(1e-9));
    CHECK(br.hi == doctest::Approx(0.0038380294799804679).epsilon(1e-9));

    // The swirl moves leaf points along the drive direction only, so the
    // response coordinate of the section never changes and the certificate
    // holds at any amplitude.
    CHECK_THROWS_WITH_AS(estimate_critical_epsilon_dir(F, axis_split(), tangent,
                                                       1e-4, 1.0, 16, {0.0, 5.0},
                                                       CertifyConfig{}),
                         "certificate still holds at eps_hi", config_error);
}
