#include "synclab/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "synclab/errors.hpp"
#include "synclab/rng.hpp"

namespace synclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Strictness margin for open-interval and ordering comparisons.
constexpr double kStrict = 1e-9;
// Unwrap increments at or beyond this many turns are ambiguous.
constexpr double kUnwrapGuard = 0.45;

double principal_x(const Vec2& p) {
    double x = std::atan2(p.y, p.x) / kTwoPi;
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0;  // floor rounding at the seam
    return x;
}

// Signed representative of d mod 1 in [-0.5, 0.5].
double wrap_half(double d) {
    return d - std::round(d);
}

// Continues the unwrapped value ref by the principal sample raw in [0,1).
// Throws when the step is too large to resolve the winding.
double unwrap_step(double ref, double raw, const char* what) {
    double inc = wrap_half(raw - (ref - std::floor(ref)));
    if (std::abs(inc) >= kUnwrapGuard)
        throw resolution_error(std::string(what) +
                               ": angle step too large, increase sampling");
    return ref + inc;
}

double annulus_dist2(double x0, double s0, double x1, double s1) {
    double dx = wrap_half(x0 - x1);
    double ds = s0 - s1;
    return dx * dx + ds * ds;
}

}  // namespace

AnnulusAdapter::AnnulusAdapter(PlanarMap m, double rin, double rout)
    : base(std::move(m)), r_in(rin), r_out(rout) {
    if (!(rin >= 0.0) || !(rout > rin))
        throw config_error("annulus radii must satisfy 0 <= r_in < r_out");
}

Vec2 AnnulusAdapter::plane_point(double x, double s) const {
    double r = radius_of(s);
    double th = kTwoPi * x;
    return {r * std::cos(th), r * std::sin(th)};
}

std::pair<double, double> AnnulusAdapter::annulus_coords(const Vec2& p) const {
    double r = p.norm();
    return {principal_x(p), (r - r_in) / width()};
}

std::pair<double, double> AnnulusAdapter::apply_principal(double x, double s) const {
    return annulus_coords(base(plane_point(x, s)));
}

bool AnnulusAdapter::boundary_invariant(double tol, std::size_t samples) const {
    for (std::size_t i = 0; i < samples; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(samples);
        double rb = base(plane_point(x, 0.0)).norm();
        double rt = base(plane_point(x, 1.0)).norm();
        if (std::abs(rb - r_in) > tol * (1.0 + r_in)) return false;
        if (std::abs(rt - r_out) > tol * (1.0 + r_out)) return false;
    }
    return true;
}

double Lift::radial_anchor(double r) const {
    if (!(r > 0.0)) throw config_error("lift anchor needs r > 0");
    // Start close enough to the origin that the image angle is near the
    // continuous limit along theta=0, then continue outward.
    double rho0 = std::min(r * 0.5, 1.0 / 64.0);
    Vec2 q0 = adapter.base(Vec2{rho0, 0.0});
    if (q0.norm() < 1e-12)
        throw resolution_error("lift anchor: image ray passes through the origin");
    double u = wrap_half(principal_x(q0));
    std::size_t n = std::max<std::size_t>(unwrap_n, 64);
    for (std::size_t j = 1; j <= n; ++j) {
        double rho = rho0 + (r - rho0) * static_cast<double>(j) / static_cast<double>(n);
        Vec2 q = adapter.base(Vec2{rho, 0.0});
        if (q.norm() < 1e-12)
            throw resolution_error("lift anchor: image ray passes through the origin");
        u = unwrap_step(u, principal_x(q), "lift anchor");
    }
    return u;
}

std::pair<double, double> Lift::point(double x, double s) const {
    double r = adapter.radius_of(s);
    double u = radial_anchor(r) + static_cast<double>(sheet);
    std::size_t n = std::max<std::size_t>(unwrap_n, 64);
    double s_img = 0.0;
    {
        auto [x0, s0] = adapter.apply_principal(0.0, s);
        (void)x0;
        s_img = s0;
    }
    for (std::size_t j = 1; j <= n; ++j) {
        double xi = x * static_cast<double>(j) / static_cast<double>(n);
        auto [xr, sr] = adapter.apply_principal(xi, s);
        u = unwrap_step(u, xr, "lift");
        s_img = sr;
    }
    return {u, s_img};
}

DisplacementRange boundary_displacement(const Lift& lift, BoundaryId boundary,
                                        std::size_t grid_n) {
    if (grid_n < 64) throw config_error("boundary displacement needs grid_n >= 64");
    const AnnulusAdapter& ad = lift.adapter;
    double r = boundary == BoundaryId::bottom ? ad.r_in : ad.r_out;
    double s = boundary == BoundaryId::bottom ? 0.0 : 1.0;
    double u0 = lift.radial_anchor(r) + static_cast<double>(lift.sheet);
    double u = u0;
    DisplacementRange range{u0, u0};
    for (std::size_t j = 1; j <= grid_n; ++j) {
        double x = static_cast<double>(j) / static_cast<double>(grid_n);
        auto [xr, sr] = ad.apply_principal(x, s);
        (void)sr;
        u = unwrap_step(u, xr, "boundary displacement");
        if (j < grid_n) {
            double d = u - x;
            range.min = std::min(range.min, d);
            range.max = std::max(range.max, d);
        }
    }
    // Closing the loop must gain exactly one turn (degree-1 circle map).
    if (std::abs(u - 1.0 - u0) > 1e-6)
        throw resolution_error("boundary displacement: lift does not close up");
    return range;
}

DisplacementReport displacement_report(const Lift& lift, std::size_t grid_n) {
    DisplacementReport rep;
    rep.sheet = lift.sheet;
    rep.bottom = boundary_displacement(lift, BoundaryId::bottom, grid_n);
    rep.top = boundary_displacement(lift, BoundaryId::top, grid_n);
    return rep;
}

namespace {

// Admissible integers in the open interval (lo, hi), strict by kStrict.
WindowResult window_from_interval(double lo, double hi) {
    WindowResult w;
    w.lo = lo;
    w.hi = hi;
    if (!(hi > lo)) return w;
    long long k0 = static_cast<long long>(std::ceil(lo + kStrict));
    long long k1 = static_cast<long long>(std::floor(hi - kStrict));
    // Borderline when relaxing the margin would admit an extra integer.
    long long r0 = static_cast<long long>(std::ceil(lo - kStrict));
    long long r1 = static_cast<long long>(std::floor(hi + kStrict));
    if (r0 < k0 || r1 > k1) {
        // Only flag integers that are genuinely near an endpoint, not ones
        // excluded outright.
        for (long long k = r0; k <= r1; ++k) {
            if (k >= k0 && k <= k1) continue;
            if (std::abs(static_cast<double>(k) - lo) <= kStrict ||
                std::abs(static_cast<double>(k) - hi) <= kStrict)
                w.borderline = true;
        }
    }
    for (long long k = k0; k <= k1 && w.witnesses.size() < 64; ++k)
        w.witnesses.push_back(static_cast<int>(k));
    if (!w.witnesses.empty()) {
        int best = w.witnesses.front();
        for (int k : w.witnesses)
            if (std::abs(k) < std::abs(best)) best = k;
        w.witness = best;
    }
    return w;
}

}  // namespace

WindowResult condition_ii_check(const DisplacementReport& rep) {
    // Need max(bottom) + k < 0 < min(top) + k.
    return window_from_interval(-rep.top.min, -rep.bottom.max);
}

WindowResult condition_iii_check(const DisplacementReport& rep) {
    // Need max(bottom) + k < -1 and min(top) + k > +1.
    return window_from_interval(1.0 - rep.top.min, -1.0 - rep.bottom.max);
}

ConditionIEvidence condition_i_check(const AnnulusAdapter& adapter, double c,
                                     std::size_t n_iter, double tol) {
    if (!(c > adapter.r_in && c < adapter.r_out))
        throw config_error("condition (i) needs r_in < c < r_out");
    if (!(tol > 0.0)) throw config_error("condition (i) needs tol > 0");
    if (!adapter.boundary_invariant())
        throw error("condition (i): annulus boundary is not invariant");
    bool backward_ok = adapter.base.has_inverse();
    if (!backward_ok)
        throw config_error("condition (i) backward iteration needs an inverse map");

    constexpr std::size_t kCurveN = 256;
    double s_c = (c - adapter.r_in) / adapter.width();

    ConditionIEvidence ev;

    // One application: the circle must land strictly above itself.
    {
        double min_up = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < kCurveN; ++i) {
            double x = static_cast<double>(i) / kCurveN;
            auto [xi, si] = adapter.apply_principal(x, s_c);
            (void)xi;
            min_up = std::min(min_up, si - s_c);
        }
        ev.separation = min_up;
    }
    bool moved_up = ev.separation > kStrict;

    // Iterate the sampled circle; the sup distance to the target boundary must
    // shrink monotonically, which justifies stopping once it clears tol/2.
    auto accumulate = [&](bool forward, std::size_t& iters, double& dist,
                          bool& early) {
        double s_b = forward ? 1.0 : 0.0;
        std::vector<Vec2> pts(kCurveN);
        for (std::size_t i = 0; i < kCurveN; ++i)
            pts[i] = adapter.plane_point(static_cast<double>(i) / kCurveN, s_c);
        double prev = std::abs(s_c - s_b);
        for (std::size_t k = 1; k <= n_iter; ++k) {
            double m = 0.0;
            for (auto& p : pts) {
                p = forward ? adapter.base(p) : adapter.base.inv(p);
                double s = (p.norm() - adapter.r_in) / adapter.width();
                m = std::max(m, std::abs(s - s_b));
            }
            if (m > prev + 1e-12) ev.monotone = false;
            prev = m;
            iters = k;
            dist = m;
            if (m <= 0.5 * tol && ev.monotone) {
                early = k < n_iter;
                return m <= tol;
            }
        }
        return dist <= tol;
    };

    bool fwd = accumulate(true, ev.iters_forward, ev.dist_forward,
                          ev.early_exit_forward);
    bool bwd = accumulate(false, ev.iters_backward, ev.dist_backward,
                          ev.early_exit_backward);

    ev.pass = moved_up && fwd && bwd && ev.monotone;
    return ev;
}

TypeReport type_report(const AnnulusAdapter& adapter, double c, const TypeConfig& cfg) {
    TypeReport rep;
    rep.condition_i = condition_i_check(adapter, c, cfg.n_iter, cfg.tol);
    Lift lift{adapter, 0, cfg.unwrap_n};
    rep.displacements = displacement_report(lift, cfg.grid_n);
    rep.condition_ii = condition_ii_check(rep.displacements);
    rep.condition_iii = condition_iii_check(rep.displacements);
    rep.type_P = rep.condition_i.pass && rep.condition_ii.pass();
    rep.type_Q = rep.condition_i.pass && rep.condition_iii.pass();
    return rep;
}

ConditionRReport condition_r_report(const PlanarMap& map,
                                    std::pair<double, double> annulus1,
                                    std::pair<double, double> annulus2,
                                    const TypeConfig& cfg) {
    auto [a_in, a_out] = annulus1;
    auto [b_in, b_out] = annulus2;
    if (!(a_in < a_out) || !(b_in < b_out))
        throw config_error("annulus intervals must be increasing");
    if (std::max(a_in, b_in) < std::min(a_out, b_out))
        throw config_error("annuli must be disjoint");
    ConditionRReport rep;
    double c1 = 0.5 * (a_in + a_out);
    double c2 = 0.5 * (b_in + b_out);
    rep.inner = type_report(AnnulusAdapter(map, a_in, a_out), c1, cfg);
    rep.outer = type_report(AnnulusAdapter(map, b_in, b_out), c2, cfg);
    rep.overall = rep.inner.type_Q && rep.outer.type_Q;
    return rep;
}

std::pair<double, double> Arc::at(double t) const {
    if (x.size() < 2 || x.size() != s.size())
        throw config_error("arc needs matching x/s with at least two points");
    double n = static_cast<double>(segments());
    double u = std::clamp(t, 0.0, 1.0) * n;
    std::size_t i = std::min(static_cast<std::size_t>(u), segments() - 1);
    double f = u - static_cast<double>(i);
    return {x[i] + f * (x[i + 1] - x[i]), s[i] + f * (s[i + 1] - s[i])};
}

Arc radial_arc(double x0) {
    return Arc{{x0, x0}, {0.0, 1.0}};
}

Arc random_crossing_arc(std::uint64_t seed, std::size_t n_segments, double max_dx) {
    if (n_segments < 1) throw config_error("arc needs at least one segment");
    Rng rng(seed);
    Arc arc;
    arc.x.resize(n_segments + 1);
    arc.s.resize(n_segments + 1);
    arc.x[0] = rng.uniform01();
    arc.s[0] = 0.0;
    for (std::size_t i = 1; i <= n_segments; ++i) {
        arc.x[i] = arc.x[i - 1] + rng.symmetric(max_dx);
        arc.s[i] = static_cast<double>(i) / static_cast<double>(n_segments);
    }
    return arc;
}

namespace {

// Arc validity: endpoints on the two boundaries, interior strictly inside,
// and simple as a curve on the annulus.
void check_crossing_arc(const Arc& arc, const char* name) {
    if (arc.x.size() < 2 || arc.x.size() != arc.s.size())
        throw config_error(std::string(name) + ": malformed arc");
    std::size_t n = arc.segments();
    if (!(std::abs(arc.s.front()) <= 1e-12 && std::abs(arc.s.back() - 1.0) <= 1e-12))
        throw config_error(std::string(name) +
                           ": arc must run from s=0 to s=1");
    for (std::size_t i = 1; i < n; ++i)
        if (!(arc.s[i] > 0.0 && arc.s[i] < 1.0))
            throw config_error(std::string(name) +
                               ": interior breakpoints must stay inside the annulus");
}

struct Seg {
    double ax, as, bx, bs;
};

double orient(double ox, double os, double ax, double as, double bx, double bs) {
    return (ax - ox) * (bs - os) - (as - os) * (bx - ox);
}

bool segments_intersect(const Seg& p, const Seg& q) {
    if (std::max(p.ax, p.bx) < std::min(q.ax, q.bx) ||
        std::max(q.ax, q.bx) < std::min(p.ax, p.bx) ||
        std::max(p.as, p.bs) < std::min(q.as, q.bs) ||
        std::max(q.as, q.bs) < std::min(p.as, p.bs))
        return false;
    double d1 = orient(p.ax, p.as, p.bx, p.bs, q.ax, q.as);
    double d2 = orient(p.ax, p.as, p.bx, p.bs, q.bx, q.bs);
    double d3 = orient(q.ax, q.as, q.bx, q.bs, p.ax, p.as);
    double d4 = orient(q.ax, q.as, q.bx, q.bs, p.bx, p.bs);
    return d1 * d2 <= 0.0 && d3 * d4 <= 0.0;
}

// Annulus-level intersection test between two cover polylines: compare every
// segment pair under every integer x shift that can bring the boxes together.
bool polylines_meet_mod1(const Arc& a, const Arc& b, bool skip_shared_breaks) {
    for (std::size_t i = 0; i < a.segments(); ++i) {
        Seg p{a.x[i], a.s[i], a.x[i + 1], a.s[i + 1]};
        for (std::size_t j = 0; j < b.segments(); ++j) {
            if (skip_shared_breaks && (i + 1 == j || j + 1 == i || i == j)) continue;
            double lo = std::floor(std::min(a.x[i], a.x[i + 1]) -
                                   std::max(b.x[j], b.x[j + 1])) - 1.0;
            double hi = std::ceil(std::max(a.x[i], a.x[i + 1]) -
                                  std::min(b.x[j], b.x[j + 1])) + 1.0;
            for (double k = lo; k <= hi; k += 1.0) {
                Seg q{b.x[j] + k, b.s[j], b.x[j + 1] + k, b.s[j + 1]};
                if (segments_intersect(p, q)) return true;
            }
        }
    }
    return false;
}

void check_simple(const Arc& arc, const char* name) {
    if (polylines_meet_mod1(arc, arc, true))
        throw config_error(std::string(name) + ": arc is not simple");
}

// Image of the arc under the adapted map, unwrapped continuously in t.
struct ImageCurve {
    std::vector<double> t, x, s;
};

ImageCurve image_sweep(const AnnulusAdapter& adapter, const Arc& arc,
                       std::size_t n_samples) {
    if (n_samples < 16) throw config_error("image sweep needs n_samples >= 16");
    ImageCurve img;
    img.t.resize(n_samples + 1);
    img.x.resize(n_samples + 1);
    img.s.resize(n_samples + 1);
    double u = 0.0;
    for (std::size_t j = 0; j <= n_samples; ++j) {
        double t = static_cast<double>(j) / static_cast<double>(n_samples);
        auto [xa, sa] = arc.at(t);
        auto [xi, si] = adapter.apply_principal(xa, sa);
        u = j == 0 ? xi : unwrap_step(u, xi, "arc image sweep");
        img.t[j] = t;
        img.x[j] = u;
        img.s[j] = si;
    }
    return img;
}

// Exact image point of arc parameter t, with x unwrapped near the reference
// cover value x_ref.
std::pair<double, double> image_at(const AnnulusAdapter& adapter, const Arc& arc,
                                   double t, double x_ref) {
    auto [xa, sa] = arc.at(t);
    auto [xi, si] = adapter.apply_principal(xa, sa);
    double frac = x_ref - std::floor(x_ref);
    return {x_ref + wrap_half(xi - frac), si};
}

struct Crossing {
    double t = 0.0;       // image-curve parameter
    double t_prime = 0.0; // arc parameter of the met point
    double residual = 0.0;
};

// All transversal crossings of the image of `arc` with `target` (mod 1),
// refined by bisection on the signed side of the target segment.
std::vector<Crossing> find_crossings(const AnnulusAdapter& adapter, const Arc& arc,
                                     const Arc& target, double tol,
                                     std::size_t n_samples) {
    ImageCurve img = image_sweep(adapter, arc, n_samples);
    std::vector<Crossing> out;
    for (std::size_t j = 0; j < n_samples; ++j) {
        Seg p{img.x[j], img.s[j], img.x[j + 1], img.s[j + 1]};
        for (std::size_t a = 0; a < target.segments(); ++a) {
            double lo = std::floor(std::min(p.ax, p.bx) -
                                   std::max(target.x[a], target.x[a + 1])) - 1.0;
            double hi = std::ceil(std::max(p.ax, p.bx) -
                                  std::min(target.x[a], target.x[a + 1])) + 1.0;
            for (double k = lo; k <= hi; k += 1.0) {
                double qax = target.x[a] + k, qas = target.s[a];
                double qbx = target.x[a + 1] + k, qbs = target.s[a + 1];
                Seg q{qax, qas, qbx, qbs};
                if (!segments_intersect(p, q)) continue;

                // Side of the (shifted) target segment, as a function of the
                // image-curve parameter; refine the sign change by bisection.
                auto side = [&](double t) {
                    auto [ix, is] = image_at(adapter, arc, t, p.ax);
                    return orient(qax, qas, qbx, qbs, ix, is);
                };
                double t0 = img.t[j], t1 = img.t[j + 1];
                double f0 = side(t0), f1 = side(t1);
                if (f0 == 0.0) {
                    t1 = t0;
                } else if (f1 == 0.0) {
                    t0 = t1;
                } else if (f0 * f1 > 0.0) {
                    continue;  // grazing box contact, no sign change
                }
                while (t1 - t0 > tol) {
                    double tm = 0.5 * (t0 + t1);
                    double fm = side(tm);
                    if (fm == 0.0) {
                        t0 = t1 = tm;
                        break;
                    }
                    if (fm * f0 < 0.0) {
                        t1 = tm;
                    } else {
                        t0 = tm;
                        f0 = fm;
                    }
                }
                double tc = 0.5 * (t0 + t1);
                auto [ix, is] = image_at(adapter, arc, tc, p.ax);
                double segx = qbx - qax, segs = qbs - qas;
                double len2 = segx * segx + segs * segs;
                if (len2 <= 0.0) continue;
                double u = ((ix - qax) * segx + (is - qas) * segs) / len2;
                if (u < -1e-9 || u > 1.0 + 1e-9) continue;
                u = std::clamp(u, 0.0, 1.0);
                double tp = (static_cast<double>(a) + u) /
                            static_cast<double>(target.segments());
                auto [gx, gs] = target.at(tp);
                double res = std::sqrt(annulus_dist2(ix, is, gx, gs));
                if (res > 1e-8) continue;  // rejected by direct evaluation
                out.push_back({tc, tp, res});
            }
        }
    }
    return out;
}

}  // namespace

std::optional<ArcWitness> lemma1_arc_verifier(const AnnulusAdapter& adapter,
                                              const Arc& arc, double tol,
                                              std::size_t n_samples) {
    check_crossing_arc(arc, "lemma1");
    check_simple(arc, "lemma1");
    auto crossings = find_crossings(adapter, arc, arc, tol, n_samples);
    std::optional<ArcWitness> best;
    for (const auto& c : crossings) {
        if (!(c.t_prime > c.t + kStrict)) continue;
        if (!best || c.t < best->t)
            best = ArcWitness{c.t, c.t_prime, c.residual};
    }
    return best;
}

bool lemma2_verifier(const AnnulusAdapter& adapter, const Arc& gamma,
                     const Arc& gamma_prime, std::size_t n_samples) {
    check_crossing_arc(gamma, "lemma2");
    check_crossing_arc(gamma_prime, "lemma2");
    check_simple(gamma, "lemma2");
    check_simple(gamma_prime, "lemma2");
    if (polylines_meet_mod1(gamma, gamma_prime, false))
        throw config_error("lemma2: arcs must be disjoint");
    return !find_crossings(adapter, gamma, gamma_prime, 1e-12, n_samples).empty();
}

}  // namespace synclab
