#include "synclab/systems.hpp"

#include <cmath>
#include <stdexcept>

#include "synclab/errors.hpp"

namespace synclab {

double PlanarPolarMap::alpha(double r) const {
    if (r < 0.0) throw std::domain_error("alpha: negative radius");
    const double u = r * r;
    double p = r;
    for (double root : {1.0, 4.0, 9.0, 16.0, 25.0}) p *= (u - root);
    return r + mu_ * p;
}

double PlanarPolarMap::alpha_prime(double r) const {
    if (r < 0.0) throw std::domain_error("alpha_prime: negative radius");
    const double u = r * r;
    const double roots[] = {1.0, 4.0, 9.0, 16.0, 25.0};
    double prod = 1.0;
    for (double k : roots) prod *= (u - k);
    // d/dr [ r * prod(u) ] = prod + r * prod'(u) * 2r
    double dprod = 0.0;
    for (int i = 0; i < 5; ++i) {
        double term = 1.0;
        for (int j = 0; j < 5; ++j)
            if (j != i) term *= (u - roots[j]);
        dprod += term;
    }
    return 1.0 + mu_ * (prod + 2.0 * u * dprod);
}

double PlanarPolarMap::alpha_inverse(double target) const {
    if (target < 0.0) throw std::domain_error("alpha_inverse: negative radius");
    double r = target;  // alpha is id + O(mu); the target is a good seed
    for (int i = 0; i < 40; ++i) {
        const double f = alpha(r) - target;
        if (std::abs(f) < 1e-14 * (1.0 + target)) return r;
        const double d = alpha_prime(r);
        if (d <= 0.0) break;  // outside the monotone regime; fall back
        double next = r - f / d;
        if (next < 0.0) next = 0.5 * r;
        if (!(next >= 0.0) || next > 1e6) break;
        r = next;
    }
    // Bisection fallback for awkward parameters.
    double lo = 0.0, hi = std::max(1.0, target);
    while (alpha(hi) < target) {
        hi *= 1.5;
        if (hi > 1e6) throw not_found_error("alpha_inverse: no bracket");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (alpha(mid) < target) lo = mid; else hi = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

Vec2 PlanarPolarMap::apply(const Vec2& p) const {
    const double r = p.norm();
    if (r == 0.0) return {0.0, 0.0};  // alpha(0)=0, image is the origin
    const double theta = std::atan2(p.y, p.x);
    const double rr = alpha(r);
    const double tt = theta + beta(r);
    return {rr * std::cos(tt), rr * std::sin(tt)};
}

Vec2 PlanarPolarMap::apply_inverse(const Vec2& q) const {
    const double rr = q.norm();
    if (rr == 0.0) return {0.0, 0.0};
    const double r = alpha_inverse(rr);
    const double tt = std::atan2(q.y, q.x);
    const double theta = tt - beta(r);
    return {r * std::cos(theta), r * std::sin(theta)};
}

PlanarMap PlanarPolarMap::as_planar_map() const {
    PlanarMap pm;
    PlanarPolarMap self = *this;
    pm.fwd = [self](const Vec2& p) { return self.apply(p); };
    pm.inv = [self](const Vec2& q) { return self.apply_inverse(q); };
    return pm;
}

std::vector<RadialFixedPoint> classify_radial_fixed_points(
    const PlanarPolarMap& map, double delta) {
    std::vector<RadialFixedPoint> out;
    for (double r : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double up = map.alpha(r + delta) - (r + delta);
        // r=0 has no left neighbor in the domain; classify one-sided there.
        const bool have_left = r > 0.0;
        const double dn = have_left ? map.alpha(r - delta) - (r - delta) : 0.0;
        RadialKind kind;
        const double floor = 1e-15;
        if (std::abs(up) < floor || (have_left && std::abs(dn) < floor)) {
            kind = RadialKind::inconclusive;
        } else if (up < 0.0 && (!have_left || dn > 0.0)) {
            kind = RadialKind::sink;    // both neighbors move toward r
        } else if (up > 0.0 && (!have_left || dn < 0.0)) {
            kind = RadialKind::source;  // both neighbors move away
        } else {
            kind = RadialKind::inconclusive;  // semi-stable
        }
        out.push_back({r, kind});
    }
    return out;
}

HomeoReport validate_homeomorphism(const PlanarPolarMap& map, double r_max,
                                   std::size_t grid_n) {
    if (grid_n < 1000) throw config_error("validate_homeomorphism: grid_n must be >= 1000");
    if (r_max <= 0.0) throw config_error("validate_homeomorphism: r_max must be positive");
    const double dr = r_max / static_cast<double>(grid_n);
    double prev = map.alpha(0.0);
    double min_slope = HUGE_VAL, arg = 0.0;
    for (std::size_t i = 1; i <= grid_n; ++i) {
        const double r = r_max * static_cast<double>(i) / static_cast<double>(grid_n);
        const double a = map.alpha(r);
        const double slope = (a - prev) / dr;
        if (slope < min_slope) { min_slope = slope; arg = r - 0.5 * dr; }
        prev = a;
    }
    return {min_slope, arg, min_slope > 0.0};
}

System make_system(const PlanarPolarMap& m) {
    System s;
    s.kind = SystemKind::map;
    s.dim = 2;
    PlanarPolarMap copy = m;
    s.f = [copy](const double* in, double* out) {
        const Vec2 q = copy.apply({in[0], in[1]});
        out[0] = q.x;
        out[1] = q.y;
    };
    return s;
}

System make_system(const HenonMap& m) {
    System s;
    s.kind = SystemKind::map;
    s.dim = 2;
    HenonMap copy = m;
    s.f = [copy](const double* in, double* out) {
        const Vec2 q = copy.apply({in[0], in[1]});
        out[0] = q.x;
        out[1] = q.y;
    };
    return s;
}

System make_system(const LorenzSystem& m) {
    System s;
    s.kind = SystemKind::flow;
    s.dim = 3;
    LorenzSystem copy = m;
    s.f = [copy](const double* in, double* out) { copy.field(in, out); };
    return s;
}

System make_system(const LinearSystem& m) {
    if (m.matrix.rows() != m.matrix.cols())
        throw config_error("linear system matrix must be square");
    if (m.kind == SystemKind::map && std::abs(Lu(m.matrix).det()) <= 1e-12)
        throw config_error("linear map matrix must be invertible");
    System s;
    s.kind = m.kind;
    s.dim = m.matrix.rows();
    Mat a = m.matrix;
    s.f = [a](const double* in, double* out) {
        const std::size_t n = a.rows();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * in[j];
            out[i] = acc;
        }
    };
    return s;
}

System make_system(const PlanarMap& m) {
    System s;
    s.kind = SystemKind::map;
    s.dim = 2;
    PlanarMap copy = m;
    s.f = [copy](const double* in, double* out) {
        const Vec2 q = copy.fwd({in[0], in[1]});
        out[0] = q.x;
        out[1] = q.y;
    };
    return s;
}

void rk4_step(const std::function<void(const double*, double*)>& f, Vec& s, double h) {
    const std::size_t d = s.size();
    Vec k1(d), k2(d), k3(d), k4(d), tmp(d);
    f(s.data(), k1.data());
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    f(tmp.data(), k2.data());
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    f(tmp.data(), k3.data());
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + h * k3[i];
    f(tmp.data(), k4.data());
    for (std::size_t i = 0; i < d; ++i)
        s[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

static bool finite_state(const Vec& s) {
    for (double v : s)
        if (!std::isfinite(v)) return false;
    return true;
}

Trajectory integrate(const System& flow, const Vec& x0, double T,
                     const IntegratorConfig& cfg) {
    if (flow.kind != SystemKind::flow) throw config_error("integrate: system is not a flow");
    if (x0.size() != flow.dim) throw config_error("integrate: state dimension mismatch");
    if (!(T > 0.0)) throw config_error("integrate: T must be positive");
    if (!(cfg.h > 0.0)) throw config_error("integrate: step must be positive");
    // Step count by rounding; T may miss an exact multiple of h by up to one
    // step, which rounding absorbs.
    const double steps_f = T / cfg.h;
    const auto n = static_cast<std::size_t>(std::llround(steps_f));

    Trajectory tr;
    tr.time_step = cfg.h;
    tr.states.reserve(n + 1);
    Vec s = x0;
    tr.states.push_back(s);
    for (std::size_t i = 0; i < n; ++i) {
        rk4_step(flow.f, s, cfg.h);
        if (!finite_state(s))
            throw divergence_error("integrate: state diverged", i);
        tr.states.push_back(s);
    }
    return tr;
}

Trajectory orbit(const System& map, const Vec& x0, std::size_t n) {
    if (map.kind != SystemKind::map) throw config_error("orbit: system is not a map");
    if (x0.size() != map.dim) throw config_error("orbit: state dimension mismatch");
    Trajectory tr;
    tr.time_step = 1.0;
    tr.states.reserve(n + 1);
    Vec s = x0, next(map.dim);
    tr.states.push_back(s);
    for (std::size_t i = 0; i < n; ++i) {
        map.f(s.data(), next.data());
        s = next;
        if (!finite_state(s))
            throw divergence_error("orbit: state diverged", i);
        tr.states.push_back(s);
    }
    return tr;
}

}  // namespace synclab
