#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "synclab/mat.hpp"
#include "synclab/vec2.hpp"

namespace synclab {

// ---------------------------------------------------------------------------
// built-in systems
// ---------------------------------------------------------------------------

// Planar map (theta, r) -> (theta + beta(r), alpha(r)) with
//   alpha(r) = r + mu * r * (r^2-1)(r^2-4)(r^2-9)(r^2-16)(r^2-25)
//   beta(r)  = beta_coeff * r^2
// Circles of integer radius 1..5 are invariant; the radial factor polynomial
// changes sign at each of them.
class PlanarPolarMap {
  public:
    explicit PlanarPolarMap(double mu = 1e-7,
                            double beta_coeff = 2.0 * std::numbers::pi)
        : mu_(mu), c_(beta_coeff) {}

    double mu() const { return mu_; }
    double beta_coeff() const { return c_; }

    double alpha(double r) const;           // throws std::domain_error for r<0
    double alpha_prime(double r) const;     // exact product-rule derivative
    double beta(double r) const { return c_ * r * r; }

    // Inverse radius: the r with alpha(r)=target, assuming alpha is monotone
    // there.  Newton from the target itself (alpha is a small perturbation of
    // the identity at default mu), bisection fallback.
    double alpha_inverse(double target) const;

    Vec2 apply(const Vec2& p) const;
    Vec2 apply_inverse(const Vec2& q) const;

    PlanarMap as_planar_map() const;

  private:
    double mu_, c_;
};

enum class RadialKind { sink, source, inconclusive };

struct RadialFixedPoint {
    double r;
    RadialKind kind;
};

// Classifies r in {0,1,2,3,4,5} by the radial displacement of neighbors at
// distance delta (one-sided at r=0).
std::vector<RadialFixedPoint> classify_radial_fixed_points(
    const PlanarPolarMap& map, double delta = 1e-3);

struct HomeoReport {
    double min_alpha_slope;
    double argmin_r;
    bool ok;
};

// Finite-difference slope scan of alpha over [0, r_max]; ok iff the minimum
// slope is positive, i.e. the map is injective radius-wise on that range.
HomeoReport validate_homeomorphism(const PlanarPolarMap& map, double r_max,
                                   std::size_t grid_n);

struct HenonMap {
    double a = 1.4;
    double b = 0.3;

    Vec2 apply(const Vec2& uv) const {
        return {uv.y, 1.0 - a * uv.y * uv.y + b * uv.x};
    }
};

struct LorenzSystem {
    double sigma = 10.0;
    double r = 28.0;
    double b = 8.0 / 3.0;

    void field(const double* s, double* ds) const {
        ds[0] = sigma * (s[1] - s[0]);
        ds[1] = r * s[0] - s[1] - s[0] * s[2];
        ds[2] = s[0] * s[1] - b * s[2];
    }
};

enum class SystemKind { map, flow };

struct LinearSystem {
    Mat matrix;
    SystemKind kind = SystemKind::map;
};

// Uniform runtime wrapper: a map image or a vector field on R^d.  Everything
// downstream (sync engine, certifier) works through this.
struct System {
    SystemKind kind = SystemKind::map;
    std::size_t dim = 0;
    std::function<void(const double*, double*)> f;  // image (map) or field (flow)

    Vec eval(const Vec& s) const {
        Vec out(dim);
        f(s.data(), out.data());
        return out;
    }
};

System make_system(const PlanarPolarMap& m);
System make_system(const HenonMap& m);
System make_system(const LorenzSystem& m);
System make_system(const LinearSystem& m);
System make_system(const PlanarMap& m);  // generic planar map (e.g. perturbed)

// ---------------------------------------------------------------------------
// trajectories
// ---------------------------------------------------------------------------

struct Trajectory {
    std::vector<Vec> states;
    double time_step = 1.0;  // 1 for maps, h for flows

    std::size_t size() const { return states.size(); }
    std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
};

struct IntegratorConfig {
    double h = 1e-3;  // fixed-step RK4 is the only method
};

// One RK4 step of ds/dt = f(s).
void rk4_step(const std::function<void(const double*, double*)>& f, Vec& s, double h);

// Fixed-step RK4 over [0,T]; h must divide T to within one step.
// Throws divergence_error when a non-finite state appears.
Trajectory integrate(const System& flow, const Vec& x0, double T,
                     const IntegratorConfig& cfg);

// n+1 states of repeated map application.
Trajectory orbit(const System& map, const Vec& x0, std::size_t n);

}  // namespace synclab
