#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "synclab/vec2.hpp"

namespace synclab {

// Planar map restricted to the closed annulus r_in <= |p| <= r_out, in
// normalized coordinates (x, s) in T x [0,1]: x = theta / 2pi (turn units),
// s = (r - r_in) / (r_out - r_in).
struct AnnulusAdapter {
    PlanarMap base;
    double r_in = 1.0;
    double r_out = 2.0;

    AnnulusAdapter(PlanarMap m, double rin, double rout);

    double width() const { return r_out - r_in; }
    double radius_of(double s) const { return r_in + s * width(); }

    Vec2 plane_point(double x, double s) const;
    // principal x in [0,1); s unclamped so off-annulus images are visible
    std::pair<double, double> annulus_coords(const Vec2& p) const;
    std::pair<double, double> apply_principal(double x, double s) const;

    bool boundary_invariant(double tol = 1e-10, std::size_t samples = 256) const;
};

// Lift of the adapted map to the cover R x [0,1].  The base (k=0) lift is
// anchored by continuing the image angle radially from near the origin out
// along the ray theta=0; sheet k adds the integer k.
struct Lift {
    AnnulusAdapter adapter;
    int sheet = 0;
    std::size_t unwrap_n = 4096;

    // Unwrapped image angle in turns of the point (r, theta=0), sheet excluded.
    double radial_anchor(double r) const;
    // Lift value at any cover point, by radial-then-angular continuation.
    std::pair<double, double> point(double x, double s) const;
};

enum class BoundaryId { bottom, top };

struct DisplacementRange {
    double min = 0.0, max = 0.0;
};

// Extremes over the boundary grid of pi1(f(x, b)) - x in turns at the lift's
// sheet.  grid_n >= 64; throws resolution_error on unwrap ambiguity.
DisplacementRange boundary_displacement(const Lift& lift, BoundaryId boundary,
                                        std::size_t grid_n);

struct DisplacementReport {
    DisplacementRange bottom, top;
    int sheet = 0;
};

DisplacementReport displacement_report(const Lift& lift, std::size_t grid_n);

// Integer-window verdict shared by conditions (ii) and (iii).  The window is
// the open interval of admissible k; strict inequalities carry margin 1e-9.
struct WindowResult {
    double lo = 0.0, hi = 0.0;
    std::optional<int> witness;   // smallest-magnitude admissible integer
    std::vector<int> witnesses;   // all admissible integers (capped at 64)
    bool borderline = false;      // an integer sits within the margin of an endpoint

    bool pass() const { return witness.has_value(); }
};

// k with max_bottom + k < 0 and min_top + k > 0: window (-min_top, -max_bottom).
WindowResult condition_ii_check(const DisplacementReport& rep);
// Strict variant: bottom displacement < -1, top > +1: window
// (1 - min_top, -1 - max_bottom).
WindowResult condition_iii_check(const DisplacementReport& rep);

struct ConditionIEvidence {
    bool pass = false;
    double separation = 0.0;  // min s(F(C)) - s(C), annulus units
    std::size_t iters_forward = 0, iters_backward = 0;
    double dist_forward = 0.0, dist_backward = 0.0;  // final sup distance to boundary
    bool early_exit_forward = false, early_exit_backward = false;
    bool monotone = true;
};

// Checks that the circle C at radius c maps strictly above itself and that
// forward/backward iterates accumulate on the top/bottom boundary within tol
// (sup distance over a 256-point sample of the curve).
ConditionIEvidence condition_i_check(const AnnulusAdapter& adapter, double c,
                                     std::size_t n_iter, double tol);

struct TypeConfig {
    std::size_t grid_n = 1024;
    std::size_t n_iter = 1000000;
    double tol = 1e-3;
    std::size_t unwrap_n = 4096;
};

struct TypeReport {
    ConditionIEvidence condition_i;
    DisplacementReport displacements;
    WindowResult condition_ii, condition_iii;
    bool type_P = false;
    bool type_Q = false;
};

TypeReport type_report(const AnnulusAdapter& adapter, double c, const TypeConfig& cfg);

struct ConditionRReport {
    TypeReport inner, outer;
    bool overall = false;
};

// Both annuli (given as radius intervals, inner boundary mapping to T x {0})
// must come out type (Q).  Overlapping annuli are rejected.
ConditionRReport condition_r_report(const PlanarMap& map,
                                    std::pair<double, double> annulus1,
                                    std::pair<double, double> annulus2,
                                    const TypeConfig& cfg);

// Piecewise-linear curve in cover coordinates.  Parameter t in [0,1] spans
// the segments uniformly (breakpoint i sits at t = i/segments).
struct Arc {
    std::vector<double> x, s;

    std::size_t segments() const { return x.size() - 1; }
    std::pair<double, double> at(double t) const;
};

Arc radial_arc(double x0);
// Seeded arc with n_segments pieces, s strictly increasing 0 -> 1, x a
// bounded random walk.  Always simple.
Arc random_crossing_arc(std::uint64_t seed, std::size_t n_segments = 8,
                        double max_dx = 0.3);

struct ArcWitness {
    double t = 0.0;
    double t_prime = 0.0;
    double residual = 0.0;  // |f(gamma(t)) - gamma(t')| on the annulus
};

// Finds t < t' with f(gamma(t)) = gamma(t') by intersecting the image curve
// with the arc (segment tests, then bisection to parameter tolerance tol).
// Returns the smallest-t witness, or nothing at this sampling resolution.
std::optional<ArcWitness> lemma1_arc_verifier(const AnnulusAdapter& adapter,
                                              const Arc& arc, double tol = 1e-12,
                                              std::size_t n_samples = 2048);

// True iff the image of gamma meets gamma_prime (disjoint crossing arcs).
bool lemma2_verifier(const AnnulusAdapter& adapter, const Arc& gamma,
                     const Arc& gamma_prime, std::size_t n_samples = 2048);

}  // namespace synclab
