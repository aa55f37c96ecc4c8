#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "synclab/product.hpp"
#include "synclab/vec2.hpp"

namespace synclab {

// Fixed point of `map` inside the closed disk, located by a 64x64 grid scan
// of the displacement norm followed by damped Newton (finite-difference
// Jacobian), constrained to the disk.  Throws not_found_error when no point
// reaches a residual below tol.
Vec2 find_fixed_point(const PlanarMap& map, const Vec2& disk_center,
                      double disk_radius, double tol);

// One-dimensional section through the leaf of z0: psi(t) is the response
// coordinate of the image of the point with drive coordinate drive(z0) and
// response coordinate t.  Structure must be planar with a 1d drive.
std::function<double(double)> slave_section(const PlanarMap& map,
                                            const ProductStructure& structure,
                                            const Vec2& z0);

enum class FixedPointKind { transversal, tangential };

struct SectionFixedPoint {
    double t = 0.0;
    FixedPointKind kind = FixedPointKind::transversal;
};

// Fixed points of psi on the interval: sign changes of psi(t) - t on the grid
// are bisected to tol and labeled transversal; exact grid zeros without a
// sign change collapse (by consecutive run) to tangential points.
std::vector<SectionFixedPoint> count_fixed_points(
    const std::function<double(double)>& psi, std::pair<double, double> interval,
    double grid_step, double tol);

enum class CertVerdict { non_synchronizing_for_structure, inconclusive };

const char* cert_verdict_name(CertVerdict v);

struct FixedPointCertificate {
    std::size_t structure_id = 0;
    Vec2 fixed_point{};
    double leaf_constant = 0.0;  // drive coordinate of the leaf
    double anchor_t = 0.0;       // leaf coordinate of the fixed point
    std::vector<SectionFixedPoint> fixed_points;
    CertVerdict verdict = CertVerdict::inconclusive;
    std::string note;
};

struct CertifyConfig {
    Vec2 disk_center{0.0, 0.0};
    double disk_radius = 0.9;
    double fp_tol = 1e-11;
    double grid_step = 1e-4;
    double bisect_tol = 1e-12;
};

// One certificate per structure: a second fixed point on the leaf section,
// distinct from the anchored one, witnesses failure to synchronize under that
// structure.  Fixed-point search failure marks the certificate inconclusive.
std::vector<FixedPointCertificate> certify(const PlanarMap& map,
                                           const std::vector<ProductStructure>& structures,
                                           std::pair<double, double> window,
                                           const CertifyConfig& cfg);

// Identity plus rotations by k*pi/12 for k = 1..n-1.
std::vector<ProductStructure> rotation_family(std::size_t n = 13);

// Perturbation: per component, sum over Fourier modes j = 0..n_modes of
// r^j (36 - r^2)_+^2 (a_j cos j theta + b_j sin j theta), coefficients drawn
// iid from the seed and rescaled so the analytic sup bound equals epsilon.
struct PerturbationSpec {
    double epsilon = 0.0;
    std::size_t n_modes = 3;
    std::uint64_t seed = 0;
};

struct Perturbation {
    PerturbationSpec spec;
    std::vector<double> ax, bx, ay, by;  // scaled coefficients per mode

    Vec2 operator()(const Vec2& p) const;
};

Perturbation make_perturbation(const PerturbationSpec& spec);

// Forward-only map p -> base(p) + eta(p).
PlanarMap perturbed_map(const PlanarMap& base, const Perturbation& eta);

struct SweepCell {
    double epsilon = 0.0;
    std::size_t sample = 0;
    std::size_t structure_id = 0;
    CertVerdict verdict = CertVerdict::inconclusive;
    std::size_t n_fixed_points = 0;
};

struct SweepReport {
    std::vector<double> eps_list;
    std::vector<SweepCell> cells;
    // Per epsilon: fraction of samples certified for every structure.
    std::vector<double> success_fraction;
};

SweepReport perturbation_sweep(const PlanarMap& map, const std::vector<double>& eps_list,
                               std::size_t n_samples,
                               const std::vector<ProductStructure>& structures,
                               std::uint64_t seed, std::pair<double, double> window,
                               const CertifyConfig& cfg);

struct EpsilonBracket {
    double lo = 0.0, hi = 0.0;
};

using PerturbationFn = std::function<Vec2(const Vec2&)>;

// Bisection on epsilon along a fixed perturbation direction (unit scale,
// multiplied by epsilon).  The certificate must hold at eps_lo and fail at
// eps_hi, otherwise config_error.
EpsilonBracket estimate_critical_epsilon_dir(const PlanarMap& map,
                                             const ProductStructure& structure,
                                             const PerturbationFn& direction,
                                             double eps_lo, double eps_hi,
                                             std::size_t iters,
                                             std::pair<double, double> window,
                                             const CertifyConfig& cfg);

// Seeded direction: make_perturbation at unit epsilon.
EpsilonBracket estimate_critical_epsilon(const PlanarMap& map,
                                         const ProductStructure& structure,
                                         std::uint64_t seed, double eps_lo,
                                         double eps_hi, std::size_t iters,
                                         std::pair<double, double> window,
                                         const CertifyConfig& cfg);

}  // namespace synclab
