#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "synclab/mat.hpp"
#include "synclab/product.hpp"

namespace synclab {

struct LinearSyncReport {
    ProductStructure structure;
    Mat response_block;
    double criterion_value = 0.0;  // spectral radius (maps) / abscissa (flows)
    bool synchronizable = false;
    bool borderline = false;        // criterion within 1e-9 of the threshold
    bool power_stagnation = false;  // power iteration disagreed / stalled
};

// Response-rows x response-columns of T * A * T^{-1}; the offset plays no
// role for linear dynamics.
Mat response_block(const Mat& a, const ProductStructure& s);

// Spectral radius estimate: 100 power iterations, 5 seeded restarts.
// stagnated (optional out-param) reports restart disagreement.
double spectral_radius_power(const Mat& b, int iters = 100, int restarts = 5,
                             std::uint64_t seed = 0x9E3779B9, bool* stagnated = nullptr);

// Exact spectral radius from characteristic-polynomial roots, dims 1..3.
std::optional<double> spectral_radius_smalldim(const Mat& b);

// exp(B*h) by scaling-and-squaring with an order-12 Taylor kernel.
Mat expm(const Mat& b, double h);

LinearSyncReport decide_map(const Mat& a, const ProductStructure& s);
LinearSyncReport decide_flow(const Mat& a, const ProductStructure& s);

// Randomized search over structures (identity first, then random T with
// condition number <= 1e4, every m=1 drive split).  Returns the first
// synchronizable structure in sample order, or nothing.
std::optional<ProductStructure> search_structure(const Mat& a, SystemKind kind,
                                                 std::size_t budget, std::uint64_t seed);

struct DensityResult {
    std::size_t n_samples = 0;
    std::size_t n_found = 0;
    double fraction = 0.0;
    double wilson_lo = 0.0;  // 95% Wilson score interval
    double wilson_hi = 0.0;
};

// Fraction of seeded random d x d maps (entries iid uniform [-1,1]) for
// which search_structure succeeds within the budget.
DensityResult density_experiment(std::size_t d, std::size_t n_samples,
                                 std::size_t budget, std::uint64_t seed);

}  // namespace synclab
