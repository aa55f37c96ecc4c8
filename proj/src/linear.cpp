#include "synclab/linear.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "synclab/errors.hpp"
#include "synclab/rng.hpp"

namespace synclab {

Mat response_block(const Mat& a, const ProductStructure& s) {
    if (a.rows() != a.cols() || a.rows() != s.dim())
        throw config_error("response_block: dimension mismatch");
    const Mat m = s.transform() * a * Lu(s.transform()).inverse();
    return m.slice(s.response_indices(), s.response_indices());
}

double spectral_radius_power(const Mat& b, int iters, int restarts,
                             std::uint64_t seed, bool* stagnated) {
    const std::size_t n = b.rows();
    if (n == 0) throw config_error("spectral_radius_power: empty matrix");
    double best = 0.0;
    std::vector<double> estimates;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(substream(seed, static_cast<std::uint64_t>(r)));
        Vec v(n);
        double nv = 0.0;
        for (auto& x : v) { x = rng.symmetric(); }
        for (double x : v) nv += x * x;
        nv = std::sqrt(nv);
        for (auto& x : v) x /= nv;

        // Geometric mean of growth over the second half damps the
        // oscillation a complex dominant pair produces.
        double acc = 0.0;
        int counted = 0;
        bool dead = false;
        for (int k = 0; k < iters; ++k) {
            Vec w = b * v;
            double g = 0.0;
            for (double x : w) g += x * x;
            g = std::sqrt(g);
            if (g < 1e-300) { dead = true; break; }  // nilpotent direction
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / g;
            if (k >= iters / 2) { acc += std::log(g); ++counted; }
        }
        const double est = dead ? 0.0 : std::exp(acc / std::max(counted, 1));
        estimates.push_back(est);
        best = std::max(best, est);
    }
    if (stagnated) {
        double lo = HUGE_VAL, hi = 0.0;
        for (double e : estimates) { lo = std::min(lo, e); hi = std::max(hi, e); }
        // Restarts converging to different values (within the nonzero ones)
        // signal a stalled iteration.
        *stagnated = hi > 0.0 && (hi - lo) > 1e-4 * (1.0 + hi);
    }
    return best;
}

namespace {

double newton_polish_cubic(double c2, double c1, double c0, double x) {
    // p(x) = x^3 - c2 x^2 + c1 x - c0
    for (int i = 0; i < 50; ++i) {
        const double p = ((x - c2) * x + c1) * x - c0;
        const double dp = (3.0 * x - 2.0 * c2) * x + c1;
        if (dp == 0.0) break;
        const double nx = x - p / dp;
        if (std::abs(nx - x) < 1e-16 * (1.0 + std::abs(x))) { x = nx; break; }
        x = nx;
    }
    return x;
}

}  // namespace

std::optional<double> spectral_radius_smalldim(const Mat& b) {
    const std::size_t n = b.rows();
    if (n == 1) return std::abs(b(0, 0));
    if (n == 2) {
        const double tr = b(0, 0) + b(1, 1);
        const double det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
        const double disc = 0.25 * tr * tr - det;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            return std::max(std::abs(0.5 * tr + s), std::abs(0.5 * tr - s));
        }
        return std::sqrt(det);  // complex pair, |lambda|^2 = det
    }
    if (n == 3) {
        // charpoly x^3 - c2 x^2 + c1 x - c0
        const double c2 = b(0, 0) + b(1, 1) + b(2, 2);
        const double c1 = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0) +
                          b(0, 0) * b(2, 2) - b(0, 2) * b(2, 0) +
                          b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1);
        const double c0 = Lu(b).det();
        // Substituting x = t + c2/3 gives the depressed cubic t^3 + p t + q.
        // One real root always exists; Cardano / trigonometric value, then a
        // Newton polish on the original cubic, then quadratic deflation.
        const double p = c1 - c2 * c2 / 3.0;
        const double q = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
        double t;
        const double disc = q * q / 4.0 + p * p * p / 27.0;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            t = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
        } else {
            const double rho = std::sqrt(-p * p * p / 27.0);
            const double phi = std::acos(std::clamp(-q / (2.0 * rho), -1.0, 1.0));
            t = 2.0 * std::sqrt(-p / 3.0) * std::cos(phi / 3.0);
        }
        double x0 = newton_polish_cubic(c2, c1, c0, t + c2 / 3.0);
        // Deflate: x^3 - c2 x^2 + c1 x - c0 = (x - x0)(x^2 + bx + c)
        const double bq = x0 - c2;
        const double cq = c1 + bq * x0;
        double rad = std::abs(x0);
        const double d2 = 0.25 * bq * bq - cq;
        if (d2 >= 0.0) {
            const double s = std::sqrt(d2);
            rad = std::max({rad, std::abs(-0.5 * bq + s), std::abs(-0.5 * bq - s)});
        } else {
            rad = std::max(rad, std::sqrt(cq));
        }
        return rad;
    }
    return std::nullopt;
}

Mat expm(const Mat& b, double h) {
    const std::size_t n = b.rows();
    Mat bh = b * h;
    // Scale down until the norm is comfortable for an order-12 Taylor sum.
    int squarings = 0;
    double norm = bh.max_abs() * static_cast<double>(n);
    while (norm > 0.5 && squarings < 60) {
        bh = bh * 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Mat sum = Mat::identity(n);
    Mat term = Mat::identity(n);
    for (int k = 1; k <= 12; ++k) {
        term = term * bh * (1.0 / static_cast<double>(k));
        sum = sum + term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

namespace {

constexpr double kMargin = 1e-9;

LinearSyncReport decide_block(const Mat& block, const ProductStructure& s,
                              SystemKind kind) {
    LinearSyncReport rep{s, block};
    double crit;
    bool stag = false;
    if (kind == SystemKind::map) {
        const double power = spectral_radius_power(block, 100, 5, 0x9E3779B9, &stag);
        const auto exact = spectral_radius_smalldim(block);
        if (exact) {
            // Closed-form cross-check wins; note when power iteration was off.
            crit = *exact;
            rep.power_stagnation = std::abs(power - *exact) > 1e-6 * (1.0 + *exact);
        } else if (stag) {
            crit = norm2(block);  // upper bound fallback
            rep.power_stagnation = true;
            rep.borderline = true;
        } else {
            crit = power;
        }
        rep.criterion_value = crit;
        rep.borderline = rep.borderline || std::abs(crit - 1.0) < kMargin;
        rep.synchronizable = crit < 1.0 && !rep.borderline;
    } else {
        // Abscissa via the exponential: (1/h) log rho(exp(B h)).
        double h = 1e-2;
        Mat e = expm(block, h);
        while (!(e.max_abs() < 1e100) && h > 1e-8) {  // rescale on overflow
            h *= 0.5;
            e = expm(block, h);
        }
        const double power = spectral_radius_power(e, 100, 5, 0x9E3779B9, &stag);
        const auto exact = spectral_radius_smalldim(e);
        double rho;
        if (exact) {
            rho = *exact;
            rep.power_stagnation = std::abs(power - *exact) > 1e-6 * (1.0 + *exact);
        } else if (stag) {
            rho = norm2(e);
            rep.power_stagnation = true;
            rep.borderline = true;
        } else {
            rho = power;
        }
        crit = std::log(std::max(rho, 1e-300)) / h;
        rep.criterion_value = crit;
        rep.borderline = rep.borderline || std::abs(crit) < kMargin;
        rep.synchronizable = crit < 0.0 && !rep.borderline;
    }
    return rep;
}

}  // namespace

LinearSyncReport decide_map(const Mat& a, const ProductStructure& s) {
    return decide_block(response_block(a, s), s, SystemKind::map);
}

LinearSyncReport decide_flow(const Mat& a, const ProductStructure& s) {
    return decide_block(response_block(a, s), s, SystemKind::flow);
}

std::optional<ProductStructure> search_structure(const Mat& a, SystemKind kind,
                                                 std::size_t budget, std::uint64_t seed) {
    if (budget < 1) throw config_error("search_structure: budget must be >= 1");
    const std::size_t d = a.rows();
    if (a.cols() != d || d < 2) throw config_error("search_structure: need square d>=2 matrix");

    for (std::size_t sample = 0; sample < budget; ++sample) {
        Mat t;
        if (sample == 0) {
            t = Mat::identity(d);
        } else {
            Rng rng(substream(seed, sample));
            // Rejection on condition number; rejected draws don't consume
            // budget (bounded retries so a bad stream cannot spin forever).
            bool ok = false;
            for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
                t = rng.uniform_mat(d, d, -1.0, 1.0);
                ok = cond2(t) <= 1e4;
            }
            if (!ok) continue;
        }
        for (std::size_t drive = 0; drive < d; ++drive) {
            ProductStructure s(t, Vec(d, 0.0), {drive});
            const LinearSyncReport rep = kind == SystemKind::map
                                             ? decide_map(a, s)
                                             : decide_flow(a, s);
            if (rep.synchronizable) return s;
        }
    }
    return std::nullopt;
}

DensityResult density_experiment(std::size_t d, std::size_t n_samples,
                                 std::size_t budget, std::uint64_t seed) {
    if (d < 2 || d > 4) throw config_error("density_experiment: d must be in {2,3,4}");
    if (n_samples == 0) throw config_error("density_experiment: n_samples must be >= 1");
    DensityResult res;
    res.n_samples = n_samples;
    for (std::size_t i = 0; i < n_samples; ++i) {
        Rng rng(substream(seed ^ 0xA5A5A5A5ULL, i));
        const Mat a = rng.uniform_mat(d, d, -1.0, 1.0);
        if (search_structure(a, SystemKind::map, budget, substream(seed, i)))
            ++res.n_found;
    }
    const double nf = static_cast<double>(res.n_found);
    const double n = static_cast<double>(n_samples);
    res.fraction = nf / n;
    const double z = 1.959963984540054;  // 95% normal quantile
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (res.fraction + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(res.fraction * (1.0 - res.fraction) / n + z2 / (4.0 * n * n)) / denom;
    res.wilson_lo = std::max(0.0, center - half);
    res.wilson_hi = std::min(1.0, center + half);
    return res;
}

}  // namespace synclab
