#include "synclab/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "synclab/errors.hpp"
#include "synclab/rng.hpp"

namespace synclab {

namespace {

Vec2 displacement(const PlanarMap& map, const Vec2& p) {
    return map(p) - p;
}

}  // namespace

Vec2 find_fixed_point(const PlanarMap& map, const Vec2& disk_center,
                      double disk_radius, double tol) {
    if (!(disk_radius > 0.0)) throw config_error("fixed point search needs disk_radius > 0");
    if (!(tol > 0.0)) throw config_error("fixed point search needs tol > 0");

    constexpr int kGrid = 64;
    Vec2 best{};
    double best_norm = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            Vec2 p{disk_center.x + disk_radius * (2.0 * i / (kGrid - 1) - 1.0),
                   disk_center.y + disk_radius * (2.0 * j / (kGrid - 1) - 1.0)};
            if (dist(p, disk_center) > disk_radius) continue;
            double g = displacement(map, p).norm();
            if (g < best_norm) {
                best_norm = g;
                best = p;
            }
        }
    }

    // Damped Newton on the displacement, confined to the disk.
    Vec2 p = best;
    double gnorm = best_norm;
    const double fd = 1e-7;
    for (int iter = 0; iter < 60 && gnorm >= tol; ++iter) {
        Vec2 g = displacement(map, p);
        Vec2 gx = (displacement(map, {p.x + fd, p.y}) - g) * (1.0 / fd);
        Vec2 gy = (displacement(map, {p.x, p.y + fd}) - g) * (1.0 / fd);
        double det = gx.x * gy.y - gy.x * gx.y;
        if (std::abs(det) < 1e-30) break;
        // Solve J * step = -g for the 2x2 finite-difference Jacobian.
        Vec2 step{(-g.x * gy.y + g.y * gy.x) / det, (-gx.x * g.y + gx.y * g.x) / det};
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Vec2 q = p + step * lambda;
            if (dist(q, disk_center) <= disk_radius) {
                double gq = displacement(map, q).norm();
                if (gq < gnorm) {
                    p = q;
                    gnorm = gq;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    if (!(gnorm < tol))
        throw not_found_error("no fixed point below tolerance in the search disk");
    return p;
}

std::function<double(double)> slave_section(const PlanarMap& map,
                                            const ProductStructure& structure,
                                            const Vec2& z0) {
    if (structure.dim() != 2 || structure.drive_dim() != 1)
        throw config_error("slave section needs a planar structure with 1d drive");
    Vec q = structure.coords(Vec{z0.x, z0.y});
    double x0 = q[structure.drive_indices()[0]];
    std::size_t ri = structure.response_indices()[0];
    std::size_t di = structure.drive_indices()[0];
    return [map, structure, x0, ri, di](double t) {
        Vec q(2);
        q[di] = x0;
        q[ri] = t;
        Vec p = structure.point_of_coords(q);
        Vec2 img = map(Vec2{p[0], p[1]});
        Vec qi = structure.coords(Vec{img.x, img.y});
        return qi[ri];
    };
}

std::vector<SectionFixedPoint> count_fixed_points(
    const std::function<double(double)>& psi, std::pair<double, double> interval,
    double grid_step, double tol) {
    auto [lo, hi] = interval;
    if (!(hi > lo)) throw config_error("fixed point scan needs an increasing interval");
    if (!(grid_step > 0.0 && grid_step <= 1e-4))
        throw config_error("fixed point scan needs grid_step <= 1e-4");
    if (!(tol > 0.0)) throw config_error("fixed point scan needs tol > 0");

    auto f = [&psi](double t) { return psi(t) - t; };
    std::size_t n = static_cast<std::size_t>(std::floor((hi - lo) / grid_step)) + 1;
    std::vector<double> fv(n + 1);
    std::vector<double> tv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        tv[i] = lo + static_cast<double>(i) * grid_step;
        if (tv[i] > hi) tv[i] = hi;
        fv[i] = f(tv[i]);
    }

    std::vector<SectionFixedPoint> out;
    std::size_t i = 0;
    while (i <= n) {
        if (fv[i] == 0.0) {
            // Collapse a run of exact grid zeros to one point; transversal
            // only if the signs on both sides differ.
            std::size_t j = i;
            while (j + 1 <= n && fv[j + 1] == 0.0) ++j;
            double t_mid = 0.5 * (tv[i] + tv[j]);
            bool left = i > 0 && fv[i - 1] < 0.0;
            bool right = j < n && fv[j + 1] > 0.0;
            bool left_p = i > 0 && fv[i - 1] > 0.0;
            bool right_n = j < n && fv[j + 1] < 0.0;
            bool crosses = (left && right) || (left_p && right_n);
            out.push_back({t_mid, crosses ? FixedPointKind::transversal
                                          : FixedPointKind::tangential});
            i = j + 1;
            continue;
        }
        if (i < n && fv[i] * fv[i + 1] < 0.0) {
            double a = tv[i], b = tv[i + 1];
            double fa = fv[i];
            while (b - a > tol) {
                double m = 0.5 * (a + b);
                double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (fa * fm < 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push_back({0.5 * (a + b), FixedPointKind::transversal});
        }
        ++i;
    }
    return out;
}

const char* cert_verdict_name(CertVerdict v) {
    switch (v) {
        case CertVerdict::non_synchronizing_for_structure:
            return "non_synchronizing_for_structure";
        case CertVerdict::inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

std::vector<FixedPointCertificate> certify(const PlanarMap& map,
                                           const std::vector<ProductStructure>& structures,
                                           std::pair<double, double> window,
                                           const CertifyConfig& cfg) {
    if (structures.empty()) throw config_error("certify needs at least one structure");
    std::vector<FixedPointCertificate> out;
    out.reserve(structures.size());

    bool have_z0 = false;
    Vec2 z0{};
    std::string fail_note;
    try {
        z0 = find_fixed_point(map, cfg.disk_center, cfg.disk_radius, cfg.fp_tol);
        have_z0 = true;
    } catch (const not_found_error& e) {
        fail_note = e.what();
    }

    for (std::size_t si = 0; si < structures.size(); ++si) {
        const ProductStructure& s = structures[si];
        FixedPointCertificate cert;
        cert.structure_id = si;
        if (!have_z0) {
            cert.verdict = CertVerdict::inconclusive;
            cert.note = "fixed point search failed: " + fail_note;
            out.push_back(std::move(cert));
            continue;
        }
        auto psi = slave_section(map, s, z0);  // validates the structure shape
        cert.fixed_point = z0;
        Vec q = s.coords(Vec{z0.x, z0.y});
        cert.leaf_constant = q[s.drive_indices()[0]];
        cert.anchor_t = q[s.response_indices()[0]];
        cert.fixed_points =
            count_fixed_points(psi, window, cfg.grid_step, cfg.bisect_tol);

        // The anchored fixed point always belongs to the section; classify it
        // locally and record it if the scan window missed it.
        bool anchored_listed = false;
        for (const auto& fp : cert.fixed_points)
            if (std::abs(fp.t - cert.anchor_t) <= 1e-9) anchored_listed = true;
        if (!anchored_listed) {
            double h = 1e-6;
            double fl = psi(cert.anchor_t - h) - (cert.anchor_t - h);
            double fr = psi(cert.anchor_t + h) - (cert.anchor_t + h);
            FixedPointKind kind = fl * fr < 0.0 ? FixedPointKind::transversal
                                                : FixedPointKind::tangential;
            cert.fixed_points.push_back({cert.anchor_t, kind});
            std::sort(cert.fixed_points.begin(), cert.fixed_points.end(),
                      [](const SectionFixedPoint& a, const SectionFixedPoint& b) {
                          return a.t < b.t;
                      });
        }

        // Two distinct fixed points of the section are two slave orbits that
        // share the drive yet keep a fixed separation, so the anchored point
        // plus any other fixed point (transversal or tangential) suffices.
        // List entries are pairwise separated by construction.
        bool certified = cert.fixed_points.size() >= 2;
        cert.verdict = certified ? CertVerdict::non_synchronizing_for_structure
                                 : CertVerdict::inconclusive;
        if (!certified)
            cert.note = "fewer than two distinct fixed points on the section";

        // A section that fixes the whole leaf still certifies, but the
        // evidence is degenerate rather than a discrete fixed-point set.
        bool degenerate = true;
        for (int k = 1; k <= 7 && degenerate; ++k) {
            double t = window.first + (window.second - window.first) * k / 8.0;
            degenerate = std::abs(psi(t) - t) < 1e-12;
        }
        if (degenerate) cert.note = "degenerate section: every leaf point is fixed";
        out.push_back(std::move(cert));
    }
    return out;
}

std::vector<ProductStructure> rotation_family(std::size_t n) {
    if (n < 1) throw config_error("rotation family needs n >= 1");
    std::vector<ProductStructure> fam;
    fam.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        fam.push_back(ProductStructure::rotation2d(
            static_cast<double>(k) * std::numbers::pi / 12.0));
    return fam;
}

namespace {

// Max of r^j (36 - r^2)^2 over r >= 0, attained at r^2 = 36 j / (j + 4).
double mode_sup(std::size_t j) {
    if (j == 0) return 36.0 * 36.0;
    double r2 = 36.0 * static_cast<double>(j) / (static_cast<double>(j) + 4.0);
    double b = 36.0 - r2;
    return std::pow(r2, 0.5 * static_cast<double>(j)) * b * b;
}

}  // namespace

Perturbation make_perturbation(const PerturbationSpec& spec) {
    if (!(spec.epsilon >= 0.0)) throw config_error("perturbation needs epsilon >= 0");
    Perturbation eta;
    eta.spec = spec;
    std::size_t nm = spec.n_modes;
    eta.ax.assign(nm + 1, 0.0);
    eta.bx.assign(nm + 1, 0.0);
    eta.ay.assign(nm + 1, 0.0);
    eta.by.assign(nm + 1, 0.0);

    Rng rng(spec.seed);
    for (std::size_t j = 0; j <= nm; ++j) {
        eta.ax[j] = rng.symmetric(1.0);
        if (j > 0) eta.bx[j] = rng.symmetric(1.0);
        eta.ay[j] = rng.symmetric(1.0);
        if (j > 0) eta.by[j] = rng.symmetric(1.0);
    }

    // Analytic sup bound per component, then one global rescale so the
    // realized sup norm never exceeds epsilon.
    double bound_x = 0.0, bound_y = 0.0;
    for (std::size_t j = 0; j <= nm; ++j) {
        double m = mode_sup(j);
        bound_x += (std::abs(eta.ax[j]) + std::abs(eta.bx[j])) * m;
        bound_y += (std::abs(eta.ay[j]) + std::abs(eta.by[j])) * m;
    }
    double bound = std::sqrt(bound_x * bound_x + bound_y * bound_y);
    double scale = bound > 0.0 ? spec.epsilon / bound : 0.0;
    for (std::size_t j = 0; j <= nm; ++j) {
        eta.ax[j] *= scale;
        eta.bx[j] *= scale;
        eta.ay[j] *= scale;
        eta.by[j] *= scale;
    }
    return eta;
}

Vec2 Perturbation::operator()(const Vec2& p) const {
    double r2 = p.norm2();
    if (r2 >= 36.0) return {0.0, 0.0};
    double bump = (36.0 - r2) * (36.0 - r2);
    double r = std::sqrt(r2);
    std::size_t nm = ax.size() - 1;

    double ex = ax[0] * bump;
    double ey = ay[0] * bump;
    if (r > 0.0) {
        // cos/sin of j*theta by recurrence; radial factor r^j folds into the
        // same loop, so each mode term is polynomial in (x, y).
        double c1 = p.x / r, s1 = p.y / r;
        double cj = 1.0, sj = 0.0, rj = 1.0;
        for (std::size_t j = 1; j <= nm; ++j) {
            double cn = cj * c1 - sj * s1;
            double sn = sj * c1 + cj * s1;
            cj = cn;
            sj = sn;
            rj *= r;
            double rho = rj * bump;
            ex += rho * (ax[j] * cj + bx[j] * sj);
            ey += rho * (ay[j] * cj + by[j] * sj);
        }
    }
    return {ex, ey};
}

PlanarMap perturbed_map(const PlanarMap& base, const Perturbation& eta) {
    PlanarMap m;
    m.fwd = [base, eta](const Vec2& p) { return base(p) + eta(p); };
    return m;
}

SweepReport perturbation_sweep(const PlanarMap& map, const std::vector<double>& eps_list,
                               std::size_t n_samples,
                               const std::vector<ProductStructure>& structures,
                               std::uint64_t seed, std::pair<double, double> window,
                               const CertifyConfig& cfg) {
    if (eps_list.empty()) throw config_error("sweep needs a nonempty epsilon list");
    if (!std::is_sorted(eps_list.begin(), eps_list.end()))
        throw config_error("sweep epsilon list must be sorted ascending");
    if (n_samples < 1) throw config_error("sweep needs n_samples >= 1");

    SweepReport rep;
    rep.eps_list = eps_list;
    rep.success_fraction.assign(eps_list.size(), 0.0);
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        std::size_t certified_samples = 0;
        for (std::size_t si = 0; si < n_samples; ++si) {
            PerturbationSpec spec{eps_list[ei], 3,
                                  substream(seed, ei * n_samples + si)};
            PlanarMap g = perturbed_map(map, make_perturbation(spec));
            auto certs = certify(g, structures, window, cfg);
            bool all = true;
            for (const auto& c : certs) {
                rep.cells.push_back({eps_list[ei], si, c.structure_id, c.verdict,
                                     c.fixed_points.size()});
                all = all &&
                      c.verdict == CertVerdict::non_synchronizing_for_structure;
            }
            if (all) ++certified_samples;
        }
        rep.success_fraction[ei] =
            static_cast<double>(certified_samples) / static_cast<double>(n_samples);
    }
    return rep;
}

namespace {

bool certified_at(const PlanarMap& map, const ProductStructure& structure,
                  const PerturbationFn& direction, double eps,
                  std::pair<double, double> window, const CertifyConfig& cfg) {
    PlanarMap g;
    g.fwd = [map, direction, eps](const Vec2& p) { return map(p) + direction(p) * eps; };
    auto certs = certify(g, {structure}, window, cfg);
    return certs[0].verdict == CertVerdict::non_synchronizing_for_structure;
}

}  // namespace

EpsilonBracket estimate_critical_epsilon_dir(const PlanarMap& map,
                                             const ProductStructure& structure,
                                             const PerturbationFn& direction,
                                             double eps_lo, double eps_hi,
                                             std::size_t iters,
                                             std::pair<double, double> window,
                                             const CertifyConfig& cfg) {
    if (!(eps_lo >= 0.0 && eps_hi > eps_lo))
        throw config_error("epsilon bracket needs 0 <= eps_lo < eps_hi");
    if (!certified_at(map, structure, direction, eps_lo, window, cfg))
        throw config_error("certificate already fails at eps_lo");
    if (certified_at(map, structure, direction, eps_hi, window, cfg))
        throw config_error("certificate still holds at eps_hi");
    double lo = eps_lo, hi = eps_hi;
    for (std::size_t k = 0; k < iters; ++k) {
        double mid = 0.5 * (lo + hi);
        (certified_at(map, structure, direction, mid, window, cfg) ? lo : hi) = mid;
    }
    return {lo, hi};
}

EpsilonBracket estimate_critical_epsilon(const PlanarMap& map,
                                         const ProductStructure& structure,
                                         std::uint64_t seed, double eps_lo,
                                         double eps_hi, std::size_t iters,
                                         std::pair<double, double> window,
                                         const CertifyConfig& cfg) {
    Perturbation unit = make_perturbation({1.0, 3, seed});
    PerturbationFn dir = [unit](const Vec2& p) { return unit(p); };
    return estimate_critical_epsilon_dir(map, structure, dir, eps_lo, eps_hi, iters,
                                         window, cfg);
}

}  // namespace synclab
