#include "synclab/product.hpp"

#include <algorithm>
#include <cmath>

#include "synclab/errors.hpp"

namespace synclab {

ProductStructure::ProductStructure(Mat transform, Vec offset,
                                   std::vector<std::size_t> drive)
    : transform_(std::move(transform)), offset_(std::move(offset)), drive_(std::move(drive)) {
    const std::size_t d = transform_.rows();
    if (transform_.cols() != d) throw config_error("structure transform must be square");
    if (offset_.size() != d) throw config_error("structure offset dimension mismatch");
    std::vector<bool> used(d, false);
    for (std::size_t i : drive_) {
        if (i >= d) throw config_error("drive index out of range");
        if (used[i]) throw config_error("duplicate drive index");
        used[i] = true;
    }
    if (drive_.empty() || drive_.size() >= d)
        throw config_error("drive split must leave both sides nonempty");
    for (std::size_t i = 0; i < d; ++i)
        if (!used[i]) response_.push_back(i);
    Lu lu(transform_);
    if (std::abs(lu.det()) <= 1e-12)
        throw config_error("structure transform is singular");
    inverse_ = lu.inverse();
}

ProductStructure ProductStructure::identity(std::size_t d,
                                            std::vector<std::size_t> drive) {
    return ProductStructure(Mat::identity(d), Vec(d, 0.0), std::move(drive));
}

ProductStructure ProductStructure::rotation2d(double phi) {
    Mat t(2, 2);
    t(0, 0) = std::cos(phi);
    t(0, 1) = std::sin(phi);
    t(1, 0) = -std::sin(phi);
    t(1, 1) = std::cos(phi);
    return ProductStructure(t, Vec(2, 0.0), {0});
}

Vec ProductStructure::coords(const Vec& p) const {
    Vec q = transform_ * p;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += offset_[i];
    return q;
}

Vec ProductStructure::point_of_coords(const Vec& q) const {
    Vec shifted = q;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= offset_[i];
    return inverse_ * shifted;
}

void ProductStructure::to_coords(const Vec& p, Vec& x, Vec& y) const {
    if (p.size() != dim()) throw config_error("to_coords: dimension mismatch");
    const Vec q = coords(p);
    x.resize(drive_.size());
    y.resize(response_.size());
    for (std::size_t i = 0; i < drive_.size(); ++i) x[i] = q[drive_[i]];
    for (std::size_t i = 0; i < response_.size(); ++i) y[i] = q[response_[i]];
}

Vec ProductStructure::from_coords(const Vec& x, const Vec& y) const {
    if (x.size() != drive_.size() || y.size() != response_.size())
        throw config_error("from_coords: dimension mismatch");
    Vec q(dim());
    for (std::size_t i = 0; i < drive_.size(); ++i) q[drive_[i]] = x[i];
    for (std::size_t i = 0; i < response_.size(); ++i) q[response_[i]] = y[i];
    return point_of_coords(q);
}

Vec slave_step(const System& sys, const ProductStructure& s,
               const Vec& x, const Vec& y) {
    if (sys.kind != SystemKind::map) throw config_error("slave_step: system is not a map");
    if (sys.dim != s.dim()) throw config_error("slave_step: dimension mismatch");
    const Vec p = s.from_coords(x, y);
    const Vec image = sys.eval(p);
    Vec xi, yi;
    s.to_coords(image, xi, yi);
    return yi;
}

Vec slave_step_flow(const System& sys, const ProductStructure& s,
                    const Vec& x_a, const Vec& x_b, const Vec& y, double h) {
    if (sys.kind != SystemKind::flow) throw config_error("slave_step_flow: system is not a flow");
    if (sys.dim != s.dim()) throw config_error("slave_step_flow: dimension mismatch");
    if (!(h > 0.0)) throw config_error("slave_step_flow: step must be positive");

    // Response field in structure coordinates with the drive pinned to its
    // linear interpolation: q' contributions of the drive coordinates are
    // discarded, the drive is overwritten per evaluation time.
    const std::size_t m = s.drive_dim(), k = s.response_dim();
    Vec state(k + 1);  // response coords plus local time in [0, h]
    for (std::size_t i = 0; i < k; ++i) state[i] = y[i];
    state[k] = 0.0;

    auto field = [&](const double* in, double* out) {
        const double tau = in[k] / h;
        Vec x(m);
        for (std::size_t i = 0; i < m; ++i)
            x[i] = x_a[i] + (x_b[i] - x_a[i]) * tau;
        Vec yv(k);
        for (std::size_t i = 0; i < k; ++i) yv[i] = in[i];
        const Vec p = s.from_coords(x, yv);
        Vec dp(sys.dim);
        sys.f(p.data(), dp.data());
        // d(coords)/dt = transform * dp; keep response rows only.
        const Mat& t = s.transform();
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t row = s.response_indices()[i];
            double acc = 0.0;
            for (std::size_t j = 0; j < t.cols(); ++j) acc += t(row, j) * dp[j];
            out[i] = acc;
        }
        out[k] = 1.0;  // advance local time
    };

    rk4_step(field, state, h);
    Vec out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = state[i];
    return out;
}

// --- drive sequences -------------------------------------------------------

DriveSequence DriveSequence::constant(Vec value) {
    DriveSequence d;
    d.m_ = value.size();
    d.source_ = DriveConstant{std::move(value)};
    return d;
}

DriveSequence DriveSequence::samples(std::vector<Vec> values) {
    if (values.empty()) throw config_error("drive samples must be nonempty");
    DriveSequence d;
    d.m_ = values.front().size();
    for (const auto& v : values)
        if (v.size() != d.m_) throw config_error("drive samples dimension mismatch");
    d.source_ = DriveSamples{std::move(values)};
    return d;
}

DriveSequence DriveSequence::orbit_projection(Trajectory master,
                                              const ProductStructure& s) {
    if (master.states.empty()) throw config_error("orbit projection of empty trajectory");
    if (master.dim() != s.dim()) throw config_error("orbit projection dimension mismatch");
    DriveSequence d;
    d.m_ = s.drive_dim();
    d.time_step_ = master.time_step;
    std::vector<Vec> proj;
    proj.reserve(master.states.size());
    Vec x, y;
    for (const auto& p : master.states) {
        s.to_coords(p, x, y);
        proj.push_back(x);
    }
    d.source_ = std::move(proj);
    return d;
}

DriveSequence DriveSequence::iid_uniform(std::uint64_t seed, Box box) {
    if (box.lo.size() != box.hi.size() || box.lo.empty())
        throw config_error("iid_uniform box is malformed");
    DriveSequence d;
    d.m_ = box.lo.size();
    d.seed_ = seed;
    d.source_ = DriveIidUniform{std::move(box)};
    return d;
}

DriveSequence DriveSequence::sinusoid(std::uint64_t seed, double amp, double freq,
                                      std::size_t m) {
    if (m == 0) throw config_error("sinusoid drive needs m >= 1");
    DriveSequence d;
    d.m_ = m;
    d.seed_ = seed;
    // Seeded phase so distinct seeds give distinct signals.
    Rng rng(substream(seed, 0));
    d.phase_ = rng.uniform(0.0, 2.0 * std::numbers::pi);
    d.source_ = DriveSinusoid{amp, freq};
    return d;
}

Vec DriveSequence::value(std::size_t n) const {
    if (std::holds_alternative<DriveConstant>(source_))
        return std::get<DriveConstant>(source_).value;
    if (std::holds_alternative<DriveSamples>(source_)) {
        const auto& s = std::get<DriveSamples>(source_).values;
        if (n >= s.size()) throw error("drive samples exhausted at index " + std::to_string(n));
        return s[n];
    }
    if (std::holds_alternative<std::vector<Vec>>(source_)) {
        const auto& s = std::get<std::vector<Vec>>(source_);
        if (n >= s.size()) throw error("orbit drive exhausted at index " + std::to_string(n));
        return s[n];
    }
    if (std::holds_alternative<DriveIidUniform>(source_)) {
        const auto& g = std::get<DriveIidUniform>(source_);
        // Counter-based: one fresh stream per index.
        Rng rng(substream(seed_, n));
        return rng.uniform_vec(g.box.lo, g.box.hi);
    }
    const auto& g = std::get<DriveSinusoid>(source_);
    Vec v(m_);
    for (std::size_t i = 0; i < m_; ++i)
        v[i] = g.amp * std::sin(g.freq * static_cast<double>(n) * time_step_ +
                                phase_ + static_cast<double>(i));
    return v;
}

std::vector<Vec> drive_values(const DriveSequence& seq, std::size_t n) {
    if (n < 1) throw config_error("drive_values: n must be >= 1");
    std::vector<Vec> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(seq.value(i));
    return out;
}

}  // namespace synclab
