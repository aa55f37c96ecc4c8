#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "synclab/mat.hpp"
#include "synclab/rng.hpp"
#include "synclab/systems.hpp"

namespace synclab {

// Affine product structure: coordinates q = transform * p + offset, with a
// split of the coordinate axes into drive (imposed) and response (evolving)
// index sets.
class ProductStructure {
  public:
    ProductStructure(Mat transform, Vec offset, std::vector<std::size_t> drive);

    static ProductStructure identity(std::size_t d, std::vector<std::size_t> drive);
    // Planar rotation by phi, drive = first rotated coordinate.
    static ProductStructure rotation2d(double phi);

    std::size_t dim() const { return transform_.rows(); }
    std::size_t drive_dim() const { return drive_.size(); }
    std::size_t response_dim() const { return response_.size(); }

    const Mat& transform() const { return transform_; }
    const Vec& offset() const { return offset_; }
    const std::vector<std::size_t>& drive_indices() const { return drive_; }
    const std::vector<std::size_t>& response_indices() const { return response_; }

    // p -> (x, y)
    void to_coords(const Vec& p, Vec& x, Vec& y) const;
    // (x, y) -> p
    Vec from_coords(const Vec& x, const Vec& y) const;

    Vec coords(const Vec& p) const;          // full coordinate vector
    Vec point_of_coords(const Vec& q) const; // inverse of coords

  private:
    Mat transform_;
    Mat inverse_;
    Vec offset_;
    std::vector<std::size_t> drive_, response_;
};

// One slave step for a map system: assemble the ambient point from (x, y),
// apply the map, return the response coordinates of the image.
Vec slave_step(const System& sys, const ProductStructure& s,
               const Vec& x, const Vec& y);

// Flow variant: advance the response coordinates over one sample interval h,
// holding the drive coordinates on the linear interpolation from x_a to x_b.
// Single RK4 step over the interval.
Vec slave_step_flow(const System& sys, const ProductStructure& s,
                    const Vec& x_a, const Vec& x_b, const Vec& y, double h);

// ---------------------------------------------------------------------------
// drive sequences
// ---------------------------------------------------------------------------

struct DriveConstant {
    Vec value;
};
struct DriveSamples {
    std::vector<Vec> values;
};
struct DriveOrbitProjection {
    Trajectory trajectory;  // ambient orbit of the master
    // projection happens through the structure the sequence is built with
};
struct DriveIidUniform {
    Box box;
};
struct DriveSinusoid {
    double amp = 1.0;
    double freq = 1.0;  // radians per step (maps) or per time unit (flows)
};

// Deterministic source of drive values x(0), x(1), ...  Generator kinds are
// counter-based: value(n) depends only on (seed, n), so access order is
// irrelevant.
class DriveSequence {
  public:
    static DriveSequence constant(Vec value);
    static DriveSequence samples(std::vector<Vec> values);
    static DriveSequence orbit_projection(Trajectory master, const ProductStructure& s);
    static DriveSequence iid_uniform(std::uint64_t seed, Box box);
    static DriveSequence sinusoid(std::uint64_t seed, double amp, double freq,
                                  std::size_t m = 1);

    Vec value(std::size_t n) const;
    std::size_t drive_dim() const { return m_; }
    // Time step of the underlying signal (1 for map-style sequences).
    double time_step() const { return time_step_; }
    // Same source sampled on a different grid (flow drives at t = n*h).
    DriveSequence with_time_step(double h) const {
        DriveSequence d = *this;
        d.time_step_ = h;
        return d;
    }

  private:
    DriveSequence() = default;
    std::variant<DriveConstant, DriveSamples, std::vector<Vec>,  // projected orbit
                 DriveIidUniform, DriveSinusoid>
        source_;
    std::uint64_t seed_ = 0;
    std::size_t m_ = 0;
    double time_step_ = 1.0;
    double phase_ = 0.0;
};

std::vector<Vec> drive_values(const DriveSequence& seq, std::size_t n);

}  // namespace synclab
