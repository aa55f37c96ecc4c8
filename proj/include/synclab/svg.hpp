#pragma once

#include <string>
#include <vector>

#include "synclab/mat.hpp"

namespace synclab {

// Minimal line-plot SVG generator.  Output is plain text and depends only on
// the added data, so identical inputs give identical bytes.
class SvgPlot {
  public:
    SvgPlot(int width = 720, int height = 480) : width_(width), height_(height) {}

    void set_title(const std::string& t) { title_ = t; }
    void set_labels(const std::string& x, const std::string& y) { xlabel_ = x; ylabel_ = y; }
    void set_log_y(bool on) { log_y_ = on; }

    void add_series(const std::string& name, const Vec& xs, const Vec& ys);

    std::string render() const;

  private:
    int width_, height_;
    std::string title_, xlabel_, ylabel_;
    bool log_y_ = false;
    struct Series {
        std::string name;
        Vec xs, ys;
    };
    std::vector<Series> series_;
};

}  // namespace synclab
