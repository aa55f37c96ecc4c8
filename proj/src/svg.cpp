#include "synclab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "synclab/errors.hpp"
#include "synclab/io.hpp"

namespace synclab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt_tick(double v) {
    // Short human-readable tick label.
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
}

}  // namespace

void SvgPlot::add_series(const std::string& name, const Vec& xs, const Vec& ys) {
    if (xs.size() != ys.size()) throw error("svg series length mismatch");
    series_.push_back({name, xs, ys});
}

std::string SvgPlot::render() const {
    if (series_.empty()) throw error("svg plot has no series");

    const double ml = 70, mr = 20, mt = title_.empty() ? 20 : 40, mb = 50;
    const double pw = width_ - ml - mr, ph = height_ - mt - mb;

    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            double y = s.ys[i];
            if (log_y_ && y <= 0.0) continue;
            if (!std::isfinite(s.xs[i]) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, s.xs[i]);
            xmax = std::max(xmax, s.xs[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmin <= xmax) || !(ymin <= ymax))
        throw error("svg plot has no finite points");
    if (xmin == xmax) { xmin -= 0.5; xmax += 0.5; }
    if (ymin == ymax) { ymin -= 0.5; ymax += 0.5; }

    auto ty = [&](double y) {
        double u = log_y_ ? (std::log10(y) - std::log10(ymin)) /
                                (std::log10(ymax) - std::log10(ymin))
                          : (y - ymin) / (ymax - ymin);
        return mt + ph * (1.0 - u);
    };
    auto tx = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title_.empty())
        o << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" "
             "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

    // frame
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

    // ticks: 5 per axis
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double px = tx(fx);
        o << "<line x1=\"" << px << "\" y1=\"" << mt + ph << "\" x2=\"" << px
          << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << px << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << fmt_tick(fx) << "</text>\n";
        const double fy = log_y_ ? std::pow(10.0, std::log10(ymin) +
                                                      (std::log10(ymax) - std::log10(ymin)) * i / 4.0)
                                 : ymin + (ymax - ymin) * i / 4.0;
        const double py = ty(fy);
        o << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml
          << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << fmt_tick(fy) << "</text>\n";
    }
    if (!xlabel_.empty())
        o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height_ - 10
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
          << xlabel_ << "</text>\n";
    if (!ylabel_.empty())
        o << "<text x=\"14\" y=\"" << mt + ph / 2
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
             "transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">" << ylabel_ << "</text>\n";

    for (std::size_t si = 0; si < series_.size(); ++si) {
        const auto& s = series_[si];
        const char* color = kPalette[si % 8];
        o << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            double y = s.ys[i];
            if (!std::isfinite(s.xs[i]) || !std::isfinite(y)) continue;
            if (log_y_ && y <= 0.0) continue;
            if (!first) o << ' ';
            o << format_double(tx(s.xs[i])) << ',' << format_double(ty(y));
            first = false;
        }
        o << "\"/>\n";
        o << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * si
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
          << "\">" << s.name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace synclab
