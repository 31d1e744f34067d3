#include "metroscale/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "metroscale/errors.hpp"

namespace metroscale::svg {

namespace {

constexpr double kWidth = 640.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string tick_label(double v) {
    std::ostringstream os;
    if (std::fabs(v) >= 1e5 || (v != 0.0 && std::fabs(v) < 1e-3))
        os.precision(1), os << std::scientific;
    else
        os.precision(6);
    os << v;
    return os.str();
}

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        ticks.push_back(t);
    return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(std::log10(lo)));
         e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
        const double t = std::pow(10.0, e);
        if (t >= lo * 0.999 && t <= hi * 1.001) ticks.push_back(t);
    }
    if (ticks.size() < 2) return linear_ticks(lo, hi);
    return ticks;
}

}  // namespace

Figure::Figure(std::string title, std::string x_label, std::string y_label,
               bool log_x, bool log_y)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      log_x_(log_x),
      log_y_(log_y) {}

void Figure::add_points(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& color, double radius) {
    series_.push_back({Series::Kind::Points, x, y, {}, color, radius});
}

void Figure::add_line(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& color, double width) {
    series_.push_back({Series::Kind::Line, x, y, {}, color, width});
}

void Figure::add_band(const std::vector<double>& x, const std::vector<double>& y_low,
                      const std::vector<double>& y_high, const std::string& color) {
    series_.push_back({Series::Kind::Band, x, y_low, y_high, color, 0.0});
}

std::string Figure::render() const {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const Series& s : series_) {
        for (double v : s.x) {
            x_lo = std::min(x_lo, v);
            x_hi = std::max(x_hi, v);
        }
        for (double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
        for (double v : s.y2) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!std::isfinite(x_lo) || !std::isfinite(y_lo))
        throw DomainError("figure has no data");
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;

    auto tx = [&](double v) {
        const double a = log_x_ ? std::log10(v) : v;
        const double lo = log_x_ ? std::log10(x_lo) : x_lo;
        const double hi = log_x_ ? std::log10(x_hi) : x_hi;
        return kLeft + (a - lo) / (hi - lo) * (kWidth - kLeft - kRight);
    };
    auto ty = [&](double v) {
        const double a = log_y_ ? std::log10(v) : v;
        const double lo = log_y_ ? std::log10(y_lo) : y_lo;
        const double hi = log_y_ ? std::log10(y_hi) : y_hi;
        return kHeight - kBottom - (a - lo) / (hi - lo) * (kHeight - kTop - kBottom);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << title_ << "</text>\n";

    // Axes.
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
       << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
       << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";

    for (double t : log_x_ ? log_ticks(x_lo, x_hi) : linear_ticks(x_lo, x_hi)) {
        const double px = tx(t);
        os << "<line x1=\"" << px << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px
           << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
           << tick_label(t) << "</text>\n";
    }
    for (double t : log_y_ ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi)) {
        const double py = ty(t);
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft
           << "\" y2=\"" << py << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 3
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
           << tick_label(t) << "</text>\n";
    }
    os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << x_label_ << "</text>\n"
       << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 16 "
       << (kTop + kHeight - kBottom) / 2 << ")\">" << y_label_ << "</text>\n";

    for (const Series& s : series_) {
        if (s.kind == Series::Kind::Band) {
            os << "<path d=\"M";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << (i ? " L" : "") << fmt(tx(s.x[i])) << ' ' << fmt(ty(s.y[i]));
            for (std::size_t i = s.x.size(); i-- > 0;)
                os << " L" << fmt(tx(s.x[i])) << ' ' << fmt(ty(s.y2[i]));
            os << " Z\" fill=\"" << s.color << "\" fill-opacity=\"0.25\" "
                  "stroke=\"none\"/>\n";
        } else if (s.kind == Series::Kind::Line) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
               << s.size << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << fmt(tx(s.x[i])) << ',' << fmt(ty(s.y[i])) << ' ';
            os << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << "<circle cx=\"" << fmt(tx(s.x[i])) << "\" cy=\"" << fmt(ty(s.y[i]))
                   << "\" r=\"" << s.size << "\" fill=\"" << s.color
                   << "\" fill-opacity=\"0.6\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

void Figure::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write figure: " + path);
    out << render();
}

}  // namespace metroscale::svg
