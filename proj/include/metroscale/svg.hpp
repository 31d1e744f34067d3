#pragma once

#include <string>
#include <vector>

namespace metroscale::svg {

// Minimal SVG scatter/line figure: axes, tick labels, optional log scales.
class Figure {
   public:
    Figure(std::string title, std::string x_label, std::string y_label,
           bool log_x = false, bool log_y = false);

    void add_points(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color, double radius = 2.5);
    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, double width = 1.5);
    // Shaded region between y_low and y_high.
    void add_band(const std::vector<double>& x, const std::vector<double>& y_low,
                  const std::vector<double>& y_high, const std::string& color);

    std::string render() const;
    void write(const std::string& path) const;

   private:
    struct Series {
        enum class Kind { Points, Line, Band } kind;
        std::vector<double> x, y, y2;
        std::string color;
        double size = 0.0;
    };

    std::string title_, x_label_, y_label_;
    bool log_x_, log_y_;
    std::vector<Series> series_;
};

}  // namespace metroscale::svg
