// svg.hpp — Barycentric (ternary) plot scenes for three-level systems:
// region fills by raster membership runs, exact polygons, trajectories,
// vector-field arrows, labelled corners and a legend. Fixed 800x700 viewBox.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "simplexreach/common.hpp"
#include "simplexreach/prob_vector.hpp"

namespace simplexreach::svg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Barycentric projection of the 2-simplex onto the canvas: e1 top,
// e2 bottom-left, e3 bottom-right.
class TernaryProjection {
  public:
    TernaryProjection() {
        corners_[0] = {400.0, 80.0};
        corners_[1] = {80.0, 634.0};
        corners_[2] = {720.0, 634.0};
    }

    Point2 project(const Vector& x) const {
        Point2 p;
        for (int k = 0; k < 3; ++k) {
            p.x += x[k] * corners_[static_cast<std::size_t>(k)].x;
            p.y += x[k] * corners_[static_cast<std::size_t>(k)].y;
        }
        return p;
    }

    // Inverse of the affine projection; coordinates sum to 1 by construction.
    Vector unproject(const Point2& p) const {
        Eigen::Matrix2d M;
        M << corners_[0].x - corners_[2].x, corners_[1].x - corners_[2].x,
            corners_[0].y - corners_[2].y, corners_[1].y - corners_[2].y;
        Eigen::Vector2d rhs(p.x - corners_[2].x, p.y - corners_[2].y);
        Eigen::Vector2d ab = M.inverse() * rhs;
        Vector x(3);
        x << ab[0], ab[1], 1.0 - ab[0] - ab[1];
        return x;
    }

    const std::array<Point2, 3>& corners() const { return corners_; }

  private:
    std::array<Point2, 3> corners_;
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

class Scene {
  public:
    Scene() = default;

    const TernaryProjection& projection() const { return proj_; }

    void add_simplex_frame() {
        open_layer("layer-frame");
        const auto& c = proj_.corners();
        body_ += "<polygon points=\"";
        for (const Point2& p : c) body_ += detail::num(p.x) + "," + detail::num(p.y) + " ";
        body_ += "\" fill=\"white\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        const char* labels[3] = {"e1", "e2", "e3"};
        const double dx[3] = {0.0, -28.0, 10.0};
        const double dy[3] = {-12.0, 18.0, 18.0};
        for (int k = 0; k < 3; ++k) {
            body_ += "<text x=\"" + detail::num(c[static_cast<std::size_t>(k)].x + dx[k]) +
                     "\" y=\"" + detail::num(c[static_cast<std::size_t>(k)].y + dy[k]) +
                     "\" font-family=\"sans-serif\" font-size=\"18\">" + labels[k] + "</text>\n";
        }
        close_layer();
    }

    // Raster fill of {x : member(x)} on a barycentric grid; consecutive member
    // cells in a scan row merge into one rect.
    void add_region_raster(const std::function<bool(const Vector&)>& member,
                           const std::string& layer_id, const std::string& color,
                           double opacity, int resolution = 400) {
        open_layer(layer_id);
        const auto& c = proj_.corners();
        const double x_min = c[1].x, x_max = c[2].x;
        const double y_min = c[0].y, y_max = c[1].y;
        const double cell_w = (x_max - x_min) / resolution;
        const double cell_h = (y_max - y_min) / resolution;
        std::string rects;
        for (int row = 0; row < resolution; ++row) {
            const double y = y_min + (row + 0.5) * cell_h;
            int run_start = -1;
            for (int col = 0; col <= resolution; ++col) {
                bool inside = false;
                if (col < resolution) {
                    const double x = x_min + (col + 0.5) * cell_w;
                    Vector bary = proj_.unproject({x, y});
                    inside = bary.minCoeff() >= -1e-9 && member(bary);
                }
                if (inside && run_start < 0) run_start = col;
                if (!inside && run_start >= 0) {
                    rects += "<rect x=\"" + detail::num(x_min + run_start * cell_w) + "\" y=\"" +
                             detail::num(y_min + row * cell_h) + "\" width=\"" +
                             detail::num((col - run_start) * cell_w) + "\" height=\"" +
                             detail::num(cell_h * 1.02) + "\"/>\n";
                    run_start = -1;
                }
            }
        }
        body_ += "<g fill=\"" + color + "\" fill-opacity=\"" + detail::num(opacity) +
                 "\" stroke=\"none\">\n" + rects + "</g>\n";
        close_layer();
    }

    void add_polygon(const std::vector<Vector>& bary_points, const std::string& layer_id,
                     const std::string& stroke, const std::string& fill, double opacity) {
        open_layer(layer_id);
        body_ += "<polygon points=\"";
        for (const Vector& b : bary_points) {
            Point2 p = proj_.project(b);
            body_ += detail::num(p.x) + "," + detail::num(p.y) + " ";
        }
        body_ += "\" fill=\"" + fill + "\" fill-opacity=\"" + detail::num(opacity) +
                 "\" stroke=\"" + stroke + "\" stroke-width=\"1.5\"/>\n";
        close_layer();
    }

    void add_trajectory(const std::vector<Vector>& bary_points, const std::string& layer_id,
                        const std::string& color, double width = 1.2) {
        open_layer(layer_id);
        body_ += "<polyline points=\"";
        for (const Vector& b : bary_points) {
            Point2 p = proj_.project(b);
            body_ += detail::num(p.x) + "," + detail::num(p.y) + " ";
        }
        body_ += "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                 detail::num(width) + "\"/>\n";
        close_layer();
    }

    void add_dot(const Vector& bary, const std::string& layer_id, const std::string& color,
                 double radius = 4.0) {
        open_layer(layer_id);
        Point2 p = proj_.project(bary);
        body_ += "<circle cx=\"" + detail::num(p.x) + "\" cy=\"" + detail::num(p.y) + "\" r=\"" +
                 detail::num(radius) + "\" fill=\"" + color + "\"/>\n";
        close_layer();
    }

    // Arrow glyphs for a vector field sampled on a barycentric grid. The
    // direction is the projected field, the length rescaled to the grid step.
    void add_vector_field(const std::function<Vector(const Vector&)>& field,
                          const std::string& layer_id, const std::string& color,
                          int grid = 12) {
        open_layer(layer_id);
        std::string lines;
        double max_norm = 0.0;
        struct Arrow {
            Point2 from, dir;
            double norm;
        };
        std::vector<Arrow> arrows;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j <= grid - i; ++j) {
                Vector b(3);
                b << static_cast<double>(i) / grid, static_cast<double>(j) / grid,
                    1.0 - static_cast<double>(i + j) / grid;
                Vector v = field(b);
                Point2 p0 = proj_.project(b);
                // project the tangent vector by differencing the projection
                Point2 p1 = proj_.project((b + v).eval());
                Arrow a;
                a.from = p0;
                a.dir = {p1.x - p0.x, p1.y - p0.y};
                a.norm = std::hypot(a.dir.x, a.dir.y);
                max_norm = std::max(max_norm, a.norm);
                arrows.push_back(a);
            }
        }
        const double step = (proj_.corners()[2].x - proj_.corners()[1].x) / grid;
        for (const Arrow& a : arrows) {
            if (a.norm < 1e-12 * std::max(1.0, max_norm)) continue;
            const double scale = 0.7 * step * (a.norm / max_norm) / a.norm;
            const double tip_x = a.from.x + a.dir.x * scale;
            const double tip_y = a.from.y + a.dir.y * scale;
            lines += "<line x1=\"" + detail::num(a.from.x) + "\" y1=\"" + detail::num(a.from.y) +
                     "\" x2=\"" + detail::num(tip_x) + "\" y2=\"" + detail::num(tip_y) + "\"/>\n";
            // arrowhead: short back-strokes rotated off the shaft
            const double hx = -a.dir.x * scale, hy = -a.dir.y * scale;
            for (double rot : {0.5, -0.5}) {
                const double cs = std::cos(rot), sn = std::sin(rot);
                lines += "<line x1=\"" + detail::num(tip_x) + "\" y1=\"" + detail::num(tip_y) +
                         "\" x2=\"" + detail::num(tip_x + 0.35 * (hx * cs - hy * sn)) + "\" y2=\"" +
                         detail::num(tip_y + 0.35 * (hx * sn + hy * cs)) + "\"/>\n";
            }
        }
        body_ += "<g stroke=\"" + color + "\" stroke-width=\"1\">\n" + lines + "</g>\n";
        close_layer();
    }

    void add_legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        open_layer("layer-legend");
        double y = 30.0;
        for (const auto& [color, text] : entries) {
            body_ += "<rect x=\"620\" y=\"" + detail::num(y - 11) +
                     "\" width=\"14\" height=\"14\" fill=\"" + color + "\"/>\n";
            body_ += "<text x=\"640\" y=\"" + detail::num(y) +
                     "\" font-family=\"sans-serif\" font-size=\"14\">" + text + "</text>\n";
            y += 22.0;
        }
        close_layer();
    }

    std::string render() const {
        std::string out =
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"700\" "
            "viewBox=\"0 0 800 700\">\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

  private:
    void open_layer(const std::string& id) { body_ += "<g id=\"" + id + "\">\n"; }
    void close_layer() { body_ += "</g>\n"; }

    TernaryProjection proj_;
    std::string body_;
};

}  // namespace simplexreach::svg
