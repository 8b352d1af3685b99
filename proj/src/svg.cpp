#include "inktrace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace inktrace {

namespace {

const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                          "#17becf", "#a65628", "#f781bf", "#999999", "#66c2a5"};
constexpr int kPaletteSize = 10;

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void open_svg(std::ostringstream& out, double w, double h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
        << num(h) << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void text_at(std::ostringstream& out, double x, double y, const std::string& s,
             const char* anchor = "middle", int size = 13) {
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\""
        << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

void line(std::ostringstream& out, double x1, double y1, double x2, double y2,
          const char* color = "#333333", double width = 1.0) {
    out << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
        << "\" y2=\"" << num(y2) << "\" stroke=\"" << color << "\" stroke-width=\""
        << num(width) << "\"/>\n";
}

// Shared frame for the two chart kinds: ticks, labels, title.
struct Frame {
    double width = 640, height = 440;
    double left = 70, right = 24, top = 44, bottom = 56;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;

    double px(double x) const {
        double span = x_hi - x_lo;
        if (span <= 0) span = 1;
        return left + (x - x_lo) / span * (width - left - right);
    }
    double py(double y) const {
        double span = y_hi - y_lo;
        if (span <= 0) span = 1;
        return height - bottom - (y - y_lo) / span * (height - top - bottom);
    }

    void draw(std::ostringstream& out, const std::string& title, const std::string& x_label,
              const std::string& y_label, bool x_ticks) const {
        line(out, left, height - bottom, width - right, height - bottom);
        line(out, left, top, left, height - bottom);
        for (int i = 0; i <= 4; ++i) {
            double f = i / 4.0;
            double y = y_lo + f * (y_hi - y_lo);
            line(out, left - 4, py(y), left, py(y));
            text_at(out, left - 8, py(y) + 4, num(y), "end", 11);
            if (x_ticks) {
                double x = x_lo + f * (x_hi - x_lo);
                line(out, px(x), height - bottom, px(x), height - bottom + 4);
                text_at(out, px(x), height - bottom + 18, num(x), "middle", 11);
            }
        }
        text_at(out, (left + width - right) / 2, height - 14, x_label);
        text_at(out, (left + width - right) / 2, top - 18, title, "middle", 15);
        out << "<text x=\"18\" y=\"" << num((top + height - bottom) / 2)
            << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
            << " transform=\"rotate(-90 18 " << num((top + height - bottom) / 2) << ")\">"
            << y_label << "</text>\n";
    }
};

}  // namespace

std::string svg_overlay(const SkeletonImage& image, const RecoveredTrajectory& trajectory) {
    const double s = 5.0;   // screen pixels per skeleton pixel
    const double pad = 10.0;
    std::ostringstream out;
    open_svg(out, image.width * s + 2 * pad, image.height * s + 2 * pad);
    auto cx = [&](const Pixel& p) { return pad + (p.col + 0.5) * s; };
    auto cy = [&](const Pixel& p) { return pad + (p.row + 0.5) * s; };

    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c)
            if (image.at(r, c))
                out << "<rect x=\"" << num(pad + c * s) << "\" y=\"" << num(pad + r * s)
                    << "\" width=\"" << num(s) << "\" height=\"" << num(s)
                    << "\" fill=\"#d0d0d0\"/>\n";

    for (size_t i = 0; i < trajectory.components.size(); ++i) {
        const auto& pts = trajectory.components[i].points;
        if (pts.empty()) continue;
        const char* color = kPalette[i % kPaletteSize];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (const auto& p : pts) out << num(cx(p)) << "," << num(cy(p)) << " ";
        out << "\"/>\n";
        out << "<circle cx=\"" << num(cx(pts.front())) << "\" cy=\"" << num(cy(pts.front()))
            << "\" r=\"" << num(s * 0.7) << "\" fill=\"" << color << "\"/>\n";
        if (pts.size() >= 2) {
            // direction arrow: a short barbed segment two thirds of the way along
            size_t m = (pts.size() * 2) / 3;
            if (m == 0) m = 1;
            const Pixel a = pts[m - 1], b = pts[m];
            double ax = cx(a), ay = cy(a), bx = cx(b), by = cy(b);
            double dx = bx - ax, dy = by - ay;
            double len = std::hypot(dx, dy);
            if (len > 1e-9) {
                dx /= len, dy /= len;
                double wing = s * 1.2;
                out << "<path d=\"M " << num(bx - (dx - dy) * wing) << " "
                    << num(by - (dy + dx) * wing) << " L " << num(bx) << " " << num(by) << " L "
                    << num(bx - (dx + dy) * wing) << " " << num(by - (dy - dx) * wing)
                    << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_plot(const SeriesPlot& plot) {
    Frame f;
    bool any = false;
    for (const auto& s : plot.series)
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!any) {
                f.x_lo = f.x_hi = s.x[i];
                f.y_lo = f.y_hi = s.y[i];
                any = true;
            }
            f.x_lo = std::min(f.x_lo, s.x[i]), f.x_hi = std::max(f.x_hi, s.x[i]);
            f.y_lo = std::min(f.y_lo, s.y[i]), f.y_hi = std::max(f.y_hi, s.y[i]);
        }
    if (!any) f.x_lo = f.y_lo = 0, f.x_hi = f.y_hi = 1;
    if (f.y_hi - f.y_lo < 1e-12) f.y_lo -= 0.5, f.y_hi += 0.5;
    if (f.x_hi - f.x_lo < 1e-12) f.x_lo -= 0.5, f.x_hi += 0.5;

    std::ostringstream out;
    open_svg(out, f.width, f.height);
    f.draw(out, plot.title, plot.x_label, plot.y_label, true);
    for (size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const char* color = kPalette[si % kPaletteSize];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            out << num(f.px(s.x[i])) << "," << num(f.py(s.y[i])) << " ";
        out << "\"/>\n";
        double ly = f.top + 14 + 16 * si;
        line(out, f.width - 150, ly - 4, f.width - 130, ly - 4, color, 2.0);
        text_at(out, f.width - 124, ly, s.label, "start", 11);
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_boxplot(const BoxPlot& plot) {
    Frame f;
    bool any = false;
    for (const auto& b : plot.boxes) {
        if (!any) f.y_lo = b.lo, f.y_hi = b.hi, any = true;
        f.y_lo = std::min(f.y_lo, b.lo), f.y_hi = std::max(f.y_hi, b.hi);
    }
    if (!any) f.y_lo = 0, f.y_hi = 1;
    if (f.y_hi - f.y_lo < 1e-12) f.y_lo -= 0.5, f.y_hi += 0.5;
    double margin = (f.y_hi - f.y_lo) * 0.08;
    f.y_lo -= margin, f.y_hi += margin;

    std::ostringstream out;
    open_svg(out, f.width, f.height);
    f.draw(out, plot.title, plot.x_label, plot.y_label, false);
    double inner = f.width - f.left - f.right;
    double slot = plot.boxes.empty() ? inner : inner / plot.boxes.size();
    double half = std::min(18.0, slot * 0.3);
    for (size_t i = 0; i < plot.boxes.size(); ++i) {
        const auto& b = plot.boxes[i];
        double x = f.left + slot * (i + 0.5);
        const char* color = kPalette[i % kPaletteSize];
        line(out, x, f.py(b.lo), x, f.py(b.q1));
        line(out, x, f.py(b.q3), x, f.py(b.hi));
        line(out, x - half * 0.6, f.py(b.lo), x + half * 0.6, f.py(b.lo));
        line(out, x - half * 0.6, f.py(b.hi), x + half * 0.6, f.py(b.hi));
        out << "<rect x=\"" << num(x - half) << "\" y=\"" << num(f.py(b.q3)) << "\" width=\""
            << num(2 * half) << "\" height=\"" << num(f.py(b.q1) - f.py(b.q3))
            << "\" fill=\"" << color << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
        line(out, x - half, f.py(b.median), x + half, f.py(b.median), color, 2.5);
        text_at(out, x, f.height - f.bottom + 18, b.label, "middle", 11);
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace inktrace
