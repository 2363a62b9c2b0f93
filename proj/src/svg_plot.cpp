#include "fimcon/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fimcon {

namespace svgplot {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 14;
constexpr int kMarginBottom = 14;
constexpr int kMaxPointsPerSeries = 2000;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void absorb(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen() {
        if (lo > hi) {
            lo = -1;
            hi = 1;
        }
        if (hi - lo < 1e-12) {
            lo -= 1;
            hi += 1;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write(const std::string& path, const std::vector<double>& t, const std::vector<Panel>& panels,
           int width, int panel_height) {
    if (t.size() < 2) throw std::runtime_error("svg: need at least two time samples");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open SVG output file: " + path);

    const int n = static_cast<int>(t.size());
    const int stride = std::max(1, n / kMaxPointsPerSeries);
    const double t0 = t.front();
    const double t1 = t.back();
    const int plot_w = width - kMarginLeft - kMarginRight;
    const int total_h = static_cast<int>(panels.size()) * panel_height + 30;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << total_h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const int top = static_cast<int>(p) * panel_height + kMarginTop;
        const int plot_h = panel_height - kMarginTop - kMarginBottom;

        Range range;
        for (const auto& s : panel.series)
            for (int k = 0; k < n; k += stride) range.absorb(s.values[static_cast<std::size_t>(k)]);
        for (const auto& b : panel.bands)
            for (int k = 0; k < n; k += stride) {
                range.absorb(b.upper[static_cast<std::size_t>(k)]);
                range.absorb(b.lower[static_cast<std::size_t>(k)]);
            }
        range.widen();

        auto sx = [&](double time) {
            return kMarginLeft + plot_w * (time - t0) / (t1 - t0);
        };
        auto sy = [&](double v) {
            v = std::min(std::max(v, range.lo), range.hi);  // clip poles into view
            return top + plot_h - plot_h * (v - range.lo) / (range.hi - range.lo);
        };

        out << "<rect x=\"" << kMarginLeft << "\" y=\"" << top << "\" width=\"" << plot_w
            << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#999\"/>\n";
        out << "<text x=\"8\" y=\"" << top + 12 << "\">" << panel.ylabel << "</text>\n";
        out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << top + 10
            << "\" text-anchor=\"end\">" << fmt(range.hi) << "</text>\n";
        out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << top + plot_h
            << "\" text-anchor=\"end\">" << fmt(range.lo) << "</text>\n";

        for (const auto& b : panel.bands) {
            out << "<polygon fill=\"" << b.fill << "\" fill-opacity=\"0.45\" stroke=\"none\" points=\"";
            for (int k = 0; k < n; k += stride)
                out << fmt(sx(t[static_cast<std::size_t>(k)])) << ","
                    << fmt(sy(b.upper[static_cast<std::size_t>(k)])) << " ";
            for (int k = ((n - 1) / stride) * stride; k >= 0; k -= stride)
                out << fmt(sx(t[static_cast<std::size_t>(k)])) << ","
                    << fmt(sy(b.lower[static_cast<std::size_t>(k)])) << " ";
            out << "\"/>\n";
        }
        for (const auto& s : panel.series) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
            for (int k = 0; k < n; k += stride)
                out << fmt(sx(t[static_cast<std::size_t>(k)])) << ","
                    << fmt(sy(s.values[static_cast<std::size_t>(k)])) << " ";
            if ((n - 1) % stride != 0)
                out << fmt(sx(t.back())) << "," << fmt(sy(s.values.back()));
            out << "\"/>\n";
        }

        int lx = kMarginLeft + plot_w - 10;
        for (auto it = panel.series.rbegin(); it != panel.series.rend(); ++it) {
            out << "<text x=\"" << lx << "\" y=\"" << top + 12 << "\" text-anchor=\"end\" fill=\""
                << it->color << "\">" << it->label << "</text>\n";
            lx -= static_cast<int>(it->label.size()) * 7 + 16;
        }
        for (const auto& b : panel.bands) {
            out << "<text x=\"" << lx << "\" y=\"" << top + 12 << "\" text-anchor=\"end\" fill=\"#777\">"
                << b.label << "</text>\n";
            lx -= static_cast<int>(b.label.size()) * 7 + 16;
        }
    }

    const int axis_y = static_cast<int>(panels.size()) * panel_height + 14;
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << axis_y << "\">t = " << fmt(t0)
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft + plot_w << "\" y=\"" << axis_y
        << "\" text-anchor=\"end\">t = " << fmt(t1) << " s</text>\n";
    out << "</svg>\n";
    if (!out) throw std::runtime_error("failed writing SVG output file: " + path);
}

}  // namespace svgplot

namespace {

std::vector<double> row_of(const Eigen::MatrixXd& M, int row) {
    std::vector<double> v(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index k = 0; k < M.cols(); ++k) v[static_cast<std::size_t>(k)] = M(row, k);
    return v;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string suffix(int channel, int m) { return m == 1 ? "" : "_" + std::to_string(channel + 1); }

}  // namespace

void write_trace_svg(const std::string& path, const SimulationTrace& trace) {
    using svgplot::Band;
    using svgplot::Panel;
    using svgplot::Series;

    const int m = trace.m;
    const int r = trace.r;
    std::vector<Panel> panels;

    Panel top{"y", {}, {}};
    for (int c = 0; c < m; ++c)
        top.series.push_back({"y_ref" + suffix(c, m), kPalette[1], row_of(trace.y_ref, c)});
    for (int c = 0; c < m; ++c)
        top.series.push_back({"y" + suffix(c, m), kPalette[0], row_of(trace.y, c)});
    panels.push_back(std::move(top));

    for (int i = 1; i <= r; ++i) {
        if (i >= 2) {
            Panel deriv{"y^(" + std::to_string(i - 1) + ")", {}, {}};
            for (int c = 0; c < m; ++c)
                deriv.series.push_back({"y_ref^(" + std::to_string(i - 1) + ")" + suffix(c, m),
                                        kPalette[1],
                                        row_of(trace.y_ref_derivs, (i - 1) * m + c)});
            for (int c = 0; c < m; ++c)
                deriv.series.push_back({"y^(" + std::to_string(i - 1) + ")" + suffix(c, m),
                                        kPalette[0], row_of(trace.y_derivs, (i - 1) * m + c)});
            panels.push_back(std::move(deriv));
        }
        Panel err{"e" + std::to_string(i), {}, {}};
        std::vector<double> psi = row_of(trace.psi, i - 1);
        std::vector<double> neg(psi.size());
        for (std::size_t k = 0; k < psi.size(); ++k) neg[k] = -psi[k];
        err.bands.push_back({"±psi" + std::to_string(i), "#c9d7e8", psi, std::move(neg)});
        for (int c = 0; c < m; ++c)
            err.series.push_back({"e" + std::to_string(i) + suffix(c, m), kPalette[0],
                                  row_of(trace.e, (i - 1) * m + c)});
        panels.push_back(std::move(err));
    }

    Panel gain{"k", {}, {}};
    gain.series.push_back(
        {"k", kPalette[2],
         std::vector<double>(trace.gain.data(), trace.gain.data() + trace.gain.size())});
    panels.push_back(std::move(gain));

    Panel effort{"w, u", {}, {}};
    for (int c = 0; c < m; ++c)
        effort.series.push_back({"u" + suffix(c, m), kPalette[1], row_of(trace.u, c)});
    for (int c = 0; c < m; ++c)
        effort.series.push_back({"w" + suffix(c, m), kPalette[0], row_of(trace.w, c)});
    panels.push_back(std::move(effort));

    svgplot::write(path, trace.t, panels);
}

}  // namespace fimcon
