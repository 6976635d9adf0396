#include "chanest/sweep_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chanest {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Series {
    std::string name;
    std::string color;
    bool has_error_bars;
};

const std::vector<Series> kSeries = {
    {"lb", "#1f77b4", true},          {"mmse_t1", "#d62728", true},
    {"mmse_oracle", "#ff7f0e", true}, {"lmmse", "#2ca02c", false},
    {"asymptote", "#7f7f7f", false},
};

double series_value(const SweepRow& row, const std::string& name) {
    if (name == "lb") return row.lb.count ? row.lb.mean : std::numeric_limits<double>::quiet_NaN();
    if (name == "mmse_t1")
        return row.mmse_t1.count ? row.mmse_t1.mean : std::numeric_limits<double>::quiet_NaN();
    if (name == "mmse_oracle")
        return row.mmse_oracle.count ? row.mmse_oracle.mean
                                     : std::numeric_limits<double>::quiet_NaN();
    if (name == "lmmse") return row.lmmse;
    return row.asymptote_line;
}

double series_ci(const SweepRow& row, const std::string& name) {
    if (name == "lb") return row.lb.ci95();
    if (name == "mmse_t1") return row.mmse_t1.ci95();
    if (name == "mmse_oracle") return row.mmse_oracle.ci95();
    return 0.0;
}

}  // namespace

std::string sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "# {\"tool\":\"mmse-poincare\",\"version\":\"" << kVersion << "\","
        << "\"preset\":\"" << cfg.name << "\",\"model\":\"" << cfg.model << "\","
        << "\"seed\":" << cfg.seed << ",\"trials\":" << cfg.trials
        << ",\"lb_trials\":" << cfg.effective_lb_trials()
        << ",\"inner_trials\":" << cfg.inner_trials << ",\"grid_points\":" << rows.size()
        << ",\"quantities\":\"";
    for (std::size_t i = 0; i < cfg.quantities.size(); ++i)
        out << (i ? "," : "") << cfg.quantities[i];
    out << "\"}\n";
    out << "sigma_s2,lb,lb_se,mmse_t1,mmse_t1_se,mmse_oracle,mmse_oracle_se,lmmse,asymptote\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : rows) {
        out << fmt(row.sigma_s2) << ',';
        out << fmt(row.lb.count ? row.lb.mean : nan) << ','
            << fmt(row.lb.count ? row.lb.std_error() : nan) << ',';
        out << fmt(row.mmse_t1.count ? row.mmse_t1.mean : nan) << ','
            << fmt(row.mmse_t1.count ? row.mmse_t1.std_error() : nan) << ',';
        out << fmt(row.mmse_oracle.count ? row.mmse_oracle.mean : nan) << ','
            << fmt(row.mmse_oracle.count ? row.mmse_oracle.std_error() : nan) << ',';
        out << fmt(row.lmmse) << ',' << fmt(row.asymptote_line) << '\n';
    }
    return out.str();
}

std::string sweep_svg(const std::vector<SweepRow>& rows,
                      const std::vector<std::string>& quantities) {
    if (rows.size() < 2) throw std::invalid_argument("sweep_svg: need at least 2 rows");

    const double width = 760, height = 560;
    const double ml = 70, mr = 170, mt = 30, mb = 60;

    double xlo = std::numeric_limits<double>::infinity(), xhi = 0.0;
    double ylo = std::numeric_limits<double>::infinity(), yhi = 0.0;
    for (const SweepRow& row : rows) {
        xlo = std::min(xlo, row.sigma_s2);
        xhi = std::max(xhi, row.sigma_s2);
        for (const Series& s : kSeries) {
            if (std::find(quantities.begin(), quantities.end(), s.name) == quantities.end())
                continue;
            const double v = series_value(row, s.name);
            if (std::isfinite(v) && v > 0.0) {
                ylo = std::min(ylo, v);
                yhi = std::max(yhi, v);
            }
        }
    }
    if (!(ylo < yhi)) {
        ylo = 1e-6;
        yhi = 1.0;
    }
    const double lx0 = std::log10(xlo), lx1 = std::log10(xhi);
    const double ly0 = std::log10(ylo) - 0.2, ly1 = std::log10(yhi) + 0.2;

    auto px = [&](double x) {
        return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (width - ml - mr);
    };
    auto py = [&](double y) {
        return height - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (height - mt - mb);
    };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Decade grid and tick labels.
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
        const double x = px(std::pow(10.0, e));
        out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(mt) << "\" x2=\"" << coord(x)
            << "\" y2=\"" << coord(height - mb) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << coord(x) << "\" y=\"" << coord(height - mb + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
        const double y = py(std::pow(10.0, e));
        out << "<line x1=\"" << coord(ml) << "\" y1=\"" << coord(y) << "\" x2=\""
            << coord(width - mr) << "\" y2=\"" << coord(y) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << coord(ml - 6) << "\" y=\"" << coord(y + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    out << "<rect x=\"" << coord(ml) << "\" y=\"" << coord(mt) << "\" width=\""
        << coord(width - ml - mr) << "\" height=\"" << coord(height - mt - mb)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << coord((ml + width - mr) / 2) << "\" y=\"" << coord(height - 16)
        << "\" font-size=\"13\" text-anchor=\"middle\">sigma_s2</text>\n";
    out << "<text x=\"18\" y=\"" << coord((mt + height - mb) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << coord((mt + height - mb) / 2) << ")\">MSE</text>\n";

    double legend_y = mt + 16;
    for (const Series& s : kSeries) {
        if (std::find(quantities.begin(), quantities.end(), s.name) == quantities.end())
            continue;
        std::ostringstream pts;
        bool any = false;
        for (const SweepRow& row : rows) {
            const double v = series_value(row, s.name);
            if (!std::isfinite(v) || v <= 0.0) continue;
            pts << (any ? " " : "") << coord(px(row.sigma_s2)) << ',' << coord(py(v));
            any = true;
        }
        if (!any) continue;
        out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.6\"";
        if (s.name == "asymptote") out << " stroke-dasharray=\"6 4\"";
        out << "/>\n";
        if (s.has_error_bars) {
            for (const SweepRow& row : rows) {
                const double v = series_value(row, s.name);
                const double ci = series_ci(row, s.name);
                if (!std::isfinite(v) || v <= 0.0 || ci <= 0.0) continue;
                const double lo = std::max(v - ci, v * 1e-6), hi = v + ci;
                const double x = px(row.sigma_s2);
                out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(py(lo)) << "\" x2=\""
                    << coord(x) << "\" y2=\"" << coord(py(hi)) << "\" stroke=\"" << s.color
                    << "\" stroke-width=\"1\"/>\n";
            }
        }
        out << "<line x1=\"" << coord(width - mr + 12) << "\" y1=\"" << coord(legend_y)
            << "\" x2=\"" << coord(width - mr + 40) << "\" y2=\"" << coord(legend_y)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << coord(width - mr + 46) << "\" y=\"" << coord(legend_y + 4)
            << "\" font-size=\"12\">" << s.name << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace chanest
