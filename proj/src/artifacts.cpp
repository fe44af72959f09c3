#include "servo/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace servo {

namespace {

double parse_field(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::runtime_error("trajectory CSV line " + std::to_string(line_no) +
                                 ": bad number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = line.find(sep, start);
        if (p == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, p - start));
        start = p + 1;
    }
}

std::string metrics_text(const std::string& label, const RunResult& run) {
    std::string s;
    s += "## metrics (" + label + ")\n";
    s += "ise: " + double_to_string(run.metrics.ise) + "\n";
    s += "iae: " + double_to_string(run.metrics.iae) + "\n";
    s += "rmse: " + double_to_string(run.metrics.rmse) + "\n";
    s += "max_abs_error: " + double_to_string(run.metrics.max_abs_error) + "\n";
    s += "final_error: " + double_to_string(run.metrics.final_error) + "\n";
    s += std::string("truncated: ") + (run.truncated ? "true" : "false") + "\n";
    s += std::string("pressure_clamped: ") + (run.pressure_clamped ? "true" : "false") + "\n";
    return s;
}

}  // namespace

std::string double_to_string(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
    std::string out = kTrajectoryHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += double_to_string(r.t);
        out += ',';
        out += double_to_string(r.y_des);
        out += ',';
        out += double_to_string(r.y);
        out += ',';
        out += double_to_string(r.u);
        out += ',';
        out += double_to_string(r.e1);
        out += ',';
        out += double_to_string(r.e2);
        out += ',';
        out += double_to_string(r.theta_f_norm);
        out += ',';
        out += double_to_string(r.theta_g_norm);
        out += ',';
        out += double_to_string(r.P1);
        out += ',';
        out += double_to_string(r.P2);
        out += ',';
        out += double_to_string(r.x);
        out += ',';
        out += std::to_string(r.flags);
        out += '\n';
    }
    return out;
}

std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text) {
    std::vector<TrajectoryRow> rows;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
        pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kTrajectoryHeader)
                throw std::runtime_error("trajectory CSV line 1: unexpected header");
            saw_header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 12)
            throw std::runtime_error("trajectory CSV line " + std::to_string(line_no) +
                                     ": expected 12 fields, got " +
                                     std::to_string(fields.size()));
        TrajectoryRow r;
        r.t = parse_field(fields[0], line_no);
        r.y_des = parse_field(fields[1], line_no);
        r.y = parse_field(fields[2], line_no);
        r.u = parse_field(fields[3], line_no);
        r.e1 = parse_field(fields[4], line_no);
        r.e2 = parse_field(fields[5], line_no);
        r.theta_f_norm = parse_field(fields[6], line_no);
        r.theta_g_norm = parse_field(fields[7], line_no);
        r.P1 = parse_field(fields[8], line_no);
        r.P2 = parse_field(fields[9], line_no);
        r.x = parse_field(fields[10], line_no);
        unsigned flags = 0;
        const auto f = fields[11];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), flags);
        if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty())
            throw std::runtime_error("trajectory CSV line " + std::to_string(line_no) +
                                     ": bad flags field");
        r.flags = flags;
        rows.push_back(r);
    }
    if (!saw_header) throw std::runtime_error("trajectory CSV: empty input");
    return rows;
}

std::string convergence_csv(const PsoResult* pso) {
    std::string out = "iter,gbest,mean\n";
    if (!pso) return out;
    for (std::size_t i = 0; i < pso->history.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += double_to_string(pso->history[i]);
        out += ',';
        out += double_to_string(pso->mean_history[i]);
        out += '\n';
    }
    return out;
}

std::string report_text(const ReportSpec& spec) {
    std::string s;
    s += "# " + spec.command + " report\n\n";
    s += "seed: " + std::to_string(spec.seed) + "\n";

    if (spec.selftest_gbest) {
        const double g = *spec.selftest_gbest;
        s += "\n## selftest (sphere, 2-D)\n";
        s += "gbest: " + double_to_string(g) + "\n";
        s += std::string("converged: ") + (g <= 1e-6 ? "true" : "false") +
             " (threshold 1e-06)\n";
    }

    for (const auto& [label, run] : spec.arms) {
        s += "\n";
        s += metrics_text(label, *run);
    }

    if (spec.ise_ratio) {
        s += "\n## improvement\n";
        s += "ise_ratio: " + double_to_string(*spec.ise_ratio) + "\n";
    }

    s += "\n## optimizer\n";
    if (spec.pso) {
        s += "ran: true\n";
        s += "iterations: " + std::to_string(spec.pso->iterations) + "\n";
        s += std::string("stop: ") +
             (spec.pso->stop == PsoStop::stall ? "stall" : "max_iters") + "\n";
        s += "gbest: " + double_to_string(spec.pso->best_fitness) + "\n";
    } else {
        s += "ran: false\n";
    }

    s += "\n## artifacts\n";
    for (const auto& name : spec.artifacts) s += name + "\n";

    if (spec.config) {
        s += "\n## config (resolved)\n";
        s += to_ini(*spec.config);
    }
    return s;
}

std::string compare_svg(const std::vector<TrajectoryRow>& baseline,
                        const std::vector<TrajectoryRow>& optimized) {
    if (baseline.empty() || optimized.empty())
        throw std::invalid_argument("compare_svg: empty trajectory");

    double t_lo = baseline.front().t, t_hi = baseline.front().t;
    double y_lo = baseline.front().y_des, y_hi = y_lo;
    auto widen = [&](double t, double y) {
        t_lo = std::min(t_lo, t);
        t_hi = std::max(t_hi, t);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    };
    for (const auto& r : baseline) {
        widen(r.t, r.y_des);
        widen(r.t, r.y);
    }
    for (const auto& r : optimized) widen(r.t, r.y);
    if (t_hi <= t_lo) t_hi = t_lo + 1.0;
    const double pad = (y_hi > y_lo) ? 0.05 * (y_hi - y_lo) : 1.0;
    y_lo -= pad;
    y_hi += pad;

    // Fixed canvas; the plot box leaves room for axis labels and the legend.
    const double W = 900.0, H = 520.0;
    const double x0 = 70.0, x1 = 860.0, yb = 460.0, yt = 40.0;
    auto px = [&](double t) { return x0 + (t - t_lo) / (t_hi - t_lo) * (x1 - x0); };
    auto py = [&](double y) { return yb - (y - y_lo) / (y_hi - y_lo) * (yb - yt); };

    auto polyline = [&](const std::vector<TrajectoryRow>& rows, bool desired,
                        const char* style) {
        std::string p = "  <polyline fill=\"none\" " + std::string(style) + " points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i) p += ' ';
            p += double_to_string(px(rows[i].t));
            p += ',';
            p += double_to_string(py(desired ? rows[i].y_des : rows[i].y));
        }
        p += "\"/>\n";
        return p;
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + double_to_string(W) +
         "\" height=\"" + double_to_string(H) + "\" viewBox=\"0 0 " + double_to_string(W) +
         " " + double_to_string(H) + "\">\n";
    s += "  <rect width=\"" + double_to_string(W) + "\" height=\"" + double_to_string(H) +
         "\" fill=\"white\"/>\n";
    s += "  <rect x=\"" + double_to_string(x0) + "\" y=\"" + double_to_string(yt) +
         "\" width=\"" + double_to_string(x1 - x0) + "\" height=\"" +
         double_to_string(yb - yt) + "\" fill=\"none\" stroke=\"#444\"/>\n";

    // Tick labels at the box corners plus midpoints; enough to read off scale.
    auto text = [&](double x, double y, const char* anchor, const std::string& str) {
        return "  <text x=\"" + double_to_string(x) + "\" y=\"" + double_to_string(y) +
               "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"" + anchor +
               "\">" + str + "</text>\n";
    };
    s += text(x0, yb + 20.0, "middle", double_to_string(t_lo));
    s += text((x0 + x1) / 2.0, yb + 20.0, "middle", double_to_string((t_lo + t_hi) / 2.0));
    s += text(x1, yb + 20.0, "middle", double_to_string(t_hi));
    s += text(x0 - 8.0, yb + 4.0, "end", double_to_string(y_lo));
    s += text(x0 - 8.0, (yb + yt) / 2.0 + 4.0, "end", double_to_string((y_lo + y_hi) / 2.0));
    s += text(x0 - 8.0, yt + 4.0, "end", double_to_string(y_hi));
    s += text((x0 + x1) / 2.0, H - 12.0, "middle", "t (s)");
    s += text(x0, yt - 14.0, "start", "output velocity (m/s)");

    s += polyline(baseline, true,
                  "stroke=\"#333\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
    s += polyline(baseline, false, "stroke=\"#d62728\" stroke-width=\"1.5\"");
    s += polyline(optimized, false, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");

    const double lx = x0 + 16.0;
    s += "  <line x1=\"" + double_to_string(lx) + "\" y1=\"56\" x2=\"" +
         double_to_string(lx + 28.0) +
         "\" y2=\"56\" stroke=\"#333\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    s += text(lx + 36.0, 60.0, "start", "desired");
    s += "  <line x1=\"" + double_to_string(lx) + "\" y1=\"76\" x2=\"" +
         double_to_string(lx + 28.0) + "\" y2=\"76\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    s += text(lx + 36.0, 80.0, "start", "baseline");
    s += "  <line x1=\"" + double_to_string(lx) + "\" y1=\"96\" x2=\"" +
         double_to_string(lx + 28.0) + "\" y2=\"96\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    s += text(lx + 36.0, 100.0, "start", "optimized");

    s += "</svg>\n";
    return s;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace servo
