#include <oddbench/plots.hpp>

#include <oddbench/dataset_io.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace oddbench {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

std::string num(double v, const char* format = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

struct Series {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
    double y_min = 0, y_max = 1;
    std::string file_stem;
};

Series series_of(const BinnedCurve& c) {
    Series s;
    s.x_label = std::string(to_string(c.axis));
    s.y_label = "mean_gsi";
    s.title = "Mean GSI vs " + s.x_label;
    s.y_min = -1;
    s.y_max = 1;
    s.file_stem = "gsi_" + s.x_label;
    for (std::size_t i = 0; i < c.mean_gsi.size() && i + 1 < c.bin_edges.size(); ++i)
        if (c.mean_gsi[i]) s.points.emplace_back((c.bin_edges[i] + c.bin_edges[i + 1]) / 2.0, *c.mean_gsi[i]);
    return s;
}

Series series_of(const DetectionSeries& d) {
    Series s;
    s.x_label = "fixation_budget";
    s.y_label = "fraction_found";
    s.title = "Targets found vs fixation budget (" + d.label + ")";
    s.file_stem = "detection_" + d.label;
    for (std::size_t i = 0; i < d.curve.budgets.size() && i < d.curve.fraction_found.size(); ++i)
        s.points.emplace_back(d.curve.budgets[i], d.curve.fraction_found[i]);
    return s;
}

Series series_of(const PlotCurve& c) {
    return std::visit([](const auto& v) { return series_of(v); }, c);
}

std::string svg_of(const Series& s) {
    double x_min = 0, x_max = 1;
    if (!s.points.empty()) {
        x_min = std::min(0.0, s.points.front().first);
        x_max = x_min;
        for (const auto& [x, y] : s.points) x_max = std::max(x_max, x);
        if (x_max <= x_min) x_max = x_min + 1;
    }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return kTop + (s.y_max - y) / (s.y_max - s.y_min) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << s.title << "</text>\n";

    // axes and ticks
    o << "<g stroke=\"black\" fill=\"none\">\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph << "\"/>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph << "\"/>\n";
    o << "</g>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_min + (x_max - x_min) * i / 5.0;
        const double yv = s.y_min + (s.y_max - s.y_min) * i / 5.0;
        o << "<text x=\"" << num(px(xv)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
          << num(xv, "%.3g") << "</text>\n";
        o << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv, "%.3g")
          << "</text>\n";
        o << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << kLeft + pw << "\" y2=\""
          << num(py(yv)) << "\" stroke=\"#dddddd\"/>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << s.x_label
      << "</text>\n";
    o << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + ph / 2 << ")\">" << s.y_label << "</text>\n";

    if (!s.points.empty()) {
        o << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i)
            o << (i ? " " : "") << num(px(s.points[i].first)) << ',' << num(py(s.points[i].second));
        o << "\"/>\n";
        for (const auto& [x, y] : s.points)
            o << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace

std::string render_svg(const PlotCurve& curve) { return svg_of(series_of(curve)); }

std::vector<std::filesystem::path> emit_plots(const std::vector<PlotCurve>& curves, const std::filesystem::path& out_dir) {
    if (curves.empty()) throw ValidationError("no curves to plot");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> paths;
    std::set<std::string> used;
    for (const auto& c : curves) {
        const Series s = series_of(c);
        std::string stem = s.file_stem;
        for (int k = 2; used.count(stem); ++k) stem = s.file_stem + "_" + std::to_string(k);
        used.insert(stem);
        const auto path = out_dir / (stem + ".svg");
        write_text(path, svg_of(s));
        paths.push_back(path);
    }
    return paths;
}

void to_json(nlohmann::json& j, const DetectionSeries& s) {
    j = nlohmann::json{{"label", s.label}, {"budgets", s.curve.budgets}, {"fraction_found", s.curve.fraction_found}};
}

void from_json(const nlohmann::json& j, DetectionSeries& s) {
    s.label = j.at("label").get<std::string>();
    s.curve.budgets = j.at("budgets").get<std::vector<int>>();
    s.curve.fraction_found = j.at("fraction_found").get<std::vector<double>>();
}

namespace {

std::string csv_optional(const std::optional<double>& v) {
    if (!v) return {};
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
}

std::string csv_double(double v) { return csv_optional(v); }

} // namespace

AggregateSummary aggregate_report(const EvalReport& report, std::span<const AnnotatedScene> scenes,
                                  const BinWidths& widths, std::span<const int> budgets) {
    AggregateSummary out;
    out.max_fixations = report.max_fixations;
    out.binned = aggregate_by_td(report, widths);
    if (!report.rows.empty()) {
        out.detection.push_back({"all", detection_curve(traces_of(report), budgets)});
        std::set<std::string> features;
        for (const auto& r : report.rows) features.insert(r.feature);
        for (const std::string name : {"color", "orientation", "size", "scene"}) {
            if (!features.count(name)) continue;
            out.detection.push_back({name, detection_curve(traces_of(report, name), budgets)});
        }
    }
    if (!scenes.empty()) out.o3 = aggregate_o3(report, scenes);
    return out;
}

void write_aggregates(const AggregateSummary& summary, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    nlohmann::json j{{"max_fixations", summary.max_fixations},
                     {"binned", summary.binned},
                     {"detection", summary.detection}};
    if (summary.o3) j["o3"] = *summary.o3;
    write_text(out_dir / "curves.json", j.dump(2) + "\n");

    for (const auto& c : summary.binned) {
        std::ostringstream o;
        o << "bin_lo,bin_hi,n,n_undefined,n_censored,mean_gsi,mean_fixations\n";
        for (std::size_t i = 0; i < c.n_per_bin.size(); ++i)
            o << csv_double(c.bin_edges[i]) << ',' << csv_double(c.bin_edges[i + 1]) << ',' << c.n_per_bin[i] << ','
              << c.n_undefined[i] << ',' << c.n_censored[i] << ',' << csv_optional(c.mean_gsi[i]) << ','
              << csv_optional(c.mean_fixations[i]) << "\n";
        write_text(out_dir / ("binned_" + std::string(to_string(c.axis)) + ".csv"), o.str());
    }

    if (!summary.detection.empty()) {
        std::ostringstream o;
        o << "group,budget,fraction_found\n";
        for (const auto& d : summary.detection)
            for (std::size_t i = 0; i < d.curve.budgets.size(); ++i)
                o << d.label << ',' << d.curve.budgets[i] << ',' << csv_double(d.curve.fraction_found[i]) << "\n";
        write_text(out_dir / "detection.csv", o.str());
    }

    if (summary.o3) {
        std::ostringstream o;
        o << "group,n,mean_msr_targ,mean_msr_bg,infinite_targ,undefined_targ,infinite_bg,undefined_bg,"
             "not_discriminated,somewhat_discriminated,strongly_discriminated\n";
        auto row = [&](const char* name, const MsrGroupSummary& g) {
            o << name << ',' << g.n << ',' << csv_optional(g.mean_msr_targ) << ',' << csv_optional(g.mean_msr_bg) << ','
              << g.infinite_targ << ',' << g.undefined_targ << ',' << g.infinite_bg << ',' << g.undefined_bg << ','
              << g.bands.not_discriminated << ',' << g.bands.somewhat << ',' << g.bands.strongly << "\n";
        };
        row("color", summary.o3->color);
        row("non_color", summary.o3->non_color);
        row("all", summary.o3->all);
        write_text(out_dir / "o3_table.csv", o.str());
    }
}

std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& in_dir,
                                                  const std::filesystem::path& out_dir) {
    const nlohmann::json j = read_json(in_dir / "curves.json");
    std::vector<PlotCurve> curves;
    try {
        for (const auto& c : j.value("binned", nlohmann::json::array())) curves.emplace_back(c.get<BinnedCurve>());
        for (const auto& d : j.value("detection", nlohmann::json::array())) curves.emplace_back(d.get<DetectionSeries>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed curves.json: " + std::string(e.what()));
    }
    return emit_plots(curves, out_dir);
}

} // namespace oddbench
