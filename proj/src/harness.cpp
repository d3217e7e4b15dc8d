#include <oddbench/harness.hpp>

#include "util.hpp"

#include <opencv2/imgproc.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace oddbench {

namespace {

constexpr const char* kSceneFeature = "scene";
constexpr const char* kColumns =
    "id,feature,td_value,gsi,msr_targ,msr_bg,found,num_fixations,s_target_mean,s_distr_mean,max_target,max_distr,max_bg";

bool is_scene_dataset(const fs::path& dataset_dir) {
    return !fs::exists(dataset_dir / "manifest.json") && fs::is_directory(dataset_dir / "annotations");
}

fs::path annotation_path(const fs::path& dataset_dir, const std::string& id) {
    return dataset_dir / "annotations" / (id + ".json");
}

fs::path image_path_for(const fs::path& dataset_dir, const std::string& id) {
    if (is_scene_dataset(dataset_dir)) return load_o3_annotation(annotation_path(dataset_dir, id), false).image_path;
    return dataset_dir / "images" / (id + ".png");
}

cv::Mat3b read_rgb(const fs::path& path) {
    cv::Mat bgr = read_png(path, cv::IMREAD_COLOR);
    cv::Mat3b rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    return rgb;
}

nlohmann::json fixsim_json(const FixSimConfig& cfg) {
    return {{"suppression_radius", cfg.suppression_radius},
            {"hit_radius_base", cfg.hit_radius_base},
            {"hit_radius_max", cfg.hit_radius_max},
            {"max_fixations", cfg.max_fixations}};
}

std::vector<const EvalRow*> rows_by_id(const EvalReport& report) {
    std::vector<const EvalRow*> rows;
    rows.reserve(report.rows.size());
    for (const auto& r : report.rows) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const EvalRow* a, const EvalRow* b) { return a->id() < b->id(); });
    return rows;
}

// --- CSV parsing -------------------------------------------------------------

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError("report line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line_no) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, line_no);
}

} // namespace

cv::Point2d mask_centroid(const cv::Mat1b& mask) {
    const cv::Moments m = cv::moments(mask, true);
    if (m.m00 == 0) throw PreconditionError("centroid of an empty mask");
    return {m.m10 / m.m00, m.m01 / m.m00};
}

std::vector<std::string> dataset_ids(const fs::path& dataset_dir) {
    if (fs::exists(dataset_dir / "manifest.json")) return read_manifest(dataset_dir).ids;
    if (fs::is_directory(dataset_dir / "annotations")) {
        std::vector<std::string> ids;
        for (const auto& p : list_o3_annotations(dataset_dir / "annotations")) ids.push_back(p.stem().string());
        return ids;
    }
    throw IoError("no manifest.json or annotations/ in " + dataset_dir.string());
}

EvalItem load_eval_item(const fs::path& dataset_dir, const std::string& id, const FixSimConfig& cfg) {
    EvalItem item;
    item.id = id;
    if (is_scene_dataset(dataset_dir)) {
        AnnotatedScene scene = load_o3_annotation(annotation_path(dataset_dir, id));
        if (scene.id != id) throw IntegrityError("annotation file for " + id + " declares id " + scene.id);
        item.feature = kSceneFeature;
        item.image_path = scene.image_path;
        item.target_center = mask_centroid(scene.target_mask);
        item.target_mask = std::move(scene.target_mask);
        item.distractor_mask = std::move(scene.distractor_mask);
        item.hit_radius = cfg.hit_radius_base;
        return item;
    }
    SampleRecord rec = read_sample(dataset_dir, id);
    item.feature = std::string(to_string(rec.meta.feature));
    item.td_value = rec.meta.td_value;
    item.image_path = rec.image_path;
    item.target_center = rec.meta.target_center;
    item.hit_radius = hit_radius_for(rec, cfg);
    item.target_mask = std::move(rec.target_mask);
    item.distractor_mask = std::move(rec.distractor_mask);
    return item;
}

int run_model_on_dataset(const fs::path& dataset_dir, const fs::path& out_dir, const ModelConfig& cfg, int workers) {
    cfg.validate();
    const auto ids = dataset_ids(dataset_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    detail::parallel_for(ids.size(), workers, [&](std::size_t i) {
        const cv::Mat3b image = read_rgb(image_path_for(dataset_dir, ids[i]));
        write_saliency_map(run_model(image, cfg), out_dir / (ids[i] + ".png"));
    });
    return static_cast<int>(ids.size());
}

EvalReport run_eval(const fs::path& dataset_dir, const fs::path& maps_dir, const FixSimConfig& cfg, int workers) {
    cfg.validate();
    auto ids = dataset_ids(dataset_dir);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw IntegrityError("duplicate ids in dataset");

    std::vector<std::string> missing;
    for (const auto& id : ids)
        if (!fs::exists(maps_dir / (id + ".png"))) missing.push_back(id);
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
        throw IoError(std::to_string(missing.size()) + " saliency map(s) missing in " + maps_dir.string() + ": " + list);
    }

    EvalReport report;
    report.rows.resize(ids.size());
    report.max_fixations = cfg.max_fixations;
    report.dataset_manifest_ref = dataset_dir / "manifest.json";
    report.config_snapshot = {{"fixsim", fixsim_json(cfg)}};

    detail::parallel_for(ids.size(), workers, [&](std::size_t i) {
        const EvalItem item = load_eval_item(dataset_dir, ids[i], cfg);
        const SaliencyMap map =
            load_saliency_map(maps_dir / (item.id + ".png"), item.target_mask.cols, item.target_mask.rows);
        EvalRow row;
        row.metrics = compute_metrics(item.id, map.values(), item.target_mask, item.distractor_mask);
        row.feature = item.feature;
        row.td_value = item.td_value;
        const FixationTrace trace = simulate_fixations(map, item.target_center, cfg, item.hit_radius);
        row.found = trace.found;
        row.num_fixations = trace.count;
        report.rows[i] = std::move(row);
    });
    return report;
}

std::string report_to_csv(const EvalReport& report) {
    nlohmann::json config = report.config_snapshot.is_null() ? nlohmann::json::object() : report.config_snapshot;
    config["max_fixations"] = report.max_fixations;
    std::ostringstream out;
    out << "# oddbench-report schema=" << kReportSchemaVersion << " config=" << config.dump() << "\n";
    out << kColumns << "\n";
    using detail::format_double;
    using detail::format_optional;
    for (const EvalRow* r : rows_by_id(report)) {
        const MetricRecord& m = r->metrics;
        out << m.id << ',' << r->feature << ',' << format_optional(r->td_value) << ',' << format_optional(m.gsi) << ','
            << format_optional(m.msr_targ) << ',' << format_optional(m.msr_bg) << ',' << (r->found ? 1 : 0) << ','
            << r->num_fixations << ',' << format_double(m.s_target_mean) << ',' << format_double(m.s_distr_mean) << ','
            << format_double(m.max_target) << ',' << format_double(m.max_distr) << ',' << format_double(m.max_bg)
            << "\n";
    }
    return out.str();
}

void write_report_csv(const EvalReport& report, const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    write_text(path, report_to_csv(report));
}

EvalReport read_report_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report " + path.string());
    EvalReport report;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ValidationError("empty report " + path.string());
    ++line_no;
    const std::string prefix = "# oddbench-report schema=";
    if (line.rfind(prefix, 0) != 0) throw ValidationError("report " + path.string() + " lacks the schema comment line");
    {
        const auto cfg_pos = line.find(" config=");
        const int schema = std::stoi(line.substr(prefix.size(), cfg_pos - prefix.size()));
        if (schema != kReportSchemaVersion)
            throw ValidationError("report schema " + std::to_string(schema) + " is not supported");
        if (cfg_pos != std::string::npos) {
            try {
                report.config_snapshot = nlohmann::json::parse(line.substr(cfg_pos + 8));
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(std::string("bad report config: ") + e.what());
            }
            report.max_fixations = report.config_snapshot.value("max_fixations", 100);
        }
    }
    if (!std::getline(in, line) || line != kColumns) throw ValidationError("report columns do not match schema");
    ++line_no;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 13)
            throw ValidationError("report line " + std::to_string(line_no) + ": expected 13 fields, got " +
                                  std::to_string(f.size()));
        EvalRow r;
        r.metrics.id = f[0];
        r.feature = f[1];
        r.td_value = parse_optional(f[2], line_no);
        r.metrics.gsi = parse_optional(f[3], line_no);
        r.metrics.msr_targ = parse_optional(f[4], line_no);
        r.metrics.msr_bg = parse_optional(f[5], line_no);
        r.found = f[6] == "1";
        r.num_fixations = static_cast<int>(parse_double(f[7], line_no));
        r.metrics.s_target_mean = parse_double(f[8], line_no);
        r.metrics.s_distr_mean = parse_double(f[9], line_no);
        r.metrics.max_target = parse_double(f[10], line_no);
        r.metrics.max_distr = parse_double(f[11], line_no);
        r.metrics.max_bg = parse_double(f[12], line_no);
        report.rows.push_back(std::move(r));
    }
    std::sort(report.rows.begin(), report.rows.end(), [](const EvalRow& a, const EvalRow& b) { return a.id() < b.id(); });
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (report.rows[i].id() == report.rows[i - 1].id())
            throw IntegrityError("duplicate id " + report.rows[i].id() + " in report");
    return report;
}

std::string_view to_string(TdAxis axis) {
    switch (axis) {
    case TdAxis::hue_diff_deg: return "hue_diff_deg";
    case TdAxis::orientation_diff_deg: return "orientation_diff_deg";
    case TdAxis::size_ratio: return "size_ratio";
    }
    return "unknown";
}

TdAxis axis_for(Feature f) {
    switch (f) {
    case Feature::color: return TdAxis::hue_diff_deg;
    case Feature::orientation: return TdAxis::orientation_diff_deg;
    case Feature::size: return TdAxis::size_ratio;
    }
    return TdAxis::hue_diff_deg;
}

double BinWidths::for_axis(TdAxis axis) const {
    switch (axis) {
    case TdAxis::hue_diff_deg: return hue_deg;
    case TdAxis::orientation_diff_deg: return orientation_deg;
    case TdAxis::size_ratio: return size_ratio;
    }
    return 1.0;
}

std::vector<BinnedCurve> aggregate_by_td(const EvalReport& report, const BinWidths& widths) {
    const auto rows = rows_by_id(report);
    std::vector<BinnedCurve> curves;
    for (Feature f : {Feature::color, Feature::orientation, Feature::size}) {
        std::vector<const EvalRow*> mine;
        for (const EvalRow* r : rows)
            if (r->feature == to_string(f) && r->td_value) mine.push_back(r);
        if (mine.empty()) continue;

        BinnedCurve curve;
        curve.axis = axis_for(f);
        const double w = widths.for_axis(curve.axis);
        if (!(w > 0)) throw ConfigError("bin width must be positive");
        double hi = 0;
        if (f == Feature::color) {
            hi = 180.0;
        } else if (f == Feature::orientation) {
            hi = 90.0;
        } else {
            for (const EvalRow* r : mine) hi = std::max(hi, *r->td_value);
            hi = std::max(w, std::ceil(hi / w) * w);
        }
        const int bins = std::max(1, static_cast<int>(std::ceil(hi / w - 1e-9)));
        for (int i = 0; i <= bins; ++i) curve.bin_edges.push_back(i * w);

        std::vector<double> gsi_sum(bins, 0.0), fix_sum(bins, 0.0);
        std::vector<int> fix_n(bins, 0);
        curve.n_per_bin.assign(bins, 0);
        curve.n_undefined.assign(bins, 0);
        curve.n_censored.assign(bins, 0);
        for (const EvalRow* r : mine) {
            const int b = std::clamp(static_cast<int>(std::floor(*r->td_value / w)), 0, bins - 1);
            if (r->metrics.gsi) {
                gsi_sum[b] += *r->metrics.gsi;
                ++curve.n_per_bin[b];
            } else {
                ++curve.n_undefined[b];
            }
            fix_sum[b] += r->found ? r->num_fixations : report.max_fixations;
            if (!r->found) ++curve.n_censored[b];
            ++fix_n[b];
        }
        for (int b = 0; b < bins; ++b) {
            curve.mean_gsi.push_back(curve.n_per_bin[b] ? std::optional(gsi_sum[b] / curve.n_per_bin[b]) : std::nullopt);
            curve.mean_fixations.push_back(fix_n[b] ? std::optional(fix_sum[b] / fix_n[b]) : std::nullopt);
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

namespace {

struct GroupAccumulator {
    MsrGroupSummary s;
    double targ_sum = 0.0;
    int targ_n = 0;
    double bg_sum = 0.0;
    int bg_n = 0;

    void add(const EvalRow& row) {
        ++s.n;
        if (const auto& t = row.metrics.msr_targ) {
            if (std::isinf(*t)) {
                ++s.infinite_targ;
            } else {
                targ_sum += *t;
                ++targ_n;
            }
            if (*t < 1.0)
                ++s.bands.not_discriminated;
            else if (*t <= 2.0)
                ++s.bands.somewhat;
            else
                ++s.bands.strongly;
        } else {
            ++s.undefined_targ;
        }
        if (const auto& b = row.metrics.msr_bg) {
            if (std::isinf(*b)) {
                ++s.infinite_bg;
            } else {
                bg_sum += *b;
                ++bg_n;
            }
        } else {
            ++s.undefined_bg;
        }
    }

    MsrGroupSummary finish() const {
        MsrGroupSummary out = s;
        if (targ_n) out.mean_msr_targ = targ_sum / targ_n;
        if (bg_n) out.mean_msr_bg = bg_sum / bg_n;
        return out;
    }
};

} // namespace

O3Table aggregate_o3(const EvalReport& report, std::span<const AnnotatedScene> scenes) {
    std::map<std::string, const EvalRow*> by_id;
    for (const auto& r : report.rows) by_id[r.id()] = &r;

    std::vector<const AnnotatedScene*> sorted;
    for (const auto& s : scenes) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

    GroupAccumulator color, non_color, all;
    for (const AnnotatedScene* scene : sorted) {
        auto it = by_id.find(scene->id);
        if (it == by_id.end()) throw ValidationError("scene " + scene->id + " has no report row");
        (scene->is_color_target() ? color : non_color).add(*it->second);
        all.add(*it->second);
    }
    return {color.finish(), non_color.finish(), all.finish()};
}

std::vector<FixationTrace> traces_of(const EvalReport& report, const std::string& feature) {
    std::vector<FixationTrace> traces;
    for (const EvalRow* r : rows_by_id(report)) {
        if (!feature.empty() && r->feature != feature) continue;
        FixationTrace t;
        t.found = r->found;
        t.count = r->num_fixations;
        traces.push_back(t);
    }
    return traces;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::vector<std::optional<double>> optionals_from(const nlohmann::json& j) {
    std::vector<std::optional<double>> out;
    for (const auto& v : j) out.push_back(v.is_null() ? std::nullopt : std::optional(v.get<double>()));
    return out;
}

} // namespace

void to_json(nlohmann::json& j, const BinnedCurve& c) {
    nlohmann::json gsi = nlohmann::json::array(), fix = nlohmann::json::array();
    for (const auto& v : c.mean_gsi) gsi.push_back(optional_json(v));
    for (const auto& v : c.mean_fixations) fix.push_back(optional_json(v));
    j = nlohmann::json{{"axis", to_string(c.axis)}, {"bin_edges", c.bin_edges}, {"mean_gsi", gsi},
                       {"mean_fixations", fix},     {"n_per_bin", c.n_per_bin}, {"n_undefined", c.n_undefined},
                       {"n_censored", c.n_censored}};
}

void from_json(const nlohmann::json& j, BinnedCurve& c) {
    const auto axis = j.at("axis").get<std::string>();
    if (axis == "hue_diff_deg")
        c.axis = TdAxis::hue_diff_deg;
    else if (axis == "orientation_diff_deg")
        c.axis = TdAxis::orientation_diff_deg;
    else if (axis == "size_ratio")
        c.axis = TdAxis::size_ratio;
    else
        throw ValidationError("unknown curve axis '" + axis + "'");
    c.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    c.mean_gsi = optionals_from(j.at("mean_gsi"));
    c.mean_fixations = optionals_from(j.at("mean_fixations"));
    c.n_per_bin = j.at("n_per_bin").get<std::vector<int>>();
    c.n_undefined = j.value("n_undefined", std::vector<int>(c.n_per_bin.size(), 0));
    c.n_censored = j.value("n_censored", std::vector<int>(c.n_per_bin.size(), 0));
}

void to_json(nlohmann::json& j, const MsrGroupSummary& s) {
    j = nlohmann::json{{"n", s.n},
                       {"mean_msr_targ", optional_json(s.mean_msr_targ)},
                       {"mean_msr_bg", optional_json(s.mean_msr_bg)},
                       {"infinite_targ", s.infinite_targ},
                       {"undefined_targ", s.undefined_targ},
                       {"infinite_bg", s.infinite_bg},
                       {"undefined_bg", s.undefined_bg},
                       {"bands",
                        {{"not_discriminated", s.bands.not_discriminated},
                         {"somewhat", s.bands.somewhat},
                         {"strongly", s.bands.strongly}}}};
}

void to_json(nlohmann::json& j, const O3Table& t) {
    j = nlohmann::json{{"color", t.color}, {"non_color", t.non_color}, {"all", t.all}};
}

} // namespace oddbench
