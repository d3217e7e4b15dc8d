#include <oddbench/stimgen.hpp>

#include <oddbench/dataset_io.hpp>

#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oddbench {

namespace {

constexpr double kMinTargetSize = 18.0;  // 0.5 deg
constexpr double kMaxTargetSize = 140.0; // 4 deg
constexpr int kSupersample = 4;

std::string fmt(double v) { return detail::format_double(v); }

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Geometry of one element relative to its center.
struct Footprint {
    enum class Shape { disk, bar } shape = Shape::disk;
    double radius = 0.0;      // disk
    double half_length = 0.0; // bar
    double half_width = 0.0;
    double cos_t = 1.0;
    double sin_t = 0.0;

    bool contains(double dx, double dy) const {
        if (shape == Shape::disk) return dx * dx + dy * dy <= radius * radius;
        // y grows downwards; angles turn counter-clockwise on screen
        double along = dx * cos_t - dy * sin_t;
        double across = dx * sin_t + dy * cos_t;
        return std::abs(along) <= half_length && std::abs(across) <= half_width;
    }

    double bounding_radius() const {
        if (shape == Shape::disk) return radius;
        return std::hypot(half_length, half_width);
    }
};

Footprint footprint_of(const ArraySpec& spec, const StimulusParams& params, bool is_target) {
    Footprint fp;
    switch (params.feature) {
    case Feature::color:
        fp.radius = spec.distractor_size / 2.0;
        break;
    case Feature::size:
        fp.radius = (is_target ? params.target_size_px.value_or(spec.distractor_size)
                               : spec.distractor_size) / 2.0;
        break;
    case Feature::orientation: {
        fp.shape = Footprint::Shape::bar;
        fp.half_length = spec.distractor_size / 2.0;
        fp.half_width = spec.bar_width / 2.0;
        double angle = params.distractor_value + (is_target ? params.td_value : 0.0);
        fp.cos_t = std::cos(deg_to_rad(angle));
        fp.sin_t = std::sin(deg_to_rad(angle));
        break;
    }
    }
    return fp;
}

cv::Vec3b element_color(const StimulusParams& params, bool is_target) {
    if (params.feature == Feature::color)
        return hue_to_rgb(params.distractor_value + (is_target ? params.td_value : 0.0));
    return {255, 255, 255};
}

void draw_element(const ArraySpec& spec, const Footprint& fp, cv::Point2d center, cv::Vec3b color,
                  cv::Mat3b& image, cv::Mat1b& mask) {
    const double r = fp.bounding_radius();
    const int x0 = std::max(0, static_cast<int>(std::floor(center.x - r)) - 1);
    const int x1 = std::min(image.cols - 1, static_cast<int>(std::ceil(center.x + r)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(center.y - r)) - 1);
    const int y1 = std::min(image.rows - 1, static_cast<int>(std::ceil(center.y + r)) + 1);
    const double bg = spec.background_gray;

    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - center.x;
            const double dy = y - center.y;
            const bool inside = fp.contains(dx, dy);
            if (inside) mask(y, x) = 255;
            if (!spec.supersample) {
                if (inside) image(y, x) = color;
                continue;
            }
            int hits = 0;
            for (int sy = 0; sy < kSupersample; ++sy)
                for (int sx = 0; sx < kSupersample; ++sx)
                    hits += fp.contains(dx + (sx + 0.5) / kSupersample - 0.5,
                                        dy + (sy + 0.5) / kSupersample - 0.5);
            if (hits == 0) continue;
            const double f = static_cast<double>(hits) / (kSupersample * kSupersample);
            cv::Vec3b px;
            for (int c = 0; c < 3; ++c)
                px[c] = static_cast<uchar>(std::lround(bg * (1.0 - f) + color[c] * f));
            image(y, x) = px;
        }
    }
}

std::vector<double> linspace_values(double first, double step, int n) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) v.push_back(first + step * (i - 1));
    return v;
}

} // namespace

std::string_view to_string(Feature f) {
    switch (f) {
    case Feature::color: return "color";
    case Feature::orientation: return "orientation";
    case Feature::size: return "size";
    }
    return "unknown";
}

Feature feature_from_string(std::string_view name) {
    if (name == "color") return Feature::color;
    if (name == "orientation") return Feature::orientation;
    if (name == "size") return Feature::size;
    throw ValidationError("unknown feature '" + std::string(name) + "'");
}

cv::Point2d ArraySpec::cell_center(int cell) const {
    const int row = cell / grid_cols;
    const int col = cell % grid_cols;
    return {(col + 0.5) * pitch_x(), (row + 0.5) * pitch_y()};
}

void ArraySpec::validate(double target_extent) const {
    if (image_width <= 0 || image_height <= 0) throw ConfigError("array spec: image dimensions must be positive");
    if (grid_rows <= 0 || grid_cols <= 0) throw ConfigError("array spec: grid must have at least one cell");
    if (distractor_size <= 0 || bar_width <= 0) throw ConfigError("array spec: element sizes must be positive");
    if (jitter < 0) throw ConfigError("array spec: jitter must be non-negative");
    if (background_gray < 0 || background_gray > 255) throw ConfigError("array spec: background_gray must be in [0,255]");

    const double pitch = std::min(pitch_x(), pitch_y());
    if (!(distractor_size + 2 * jitter < pitch)) {
        throw ConfigError("array spec violates distractor_size + 2*jitter < pitch (" + fmt(distractor_size) +
                          " + 2*" + fmt(jitter) + " >= " + fmt(pitch) + ")");
    }
    if (target_extent > 0 && !((target_extent + distractor_size) / 2 + 2 * jitter < pitch)) {
        throw ConfigError("array spec violates (target_extent + distractor_size)/2 + 2*jitter < pitch ((" +
                          fmt(target_extent) + " + " + fmt(distractor_size) + ")/2 + 2*" + fmt(jitter) +
                          " >= " + fmt(pitch) + ")");
    }
}

void StimulusParams::validate(const ArraySpec& spec) const {
    switch (feature) {
    case Feature::color:
        if (td_value == 0.0) throw DegenerateStimulusError("color target with zero hue difference");
        if (!(td_value > 0.0 && td_value <= 180.0))
            throw ValidationError("color td_value must be in (0, 180], got " + fmt(td_value));
        break;
    case Feature::orientation:
        if (td_value == 0.0) throw DegenerateStimulusError("orientation target with zero orientation difference");
        if (!(td_value > 0.0 && td_value <= 90.0))
            throw ValidationError("orientation td_value must be in (0, 90], got " + fmt(td_value));
        break;
    case Feature::size: {
        if (!target_size_px) throw ValidationError("size stimulus requires target_size_px");
        const double s = *target_size_px;
        if (s == spec.distractor_size)
            throw DegenerateStimulusError("size target equals distractor size (" + fmt(s) + " px)");
        if (!(s >= kMinTargetSize && s <= kMaxTargetSize))
            throw ValidationError("target_size_px must be in [18, 140], got " + fmt(s));
        if (!(td_value > 0.0)) throw ValidationError("size td_value must be a positive ratio");
        break;
    }
    }
}

double footprint_radius(const ArraySpec& spec, const StimulusParams& params, bool is_target) {
    return footprint_of(spec, params, is_target).bounding_radius();
}

cv::Vec3b hue_to_rgb(double hue_deg) {
    double h = std::fmod(hue_deg, 360.0);
    if (h < 0) h += 360.0;
    const double sector = h / 60.0;
    const double x = 1.0 - std::abs(std::fmod(sector, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(sector)) {
    case 0: r = 1; g = x; break;
    case 1: r = x; g = 1; break;
    case 2: g = 1; b = x; break;
    case 3: g = x; b = 1; break;
    case 4: r = x; b = 1; break;
    default: r = 1; b = x; break;
    }
    auto q = [](double v) { return static_cast<uchar>(std::lround(v * 255.0)); };
    return {q(r), q(g), q(b)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return detail::splitmix64(detail::splitmix64(detail::splitmix64(seed) ^ stream) ^ index);
}

ElementLayout plan_layout(const ArraySpec& spec, std::optional<int> target_cell, std::uint64_t seed,
                          double target_extent) {
    spec.validate(target_extent);
    const int cells = spec.cell_count();
    std::mt19937_64 rng(seed);

    ElementLayout layout;
    layout.rng_seed = seed;
    if (target_cell) {
        if (*target_cell < 0 || *target_cell >= cells)
            throw ConfigError("target cell " + std::to_string(*target_cell) + " outside [0, " +
                              std::to_string(cells - 1) + "]");
        layout.target_index = *target_cell;
    } else {
        layout.target_index = static_cast<int>(rng() % static_cast<std::uint64_t>(cells));
    }

    layout.centers.reserve(static_cast<std::size_t>(cells));
    for (int cell = 0; cell < cells; ++cell) {
        const double extent = (cell == layout.target_index && target_extent > 0) ? target_extent
                                                                                 : spec.distractor_size;
        const double r = extent / 2.0;
        const cv::Point2d c = spec.cell_center(cell);
        auto draw = [&](double center, int limit) {
            const double lo = std::max(-spec.jitter, r - center);
            const double hi = std::min(spec.jitter, (limit - 1) - r - center);
            const double u = detail::uniform01(rng);
            if (lo > hi) throw ConfigError("element of extent " + fmt(extent) + " px does not fit in its cell");
            return center + lo + (hi - lo) * u;
        };
        const double x = draw(c.x, spec.image_width);
        const double y = draw(c.y, spec.image_height);
        layout.centers.emplace_back(x, y);
    }
    return layout;
}

RenderedSample render_array(const ArraySpec& spec, const StimulusParams& params, const ElementLayout& layout) {
    params.validate(spec);
    const int cells = spec.cell_count();
    if (static_cast<int>(layout.centers.size()) != cells)
        throw ConfigError("layout has " + std::to_string(layout.centers.size()) + " elements, spec expects " +
                          std::to_string(cells));
    if (layout.target_index < 0 || layout.target_index >= cells) throw ConfigError("layout target index out of range");

    const Footprint target_fp = footprint_of(spec, params, true);
    const Footprint distr_fp = footprint_of(spec, params, false);

    // Geometry checks: inside the image and pairwise disjoint bounding circles.
    for (int i = 0; i < cells; ++i) {
        const double ri = (i == layout.target_index ? target_fp : distr_fp).bounding_radius();
        const cv::Point2d ci = layout.centers[static_cast<std::size_t>(i)];
        if (ci.x - ri < 0 || ci.y - ri < 0 || ci.x + ri > spec.image_width - 1 || ci.y + ri > spec.image_height - 1)
            throw ConfigError("element " + std::to_string(i) + " extends outside the image");
        for (int j = i + 1; j < cells; ++j) {
            const double rj = (j == layout.target_index ? target_fp : distr_fp).bounding_radius();
            const cv::Point2d d = ci - layout.centers[static_cast<std::size_t>(j)];
            if (std::hypot(d.x, d.y) <= ri + rj)
                throw ConfigError("elements " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
    }

    RenderedSample out;
    const auto gray = static_cast<uchar>(spec.background_gray);
    out.image = cv::Mat3b(spec.image_height, spec.image_width, cv::Vec3b(gray, gray, gray));
    out.target_mask = cv::Mat1b::zeros(spec.image_height, spec.image_width);
    out.distractor_mask = cv::Mat1b::zeros(spec.image_height, spec.image_width);
    out.params = params;
    out.layout = layout;

    const cv::Vec3b target_color = element_color(params, true);
    const cv::Vec3b distr_color = element_color(params, false);
    for (int i = 0; i < cells; ++i) {
        const bool is_target = i == layout.target_index;
        draw_element(spec, is_target ? target_fp : distr_fp, layout.centers[static_cast<std::size_t>(i)],
                     is_target ? target_color : distr_color, out.image,
                     is_target ? out.target_mask : out.distractor_mask);
    }
    return out;
}

SweepConfig SweepConfig::defaults() {
    SweepConfig sweep;
    sweep.features[Feature::color] = {linspace_values(4.0, 4.0, 45), 18};
    sweep.features[Feature::orientation] = {linspace_values(1.875, 1.875, 48), 18};

    // 14 targets smaller and 14 larger than the 75 px distractors.
    std::vector<double> sizes = linspace_values(18.0, 4.0, 14); // 18 .. 70
    for (int i = 0; i < 14; ++i) sizes.push_back(std::round(80.0 + i * 60.0 / 13.0)); // 80 .. 140
    sweep.features[Feature::size] = {std::move(sizes), 30};
    return sweep;
}

std::size_t SweepConfig::sample_count() const {
    std::size_t n = 0;
    for (const auto& [f, fs] : features) n += fs.values.size() * static_cast<std::size_t>(fs.instances);
    return n;
}

int DatasetManifest::total() const {
    int n = 0;
    for (const auto& [f, c] : counts) n += c;
    return n;
}

namespace {

struct Job {
    Feature feature;
    double value;
    int index; // within feature
};

std::string sample_id(Feature f, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return std::string(to_string(f)) + "_" + buf;
}

RenderedSample make_sample(const SweepConfig& sweep, const Job& job, std::uint64_t sample_seed) {
    const ArraySpec& spec = sweep.array;
    std::mt19937_64 rng(derive_seed(sample_seed, 1, 0));

    StimulusParams params;
    params.feature = job.feature;
    double target_extent = 0.0;
    switch (job.feature) {
    case Feature::color:
        params.td_value = job.value;
        params.distractor_value = detail::uniform(rng, 0.0, 360.0);
        break;
    case Feature::orientation:
        params.td_value = job.value;
        params.distractor_value = detail::uniform(rng, 0.0, 180.0);
        break;
    case Feature::size:
        params.target_size_px = job.value;
        params.distractor_value = spec.distractor_size;
        params.td_value = job.value / spec.distractor_size;
        target_extent = job.value;
        break;
    }
    params.validate(spec);

    RenderedSample sample = render_array(spec, params, plan_layout(spec, std::nullopt, sample_seed, target_extent));
    sample.id = sample_id(job.feature, job.index);
    return sample;
}

} // namespace

DatasetManifest gen_dataset(const SweepConfig& sweep, const std::filesystem::path& out_dir, std::uint64_t seed,
                            int workers) {
    double max_target = 0.0;
    for (const auto& [f, fs] : sweep.features) {
        if (fs.instances < 0) throw ConfigError("instances must be non-negative");
        if (f == Feature::size)
            for (double v : fs.values) max_target = std::max(max_target, v);
    }
    sweep.array.validate(max_target);

    std::vector<Job> jobs;
    DatasetManifest manifest;
    manifest.sweep = sweep;
    manifest.seed = seed;
    for (const auto& [f, fs] : sweep.features) {
        int index = 0;
        for (double v : fs.values)
            for (int k = 0; k < fs.instances; ++k) jobs.push_back({f, v, index++});
        manifest.counts[f] = index;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    std::vector<std::string> ids(jobs.size());
    detail::parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const Job& job = jobs[i];
        const std::uint64_t sample_seed =
            derive_seed(seed, static_cast<std::uint64_t>(job.feature), static_cast<std::uint64_t>(job.index));
        ids[i] = write_sample(make_sample(sweep, job, sample_seed), out_dir);
    });
    std::sort(ids.begin(), ids.end());
    manifest.ids = std::move(ids);

    write_text(out_dir / "manifest.json", nlohmann::json(manifest).dump(2) + "\n");
    return manifest;
}

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir) {
    return read_json(dataset_dir / "manifest.json").get<DatasetManifest>();
}

void to_json(nlohmann::json& j, const ArraySpec& s) {
    j = nlohmann::json{{"image_width", s.image_width},
                       {"image_height", s.image_height},
                       {"grid_rows", s.grid_rows},
                       {"grid_cols", s.grid_cols},
                       {"distractor_size", s.distractor_size},
                       {"jitter", s.jitter},
                       {"px_per_degree", s.px_per_degree},
                       {"background_gray", s.background_gray},
                       {"bar_width", s.bar_width},
                       {"supersample", s.supersample}};
}

void from_json(const nlohmann::json& j, ArraySpec& s) {
    ArraySpec d;
    s.image_width = j.value("image_width", d.image_width);
    s.image_height = j.value("image_height", d.image_height);
    s.grid_rows = j.value("grid_rows", d.grid_rows);
    s.grid_cols = j.value("grid_cols", d.grid_cols);
    s.distractor_size = j.value("distractor_size", d.distractor_size);
    s.jitter = j.value("jitter", d.jitter);
    s.px_per_degree = j.value("px_per_degree", d.px_per_degree);
    s.background_gray = j.value("background_gray", d.background_gray);
    s.bar_width = j.value("bar_width", d.bar_width);
    s.supersample = j.value("supersample", d.supersample);
}

void to_json(nlohmann::json& j, const SweepConfig& sweep) {
    j = nlohmann::json::object();
    j["array"] = sweep.array;
    nlohmann::json features = nlohmann::json::object();
    for (const auto& [f, fs] : sweep.features)
        features[std::string(to_string(f))] = {{"values", fs.values}, {"instances", fs.instances}};
    j["features"] = std::move(features);
}

void from_json(const nlohmann::json& j, SweepConfig& sweep) {
    SweepConfig d = SweepConfig::defaults();
    sweep.array = j.contains("array") ? j.at("array").get<ArraySpec>() : d.array;
    if (!j.contains("features")) {
        sweep.features = d.features;
        return;
    }
    sweep.features.clear();
    for (const auto& [name, fj] : j.at("features").items()) {
        const Feature f = feature_from_string(name);
        FeatureSweep fs;
        fs.values = fj.value("values", d.features.at(f).values);
        fs.instances = fj.value("instances", d.features.at(f).instances);
        sweep.features[f] = std::move(fs);
    }
}

void to_json(nlohmann::json& j, const DatasetManifest& m) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [f, c] : m.counts) counts[std::string(to_string(f))] = c;
    j = nlohmann::json{{"sweep", m.sweep}, {"seed", m.seed}, {"counts", counts}, {"total", m.total()}, {"ids", m.ids}};
}

void from_json(const nlohmann::json& j, DatasetManifest& m) {
    m.sweep = j.at("sweep").get<SweepConfig>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.counts.clear();
    for (const auto& [name, c] : j.at("counts").items()) m.counts[feature_from_string(name)] = c.get<int>();
    m.ids = j.at("ids").get<std::vector<std::string>>();
}

} // namespace oddbench
