#include <oddbench/dataset_io.hpp>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace oddbench {

namespace {

constexpr const char* kImagesDir = "images";
constexpr const char* kTargetDir = "masks_target";
constexpr const char* kDistractorDir = "masks_distractor";
constexpr const char* kMetaDir = "meta";
constexpr const char* kAnnotationsDir = "annotations";

fs::path image_file(const fs::path& root, std::string_view id) { return root / kImagesDir / (std::string(id) + ".png"); }
fs::path target_file(const fs::path& root, std::string_view id) { return root / kTargetDir / (std::string(id) + ".png"); }
fs::path distractor_file(const fs::path& root, std::string_view id) {
    return root / kDistractorDir / (std::string(id) + ".png");
}
fs::path meta_file(const fs::path& root, std::string_view id) { return root / kMetaDir / (std::string(id) + ".json"); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

/// Loads a 0/255 mask and rejects anything else.
cv::Mat1b read_mask(const fs::path& path) {
    cv::Mat m = read_png(path, cv::IMREAD_UNCHANGED);
    if (m.channels() != 1 || m.depth() != CV_8U)
        throw IntegrityError("mask " + path.string() + " is not an 8-bit single-channel raster");
    cv::Mat1b mask = m;
    for (int y = 0; y < mask.rows; ++y) {
        const uchar* row = mask.ptr<uchar>(y);
        for (int x = 0; x < mask.cols; ++x)
            if (row[x] != 0 && row[x] != 255)
                throw IntegrityError("mask " + path.string() + " has intermediate value " + std::to_string(row[x]));
    }
    return mask;
}

void check_masks(const std::string& id, cv::Size image_size, const cv::Mat1b& target, const cv::Mat1b& distr) {
    auto dims = [](cv::Size s) { return std::to_string(s.width) + "x" + std::to_string(s.height); };
    if (target.size() != image_size || distr.size() != image_size)
        throw IntegrityError("dimension mismatch for " + id + ": image " + dims(image_size) + ", target mask " +
                             dims(target.size()) + ", distractor mask " + dims(distr.size()));
    if (cv::countNonZero(target) == 0) throw IntegrityError("empty target mask for " + id);
    cv::Mat1b overlap;
    cv::bitwise_and(target, distr, overlap);
    if (cv::countNonZero(overlap) != 0) throw IntegrityError("target and distractor masks overlap for " + id);
}

cv::Size image_size_of(const fs::path& path) {
    cv::Mat img = read_png(path, cv::IMREAD_UNCHANGED);
    return img.size();
}

nlohmann::json point_json(cv::Point2d p) { return {{"x", p.x}, {"y", p.y}}; }
cv::Point2d point_from(const nlohmann::json& j) { return {j.at("x").get<double>(), j.at("y").get<double>()}; }

} // namespace

cv::Mat read_png(const fs::path& path, int flags) {
    if (!fs::exists(path)) throw IoError("missing file " + path.string());
    cv::Mat m;
    try {
        m = cv::imread(path.string(), flags);
    } catch (const cv::Exception& e) {
        throw IoError("cannot decode " + path.string() + ": " + e.what());
    }
    if (m.empty()) throw IoError("cannot decode " + path.string());
    return m;
}

void write_png(const fs::path& path, const cv::Mat& image) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), image, {cv::IMWRITE_PNG_COMPRESSION, 3});
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw IoError("cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

SampleMeta meta_of(const RenderedSample& s) {
    SampleMeta m;
    m.feature = s.params.feature;
    m.td_value = s.params.td_value;
    m.distractor_value = s.params.distractor_value;
    m.target_size_px = s.params.target_size_px;
    m.target_center = s.layout.target_center();
    m.target_cell = s.layout.target_index;
    m.seed = s.layout.rng_seed;
    m.element_centers = s.layout.centers;
    return m;
}

std::string write_sample(const RenderedSample& sample, const fs::path& root) {
    if (sample.id.empty()) throw ValidationError("sample without id");
    const std::string& id = sample.id;
    for (const fs::path& p : {image_file(root, id), target_file(root, id), distractor_file(root, id), meta_file(root, id)})
        if (fs::exists(p)) throw IntegrityError("sample id '" + id + "' already exists (" + p.string() + ")");

    for (const char* dir : {kImagesDir, kTargetDir, kDistractorDir, kMetaDir}) ensure_dir(root / dir);

    cv::Mat bgr;
    cv::cvtColor(sample.image, bgr, cv::COLOR_RGB2BGR);
    write_png(image_file(root, id), bgr);
    write_png(target_file(root, id), sample.target_mask);
    write_png(distractor_file(root, id), sample.distractor_mask);

    const SampleMeta m = meta_of(sample);
    nlohmann::json centers = nlohmann::json::array();
    for (const auto& c : m.element_centers) centers.push_back({c.x, c.y});
    nlohmann::json j{{"id", id},
                     {"feature", to_string(m.feature)},
                     {"td_value", m.td_value},
                     {"distractor_value", m.distractor_value},
                     {"target_size_px", m.target_size_px ? nlohmann::json(*m.target_size_px) : nlohmann::json()},
                     {"target_center", point_json(m.target_center)},
                     {"target_cell", m.target_cell},
                     {"seed", m.seed},
                     {"element_centers", centers}};
    write_text(meta_file(root, id), j.dump(2) + "\n");
    return id;
}

SampleRecord read_sample(const fs::path& root, std::string_view id_view) {
    const std::string id(id_view);
    std::vector<std::string> missing;
    if (!fs::exists(image_file(root, id))) missing.push_back("image");
    if (!fs::exists(target_file(root, id))) missing.push_back("target mask");
    if (!fs::exists(distractor_file(root, id))) missing.push_back("distractor mask");
    if (!fs::exists(meta_file(root, id))) missing.push_back("metadata");
    if (!missing.empty()) {
        std::string what;
        for (const auto& m : missing) what += (what.empty() ? "" : ", ") + m;
        throw IoError("missing " + what + " for " + id);
    }

    SampleRecord rec;
    rec.id = id;
    rec.image_path = image_file(root, id);
    rec.target_mask = read_mask(target_file(root, id));
    rec.distractor_mask = read_mask(distractor_file(root, id));
    check_masks(id, image_size_of(rec.image_path), rec.target_mask, rec.distractor_mask);

    const nlohmann::json j = read_json(meta_file(root, id));
    try {
        SampleMeta& m = rec.meta;
        m.feature = feature_from_string(j.at("feature").get<std::string>());
        m.td_value = j.at("td_value").get<double>();
        m.distractor_value = j.at("distractor_value").get<double>();
        if (j.contains("target_size_px") && !j.at("target_size_px").is_null())
            m.target_size_px = j.at("target_size_px").get<double>();
        m.target_center = point_from(j.at("target_center"));
        m.target_cell = j.at("target_cell").get<int>();
        m.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("element_centers"))
            for (const auto& c : j.at("element_centers")) m.element_centers.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid metadata for " + id + ": " + e.what());
    }
    return rec;
}

SaliencyMap load_saliency_map(const fs::path& path, int expected_w, int expected_h) {
    const cv::Mat raw = read_png(path, cv::IMREAD_UNCHANGED);
    if (raw.channels() != 1)
        throw ValidationError("saliency map " + path.string() + " has " + std::to_string(raw.channels()) +
                              " channels, expected 1");
    double scale = 0;
    if (raw.depth() == CV_8U)
        scale = 255.0;
    else if (raw.depth() == CV_16U)
        scale = 65535.0;
    else
        throw ValidationError("saliency map " + path.string() + " must be 8- or 16-bit");
    if (raw.cols != expected_w || raw.rows != expected_h)
        throw IntegrityError("saliency map " + path.string() + " is " + std::to_string(raw.cols) + "x" +
                             std::to_string(raw.rows) + ", expected " + std::to_string(expected_w) + "x" +
                             std::to_string(expected_h));
    cv::Mat1d values;
    raw.convertTo(values, CV_64F, 1.0 / scale);
    return SaliencyMap(std::move(values));
}

void write_saliency_map(const SaliencyMap& map, const fs::path& path) {
    if (map.empty()) throw ValidationError("cannot write an empty saliency map");
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    cv::Mat1w raw(map.height(), map.width());
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            raw(y, x) = static_cast<ushort>(std::lround(map.at(x, y) * 65535.0));
    write_png(path, raw);
}

std::string_view to_string(PopoutFeature f) {
    switch (f) {
    case PopoutFeature::color: return "color";
    case PopoutFeature::pattern_texture: return "pattern/texture";
    case PopoutFeature::shape: return "shape";
    case PopoutFeature::size: return "size";
    case PopoutFeature::orientation: return "orientation";
    case PopoutFeature::focus: return "focus";
    case PopoutFeature::location: return "location";
    }
    return "unknown";
}

PopoutFeature popout_feature_from_string(std::string_view name) {
    for (auto f : {PopoutFeature::color, PopoutFeature::pattern_texture, PopoutFeature::shape, PopoutFeature::size,
                   PopoutFeature::orientation, PopoutFeature::focus, PopoutFeature::location})
        if (to_string(f) == name) return f;
    throw ValidationError("unknown pop-out feature '" + std::string(name) +
                          "' (expected one of color, pattern/texture, shape, size, orientation, focus, location)");
}

bool AnnotatedScene::has_feature(PopoutFeature f) const {
    return std::find(popout_features.begin(), popout_features.end(), f) != popout_features.end();
}

AnnotatedScene load_o3_annotation(const fs::path& path, bool load_masks) {
    const nlohmann::json j = read_json(path);
    const fs::path base = path.parent_path();
    AnnotatedScene scene;
    try {
        scene.id = j.at("id").get<std::string>();
        scene.image_path = base / j.at("image").get<std::string>();
        scene.object_type = j.at("object_type").get<std::string>();
        scene.num_distractors = j.at("num_distractors").get<int>();
        for (const auto& f : j.at("popout_features")) scene.popout_features.push_back(popout_feature_from_string(f.get<std::string>()));
        if (load_masks) {
            scene.target_mask = read_mask(base / j.at("target_mask").get<std::string>());
            scene.distractor_mask = read_mask(base / j.at("distractor_mask").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid annotation " + path.string() + ": " + e.what());
    }
    if (scene.popout_features.empty()) throw ValidationError("annotation " + scene.id + " has no pop-out features");
    if (scene.num_distractors < 2)
        throw ValidationError("annotation " + scene.id + " has " + std::to_string(scene.num_distractors) +
                              " distractors, at least 2 required");
    if (load_masks) check_masks(scene.id, image_size_of(scene.image_path), scene.target_mask, scene.distractor_mask);
    return scene;
}

void write_o3_scene(const AnnotatedScene& scene, const cv::Mat3b& image_rgb, const fs::path& root) {
    for (const char* dir : {kImagesDir, kTargetDir, kDistractorDir, kAnnotationsDir}) ensure_dir(root / dir);
    const fs::path sidecar = root / kAnnotationsDir / (scene.id + ".json");
    if (fs::exists(sidecar)) throw IntegrityError("scene id '" + scene.id + "' already exists");

    cv::Mat bgr;
    cv::cvtColor(image_rgb, bgr, cv::COLOR_RGB2BGR);
    write_png(image_file(root, scene.id), bgr);
    write_png(target_file(root, scene.id), scene.target_mask);
    write_png(distractor_file(root, scene.id), scene.distractor_mask);

    nlohmann::json features = nlohmann::json::array();
    for (auto f : scene.popout_features) features.push_back(to_string(f));
    const std::string rel = "../";
    nlohmann::json j{{"id", scene.id},
                     {"image", rel + kImagesDir + "/" + scene.id + ".png"},
                     {"target_mask", rel + kTargetDir + "/" + scene.id + ".png"},
                     {"distractor_mask", rel + kDistractorDir + "/" + scene.id + ".png"},
                     {"object_type", scene.object_type},
                     {"num_distractors", scene.num_distractors},
                     {"popout_features", features}};
    write_text(sidecar, j.dump(2) + "\n");
}

std::vector<fs::path> list_o3_annotations(const fs::path& annotations_dir) {
    if (!fs::is_directory(annotations_dir)) throw IoError("annotation directory " + annotations_dir.string() + " not found");
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(annotations_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace oddbench
