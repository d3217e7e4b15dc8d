#pragma once

// On-disk layout shared by generated arrays and annotated natural scenes:
//
//   images/<id>.png            8-bit RGB
//   masks_target/<id>.png      8-bit gray, 255 inside / 0 outside
//   masks_distractor/<id>.png  8-bit gray, 255 inside / 0 outside
//   meta/<id>.json             generation metadata (arrays)
//   annotations/<id>.json      labels and relative raster paths (natural scenes)
//   manifest.json              sweep, seed, counts and ids (arrays)

#include <oddbench/saliency_map.hpp>
#include <oddbench/stimgen.hpp>

#include <opencv2/core.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oddbench {

namespace fs = std::filesystem;

struct SampleMeta {
    Feature feature = Feature::color;
    double td_value = 0.0;
    double distractor_value = 0.0;
    std::optional<double> target_size_px;
    cv::Point2d target_center;
    int target_cell = 0;
    std::uint64_t seed = 0;
    std::vector<cv::Point2d> element_centers;

    bool operator==(const SampleMeta&) const = default;
};

struct SampleRecord {
    std::string id;
    fs::path image_path;
    cv::Mat1b target_mask;
    cv::Mat1b distractor_mask;
    SampleMeta meta;
};

SampleMeta meta_of(const RenderedSample& sample);

/// Writes the four files of a sample. Refuses to overwrite an existing id.
std::string write_sample(const RenderedSample& sample, const fs::path& root);

SampleRecord read_sample(const fs::path& root, std::string_view id);

/// Values are raw / 255 or raw / 65535 depending on bit depth; no min-subtraction.
SaliencyMap load_saliency_map(const fs::path& path, int expected_w, int expected_h);

/// Writes a 16-bit single-channel PNG (round(v * 65535)).
void write_saliency_map(const SaliencyMap& map, const fs::path& path);

/// Closed vocabulary of pop-out labels for natural scenes.
enum class PopoutFeature { color, pattern_texture, shape, size, orientation, focus, location };

std::string_view to_string(PopoutFeature f);
/// Throws ValidationError naming the label when it is outside the vocabulary.
PopoutFeature popout_feature_from_string(std::string_view name);

struct AnnotatedScene {
    std::string id;
    fs::path image_path;
    cv::Mat1b target_mask;
    cv::Mat1b distractor_mask;
    std::string object_type;
    int num_distractors = 0;
    std::vector<PopoutFeature> popout_features;

    bool has_feature(PopoutFeature f) const;
    /// Scenes whose target differs in color (possibly among other features).
    bool is_color_target() const { return has_feature(PopoutFeature::color); }
};

/// Reads a sidecar document. Raster paths inside it are relative to the sidecar's
/// directory. With `load_masks` false only labels are validated and returned.
AnnotatedScene load_o3_annotation(const fs::path& path, bool load_masks = true);

/// Writes image, masks and a sidecar for `scene` under `root` (annotations/<id>.json).
void write_o3_scene(const AnnotatedScene& scene, const cv::Mat3b& image_rgb, const fs::path& root);

/// Sidecar paths in `annotations_dir`, sorted by file name.
std::vector<fs::path> list_o3_annotations(const fs::path& annotations_dir);

/// Helpers shared by writers and loaders.
cv::Mat read_png(const fs::path& path, int flags);
void write_png(const fs::path& path, const cv::Mat& image);
nlohmann::json read_json(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

} // namespace oddbench
