#pragma once

// Procedural singleton search arrays: a jittered grid of identical distractors
// with one target that differs in color, orientation or size.

#include <oddbench/errors.hpp>

#include <json.hpp>
#include <opencv2/core.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oddbench {

enum class Feature { color, orientation, size };

std::string_view to_string(Feature f);
/// Throws ValidationError for an unknown name.
Feature feature_from_string(std::string_view name);

/// Geometry and appearance shared by every array in a dataset.
struct ArraySpec {
    int image_width = 1024;
    int image_height = 1024;
    int grid_rows = 7;
    int grid_cols = 7;
    double distractor_size = 75.0; // disk diameter / bar length, px
    double jitter = 15.0;          // max per-axis offset from the cell center, px
    double px_per_degree = 35.0;
    int background_gray = 128;
    double bar_width = 15.0;
    /// 4x4 supersampling of the image. Masks are always hard-edged.
    bool supersample = false;

    int cell_count() const { return grid_rows * grid_cols; }
    double pitch_x() const { return static_cast<double>(image_width) / grid_cols; }
    double pitch_y() const { return static_cast<double>(image_height) / grid_rows; }
    cv::Point2d cell_center(int cell) const;

    /// Checks that jittered elements can never overlap. `target_extent` is the
    /// largest target diameter that will be placed on this grid (0 = same as distractors).
    void validate(double target_extent = 0.0) const;
};

struct ElementLayout {
    std::vector<cv::Point2d> centers; // row-major cell order
    int target_index = 0;
    std::uint64_t rng_seed = 0;

    cv::Point2d target_center() const { return centers.at(static_cast<std::size_t>(target_index)); }
};

struct StimulusParams {
    Feature feature = Feature::color;
    /// Hue difference (deg), orientation difference (deg) or target/distractor diameter ratio.
    double td_value = 0.0;
    /// Distractor hue (deg), distractor orientation (deg) or distractor diameter (px).
    double distractor_value = 0.0;
    /// Size arrays only.
    std::optional<double> target_size_px;

    void validate(const ArraySpec& spec) const;
};

struct RenderedSample {
    cv::Mat3b image; // RGB channel order
    cv::Mat1b target_mask;
    cv::Mat1b distractor_mask;
    StimulusParams params;
    ElementLayout layout;
    std::string id;
};

/// Radius of the smallest circle around an element's center that contains its footprint.
double footprint_radius(const ArraySpec& spec, const StimulusParams& params, bool is_target);

/// Places one element per grid cell with uniform per-axis jitter and picks the
/// target cell (uniformly, when not given). Jitter is clipped where an element of
/// diameter `target_extent` (or distractor_size) would leave the image.
ElementLayout plan_layout(const ArraySpec& spec, std::optional<int> target_cell,
                          std::uint64_t seed, double target_extent = 0.0);

RenderedSample render_array(const ArraySpec& spec, const StimulusParams& params,
                            const ElementLayout& layout);

/// HSV (h in degrees, s = v = 1) to 8-bit RGB.
cv::Vec3b hue_to_rgb(double hue_deg);

struct FeatureSweep {
    /// td values for color/orientation; target diameters (px) for size.
    std::vector<double> values;
    int instances = 1;
};

struct SweepConfig {
    ArraySpec array;
    std::map<Feature, FeatureSweep> features;

    /// 45x18 color, 48x18 orientation, 28x30 size arrays (2514 total).
    static SweepConfig defaults();
    std::size_t sample_count() const;
};

struct DatasetManifest {
    SweepConfig sweep;
    std::uint64_t seed = 0;
    std::map<Feature, int> counts;
    std::vector<std::string> ids; // sorted

    int total() const;
};

/// Renders every sample of the sweep and writes it under `out_dir`.
/// `workers` <= 0 uses the hardware concurrency.
DatasetManifest gen_dataset(const SweepConfig& sweep, const std::filesystem::path& out_dir,
                            std::uint64_t seed, int workers = 0);

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir);

/// Per-sample seed derived from the dataset seed; independent of generation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

void to_json(nlohmann::json& j, const ArraySpec& spec);
void from_json(const nlohmann::json& j, ArraySpec& spec);
void to_json(nlohmann::json& j, const SweepConfig& sweep);
void from_json(const nlohmann::json& j, SweepConfig& sweep);
void to_json(nlohmann::json& j, const DatasetManifest& manifest);
void from_json(const nlohmann::json& j, DatasetManifest& manifest);

} // namespace oddbench
