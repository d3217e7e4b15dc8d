#pragma once

// Batch orchestration: run models over datasets, evaluate saliency-map
// directories and aggregate per-image rows into curves and tables.

#include <oddbench/dataset_io.hpp>
#include <oddbench/fixsim.hpp>
#include <oddbench/metrics.hpp>
#include <oddbench/refmodels.hpp>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oddbench {

/// Bumped whenever the report columns change.
inline constexpr int kReportSchemaVersion = 1;

struct EvalRow {
    MetricRecord metrics;         // metrics.id is the row key
    std::string feature;          // "color" | "orientation" | "size" | "scene"
    std::optional<double> td_value;
    bool found = false;
    int num_fixations = 0;

    const std::string& id() const { return metrics.id; }
};

struct EvalReport {
    std::vector<EvalRow> rows; // sorted by id, ids unique
    nlohmann::json config_snapshot;
    fs::path dataset_manifest_ref;
    int max_fixations = 100;
};

/// One image to evaluate, independent of whether it came from a generated array
/// or an annotated scene.
struct EvalItem {
    std::string id;
    std::string feature;
    std::optional<double> td_value;
    fs::path image_path;
    cv::Mat1b target_mask;
    cv::Mat1b distractor_mask;
    cv::Point2d target_center;
    double hit_radius = 0.0;
};

/// Ids of a dataset directory: manifest ids for generated arrays, sidecar ids
/// under annotations/ for natural scenes.
std::vector<std::string> dataset_ids(const fs::path& dataset_dir);
EvalItem load_eval_item(const fs::path& dataset_dir, const std::string& id, const FixSimConfig& cfg);

/// Centroid of the non-zero pixels of a mask.
cv::Point2d mask_centroid(const cv::Mat1b& mask);

/// Runs a reference model on every image and writes <out_dir>/<id>.png (16-bit).
/// Returns the number of maps written.
int run_model_on_dataset(const fs::path& dataset_dir, const fs::path& out_dir,
                         const ModelConfig& cfg, int workers = 0);

/// Evaluates every dataset image against the same-named map in `maps_dir`.
/// All missing maps are reported together before any work starts.
EvalReport run_eval(const fs::path& dataset_dir, const fs::path& maps_dir,
                    const FixSimConfig& cfg, int workers = 0);

/// CSV columns: id, feature, td_value, gsi, msr_targ, msr_bg, found, num_fixations,
/// s_target_mean, s_distr_mean, max_target, max_distr, max_bg. The first line is a
/// '#' comment carrying the schema version and the effective configuration.
std::string report_to_csv(const EvalReport& report);
void write_report_csv(const EvalReport& report, const fs::path& path);
EvalReport read_report_csv(const fs::path& path);

enum class TdAxis { hue_diff_deg, orientation_diff_deg, size_ratio };

std::string_view to_string(TdAxis axis);
TdAxis axis_for(Feature f);

struct BinnedCurve {
    TdAxis axis = TdAxis::hue_diff_deg;
    std::vector<double> bin_edges;                   // bins are [e_i, e_i+1), last one closed
    std::vector<std::optional<double>> mean_gsi;     // over defined gsi values
    std::vector<std::optional<double>> mean_fixations; // not-found rows count as max_fixations
    std::vector<int> n_per_bin;                      // rows with defined gsi
    std::vector<int> n_undefined;                    // rows with undefined gsi
    std::vector<int> n_censored;                     // rows whose target was never found
};

struct BinWidths {
    double hue_deg = 20.0;
    double orientation_deg = 10.0;
    double size_ratio = 0.2;

    double for_axis(TdAxis axis) const;
};

/// One curve per feature present in the report, in Feature order.
std::vector<BinnedCurve> aggregate_by_td(const EvalReport& report, const BinWidths& widths = {});

struct MsrBands {
    int not_discriminated = 0;      // msr_targ < 1
    int somewhat = 0;               // 1 <= msr_targ <= 2
    int strongly = 0;               // msr_targ > 2 (including +inf)
};

struct MsrGroupSummary {
    int n = 0;
    std::optional<double> mean_msr_targ; // over finite values
    std::optional<double> mean_msr_bg;
    int infinite_targ = 0;
    int undefined_targ = 0;
    int infinite_bg = 0;
    int undefined_bg = 0;
    MsrBands bands;
};

struct O3Table {
    MsrGroupSummary color;
    MsrGroupSummary non_color;
    MsrGroupSummary all;
};

/// Groups scenes by whether color is among their pop-out features.
O3Table aggregate_o3(const EvalReport& report, std::span<const AnnotatedScene> scenes);

/// Traces reconstructed from report rows (found flag and count only).
std::vector<FixationTrace> traces_of(const EvalReport& report, const std::string& feature = {});

void to_json(nlohmann::json& j, const BinnedCurve& curve);
void from_json(const nlohmann::json& j, BinnedCurve& curve);
void to_json(nlohmann::json& j, const MsrGroupSummary& s);
void to_json(nlohmann::json& j, const O3Table& t);

} // namespace oddbench
