#pragma once

#include <oddbench/fixsim.hpp>
#include <oddbench/harness.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace oddbench {

struct DetectionSeries {
    std::string label; // "all", "color", ...
    DetectionCurve curve;
};

using PlotCurve = std::variant<BinnedCurve, DetectionSeries>;

/// Standalone SVG line chart for one curve.
std::string render_svg(const PlotCurve& curve);

/// Writes one SVG per curve into `out_dir` and returns the paths in input order.
/// An empty list is an error and leaves nothing on disk.
std::vector<std::filesystem::path> emit_plots(const std::vector<PlotCurve>& curves,
                                              const std::filesystem::path& out_dir);

/// Everything the `aggregate` command derives from a report.
struct AggregateSummary {
    std::vector<BinnedCurve> binned;
    std::vector<DetectionSeries> detection; // "all" first, then one per feature
    std::optional<O3Table> o3;
    int max_fixations = 100;
};

/// `scenes` may be empty, in which case no O3 table is produced.
AggregateSummary aggregate_report(const EvalReport& report, std::span<const AnnotatedScene> scenes,
                                  const BinWidths& widths, std::span<const int> budgets);

/// Writes curves.json plus CSV tables (binned_<axis>.csv, detection.csv, o3_table.csv).
void write_aggregates(const AggregateSummary& summary, const std::filesystem::path& out_dir);

/// Reads curves.json from `in_dir` and emits one SVG per curve into `out_dir`.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& in_dir,
                                                  const std::filesystem::path& out_dir);

void to_json(nlohmann::json& j, const DetectionSeries& s);
void from_json(const nlohmann::json& j, DetectionSeries& s);

} // namespace oddbench
