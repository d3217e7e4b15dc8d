#pragma once

// Fixation simulation: repeatedly attend the global maximum of a saliency map and
// suppress a disk around it until the target is hit or the budget runs out.

#include <oddbench/saliency_map.hpp>
#include <oddbench/stimgen.hpp>

#include <opencv2/core.hpp>

#include <optional>
#include <span>
#include <vector>

namespace oddbench {

struct SampleRecord;

struct FixSimConfig {
    double suppression_radius = 35.0; // 1 degree
    double hit_radius_base = 35.0;    // 1 degree
    double hit_radius_max = 70.0;     // 2 degrees
    int max_fixations = 100;

    void validate() const;
};

struct FixationTrace {
    std::vector<cv::Point> fixations;
    bool found = false;
    int count = 0; // number of fixations executed; index of the hit when found

    bool operator==(const FixationTrace&) const = default;
};

struct DetectionCurve {
    std::vector<int> budgets;
    std::vector<double> fraction_found;
};

/// {1, 5, 10, 25, 50, 75, 100}
std::vector<int> default_budgets();

/// Size targets get clamp(diameter / 2, base, max); every other stimulus gets base.
double hit_radius_for(std::optional<Feature> feature, std::optional<double> target_size_px,
                      const FixSimConfig& cfg);
double hit_radius_for(const SampleRecord& sample, const FixSimConfig& cfg);

/// Ties in the maximum are broken in row-major order (smallest y, then smallest x).
/// Suppression zeroes every pixel within suppression_radius (inclusive) of the
/// fixation. The simulation stops early once the residual map is all zero.
FixationTrace simulate_fixations(const cv::Mat1d& map, cv::Point2d target_center,
                                 const FixSimConfig& cfg, double hit_radius);
FixationTrace simulate_fixations(const SaliencyMap& map, cv::Point2d target_center,
                                 const FixSimConfig& cfg, double hit_radius);

/// fraction_found[i] = |{found with count <= budgets[i]}| / |traces|.
DetectionCurve detection_curve(std::span<const FixationTrace> traces, std::span<const int> budgets);

} // namespace oddbench
