#pragma once

// Per-image discrimination metrics over a saliency map and a target/distractor
// segmentation. Undefined values (0/0) are std::nullopt; x/0 with x > 0 is +inf.

#include <oddbench/saliency_map.hpp>

#include <opencv2/core.hpp>

#include <optional>
#include <string>

namespace oddbench {

struct MetricRecord {
    std::string id;
    std::optional<double> gsi;
    std::optional<double> msr_targ;
    std::optional<double> msr_bg;
    double s_target_mean = 0.0;
    double s_distr_mean = 0.0;
    double max_target = 0.0;
    double max_distr = 0.0;
    double max_bg = 0.0;
};

/// num / den with the degenerate-value rules used by every ratio metric.
std::optional<double> saliency_ratio(double num, double den);

// The overloads on cv::Mat1d accept any finite non-negative map, which lets the
// scale-invariance checks multiply maps past 1.

/// (mean over target - mean over distractors) / (sum of the two means).
std::optional<double> gsi(const cv::Mat1d& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);
/// max over target / max over distractors.
std::optional<double> msr_targ(const cv::Mat1d& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);
/// max over background / max over target; background is everything outside both masks.
std::optional<double> msr_bg(const cv::Mat1d& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);

std::optional<double> gsi(const SaliencyMap& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);
std::optional<double> msr_targ(const SaliencyMap& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);
std::optional<double> msr_bg(const SaliencyMap& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);

/// All metrics in one pass. msr_bg is left undefined when the masks cover the whole image.
MetricRecord compute_metrics(std::string id, const cv::Mat1d& map,
                             const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask);

} // namespace oddbench
