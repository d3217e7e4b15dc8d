#pragma once

#include <opencv2/core.hpp>

namespace oddbench {

/// Single-channel map of saliency values in [0,1], row-major, one value per pixel.
///
/// Construction validates the value range; a SaliencyMap is never partially valid.
class SaliencyMap {
public:
    SaliencyMap() = default;
    explicit SaliencyMap(cv::Mat1d values);

    /// All-zero map of the given size.
    static SaliencyMap zeros(int width, int height);

    int width() const { return values_.cols; }
    int height() const { return values_.rows; }
    cv::Size size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double at(int x, int y) const { return values_(y, x); }
    const cv::Mat1d& values() const { return values_; }

private:
    cv::Mat1d values_;
};

} // namespace oddbench
