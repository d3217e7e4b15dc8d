#include <oddbench/saliency_map.hpp>

#include <oddbench/errors.hpp>

#include <cmath>

namespace oddbench {

SaliencyMap::SaliencyMap(cv::Mat1d values) : values_(std::move(values)) {
    for (int y = 0; y < values_.rows; ++y) {
        const double* row = values_[y];
        for (int x = 0; x < values_.cols; ++x) {
            if (!std::isfinite(row[x]) || row[x] < 0.0 || row[x] > 1.0)
                throw ValidationError("saliency value at (" + std::to_string(x) + ", " + std::to_string(y) +
                                      ") outside [0, 1]");
        }
    }
}

SaliencyMap SaliencyMap::zeros(int width, int height) { return SaliencyMap(cv::Mat1d::zeros(height, width)); }

} // namespace oddbench
