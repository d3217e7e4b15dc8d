#pragma once

// Two self-contained reference saliency models: an image-signature style model
// (sign of the DCT spectrum) and a center-surround contrast model over Gaussian
// pyramids. Both return maps normalized by their maximum.

#include <oddbench/saliency_map.hpp>

#include <opencv2/core.hpp>

#include <optional>
#include <string_view>

namespace oddbench {

enum class ModelKind { signature, cs_contrast };

std::string_view to_string(ModelKind m);
ModelKind model_from_string(std::string_view name);

struct ModelConfig {
    ModelKind model = ModelKind::signature;
    int working_width = 64;
    std::optional<double> smoothing_sigma; // default 0.045 * working_width
    int pyramid_levels = 5;                // cs_contrast only
    bool center_bias = false;              // additive center Gaussian, off for arrays

    /// Defaults for the given model (working width 64 or 256).
    static ModelConfig for_model(ModelKind m);
    double sigma() const { return smoothing_sigma.value_or(0.045 * working_width); }
    void validate() const;
};

/// Per-class conspicuity maps of the contrast model at working resolution,
/// each normalized to [0,1] by its own maximum (all-zero stays all-zero).
struct ContrastFeatureMaps {
    cv::Mat1d intensity;
    cv::Mat1d color;
    cv::Mat1d orientation;
};

SaliencyMap signature_saliency(const cv::Mat3b& image_rgb, const ModelConfig& cfg);
SaliencyMap cs_contrast_saliency(const cv::Mat3b& image_rgb, const ModelConfig& cfg);
ContrastFeatureMaps cs_contrast_features(const cv::Mat3b& image_rgb, const ModelConfig& cfg);

/// Dispatches on cfg.model.
SaliencyMap run_model(const cv::Mat3b& image_rgb, const ModelConfig& cfg);

} // namespace oddbench
