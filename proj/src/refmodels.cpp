#include <oddbench/refmodels.hpp>

#include <oddbench/errors.hpp>

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace oddbench {

namespace {

// Responses below this are treated as exact zeros (floating-point residue of
// filtering constant regions).
constexpr double kResidue = 1e-9;

struct Opponent {
    cv::Mat1d lightness;
    cv::Mat1d red_green;
    cv::Mat1d blue_yellow;
};

cv::Size working_size(cv::Size input, int working_width, bool even) {
    int w = working_width;
    int h = std::max(2, static_cast<int>(std::lround(static_cast<double>(working_width) * input.height / input.width)));
    if (even) h += h % 2;
    return {w, h};
}

Opponent opponent_channels(const cv::Mat3b& image_rgb, cv::Size size) {
    cv::Mat3d rgb;
    image_rgb.convertTo(rgb, CV_64F, 1.0 / 255.0);
    if (rgb.size() != size) cv::resize(rgb, rgb, size, 0, 0, cv::INTER_AREA);
    Opponent o;
    o.lightness.create(size);
    o.red_green.create(size);
    o.blue_yellow.create(size);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const cv::Vec3d& p = rgb(y, x);
            o.lightness(y, x) = (p[0] + p[1] + p[2]) / 3.0;
            o.red_green(y, x) = p[0] - p[1];
            o.blue_yellow(y, x) = p[2] - (p[0] + p[1]) / 2.0;
        }
    }
    return o;
}

double max_of(const cv::Mat1d& m) {
    double mx = 0.0;
    cv::minMaxLoc(m, nullptr, &mx);
    return mx;
}

/// Divides by the maximum; maps whose maximum is residue become all-zero.
cv::Mat1d normalize_by_max(const cv::Mat1d& m) {
    const double mx = max_of(m);
    if (mx <= kResidue) return cv::Mat1d::zeros(m.size());
    cv::Mat1d out = m / mx;
    cv::min(out, 1.0, out);
    cv::max(out, 0.0, out);
    return out;
}

cv::Mat1d blur(const cv::Mat1d& m, double sigma) {
    cv::Mat1d out;
    cv::GaussianBlur(m, out, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT);
    return out;
}

SaliencyMap finish(cv::Mat1d working, cv::Size input, const ModelConfig& cfg) {
    working = blur(working, cfg.sigma());
    cv::max(working, 0.0, working);
    cv::Mat1d full;
    cv::resize(working, full, input, 0, 0, cv::INTER_LINEAR);
    full = normalize_by_max(full);
    if (cfg.center_bias && max_of(full) > 0) {
        const double sx = 0.25 * input.width;
        const double sy = 0.25 * input.height;
        const double cx = (input.width - 1) / 2.0;
        const double cy = (input.height - 1) / 2.0;
        for (int y = 0; y < full.rows; ++y)
            for (int x = 0; x < full.cols; ++x)
                full(y, x) += std::exp(-0.5 * (std::pow((x - cx) / sx, 2) + std::pow((y - cy) / sy, 2)));
        full = normalize_by_max(full);
    }
    return SaliencyMap(std::move(full));
}

// --- image signature -------------------------------------------------------

cv::Mat1d signature_channel(const cv::Mat1d& channel) {
    cv::Mat1d coeffs;
    cv::dct(channel, coeffs);
    double lo = 0, hi = 0;
    cv::minMaxLoc(coeffs, &lo, &hi);
    const double tol = 1e-9 * std::max(std::abs(lo), std::abs(hi));
    for (int y = 0; y < coeffs.rows; ++y) {
        for (int x = 0; x < coeffs.cols; ++x) {
            double& c = coeffs(y, x);
            c = std::abs(c) <= tol ? 0.0 : (c > 0 ? 1.0 : -1.0);
        }
    }
    cv::Mat1d recon;
    cv::idct(coeffs, recon);
    return recon.mul(recon);
}

// --- center-surround contrast ----------------------------------------------

std::vector<cv::Mat1d> gaussian_pyramid(const cv::Mat1d& base, int levels) {
    std::vector<cv::Mat1d> pyr{base};
    for (int l = 1; l <= levels; ++l) {
        cv::Mat1d next;
        cv::pyrDown(pyr.back(), next);
        pyr.push_back(next);
    }
    return pyr;
}

/// Peak promotion: scale to [0,1], then multiply by (1 - mean of the other local maxima)^2.
cv::Mat1d peak_normalize(const cv::Mat1d& m) {
    cv::Mat1d n = normalize_by_max(m);
    if (max_of(n) == 0.0) return n;
    // neighbourhood wide enough that one blob yields one local maximum
    const int k = std::max(3, (n.cols / 24) | 1);
    cv::Mat1d dilated;
    cv::dilate(n, dilated, cv::getStructuringElement(cv::MORPH_RECT, {k, k}), cv::Point(-1, -1), 1,
               cv::BORDER_REPLICATE);
    double sum = 0.0;
    int count = 0;
    for (int y = 0; y < n.rows; ++y)
        for (int x = 0; x < n.cols; ++x)
            if (n(y, x) >= 0.1 && n(y, x) >= dilated(y, x)) {
                sum += n(y, x);
                ++count;
            }
    // the global maximum is always among the local maxima
    const double others = count > 1 ? (sum - 1.0) / (count - 1) : 0.0;
    return n * ((1.0 - others) * (1.0 - others));
}

/// Sum of normalized |center - surround| maps at the resolution of `common`.
cv::Mat1d center_surround(const std::vector<cv::Mat1d>& pyr, cv::Size common) {
    cv::Mat1d acc = cv::Mat1d::zeros(common);
    const int levels = static_cast<int>(pyr.size()) - 1;
    for (int c : {1, 2}) {
        for (int delta : {2, 3}) {
            const int s = c + delta;
            if (s > levels) continue;
            cv::Mat1d surround;
            cv::resize(pyr[static_cast<std::size_t>(s)], surround, pyr[static_cast<std::size_t>(c)].size(), 0, 0,
                       cv::INTER_LINEAR);
            cv::Mat1d diff = cv::abs(pyr[static_cast<std::size_t>(c)] - surround);
            cv::Mat1d resized;
            cv::resize(peak_normalize(diff), resized, common, 0, 0, cv::INTER_LINEAR);
            acc += resized;
        }
    }
    return acc;
}

struct ContrastClasses {
    cv::Mat1d intensity;
    cv::Mat1d color;
    cv::Mat1d orientation;
    cv::Size working;
};

ContrastClasses contrast_classes(const cv::Mat3b& image_rgb, const ModelConfig& cfg) {
    cfg.validate();
    if (image_rgb.empty()) throw PreconditionError("empty image");
    const int min_side = 1 << cfg.pyramid_levels;
    if (image_rgb.cols < min_side || image_rgb.rows < min_side)
        throw ConfigError("image " + std::to_string(image_rgb.cols) + "x" + std::to_string(image_rgb.rows) +
                          " is smaller than 2^pyramid_levels = " + std::to_string(min_side));
    const cv::Size size = working_size(image_rgb.size(), cfg.working_width, false);
    if (size.height < min_side)
        throw ConfigError("working height " + std::to_string(size.height) + " is smaller than 2^pyramid_levels");

    const Opponent o = opponent_channels(image_rgb, size);
    const int levels = cfg.pyramid_levels;
    const auto intensity_pyr = gaussian_pyramid(o.lightness, levels);
    const cv::Size common = intensity_pyr[2].size();

    ContrastClasses out;
    out.working = size;
    out.intensity = peak_normalize(center_surround(intensity_pyr, common));
    out.color = peak_normalize(center_surround(gaussian_pyramid(o.red_green, levels), common) +
                               center_surround(gaussian_pyramid(o.blue_yellow, levels), common));

    cv::Mat1d gx, gy;
    cv::Sobel(o.lightness, gx, CV_64F, 1, 0, 3, 1.0, 0.0, cv::BORDER_REFLECT);
    cv::Sobel(o.lightness, gy, CV_64F, 0, 1, 3, 1.0, 0.0, cv::BORDER_REFLECT);
    cv::Mat1d orient_acc = cv::Mat1d::zeros(common);
    for (double deg : {0.0, 45.0, 90.0, 135.0}) {
        const double t = deg * std::numbers::pi / 180.0;
        cv::Mat1d response = cv::abs(std::cos(t) * gx + std::sin(t) * gy);
        orient_acc += center_surround(gaussian_pyramid(response, levels), common);
    }
    out.orientation = peak_normalize(orient_acc);
    return out;
}

} // namespace

std::string_view to_string(ModelKind m) {
    switch (m) {
    case ModelKind::signature: return "signature";
    case ModelKind::cs_contrast: return "cs_contrast";
    }
    return "unknown";
}

ModelKind model_from_string(std::string_view name) {
    if (name == "signature") return ModelKind::signature;
    if (name == "cs_contrast") return ModelKind::cs_contrast;
    throw ValidationError("unknown model '" + std::string(name) + "' (expected signature or cs_contrast)");
}

ModelConfig ModelConfig::for_model(ModelKind m) {
    ModelConfig cfg;
    cfg.model = m;
    cfg.working_width = m == ModelKind::signature ? 64 : 256;
    return cfg;
}

void ModelConfig::validate() const {
    if (working_width < 16) throw ConfigError("working_width must be at least 16");
    if (!(sigma() > 0)) throw ConfigError("smoothing_sigma must be positive");
    if (model == ModelKind::cs_contrast && (pyramid_levels < 3 || pyramid_levels > 10))
        throw ConfigError("pyramid_levels must be in [3, 10]");
}

SaliencyMap signature_saliency(const cv::Mat3b& image_rgb, const ModelConfig& cfg) {
    cfg.validate();
    if (image_rgb.empty()) throw PreconditionError("empty image");
    // cv::dct needs even dimensions
    const cv::Size size = working_size(image_rgb.size(), cfg.working_width + cfg.working_width % 2, true);
    const Opponent o = opponent_channels(image_rgb, size);
    cv::Mat1d sum = signature_channel(o.lightness) + signature_channel(o.red_green) + signature_channel(o.blue_yellow);
    return finish(sum, image_rgb.size(), cfg);
}

ContrastFeatureMaps cs_contrast_features(const cv::Mat3b& image_rgb, const ModelConfig& cfg) {
    const ContrastClasses c = contrast_classes(image_rgb, cfg);
    auto up = [&](const cv::Mat1d& m) {
        cv::Mat1d out;
        cv::resize(m, out, c.working, 0, 0, cv::INTER_LINEAR);
        return normalize_by_max(out);
    };
    return {up(c.intensity), up(c.color), up(c.orientation)};
}

SaliencyMap cs_contrast_saliency(const cv::Mat3b& image_rgb, const ModelConfig& cfg) {
    const ContrastClasses c = contrast_classes(image_rgb, cfg);
    cv::Mat1d combined = (c.intensity + c.color + c.orientation) / 3.0;
    cv::Mat1d working;
    cv::resize(combined, working, c.working, 0, 0, cv::INTER_LINEAR);
    return finish(working, image_rgb.size(), cfg);
}

SaliencyMap run_model(const cv::Mat3b& image_rgb, const ModelConfig& cfg) {
    return cfg.model == ModelKind::signature ? signature_saliency(image_rgb, cfg) : cs_contrast_saliency(image_rgb, cfg);
}

} // namespace oddbench
