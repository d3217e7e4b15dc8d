#include <oddbench/metrics.hpp>
#include <oddbench/refmodels.hpp>
#include <oddbench/stimgen.hpp>

#include <gtest/gtest.h>

#include <opencv2/imgproc.hpp>

#include <cmath>

using namespace oddbench;

namespace {

constexpr double kSizeBaseline = 1.1136951706803586;

RenderedSample sample(Feature f, double td, double distractor, int target_cell, std::uint64_t seed,
                      double jitter = 15) {
    ArraySpec spec;
    spec.jitter = jitter;
    StimulusParams p;
    p.feature = f;
    p.td_value = td;
    p.distractor_value = distractor;
    if (f == Feature::size) {
        p.target_size_px = td * 75.0;
        p.distractor_value = 75;
    }
    return render_array(spec, p, plan_layout(spec, target_cell, seed, p.target_size_px.value_or(0)));
}

cv::Point argmax(const cv::Mat1d& m) {
    cv::Point at;
    cv::minMaxLoc(m, nullptr, nullptr, nullptr, &at);
    return at;
}

void expect_valid(const SaliencyMap& m, cv::Size size) {
    EXPECT_EQ(m.size(), size);
    double lo = 0, hi = 0;
    cv::minMaxLoc(m.values(), &lo, &hi);
    EXPECT_GE(lo, 0.0);
    EXPECT_LE(hi, 1.0);
    EXPECT_TRUE(cv::checkRange(m.values()));
}

} // namespace

TEST(ModelConfig, Defaults) {
    const ModelConfig sig = ModelConfig::for_model(ModelKind::signature);
    const ModelConfig cs = ModelConfig::for_model(ModelKind::cs_contrast);
    EXPECT_EQ(sig.working_width, 64);
    EXPECT_EQ(cs.working_width, 256);
    EXPECT_DOUBLE_EQ(sig.sigma(), 0.045 * 64);
    EXPECT_EQ(cs.pyramid_levels, 5);
    EXPECT_FALSE(sig.center_bias);
    ModelConfig bad = sig;
    bad.working_width = 8;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = sig;
    bad.smoothing_sigma = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_EQ(model_from_string("cs_contrast"), ModelKind::cs_contrast);
    EXPECT_THROW(model_from_string("bms"), ValidationError);
}

TEST(Signature, ConstantImageIsUniform) {
    const cv::Mat3b img(256, 320, cv::Vec3b(40, 200, 90));
    const SaliencyMap m = signature_saliency(img, ModelConfig::for_model(ModelKind::signature));
    double lo = 0, hi = 0;
    cv::minMaxLoc(m.values(), &lo, &hi);
    EXPECT_LT(hi - lo, 1e-6);
    cv::Mat1b t = cv::Mat1b::zeros(256, 320), d = cv::Mat1b::zeros(256, 320);
    t(cv::Rect(10, 10, 20, 20)).setTo(255);
    d(cv::Rect(100, 100, 20, 20)).setTo(255);
    const auto g = gsi(m, t, d);
    if (g) EXPECT_NEAR(*g, 0.0, 1e-6);
}

TEST(Signature, OutputContract) {
    const RenderedSample s = sample(Feature::orientation, 40, 10, 3, 4);
    const SaliencyMap m = signature_saliency(s.image, ModelConfig::for_model(ModelKind::signature));
    expect_valid(m, s.image.size());
    double hi = 0;
    cv::minMaxLoc(m.values(), nullptr, &hi);
    EXPECT_DOUBLE_EQ(hi, 1.0);

    const cv::Mat3b odd(101, 77, cv::Vec3b(1, 2, 3));
    cv::Mat3b noisy = odd.clone();
    cv::randu(noisy, 0, 255);
    expect_valid(signature_saliency(noisy, ModelConfig::for_model(ModelKind::signature)), odd.size());
}

TEST(Signature, ColorTargetStandsOut) {
    // red target (hue 0) among blue distractors (hue 240): hue difference 120
    const RenderedSample s = sample(Feature::color, 120, 240, 17, 21);
    ASSERT_EQ(hue_to_rgb(240 + 120), cv::Vec3b(255, 0, 0));
    const SaliencyMap m = signature_saliency(s.image, ModelConfig::for_model(ModelKind::signature));
    const auto v = msr_targ(m, s.target_mask, s.distractor_mask);
    ASSERT_TRUE(v);
    EXPECT_GT(*v, 1.0);
}

TEST(Signature, Deterministic) {
    const RenderedSample s = sample(Feature::size, 1.6, 0, 30, 2);
    const ModelConfig cfg = ModelConfig::for_model(ModelKind::signature);
    const SaliencyMap a = signature_saliency(s.image, cfg);
    const SaliencyMap b = signature_saliency(s.image, cfg);
    EXPECT_EQ(cv::norm(a.values(), b.values(), cv::NORM_INF), 0.0);
}

TEST(Signature, TranslationCovariance) {
    const ModelConfig cfg = ModelConfig::for_model(ModelKind::signature);
    const double pitch = 1024.0 / 7.0;
    const double sigma_px = cfg.sigma() * 1024.0 / cfg.working_width;
    const SaliencyMap a = signature_saliency(sample(Feature::color, 150, 60, 16, 1, 0).image, cfg);
    const SaliencyMap b = signature_saliency(sample(Feature::color, 150, 60, 17, 1, 0).image, cfg);
    const cv::Point pa = argmax(a.values()), pb = argmax(b.values());
    EXPECT_NEAR(pb.x - pa.x, pitch, sigma_px);
    EXPECT_NEAR(pb.y - pa.y, 0.0, sigma_px);
}

TEST(Signature, CenterBiasRaisesCenter) {
    const RenderedSample s = sample(Feature::color, 40, 10, 0, 3);
    ModelConfig cfg = ModelConfig::for_model(ModelKind::signature);
    const SaliencyMap plain = signature_saliency(s.image, cfg);
    cfg.center_bias = true;
    const SaliencyMap biased = signature_saliency(s.image, cfg);
    expect_valid(biased, s.image.size());
    EXPECT_GT(biased.at(512, 512), plain.at(512, 512));
}

TEST(CsContrast, UniformImageIsZero) {
    const cv::Mat3b img(256, 256, cv::Vec3b(90, 90, 200));
    const ModelConfig cfg = ModelConfig::for_model(ModelKind::cs_contrast);
    const SaliencyMap m = cs_contrast_saliency(img, cfg);
    EXPECT_EQ(cv::countNonZero(m.values()), 0);
    const ContrastFeatureMaps f = cs_contrast_features(img, cfg);
    EXPECT_EQ(cv::countNonZero(f.intensity), 0);
    EXPECT_EQ(cv::countNonZero(f.color), 0);
    EXPECT_EQ(cv::countNonZero(f.orientation), 0);
}

TEST(CsContrast, SmallImageRejected) {
    const ModelConfig cfg = ModelConfig::for_model(ModelKind::cs_contrast);
    EXPECT_THROW(cs_contrast_saliency(cv::Mat3b(16, 64, cv::Vec3b(1, 1, 1)), cfg), ConfigError);
    ModelConfig three = cfg;
    three.pyramid_levels = 3;
    EXPECT_NO_THROW(cs_contrast_saliency(cv::Mat3b(16, 64, cv::Vec3b(1, 1, 1)), three));
}

TEST(CsContrast, OrientationArgmaxOnTarget) {
    const ModelConfig cfg = ModelConfig::for_model(ModelKind::cs_contrast);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const RenderedSample s = sample(Feature::orientation, 90, 20.0 * seed, static_cast<int>(seed * 13 % 49), seed);
        const ContrastFeatureMaps f = cs_contrast_features(s.image, cfg);
        const double scale = static_cast<double>(s.image.cols) / f.orientation.cols;
        cv::Mat1b small;
        cv::resize(s.target_mask, small, f.orientation.size(), 0, 0, cv::INTER_NEAREST);
        // dilate by the smoothing scale of the working grid
        const int k = 2 * static_cast<int>(std::ceil(cfg.sigma())) + 1;
        cv::Mat1b dilated;
        cv::dilate(small, dilated, cv::getStructuringElement(cv::MORPH_ELLIPSE, {k, k}));
        const cv::Point at = argmax(f.orientation);
        EXPECT_TRUE(dilated(at)) << "seed " << seed << " argmax " << at << " scale " << scale;
    }
}

TEST(CsContrast, OutputContract) {
    const RenderedSample s = sample(Feature::color, 90, 100, 9, 6);
    const SaliencyMap m = cs_contrast_saliency(s.image, ModelConfig::for_model(ModelKind::cs_contrast));
    expect_valid(m, s.image.size());
}

TEST(CsContrast, SizeRegressionBaseline) {
    const RenderedSample s = sample(Feature::size, 140.0 / 75.0, 0, 24, 5);
    const SaliencyMap m = cs_contrast_saliency(s.image, ModelConfig::for_model(ModelKind::cs_contrast));
    const auto v = msr_targ(m, s.target_mask, s.distractor_mask);
    ASSERT_TRUE(v);
    // pinned from the first run of this implementation
    EXPECT_NEAR(*v, kSizeBaseline, 1e-6);
}
