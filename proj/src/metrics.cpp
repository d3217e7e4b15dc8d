#include <oddbench/metrics.hpp>

#include <oddbench/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oddbench {

namespace {

struct RegionStats {
    double sum_target = 0.0;
    double sum_distr = 0.0;
    long n_target = 0;
    long n_distr = 0;
    long n_bg = 0;
    double max_target = 0.0;
    double max_distr = 0.0;
    double max_bg = 0.0;
};

RegionStats region_stats(const cv::Mat1d& map, const cv::Mat1b& target, const cv::Mat1b& distr) {
    if (target.size() != map.size() || distr.size() != map.size())
        throw PreconditionError("mask dimensions do not match the saliency map");
    RegionStats s;
    for (int y = 0; y < map.rows; ++y) {
        const double* v = map[y];
        const uchar* t = target[y];
        const uchar* d = distr[y];
        for (int x = 0; x < map.cols; ++x) {
            if (t[x] && d[x]) throw PreconditionError("target and distractor masks overlap");
            if (!(v[x] >= 0.0) || !std::isfinite(v[x])) throw PreconditionError("saliency values must be finite and non-negative");
            if (t[x]) {
                s.sum_target += v[x];
                s.max_target = std::max(s.max_target, v[x]);
                ++s.n_target;
            } else if (d[x]) {
                s.sum_distr += v[x];
                s.max_distr = std::max(s.max_distr, v[x]);
                ++s.n_distr;
            } else {
                s.max_bg = std::max(s.max_bg, v[x]);
                ++s.n_bg;
            }
        }
    }
    if (s.n_target == 0) throw PreconditionError("empty target mask");
    if (s.n_distr == 0) throw PreconditionError("empty distractor mask");
    return s;
}

std::optional<double> gsi_of(const RegionStats& s) {
    const double mt = s.sum_target / static_cast<double>(s.n_target);
    const double md = s.sum_distr / static_cast<double>(s.n_distr);
    if (mt + md == 0.0) return std::nullopt;
    return (mt - md) / (mt + md);
}

} // namespace

std::optional<double> saliency_ratio(double num, double den) {
    if (den > 0.0) return num / den;
    if (num > 0.0) return std::numeric_limits<double>::infinity();
    return std::nullopt;
}

std::optional<double> gsi(const cv::Mat1d& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask) {
    return gsi_of(region_stats(map, target_mask, distractor_mask));
}

std::optional<double> msr_targ(const cv::Mat1d& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask) {
    const RegionStats s = region_stats(map, target_mask, distractor_mask);
    return saliency_ratio(s.max_target, s.max_distr);
}

std::optional<double> msr_bg(const cv::Mat1d& map, const cv::Mat1b& target_mask, const cv::Mat1b& distractor_mask) {
    const RegionStats s = region_stats(map, target_mask, distractor_mask);
    if (s.n_bg == 0) throw PreconditionError("empty background: masks cover the whole image");
    return saliency_ratio(s.max_bg, s.max_target);
}

std::optional<double> gsi(const SaliencyMap& map, const cv::Mat1b& t, const cv::Mat1b& d) { return gsi(map.values(), t, d); }
std::optional<double> msr_targ(const SaliencyMap& map, const cv::Mat1b& t, const cv::Mat1b& d) {
    return msr_targ(map.values(), t, d);
}
std::optional<double> msr_bg(const SaliencyMap& map, const cv::Mat1b& t, const cv::Mat1b& d) {
    return msr_bg(map.values(), t, d);
}

MetricRecord compute_metrics(std::string id, const cv::Mat1d& map, const cv::Mat1b& target_mask,
                             const cv::Mat1b& distractor_mask) {
    const RegionStats s = region_stats(map, target_mask, distractor_mask);
    MetricRecord r;
    r.id = std::move(id);
    r.s_target_mean = s.sum_target / static_cast<double>(s.n_target);
    r.s_distr_mean = s.sum_distr / static_cast<double>(s.n_distr);
    r.max_target = s.max_target;
    r.max_distr = s.max_distr;
    r.max_bg = s.max_bg;
    r.gsi = gsi_of(s);
    r.msr_targ = saliency_ratio(s.max_target, s.max_distr);
    if (s.n_bg > 0) r.msr_bg = saliency_ratio(s.max_bg, s.max_target);
    return r;
}

} // namespace oddbench
