#pragma once

// Independent reference implementations used only by tests. They deliberately
// avoid the library's code paths: plain pixel loops, full rescans, flood fill.

#include <oddbench/fixsim.hpp>

#include <opencv2/core.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oddbench::oracle {

struct NaiveMetrics {
    std::optional<double> gsi, msr_targ, msr_bg;
};

inline std::optional<double> ratio(double num, double den) {
    if (den > 0) return num / den;
    if (num > 0) return std::numeric_limits<double>::infinity();
    return std::nullopt;
}

/// Pixel-loop recomputation of GSI and both MSRs.
inline NaiveMetrics metrics(const cv::Mat1d& map, const cv::Mat1b& target, const cv::Mat1b& distr) {
    double st = 0, sd = 0, mt = 0, md = 0, mb = 0;
    long nt = 0, nd = 0;
    for (int y = 0; y < map.rows; ++y) {
        for (int x = 0; x < map.cols; ++x) {
            const double v = map(y, x);
            if (target(y, x)) {
                st += v;
                ++nt;
                if (v > mt) mt = v;
            } else if (distr(y, x)) {
                sd += v;
                ++nd;
                if (v > md) md = v;
            } else if (v > mb) {
                mb = v;
            }
        }
    }
    NaiveMetrics out;
    const double a = st / nt, b = sd / nd;
    if (a + b != 0) out.gsi = (a - b) / (a + b);
    out.msr_targ = ratio(mt, md);
    out.msr_bg = ratio(mb, mt);
    return out;
}

/// Fixation simulation that rescans the whole map for its maximum at every step.
inline FixationTrace fixations(const cv::Mat1d& input, cv::Point2d target, const FixSimConfig& cfg, double hit_radius) {
    cv::Mat1d map = input.clone();
    FixationTrace trace;
    for (int t = 1; t <= cfg.max_fixations; ++t) {
        double best = -1;
        cv::Point at;
        for (int y = 0; y < map.rows; ++y)
            for (int x = 0; x < map.cols; ++x)
                if (map(y, x) > best) {
                    best = map(y, x);
                    at = {x, y};
                }
        if (best <= 0) break;
        trace.fixations.push_back(at);
        trace.count = t;
        const double dx = at.x - target.x, dy = at.y - target.y;
        if (std::sqrt(dx * dx + dy * dy) <= hit_radius) {
            trace.found = true;
            break;
        }
        for (int y = 0; y < map.rows; ++y)
            for (int x = 0; x < map.cols; ++x) {
                const double ex = x - at.x, ey = y - at.y;
                if (ex * ex + ey * ey <= cfg.suppression_radius * cfg.suppression_radius) map(y, x) = 0;
            }
    }
    return trace;
}

/// 4-connected components of non-zero pixels, by iterative flood fill.
inline int connected_components(const cv::Mat1b& mask) {
    cv::Mat1i label = cv::Mat1i::zeros(mask.size());
    int count = 0;
    std::vector<cv::Point> stack;
    for (int y = 0; y < mask.rows; ++y) {
        for (int x = 0; x < mask.cols; ++x) {
            if (!mask(y, x) || label(y, x)) continue;
            ++count;
            stack.push_back({x, y});
            label(y, x) = count;
            while (!stack.empty()) {
                const cv::Point p = stack.back();
                stack.pop_back();
                const cv::Point nbrs[] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
                for (const auto& q : nbrs) {
                    if (q.x < 0 || q.y < 0 || q.x >= mask.cols || q.y >= mask.rows) continue;
                    if (!mask(q.y, q.x) || label(q.y, q.x)) continue;
                    label(q.y, q.x) = count;
                    stack.push_back(q);
                }
            }
        }
    }
    return count;
}

/// Bounding box of non-zero pixels.
inline cv::Rect bounding_box(const cv::Mat1b& mask) {
    int x0 = mask.cols, y0 = mask.rows, x1 = -1, y1 = -1;
    for (int y = 0; y < mask.rows; ++y)
        for (int x = 0; x < mask.cols; ++x)
            if (mask(y, x)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

/// Width and height straight from a PNG's IHDR chunk.
inline std::optional<cv::Size> png_size(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char buf[24];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(buf))) return std::nullopt;
    auto be32 = [&](int off) {
        return static_cast<int>((std::uint32_t(buf[off]) << 24) | (std::uint32_t(buf[off + 1]) << 16) |
                                (std::uint32_t(buf[off + 2]) << 8) | std::uint32_t(buf[off + 3]));
    };
    return cv::Size(be32(16), be32(20));
}

// --- random inputs for property checks ----------------------------------------

/// Random map of size w x h with values in [0, scale); `levels` > 0 quantizes to
/// multiples of 1/levels so that ties occur.
inline cv::Mat1d random_map(std::mt19937_64& rng, int w, int h, double scale = 1.0, int levels = 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    cv::Mat1d m(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = u(rng);
            if (levels > 0) v = std::floor(v * levels) / levels;
            m(y, x) = v * scale;
        }
    return m;
}

/// Random disjoint, non-empty target and distractor masks that leave background.
inline std::pair<cv::Mat1b, cv::Mat1b> random_masks(std::mt19937_64& rng, int w, int h) {
    std::uniform_int_distribution<int> label(0, 2);
    for (;;) {
        cv::Mat1b t = cv::Mat1b::zeros(h, w), d = cv::Mat1b::zeros(h, w);
        int nt = 0, nd = 0, nb = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int l = label(rng);
                if (l == 0) {
                    t(y, x) = 255;
                    ++nt;
                } else if (l == 1) {
                    d(y, x) = 255;
                    ++nd;
                } else {
                    ++nb;
                }
            }
        if (nt && nd && nb) return {t, d};
    }
}

inline bool same(const std::optional<double>& a, const std::optional<double>& b, double tol) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    if (std::isinf(*a) || std::isinf(*b)) return *a == *b;
    return std::abs(*a - *b) <= tol;
}

} // namespace oddbench::oracle
