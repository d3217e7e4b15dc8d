#include <oddbench/fixsim.hpp>

#include <oddbench/dataset_io.hpp>
#include <oddbench/errors.hpp>

#include <algorithm>
#include <cmath>

namespace oddbench {

void FixSimConfig::validate() const {
    if (!(suppression_radius > 0) || !(hit_radius_base > 0) || !(hit_radius_max > 0))
        throw ConfigError("fixation radii must be positive");
    if (hit_radius_max < hit_radius_base) throw ConfigError("hit_radius_max must be >= hit_radius_base");
    if (max_fixations < 1) throw ConfigError("max_fixations must be at least 1");
}

std::vector<int> default_budgets() { return {1, 5, 10, 25, 50, 75, 100}; }

double hit_radius_for(std::optional<Feature> feature, std::optional<double> target_size_px, const FixSimConfig& cfg) {
    if (feature != Feature::size || !target_size_px) return cfg.hit_radius_base;
    return std::clamp(*target_size_px / 2.0, cfg.hit_radius_base, cfg.hit_radius_max);
}

double hit_radius_for(const SampleRecord& sample, const FixSimConfig& cfg) {
    return hit_radius_for(sample.meta.feature, sample.meta.target_size_px, cfg);
}

namespace {

/// Keeps the maximum (and its first column) of every row so that each step only
/// rescans the rows touched by the last suppression.
class RowMaxIndex {
public:
    explicit RowMaxIndex(const cv::Mat1d& map) : map_(map), max_(map.rows), arg_(map.rows) {
        for (int y = 0; y < map.rows; ++y) refresh(y);
    }

    void refresh(int y) {
        const double* row = map_[y];
        double best = row[0];
        int at = 0;
        for (int x = 1; x < map_.cols; ++x) {
            if (row[x] > best) {
                best = row[x];
                at = x;
            }
        }
        max_[static_cast<std::size_t>(y)] = best;
        arg_[static_cast<std::size_t>(y)] = at;
    }

    /// Row-major first occurrence of the global maximum.
    cv::Point argmax(double& value) const {
        int best_y = 0;
        for (int y = 1; y < map_.rows; ++y)
            if (max_[static_cast<std::size_t>(y)] > max_[static_cast<std::size_t>(best_y)]) best_y = y;
        value = max_[static_cast<std::size_t>(best_y)];
        return {arg_[static_cast<std::size_t>(best_y)], best_y};
    }

private:
    const cv::Mat1d& map_;
    std::vector<double> max_;
    std::vector<int> arg_;
};

} // namespace

FixationTrace simulate_fixations(const cv::Mat1d& map, cv::Point2d target_center, const FixSimConfig& cfg,
                                 double hit_radius) {
    cfg.validate();
    if (map.empty()) throw PreconditionError("empty saliency map");
    if (!(hit_radius > 0)) throw PreconditionError("hit radius must be positive");
    if (target_center.x < 0 || target_center.y < 0 || target_center.x > map.cols - 1 || target_center.y > map.rows - 1)
        throw PreconditionError("target center outside the map");

    cv::Mat1d work = map.clone();
    RowMaxIndex index(work);
    const double r = cfg.suppression_radius;
    const double r2 = r * r;
    const int reach = static_cast<int>(std::floor(r));

    FixationTrace trace;
    for (int t = 1; t <= cfg.max_fixations; ++t) {
        double peak = 0.0;
        const cv::Point p = index.argmax(peak);
        if (!(peak > 0.0)) break;

        trace.fixations.push_back(p);
        trace.count = t;
        if (std::hypot(p.x - target_center.x, p.y - target_center.y) <= hit_radius) {
            trace.found = true;
            break;
        }

        const int y0 = std::max(0, p.y - reach);
        const int y1 = std::min(work.rows - 1, p.y + reach);
        const int x0 = std::max(0, p.x - reach);
        const int x1 = std::min(work.cols - 1, p.x + reach);
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - p.y;
            double* row = work[y];
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - p.x;
                if (dx * dx + dy * dy <= r2) row[x] = 0.0;
            }
            index.refresh(y);
        }
    }
    return trace;
}

FixationTrace simulate_fixations(const SaliencyMap& map, cv::Point2d target_center, const FixSimConfig& cfg,
                                 double hit_radius) {
    return simulate_fixations(map.values(), target_center, cfg, hit_radius);
}

DetectionCurve detection_curve(std::span<const FixationTrace> traces, std::span<const int> budgets) {
    if (traces.empty()) throw PreconditionError("detection curve needs at least one trace");
    if (!std::is_sorted(budgets.begin(), budgets.end())) throw PreconditionError("budgets must be sorted ascending");

    DetectionCurve curve;
    curve.budgets.assign(budgets.begin(), budgets.end());
    for (int b : budgets) {
        const auto hits = std::count_if(traces.begin(), traces.end(),
                                        [b](const FixationTrace& t) { return t.found && t.count <= b; });
        curve.fraction_found.push_back(static_cast<double>(hits) / static_cast<double>(traces.size()));
    }
    return curve;
}

} // namespace oddbench
