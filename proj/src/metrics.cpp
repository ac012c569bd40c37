#include "xraysim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace xraysim {

double dice(const LabelMask& pred, const LabelMask& gt, int label) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw DimensionMismatch("dice: mask dims differ");
    std::int64_t p = 0, g = 0, both = 0;
    const auto& pd = pred.data();
    const auto& gd = gt.data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
        const bool in_p = pd[i] == label;
        const bool in_g = gd[i] == label;
        p += in_p;
        g += in_g;
        both += in_p && in_g;
    }
    if (p == 0 && g == 0)
        return 1.0;
    if (p == 0 || g == 0)
        return 0.0;
    return 2.0 * double(both) / double(p + g);
}

namespace {

constexpr double kInf = 1e30;

// Foreground pixels 4-adjacent to a non-foreground pixel; out-of-image counts
// as non-foreground, so region pixels on the border are boundary.
std::vector<bool> boundary_of(const LabelMask& mask, int label, bool& any_fg) {
    const int w = mask.width(), h = mask.height();
    std::vector<bool> boundary(std::size_t(w) * h, false);
    any_fg = false;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (mask.at(x, y) != label)
                continue;
            any_fg = true;
            const bool edge = x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                              mask.at(x - 1, y) != label || mask.at(x + 1, y) != label ||
                              mask.at(x, y - 1) != label || mask.at(x, y + 1) != label;
            boundary[std::size_t(y) * w + x] = edge;
        }
    return boundary;
}

// Felzenszwalb & Huttenlocher 1D squared distance transform.
void edt_1d(const std::vector<double>& f, int n, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
            if (s > z[k])
                break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q)
            ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

// Squared Euclidean distance to the nearest seed, exact on integer grids.
std::vector<double> edt_2d(const std::vector<bool>& seeds, int w, int h) {
    std::vector<double> dist(std::size_t(w) * h);
    const int n_max = std::max(w, h);
    std::vector<double> f(n_max), d(n_max), z(n_max + 1);
    std::vector<int> v(n_max);

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y)
            f[y] = seeds[std::size_t(y) * w + x] ? 0.0 : kInf;
        edt_1d(f, h, d, v, z);
        for (int y = 0; y < h; ++y)
            dist[std::size_t(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x)
            f[x] = dist[std::size_t(y) * w + x];
        edt_1d(f, w, d, v, z);
        for (int x = 0; x < w; ++x)
            dist[std::size_t(y) * w + x] = d[x];
    }
    return dist;
}

double directed_mean_surface_distance(const std::vector<bool>& from, const std::vector<bool>& to,
                                      int w, int h) {
    const std::vector<double> dist = edt_2d(to, w, h);
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < from.size(); ++i)
        if (from[i]) {
            sum += std::sqrt(dist[i]);
            ++count;
        }
    return sum / double(count);
}

} // namespace

std::optional<double> asd(const LabelMask& pred, const LabelMask& gt, int label,
                          std::optional<double> spacing_mm) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw DimensionMismatch("asd: mask dims differ");
    bool pred_has = false, gt_has = false;
    const std::vector<bool> bp = boundary_of(pred, label, pred_has);
    const std::vector<bool> bg = boundary_of(gt, label, gt_has);
    if (!pred_has || !gt_has)
        return std::nullopt; // EmptyRegion sentinel

    const int w = pred.width(), h = pred.height();
    const double forward = directed_mean_surface_distance(bp, bg, w, h);
    const double backward = directed_mean_surface_distance(bg, bp, w, h);
    const double value = 0.5 * (forward + backward);
    return spacing_mm ? value * *spacing_mm : value;
}

std::vector<double> MetricsReport::dice_average_row() const {
    std::vector<double> row(bins.size(), 0.0);
    for (std::size_t b = 0; b < bins.size(); ++b) {
        double sum = 0.0;
        for (int label = 1; label < kNumLabels; ++label)
            sum += dice_mean[label][b];
        row[b] = sum / (kNumLabels - 1);
    }
    return row;
}

std::vector<std::optional<double>> MetricsReport::asd_average_row() const {
    std::vector<std::optional<double>> row(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
        double sum = 0.0;
        int n = 0;
        for (int label = 1; label < kNumLabels; ++label)
            if (asd_mean[label][b]) {
                sum += *asd_mean[label][b];
                ++n;
            }
        if (n > 0)
            row[b] = sum / n;
    }
    return row;
}

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

} // namespace

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    out << "metric,bone";
    for (double b : bins)
        out << ',' << fmt(b);
    out << '\n';

    for (int label = 1; label < kNumLabels; ++label) {
        out << "dice," << label_names()[label];
        for (std::size_t b = 0; b < bins.size(); ++b)
            out << ',' << fmt(dice_mean[label][b]);
        out << '\n';
    }
    out << "dice,Average";
    for (double v : dice_average_row())
        out << ',' << fmt(v);
    out << '\n';

    for (int label = 1; label < kNumLabels; ++label) {
        out << "asd," << label_names()[label];
        for (std::size_t b = 0; b < bins.size(); ++b)
            out << ',' << (asd_mean[label][b] ? fmt(*asd_mean[label][b]) : std::string());
        out << '\n';
    }
    out << "asd,Average";
    for (const auto& v : asd_average_row())
        out << ',' << (v ? fmt(*v) : std::string());
    out << '\n';
    return out.str();
}

MetricsReport evaluate(const std::vector<EvalItem>& items, std::optional<double> spacing_mm) {
    // Pool by |angle|: Table-style reporting folds the signed sweep.
    std::map<double, std::vector<const EvalItem*>> by_bin;
    for (const EvalItem& item : items)
        by_bin[std::fabs(item.angle_deg)].push_back(&item);

    MetricsReport report;
    report.asd_unit = spacing_mm ? "mm" : "px";
    report.dice_mean.assign(kNumLabels, std::vector<double>(by_bin.size(), 0.0));
    report.asd_mean.assign(kNumLabels,
                           std::vector<std::optional<double>>(by_bin.size(), std::nullopt));

    std::size_t b = 0;
    for (const auto& [bin_angle, bin_items] : by_bin) {
        report.bins.push_back(bin_angle);
        report.items_per_bin.push_back(int(bin_items.size()));
        for (int label = 1; label < kNumLabels; ++label) {
            double dice_sum = 0.0;
            double asd_sum = 0.0;
            int asd_n = 0;
            for (const EvalItem* item : bin_items) {
                dice_sum += dice(item->pred, item->gt, label);
                if (auto d = asd(item->pred, item->gt, label, spacing_mm)) {
                    asd_sum += *d;
                    ++asd_n;
                }
            }
            report.dice_mean[label][b] = dice_sum / double(bin_items.size());
            if (asd_n > 0)
                report.asd_mean[label][b] = asd_sum / asd_n;
        }
        ++b;
    }
    return report;
}

} // namespace xraysim
