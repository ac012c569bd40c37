// Per-bone Dice and average surface distance scoring for 2D multi-label
// masks, with angle-pooled report aggregation.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xraysim/labelproj.hpp"
#include "xraysim/types.hpp"

namespace xraysim {

/// 2|P∩G| / (|P|+|G|) over pixels equal to `label`.
/// Both regions empty -> 1.0; exactly one empty -> 0.0.
double dice(const LabelMask& pred, const LabelMask& gt, int label);

/// Symmetric average surface distance between the two boundaries: the mean of
/// the two directional means (boundary of P to nearest boundary pixel of G,
/// and the reverse). Boundary pixels are foreground pixels 4-adjacent to a
/// non-foreground pixel (out-of-image counts as non-foreground); distances are
/// between pixel centers, scaled by spacing_mm when given.
/// Returns nullopt (the EmptyRegion sentinel) when the label is absent from
/// either mask; sentinels are excluded from report means.
std::optional<double> asd(const LabelMask& pred, const LabelMask& gt, int label,
                          std::optional<double> spacing_mm = std::nullopt);

/// One scored item: everything evaluate() needs to pool it.
struct EvalItem {
    std::string subject;
    double angle_deg = 0.0;
    int copy = 0;
    LabelMask pred;
    LabelMask gt;
};

struct MetricsReport {
    /// Pooled |angle| bins, ascending.
    std::vector<double> bins;
    /// dice_mean[label][bin], asd_mean[label][bin] (nullopt if every item in
    /// the bin hit the EmptyRegion sentinel); labels 1..kNumLabels-1.
    std::vector<std::vector<double>> dice_mean;
    std::vector<std::vector<std::optional<double>>> asd_mean;
    std::vector<int> items_per_bin;
    std::string asd_unit = "px";

    /// Mean over bones of the per-bone bin means.
    std::vector<double> dice_average_row() const;
    std::vector<std::optional<double>> asd_average_row() const;

    /// Table layout: one row per bone plus Average, one column per bin,
    /// a Dice block then an ASD block.
    std::string to_csv() const;
    std::string to_json() const;
};

/// Score every item per bone, pool signed angles into |angle| bins, average
/// per (bone, bin).
MetricsReport evaluate(const std::vector<EvalItem>& items,
                       std::optional<double> spacing_mm = std::nullopt);

/// Manifest front end: pairs rows 1:1 by (subject, angle, copy), loads each
/// side's mask PNG (paths resolved against the manifest's directory) and
/// scores. Rows need subject, angle_deg, copy and mask fields; failed rows
/// (non-empty error) on the ground-truth side are skipped on both sides.
/// Throws PairingMismatch when keys do not align.
MetricsReport evaluate_manifests(const std::string& pred_manifest_path,
                                 const std::string& gt_manifest_path,
                                 std::optional<double> spacing_mm = std::nullopt);

} // namespace xraysim
