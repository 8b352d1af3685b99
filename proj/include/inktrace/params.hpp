#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace inktrace {

// One row of continuity-score weights; rows always sum to 1.
struct WeightRow {
    double ext = 0;   // external (writing direction) term
    double inte = 0;  // internal (center-of-gravity direction) term
    double cur = 0;   // curvature term
};

// Calibrated thresholds and weights for the whole pipeline. The delta fields keep
// their conventional 1-based numbering via delta(k) for sweeps and config files.
struct ParamSet {
    // 3-rank classification thresholds.
    double retrace_pi_max = 28;       // delta1: opposite-pair score cap (100/360 scale)
    double retrace_ep_dist = 20;      // delta2: max pixels from branch to its end point
    double retrace_curv_max = 20;     // delta3: max curvature (deg) of the retraced branch
    double tpattern_tol_pct = 3;      // delta4: collinearity tolerance around 180, percent
    double tpattern_pi_max = 19;      // delta5: stem-pair score cap (100/360 scale)
    double tpattern_min_dist = 8;     // delta6: min pixels to end points / 3-rank neighbors
    double coupled_shared_max = 50;   // delta7: max shared-branch length, pixels
    double coupled_pi_max = 40;       // delta8: fused matching score cap (100/360 scale)
    // Geometry / merging.
    double branch_window = 5;         // delta9: trace points per branch, also angle scales
    double brotherhood_dist = 10;     // delta10: corridor trace points below which clusters merge
    double curvature_samples = 10;    // delta11: sample count for curvature estimates

    WeightRow normal{0.20, 0.05, 0.75};
    WeightRow t_retrace{0.95, 0.00, 0.05};
    WeightRow coupled{0.40, 0.05, 0.55};
    WeightRow odd_rank{0.70, 0.05, 0.25};

    // Start-point prior, as fractions of image height/width.
    double start_mean_row_frac = 0.15;
    double start_mean_col_frac = 0.35;
    double start_sigma_row_frac = 0.10;
    double start_sigma_col_frac = 0.15;

    // Test knob: score fused double-junction matchings with min instead of max.
    bool coupled_use_min = false;

    double delta(int k) const;
    void set_delta(int k, double value);

    // Throws std::invalid_argument on out-of-range values (branch_window < 3,
    // non-positive thresholds, weight rows not summing to 1 within 1e-9, ...).
    void validate() const;

    // key=value text round-trip. Unknown keys, duplicate keys and malformed lines
    // throw with the line number.
    static ParamSet load(const std::string& text);
    static ParamSet load_file(const std::string& path);
    std::string save() const;

    // Applies one "key=value" assignment (the --set syntax). Accepts deltaK / δK,
    // weight rows as normal.ext etc., and the start model fractions.
    void set(const std::string& assignment);

    // FNV-1a over the canonical save() dump, as 16 hex digits.
    std::string hash() const;
};

// Inclusive default sweep range for delta k (1-based), used by the sensitivity scan.
std::array<double, 2> sweep_range(int k);

}  // namespace inktrace
