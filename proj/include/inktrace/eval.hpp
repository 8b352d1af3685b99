#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "inktrace/reconstruct.hpp"

namespace inktrace {

// Pen-tablet style input: ordered strokes of (x, y) samples.
struct OnlinePoint {
    double x = 0, y = 0;
};
struct OnlineTrajectory {
    std::vector<std::vector<OnlinePoint>> strokes;
};

// "stroke_index x y" per line; blank lines and # comments ignored; strokes must be
// numbered in order of first appearance. Errors name the line.
OnlineTrajectory parse_online(const std::string& text, const std::string& name = "<memory>");
std::string write_online(const OnlineTrajectory& t);

// Rasterization of an on-line trajectory: every consecutive sample pair becomes an
// 8-connected line segment; per-pixel drawing order is kept per stroke (retraced
// stretches repeat pixels). Coordinates are scaled by `scale` and shifted so the ink
// bounding box starts at `margin`.
struct Rasterized {
    SkeletonImage image;
    std::vector<std::vector<Pixel>> strokes;   // aligned ground-truth pixel runs
};
Rasterized rasterize(const OnlineTrajectory& t, double scale = 1.0, int margin = 2);

// 8-connected line from a to b; pixel set independent of endpoint order.
std::vector<Pixel> bresenham_line(Pixel a, Pixel b);

// Arc-length cubic-spline resample of both sequences to the real sequence's length,
// then per-sequence min-max scaling into the unit box with one shared span for x and
// y (aspect preserved). Throws on empty input or zero spatial extent.
struct NormalizedPair {
    std::vector<double> real_x, real_y, est_x, est_y;
};
NormalizedPair normalize_pair(const std::vector<Pixel>& real_pts,
                              const std::vector<Pixel>& est_pts);

// Root-mean-square pointwise error over two equal-length coordinate sequences.
double rmse(const NormalizedPair& p);

// 10*log10(signal energy about the real sequence means / error energy); exact
// recovery returns the +120 dB cap, zero signal variance throws.
double snr_db(const NormalizedPair& p);

// Dynamic time warping distance with steps {up, left, diagonal} and Euclidean local
// cost; no windowing or path normalization.
double dtw(const NormalizedPair& p);

// Complexity score 0.6*components + 0.3*(3-rank clusters) + 0.1*(higher ranks).
double complexity(int n_components, int n_rank3, int n_rank_higher);

// Fraction of clusters whose resolved pairs equal the ground-truth entry/exit pairs.
struct AccuracyReport {
    double theta = 1.0;
    int solved = 0;
    int total = 0;
    std::map<int, std::pair<int, int>> by_rank;            // rank -> (solved, total)
    std::map<std::string, std::pair<int, int>> by_kind;    // kind -> (solved, total)
    int unmatched = 0;                                     // passages no branch explained
};
AccuracyReport cluster_accuracy(const Analysis& analysis,
                                const std::vector<ClusterResolution>& resolutions,
                                const std::vector<std::vector<Pixel>>& gt_strokes);

// L1 distance between the normalized component-count histograms, in [0, 2].
double component_count_abc(const std::vector<int>& real_counts,
                           const std::vector<int>& est_counts);

// A ready-to-evaluate specimen: ground truth plus its rasterization.
struct Specimen {
    std::string id;
    OnlineTrajectory truth;
    Rasterized raster;
};
Specimen make_specimen(std::string id, OnlineTrajectory truth, double scale = 1.0);

// Aggregate pairing accuracy of a corpus under one parameter set.
AccuracyReport corpus_accuracy(const std::vector<Specimen>& corpus, const ParamSet& params);

// theta across an inclusive value grid of one delta parameter; grades are the theta
// changes between consecutive grid values.
struct SensitivityRow {
    int delta_index = 0;
    std::vector<double> values;
    std::vector<double> theta;
    std::vector<double> grade;
};
SensitivityRow sensitivity_sweep(const std::vector<Specimen>& corpus, const ParamSet& params,
                                 int delta_index, double lo, double hi, int max_steps = 7);
std::vector<double> sweep_values(int delta_index, double lo, double hi, int max_steps = 7);

// theta under Gaussian weight perturbation: each row entry w is redrawn from
// N(w, (eta*w)^2) and the row renormalized by absolute values; `reps` repetitions per
// noise level with a deterministic seed.
struct StabilityCell {
    double eta = 0;
    std::vector<double> theta;                  // one per repetition
    double median = 0, q1 = 0, q3 = 0;
};
std::vector<StabilityCell> stability_sweep(const std::vector<Specimen>& corpus,
                                           const ParamSet& params,
                                           const std::vector<double>& etas, int reps,
                                           std::uint64_t seed);

// Per-image evaluation row and the banded summary used by the reports.
struct MetricRow {
    std::string id;
    int n_real = 0, n_est = 0;
    double theta = 1.0;
    double rmse = 0, snr = 0, dtw = 0;
    double complexity = 0;
    std::string band;      // low / medium / high by corpus tertiles
    std::string scenario;
};
struct BandSummary {
    std::string scenario, band;
    int images = 0;
    double rmse_mean = 0, rmse_se = 0;
    double snr_mean = 0, snr_se = 0;
    double dtw_mean = 0, dtw_se = 0;
    double theta_mean = 0;
};
struct EvaluationTable {
    std::vector<MetricRow> rows;
    std::vector<BandSummary> summary;
    double tertile_low = 0, tertile_high = 0;
};

MetricRow evaluate_specimen(const Specimen& specimen, const RecoveredTrajectory& recovered,
                            const ParamSet& params);
// Assigns bands by corpus tertiles and aggregates mean +- standard error per
// (scenario, band); single-row groups report zero standard error.
EvaluationTable tabulate(std::vector<MetricRow> rows);

std::string to_csv(const EvaluationTable& table);
std::string summary_csv(const EvaluationTable& table);
std::vector<MetricRow> parse_metric_csv(const std::string& text, const std::string& name);

}  // namespace inktrace
