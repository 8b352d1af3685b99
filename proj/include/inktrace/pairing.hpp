#pragma once

#include <optional>
#include <string>
#include <vector>

#include "inktrace/geometry.hpp"
#include "inktrace/params.hpp"
#include "inktrace/skeleton.hpp"

namespace inktrace {

// Identifies a branch as (cluster id, index into that cluster's branch list).
struct BranchRef {
    int cluster = -1;
    int branch = -1;
    friend auto operator<=>(const BranchRef&, const BranchRef&) = default;
};

// Directional characterization of one branch.
struct BranchGeometry {
    double alpha = 0;                  // writing direction into the cluster
    double beta = 0;                   // direction toward the cluster center of gravity
    double self_curvature = 0;         // curvature of anchor + outward points
    std::vector<Pixel> points;         // geometry samples walking outward
};

// A cluster plus everything pairing needs: per-branch directions and, for every
// branch pair, the internal connection path and the curvature of the joined trace.
struct ClusterAnalysis {
    Cluster cluster;
    double ccg_row = 0, ccg_col = 0;   // mean of the anchor coordinates
    std::vector<BranchGeometry> geom;
    std::vector<std::vector<Pixel>> pair_path;   // r*r, canonical orientation i<j
    std::vector<double> pair_curv;               // r*r, symmetric

    const std::vector<Pixel>& path(int i, int j) const { return pair_path[i * rank() + j]; }
    double curv(int i, int j) const { return pair_curv[i * rank() + j]; }
    int rank() const { return static_cast<int>(cluster.branches.size()); }
};

// Full skeleton analysis: classification, final clusters (brotherhood merged,
// degenerates dissolved), membership, and per-cluster characterization.
struct Analysis {
    SkeletonImage image;
    ClassMap map;
    std::vector<ClusterAnalysis> clusters;       // index == cluster id
    ClusterLabels labels;
    int dissolved_clusters = 0;                  // degenerate clusters removed
    std::vector<Pixel> dissolved_pixels;         // their former pixels
};

Analysis analyze(const SkeletonImage& image, const ParamSet& params);

// Continuity score of joining branch i to branch j: the lower, the smoother.
struct PairScore {
    double ext_term = 0;   // weighted deviation of the external angles from opposite
    double int_term = 0;   // weighted deviation of the internal angles from opposite
    double cur_term = 0;   // weighted curvature of the joined trace
    double pi = 0;         // sum of the three
};

PairScore pair_score(const ClusterAnalysis& ca, int i, int j, const WeightRow& row);
// Pure-value form used by the scoring tests.
PairScore pair_score_values(double ext_dev, double int_dev, double curv, const WeightRow& row);

enum class ClusterKind : std::uint8_t { EvenRank, OddRank, TPattern, Retraced, Coupled, Normal3 };

struct ResolvedPair {
    BranchRef a, b;
    std::vector<Pixel> path;   // internal pixels from a's anchor to b's anchor
    double pi = 0;
};

// Entry/exit assignment for one cluster (or one fused double junction).
struct ClusterResolution {
    int cluster_id = -1;
    ClusterKind kind = ClusterKind::EvenRank;
    std::vector<ResolvedPair> pairs;
    std::vector<BranchRef> disjoint;             // branches no passage crosses
    std::vector<int> fused_members;              // both ids when two clusters fused
    std::vector<Pixel> fused_extra_pixels;       // shared corridor of a fused pair
};

// Greedy smallest-score pairing for even rank; the selected scores are non-decreasing.
ClusterResolution resolve_even_rank(const ClusterAnalysis& ca, const WeightRow& row);

// Greedy (rank-3)/2 pairings; the caller hands the residual trio to the 3-rank logic.
struct OddRankPartial {
    ClusterResolution partial;
    std::vector<int> residual;   // three remaining branch indices
};
OddRankPartial resolve_odd_rank(const ClusterAnalysis& ca, const WeightRow& row);

// Context a 3-rank decision needs beyond its own cluster.
struct ThreeRankContext {
    std::vector<std::optional<int>> dist_end_point;    // per branch
    std::vector<std::optional<int>> dist_3rank;        // per branch, pixels to a 3-rank cluster
};

struct ThreeRankDecision {
    ClusterKind kind = ClusterKind::Normal3;
    int retraced_branch = -1;            // Retraced
    int collinear_a = -1, collinear_b = -1;  // TPattern
};

// Tests in order: Retraced, TPattern, (Coupled handled by resolve_all), Normal3.
ThreeRankDecision classify_3rank(const ClusterAnalysis& ca, const std::vector<int>& branches,
                                 const ThreeRankContext& ctx, const ParamSet& params);

// Builds the pairs for a classified trio. Throws std::invalid_argument("use
// classify_3rank first") for ClusterKind::Coupled, which needs both clusters.
void resolve_3rank(const ClusterAnalysis& ca, const std::vector<int>& branches,
                   const ThreeRankDecision& decision, const ParamSet& params,
                   ClusterResolution& out);

// Resolves every cluster: even ranks first, then odd ranks above 3, then 3-rank
// clusters (retraced / T / coupled / normal). Returned list follows that order.
std::vector<ClusterResolution> resolve_all(const Analysis& analysis, const ParamSet& params);

const char* to_string(ClusterKind kind);

}  // namespace inktrace
