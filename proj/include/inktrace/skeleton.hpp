#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inktrace/pixel.hpp"

namespace inktrace {

// Binary raster of a thinned (1-px wide, 8-connected) drawing. ink[row*width+col] != 0
// means an ink pixel.
struct SkeletonImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> ink;

    static SkeletonImage blank(int width, int height);
    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    bool at(int row, int col) const { return in_bounds(row, col) && ink[row * width + col]; }
    bool at(Pixel p) const { return at(p.row, p.col); }
    void set(int row, int col, bool on);
};

enum class PixelClass : std::uint8_t { Background, EndPoint, TracePoint, BranchPoint };

// Per-pixel classification by ink-neighbor count: 1 -> EndPoint, 2 -> TracePoint,
// >=3 -> BranchPoint. Out-of-grid neighbors count as background.
struct ClassMap {
    int width = 0;
    int height = 0;
    std::vector<PixelClass> classes;

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    PixelClass at(int row, int col) const {
        return in_bounds(row, col) ? classes[row * width + col] : PixelClass::Background;
    }
    PixelClass at(Pixel p) const { return at(p.row, p.col); }
    bool ink(int row, int col) const { return at(row, col) != PixelClass::Background; }
    bool ink(Pixel p) const { return ink(p.row, p.col); }
    std::vector<Pixel> end_points() const;
    std::vector<Pixel> ink_pixels() const;
};

// Throws std::runtime_error naming the coordinates if the image contains an isolated
// ink pixel (zero ink neighbors).
ClassMap classify_points(const SkeletonImage& image);

// Exhausted marks a run longer than the window; the terminus fields below still
// describe where the run actually ends. ReachesCluster covers loops back to the
// owning cluster as well.
enum class BranchTerminal : std::uint8_t { ReachesEndPoint, ReachesCluster, Exhausted };

// One outgoing arm of a cluster: the walk from an anchor adjacency outward along trace
// points. trace_points holds at most the first `branch_window` trace pixels and never
// contains a branch point; distances come from walking the full run.
struct Branch {
    Pixel anchor;
    Pixel first_outward;
    std::vector<Pixel> trace_points;
    BranchTerminal terminal_kind = BranchTerminal::Exhausted;
    std::optional<Pixel> terminal;                 // end point or first pixel of reached cluster
    std::optional<int> distance_to_end_point;      // steps from anchor to the end point
    std::optional<int> distance_to_cluster;        // steps from anchor to the reached cluster
    std::optional<int> reached_cluster;            // id of the reached cluster
    int trace_run_length = 0;                      // trace pixels in the full run
};

// Maximal 8-connected set of BranchPoints, later grown by promoted (false) trace
// points and, after a brotherhood merge, by absorbed corridor pixels.
struct Cluster {
    int id = 0;
    std::vector<Pixel> cluster_points;             // sorted, includes false trace points
    std::vector<Pixel> false_trace_points;         // sorted subset of cluster_points
    std::vector<Pixel> anchor_points;              // sorted unique anchor pixels
    int rank = 0;                                  // number of anchor adjacencies (arms)
    bool degenerate = false;                       // rank < 2 after classification
    std::vector<Branch> branches;

    bool contains(Pixel p) const;
};

// Pixel -> cluster id (or -1) lookup.
struct ClusterLabels {
    int width = 0;
    int height = 0;
    std::vector<int> label;

    int at(int row, int col) const {
        return (row >= 0 && row < height && col >= 0 && col < width) ? label[row * width + col]
                                                                     : -1;
    }
    int at(Pixel p) const { return at(p.row, p.col); }
};

ClusterLabels make_labels(const ClassMap& map, const std::vector<Cluster>& clusters);

// Connected-component labeling of BranchPoints (8-connectivity, two scans with label
// equivalence merging). Clusters come back sorted by their smallest pixel, ids 0..n-1.
std::vector<Cluster> find_clusters(const ClassMap& map);

// Promotes false trace points to a fixed point (a trace point joins when both of its
// ink neighbors already belong to this cluster), then derives anchors/arms against the
// cluster's own membership. rank < 2 sets the degenerate flag.
void classify_cluster_pixels(Cluster& cluster, const ClassMap& map);

// Re-derives anchor points and rank with global membership (after promotions or merges
// elsewhere changed who is external).
void derive_anchors(Cluster& cluster, const ClassMap& map, const ClusterLabels& labels);

// Merges clusters separated by fewer than `brotherhood_dist` trace points along at
// least two connecting corridors; absorbed corridor pixels become promoted trace
// points of the merged cluster. Idempotent. Returns re-indexed clusters with anchors
// re-derived; branches are left empty for the caller to extract.
std::vector<Cluster> merge_brotherhood(std::vector<Cluster> clusters, const ClassMap& map,
                                       int brotherhood_dist);

// Walks every arm of the cluster and fills cluster.branches (sorted by anchor, then
// first outward pixel). branch_window caps the recorded trace points per branch.
void extract_branches(Cluster& cluster, const ClassMap& map, const ClusterLabels& labels,
                      int branch_window);

}  // namespace inktrace
