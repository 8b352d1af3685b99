#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "inktrace/pixel.hpp"

namespace inktrace {

// Angles live in degrees, normalized to (-180, 180] (the atan2 range).
double normalize_deg(double degrees);

// Absolute circular difference folded into [0, 180].
double fold180(double degrees);

// Deviation from a straight-through continuation: 0 when the two directions are
// exactly opposite, 180 when they coincide.
double straightness_deviation(double alpha_deg, double beta_deg);

// Direction of the vector (dx, dy) in degrees, y growing downward.
double direction_deg(double dx, double dy);

// Mean direction atan2(mean sin, mean cos). Throws std::runtime_error("undefined
// circular mean...") when the resultant magnitude is below 1e-12 (empty input or
// perfectly opposing angles).
double circular_mean(std::span<const double> angles_deg);

// Multiscale writing direction of a branch, pointing from the branch into the cluster.
// points walk outward from the anchor (at most `scales` of them). For each stride
// s = 1..scales the per-step angles (previous minus current, starting at the anchor)
// are unwrapped, resampled to `scales` entries between their min and max, and
// circular-averaged; the final angle is the circular mean across strides. Throws on an
// empty point list ("no external direction").
double external_angle(Pixel anchor, std::span<const Pixel> points, int scales);

// Circular mean of the directions from each point toward the cluster center of
// gravity (mean of the anchor coordinates). Points coincident with the center are
// skipped; throws when every point coincides.
double internal_angle(double ccg_row, double ccg_col, std::span<const Pixel> points);

// Dense adjacency over a cluster's pixel set: 2 for straight neighbors, 3 for
// diagonal neighbors, 0 otherwise. Symmetric with zero diagonal.
struct ClusterGraph {
    std::vector<Pixel> nodes;               // sorted
    std::vector<std::uint8_t> weight;       // nodes.size()^2, row-major

    static ClusterGraph build(std::span<const Pixel> pixels);
    int index_of(Pixel p) const;            // -1 when absent
    std::uint8_t edge(int i, int j) const { return weight[i * nodes.size() + j]; }
};

// Cheapest path between two cluster pixels under the 2/3 edge costs (one diagonal
// step beats two straight ones). Among equal-cost paths returns the lexicographically
// smallest pixel sequence (row, then col). Throws "cluster not connected" when no path
// exists and std::invalid_argument when an endpoint is not in the graph.
std::vector<Pixel> cluster_shortest_path(const ClusterGraph& graph, Pixel from, Pixel to);

// Turning strength of a pixel path in [0, 180]: 0 for <=2 points, else the maximum
// folded difference between adjacent smoothed tangent estimates taken at
// min(curvature_samples, length) equidistant sample points.
double curvature(std::span<const Pixel> path, int curvature_samples);

}  // namespace inktrace
