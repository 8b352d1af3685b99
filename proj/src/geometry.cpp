#include "inktrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace inktrace {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegPerRad = 180.0 / kPi;

// Circular mean that reports direction 0 on a vanishing resultant instead of
// throwing; the composite estimators below must not die on contrived symmetry.
double mean_angle_or_zero(const std::vector<double>& angles_deg) {
    double s = 0.0, c = 0.0;
    for (double a : angles_deg) {
        s += std::sin(a / kDegPerRad);
        c += std::cos(a / kDegPerRad);
    }
    if (angles_deg.empty() || std::hypot(s, c) / angles_deg.size() < 1e-12) return 0.0;
    return std::atan2(s, c) * kDegPerRad;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    if (n <= 0) return out;
    if (n == 1) return {lo};
    out.reserve(n);
    for (int j = 0; j < n; ++j) out.push_back(lo + (hi - lo) * j / (n - 1));
    return out;
}

// Removes +-360 jumps so min/max spans of a step-angle sequence are meaningful.
std::vector<double> unwrap_deg(const std::vector<double>& angles) {
    std::vector<double> out = angles;
    for (size_t i = 1; i < out.size(); ++i) {
        double prev = out[i - 1];
        while (out[i] - prev > 180.0) out[i] -= 360.0;
        while (out[i] - prev < -180.0) out[i] += 360.0;
    }
    return out;
}

}  // namespace

double normalize_deg(double degrees) {
    double x = std::fmod(degrees, 360.0);
    if (x > 180.0) x -= 360.0;
    if (x <= -180.0) x += 360.0;
    return x;
}

double fold180(double degrees) { return std::abs(normalize_deg(degrees)); }

double straightness_deviation(double alpha_deg, double beta_deg) {
    return std::abs(180.0 - fold180(alpha_deg - beta_deg));
}

double direction_deg(double dx, double dy) { return std::atan2(dy, dx) * kDegPerRad; }

double circular_mean(std::span<const double> angles_deg) {
    double s = 0.0, c = 0.0;
    for (double a : angles_deg) {
        s += std::sin(a / kDegPerRad);
        c += std::cos(a / kDegPerRad);
    }
    double n = static_cast<double>(angles_deg.size());
    if (angles_deg.empty() || std::hypot(s, c) / n < 1e-12)
        throw std::runtime_error("undefined circular mean (zero resultant)");
    return std::atan2(s, c) * kDegPerRad;
}

double external_angle(Pixel anchor, std::span<const Pixel> points, int scales) {
    if (points.empty()) throw std::runtime_error("no external direction");
    std::vector<Pixel> walk;
    walk.push_back(anchor);
    walk.insert(walk.end(), points.begin(), points.end());

    std::vector<double> per_stride;
    for (int s = 1; s <= scales; ++s) {
        std::vector<double> steps;
        for (size_t j = s; j < walk.size(); j += s) {
            Pixel prev = walk[j - s], cur = walk[j];
            steps.push_back(direction_deg(prev.col - cur.col, prev.row - cur.row));
        }
        if (steps.empty()) continue;
        std::vector<double> unwrapped = unwrap_deg(steps);
        auto [lo, hi] = std::minmax_element(unwrapped.begin(), unwrapped.end());
        per_stride.push_back(mean_angle_or_zero(linspace(*lo, *hi, scales)));
    }
    return mean_angle_or_zero(per_stride);
}

double internal_angle(double ccg_row, double ccg_col, std::span<const Pixel> points) {
    std::vector<double> dirs;
    for (Pixel p : points) {
        double dx = ccg_col - p.col, dy = ccg_row - p.row;
        if (std::hypot(dx, dy) < 1e-9) continue;  // coincident with the centre
        dirs.push_back(direction_deg(dx, dy));
    }
    return circular_mean(dirs);
}

ClusterGraph ClusterGraph::build(std::span<const Pixel> pixels) {
    ClusterGraph g;
    g.nodes.assign(pixels.begin(), pixels.end());
    std::sort(g.nodes.begin(), g.nodes.end());
    g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
    size_t n = g.nodes.size();
    g.weight.assign(n * n, 0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            std::uint8_t w = 0;
            if (adjacent4(g.nodes[i], g.nodes[j]))
                w = 2;
            else if (adjacent8(g.nodes[i], g.nodes[j]))
                w = 3;
            g.weight[i * n + j] = w;
            g.weight[j * n + i] = w;
        }
    }
    return g;
}

int ClusterGraph::index_of(Pixel p) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), p);
    if (it == nodes.end() || *it != p) return -1;
    return static_cast<int>(it - nodes.begin());
}

namespace {

std::vector<long> dijkstra(const ClusterGraph& g, int source) {
    size_t n = g.nodes.size();
    constexpr long kInf = std::numeric_limits<long>::max() / 4;
    std::vector<long> dist(n, kInf);
    std::vector<char> done(n, 0);
    dist[source] = 0;
    for (size_t iter = 0; iter < n; ++iter) {
        int u = -1;
        long best = kInf;
        for (size_t i = 0; i < n; ++i)
            if (!done[i] && dist[i] < best) {
                best = dist[i];
                u = static_cast<int>(i);
            }
        if (u < 0) break;
        done[u] = 1;
        for (size_t v = 0; v < n; ++v) {
            std::uint8_t w = g.edge(u, static_cast<int>(v));
            if (w && dist[u] + w < dist[v]) dist[v] = dist[u] + w;
        }
    }
    return dist;
}

}  // namespace

std::vector<Pixel> cluster_shortest_path(const ClusterGraph& graph, Pixel from, Pixel to) {
    int s = graph.index_of(from);
    int t = graph.index_of(to);
    if (s < 0 || t < 0) throw std::invalid_argument("path endpoint not in cluster graph");
    if (s == t) return {from};

    std::vector<long> dist_from = dijkstra(graph, s);
    constexpr long kInf = std::numeric_limits<long>::max() / 4;
    if (dist_from[t] >= kInf) throw std::runtime_error("cluster not connected");
    std::vector<long> dist_to = dijkstra(graph, t);
    long total = dist_from[t];

    // Greedy lexicographic walk: at every step take the smallest pixel that still
    // completes an optimal path. nodes are sorted, so the first feasible index wins.
    std::vector<Pixel> path{from};
    int u = s;
    long g = 0;
    while (u != t) {
        int next = -1;
        for (size_t v = 0; v < graph.nodes.size(); ++v) {
            std::uint8_t w = graph.edge(u, static_cast<int>(v));
            if (w && g + w + dist_to[v] == total) {
                next = static_cast<int>(v);
                break;
            }
        }
        if (next < 0) throw std::runtime_error("cluster not connected");
        g += graph.edge(u, next);
        u = next;
        path.push_back(graph.nodes[u]);
    }
    return path;
}

double curvature(std::span<const Pixel> path, int curvature_samples) {
    int m = static_cast<int>(path.size());
    if (m <= 2) return 0.0;
    int n = std::min(curvature_samples, m);

    // Equidistant 1-based sample indices; the stride is >= 1 so they never repeat.
    std::vector<int> idx;
    for (double v : linspace(1.0, m, n)) idx.push_back(static_cast<int>(std::floor(v)) - 1);

    std::vector<double> smoothed;  // one tangent estimate per sample
    for (int l = 0; l < n; ++l) {
        std::vector<double> per_radius;
        for (int a = 1; a <= curvature_samples; ++a) {
            std::vector<double> dirs;
            for (int f = 1; f <= std::min(n - 1 - l, a); ++f) {
                Pixel p = path[idx[l]], q = path[idx[l + f]];
                dirs.push_back(direction_deg(q.col - p.col, q.row - p.row));
            }
            for (int b = 1; b <= std::min(l, a); ++b) {
                Pixel p = path[idx[l - b]], q = path[idx[l]];
                dirs.push_back(direction_deg(q.col - p.col, q.row - p.row));
            }
            per_radius.push_back(mean_angle_or_zero(dirs));
        }
        smoothed.push_back(mean_angle_or_zero(per_radius));
    }

    double worst = 0.0;
    for (int l = 0; l + 1 < n; ++l)
        worst = std::max(worst, fold180(smoothed[l + 1] - smoothed[l]));
    return worst;
}

}  // namespace inktrace
