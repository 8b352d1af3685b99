#include "inktrace/skeleton.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace inktrace {

SkeletonImage SkeletonImage::blank(int width, int height) {
    SkeletonImage img;
    img.width = width;
    img.height = height;
    img.ink.assign(static_cast<size_t>(width) * height, 0);
    return img;
}

void SkeletonImage::set(int row, int col, bool on) {
    if (!in_bounds(row, col)) throw std::out_of_range("SkeletonImage::set out of bounds");
    ink[row * width + col] = on ? 1 : 0;
}

std::vector<Pixel> ClassMap::end_points() const {
    std::vector<Pixel> out;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            if (classes[r * width + c] == PixelClass::EndPoint) out.push_back({r, c});
    return out;
}

std::vector<Pixel> ClassMap::ink_pixels() const {
    std::vector<Pixel> out;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            if (classes[r * width + c] != PixelClass::Background) out.push_back({r, c});
    return out;
}

ClassMap classify_points(const SkeletonImage& image) {
    ClassMap map;
    map.width = image.width;
    map.height = image.height;
    map.classes.assign(static_cast<size_t>(image.width) * image.height, PixelClass::Background);
    for (int r = 0; r < image.height; ++r) {
        for (int c = 0; c < image.width; ++c) {
            if (!image.at(r, c)) continue;
            int neighbors = 0;
            for (auto [dr, dc] : kNeighbors8)
                if (image.at(r + dr, c + dc)) ++neighbors;
            if (neighbors == 0)
                throw std::runtime_error("isolated pixel at row " + std::to_string(r) + ", col " +
                                         std::to_string(c));
            map.classes[r * image.width + c] = neighbors == 1   ? PixelClass::EndPoint
                                               : neighbors == 2 ? PixelClass::TracePoint
                                                                : PixelClass::BranchPoint;
        }
    }
    return map;
}

bool Cluster::contains(Pixel p) const {
    return std::binary_search(cluster_points.begin(), cluster_points.end(), p);
}

ClusterLabels make_labels(const ClassMap& map, const std::vector<Cluster>& clusters) {
    ClusterLabels labels;
    labels.width = map.width;
    labels.height = map.height;
    labels.label.assign(static_cast<size_t>(map.width) * map.height, -1);
    for (const Cluster& cl : clusters)
        for (Pixel p : cl.cluster_points) labels.label[p.row * map.width + p.col] = cl.id;
    return labels;
}

namespace {

// Union-find over small dense ids.
struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// The two ink neighbors of a trace point, in scan order.
std::vector<Pixel> ink_neighbors(const ClassMap& map, Pixel p) {
    std::vector<Pixel> out;
    for (auto [dr, dc] : kNeighbors8)
        if (map.ink(p.row + dr, p.col + dc)) out.push_back({p.row + dr, p.col + dc});
    return out;
}

void sort_unique(std::vector<Pixel>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Grows `members` by trace points whose ink neighbors all sit in `members` already,
// until nothing more joins. Returns the promoted pixels.
std::vector<Pixel> promote_false_traces(const ClassMap& map, std::set<Pixel>& members) {
    std::vector<Pixel> promoted;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Pixel> frontier;
        for (Pixel m : members) {
            for (auto [dr, dc] : kNeighbors8) {
                Pixel n{m.row + dr, m.col + dc};
                if (map.at(n) != PixelClass::TracePoint || members.count(n)) continue;
                frontier.push_back(n);
            }
        }
        sort_unique(frontier);
        for (Pixel t : frontier) {
            bool all_in = true;
            for (Pixel nb : ink_neighbors(map, t))
                if (!members.count(nb)) all_in = false;
            if (all_in) {
                members.insert(t);
                promoted.push_back(t);
                changed = true;
            }
        }
    }
    std::sort(promoted.begin(), promoted.end());
    return promoted;
}

// Arms of a membership set: (member, external ink neighbor) adjacencies in scan order.
// After promotion every external trace point touches exactly one member, so each pair
// is a distinct outgoing arm.
std::vector<std::pair<Pixel, Pixel>> external_arms(const ClassMap& map,
                                                   const std::set<Pixel>& members) {
    std::vector<std::pair<Pixel, Pixel>> arms;
    for (Pixel m : members) {
        for (auto [dr, dc] : kNeighbors8) {
            Pixel n{m.row + dr, m.col + dc};
            if (map.ink(n) && !members.count(n)) arms.emplace_back(m, n);
        }
    }
    std::sort(arms.begin(), arms.end());
    return arms;
}

void derive_from_members(Cluster& cluster, const ClassMap& map, const std::set<Pixel>& members) {
    auto arms = external_arms(map, members);
    cluster.anchor_points.clear();
    for (const auto& [m, n] : arms) cluster.anchor_points.push_back(m);
    sort_unique(cluster.anchor_points);
    cluster.rank = static_cast<int>(arms.size());
    cluster.degenerate = cluster.rank < 2;
}

}  // namespace

void classify_cluster_pixels(Cluster& cluster, const ClassMap& map) {
    std::set<Pixel> members(cluster.cluster_points.begin(), cluster.cluster_points.end());
    std::vector<Pixel> promoted = promote_false_traces(map, members);
    cluster.false_trace_points.insert(cluster.false_trace_points.end(), promoted.begin(),
                                      promoted.end());
    sort_unique(cluster.false_trace_points);
    cluster.cluster_points.assign(members.begin(), members.end());
    derive_from_members(cluster, map, members);
}

void derive_anchors(Cluster& cluster, const ClassMap& map, const ClusterLabels& labels) {
    (void)labels;
    std::set<Pixel> members(cluster.cluster_points.begin(), cluster.cluster_points.end());
    derive_from_members(cluster, map, members);
}

std::vector<Cluster> find_clusters(const ClassMap& map) {
    // First scan: provisional labels for branch points, merging across the four
    // already-visited neighbors.
    std::vector<int> label(static_cast<size_t>(map.width) * map.height, -1);
    std::vector<int> parent;
    DisjointSet ds(0);
    for (int r = 0; r < map.height; ++r) {
        for (int c = 0; c < map.width; ++c) {
            if (map.at(r, c) != PixelClass::BranchPoint) continue;
            int best = -1;
            const int prior[4][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}};
            for (auto [dr, dc] : prior) {
                int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= map.height || cc < 0 || cc >= map.width) continue;
                int lb = label[rr * map.width + cc];
                if (lb < 0) continue;
                if (best < 0)
                    best = lb;
                else
                    ds.unite(best, lb);
            }
            if (best < 0) {
                best = static_cast<int>(ds.parent.size());
                ds.parent.push_back(best);
            }
            label[r * map.width + c] = best;
        }
    }
    // Second scan: resolve equivalences and bucket pixels per root.
    std::map<int, std::vector<Pixel>> buckets;
    for (int r = 0; r < map.height; ++r)
        for (int c = 0; c < map.width; ++c)
            if (label[r * map.width + c] >= 0)
                buckets[ds.find(label[r * map.width + c])].push_back({r, c});

    std::vector<Cluster> clusters;
    for (auto& [root, pixels] : buckets) {
        Cluster cl;
        cl.cluster_points = std::move(pixels);  // scan order is already sorted
        classify_cluster_pixels(cl, map);
        clusters.push_back(std::move(cl));
    }
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        return a.cluster_points.front() < b.cluster_points.front();
    });
    for (size_t i = 0; i < clusters.size(); ++i) clusters[i].id = static_cast<int>(i);
    return clusters;
}

namespace {

struct Corridor {
    int a = 0;
    int b = 0;                   // cluster ids with a <= b
    std::vector<Pixel> pixels;   // trace pixels between the two, in walk order
};

// Walks outward from (anchor, first) along unlabeled trace points. Returns the run and
// the terminus pixel. The walk always ends at an end point or a labeled pixel; the
// step cap only guards against a corrupted map.
struct RunResult {
    std::vector<Pixel> run;
    Pixel terminus;
    bool hit_end_point = false;
    bool hit_cluster = false;
};

RunResult walk_run(const ClassMap& map, const ClusterLabels& labels, Pixel anchor, Pixel first) {
    RunResult res;
    Pixel prev = anchor, cur = first;
    long cap = static_cast<long>(map.width) * map.height + 2;
    for (long step = 0; step < cap; ++step) {
        if (labels.at(cur) >= 0) {
            res.terminus = cur;
            res.hit_cluster = true;
            return res;
        }
        if (map.at(cur) == PixelClass::EndPoint) {
            res.terminus = cur;
            res.hit_end_point = true;
            return res;
        }
        if (map.at(cur) != PixelClass::TracePoint) {
            // Unlabeled branch-point tangle (a dissolved blob): the arm just ends here.
            res.terminus = cur;
            return res;
        }
        res.run.push_back(cur);
        Pixel next = cur;
        bool found = false;
        for (Pixel nb : ink_neighbors(map, cur)) {
            if (nb != prev) {
                next = nb;
                found = true;
                break;
            }
        }
        if (!found) {
            res.terminus = cur;
            return res;  // degenerate map; treat as exhausted
        }
        prev = cur;
        cur = next;
    }
    res.terminus = cur;
    return res;
}

std::vector<Corridor> collect_corridors(const std::vector<Cluster>& clusters, const ClassMap& map,
                                        const ClusterLabels& labels) {
    std::vector<Corridor> corridors;
    std::set<std::vector<Pixel>> seen;  // keyed by sorted pixel set
    for (const Cluster& cl : clusters) {
        std::set<Pixel> members(cl.cluster_points.begin(), cl.cluster_points.end());
        for (const auto& [m, n] : external_arms(map, members)) {
            RunResult res = walk_run(map, labels, m, n);
            if (!res.hit_cluster) continue;
            int other = labels.at(res.terminus);
            if (other == cl.id) continue;  // loop arm, not a corridor
            std::vector<Pixel> key = res.run;
            std::sort(key.begin(), key.end());
            if (!seen.insert(key).second) continue;
            Corridor cor;
            cor.a = std::min(cl.id, other);
            cor.b = std::max(cl.id, other);
            cor.pixels = std::move(res.run);
            corridors.push_back(std::move(cor));
        }
    }
    return corridors;
}

}  // namespace

std::vector<Cluster> merge_brotherhood(std::vector<Cluster> clusters, const ClassMap& map,
                                       int brotherhood_dist) {
    if (clusters.empty()) return clusters;
    ClusterLabels labels = make_labels(map, clusters);
    std::vector<Corridor> corridors = collect_corridors(clusters, map, labels);

    // Group clusters joined by at least two short corridors; merging can qualify new
    // pairs, so repeat until the grouping stops changing.
    DisjointSet ds(static_cast<int>(clusters.size()));
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::pair<int, int>, int> short_counts;
        for (const Corridor& cor : corridors) {
            if (static_cast<int>(cor.pixels.size()) >= brotherhood_dist) continue;
            int ra = ds.find(cor.a), rb = ds.find(cor.b);
            if (ra == rb) continue;
            ++short_counts[{std::min(ra, rb), std::max(ra, rb)}];
        }
        for (const auto& [pair, count] : short_counts) {
            if (count >= 2) {
                ds.unite(pair.first, pair.second);
                changed = true;
            }
        }
    }

    // Rebuild one cluster per group; short corridors inside a group are absorbed as
    // promoted trace points.
    std::map<int, Cluster> merged;
    for (const Cluster& cl : clusters) {
        Cluster& dst = merged[ds.find(cl.id)];
        dst.cluster_points.insert(dst.cluster_points.end(), cl.cluster_points.begin(),
                                  cl.cluster_points.end());
        dst.false_trace_points.insert(dst.false_trace_points.end(), cl.false_trace_points.begin(),
                                      cl.false_trace_points.end());
    }
    for (const Corridor& cor : corridors) {
        if (static_cast<int>(cor.pixels.size()) >= brotherhood_dist) continue;
        int root = ds.find(cor.a);
        if (root != ds.find(cor.b)) continue;
        Cluster& dst = merged[root];
        dst.cluster_points.insert(dst.cluster_points.end(), cor.pixels.begin(), cor.pixels.end());
        dst.false_trace_points.insert(dst.false_trace_points.end(), cor.pixels.begin(),
                                      cor.pixels.end());
    }

    std::vector<Cluster> out;
    for (auto& [root, cl] : merged) {
        sort_unique(cl.cluster_points);
        sort_unique(cl.false_trace_points);
        std::set<Pixel> members(cl.cluster_points.begin(), cl.cluster_points.end());
        // Absorption can strand single trace points between members; fold them in.
        std::vector<Pixel> promoted = promote_false_traces(map, members);
        cl.cluster_points.assign(members.begin(), members.end());
        cl.false_trace_points.insert(cl.false_trace_points.end(), promoted.begin(),
                                     promoted.end());
        sort_unique(cl.false_trace_points);
        derive_from_members(cl, map, members);
        out.push_back(std::move(cl));
    }
    std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
        return a.cluster_points.front() < b.cluster_points.front();
    });
    for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

void extract_branches(Cluster& cluster, const ClassMap& map, const ClusterLabels& labels,
                      int branch_window) {
    cluster.branches.clear();
    std::set<Pixel> members(cluster.cluster_points.begin(), cluster.cluster_points.end());
    for (const auto& [m, n] : external_arms(map, members)) {
        Branch br;
        br.anchor = m;
        br.first_outward = n;
        RunResult res = walk_run(map, labels, m, n);
        br.trace_run_length = static_cast<int>(res.run.size());
        br.trace_points.assign(res.run.begin(),
                               res.run.begin() + std::min<size_t>(res.run.size(), branch_window));
        if (res.hit_end_point) {
            br.terminal = res.terminus;
            br.distance_to_end_point = br.trace_run_length + 1;
            br.terminal_kind = BranchTerminal::ReachesEndPoint;
        } else if (res.hit_cluster) {
            br.terminal = res.terminus;
            br.distance_to_cluster = br.trace_run_length + 1;
            br.reached_cluster = labels.at(res.terminus);
            br.terminal_kind = BranchTerminal::ReachesCluster;
        } else {
            br.terminal_kind = BranchTerminal::Exhausted;
        }
        if (br.trace_run_length > branch_window) br.terminal_kind = BranchTerminal::Exhausted;
        cluster.branches.push_back(std::move(br));
    }
    // external_arms already yields (anchor, first_outward) in sorted order
}

}  // namespace inktrace
