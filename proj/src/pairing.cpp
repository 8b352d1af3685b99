#include "inktrace/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace inktrace {

namespace {

constexpr double kPercentScale = 100.0 / 360.0;

int window_of(const ParamSet& params) { return static_cast<int>(params.branch_window); }
int curv_samples(const ParamSet& params) { return static_cast<int>(params.curvature_samples); }

// Geometry sample list of a branch: the recorded trace window plus, when the run ends
// inside the window, the terminal end point. An arm with nothing else falls back to
// its abutting pixel so it still has a direction.
std::vector<Pixel> geometry_points(const Branch& br, int window) {
    std::vector<Pixel> pts = br.trace_points;
    if (br.terminal_kind == BranchTerminal::ReachesEndPoint && br.trace_run_length < window)
        pts.push_back(*br.terminal);
    if (pts.empty()) pts.push_back(br.first_outward);
    return pts;
}

// Joined trace of two branches: outward points of i reversed, the internal anchor to
// anchor path, then outward points of j.
std::vector<Pixel> joined_trace(const BranchGeometry& gi, const BranchGeometry& gj,
                                const std::vector<Pixel>& path) {
    std::vector<Pixel> trace(gi.points.rbegin(), gi.points.rend());
    trace.insert(trace.end(), path.begin(), path.end());
    trace.insert(trace.end(), gj.points.begin(), gj.points.end());
    return trace;
}

BranchGeometry make_geometry(const Branch& br, double ccg_row, double ccg_col,
                             const ParamSet& params) {
    BranchGeometry g;
    g.points = geometry_points(br, window_of(params));
    g.alpha = external_angle(br.anchor, g.points, window_of(params));
    try {
        g.beta = internal_angle(ccg_row, ccg_col, g.points);
    } catch (const std::runtime_error&) {
        g.beta = normalize_deg(g.alpha + 180.0);  // degenerate: assume straight-through
    }
    std::vector<Pixel> own{br.anchor};
    own.insert(own.end(), g.points.begin(), g.points.end());
    g.self_curvature = curvature(own, curv_samples(params));
    return g;
}

// Fills geom, ccg and the pairwise path/curvature tables of a ClusterAnalysis whose
// cluster and branches are already set. pixels adds extra connectivity (fused
// corridors) on top of the cluster's own points.
void characterize(ClusterAnalysis& ca, const ParamSet& params,
                  const std::vector<Pixel>& extra_pixels = {},
                  const std::vector<Pixel>* ccg_anchors = nullptr) {
    const std::vector<Pixel>& anchors = ccg_anchors ? *ccg_anchors : ca.cluster.anchor_points;
    double sr = 0, sc = 0;
    for (Pixel a : anchors) {
        sr += a.row;
        sc += a.col;
    }
    ca.ccg_row = anchors.empty() ? 0 : sr / anchors.size();
    ca.ccg_col = anchors.empty() ? 0 : sc / anchors.size();

    ca.geom.clear();
    for (const Branch& br : ca.cluster.branches)
        ca.geom.push_back(make_geometry(br, ca.ccg_row, ca.ccg_col, params));

    std::vector<Pixel> pixels = ca.cluster.cluster_points;
    pixels.insert(pixels.end(), extra_pixels.begin(), extra_pixels.end());
    ClusterGraph graph = ClusterGraph::build(pixels);

    int r = ca.rank();
    ca.pair_path.assign(static_cast<size_t>(r) * r, {});
    ca.pair_curv.assign(static_cast<size_t>(r) * r, 0.0);
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            std::vector<Pixel> path = cluster_shortest_path(
                graph, ca.cluster.branches[i].anchor, ca.cluster.branches[j].anchor);
            double c = curvature(joined_trace(ca.geom[i], ca.geom[j], path),
                                 curv_samples(params));
            ca.pair_curv[i * r + j] = c;
            ca.pair_curv[j * r + i] = c;
            ca.pair_path[j * r + i] = {path.rbegin(), path.rend()};
            ca.pair_path[i * r + j] = std::move(path);
        }
    }
}

}  // namespace

Analysis analyze(const SkeletonImage& image, const ParamSet& params) {
    Analysis out;
    out.image = image;
    out.map = classify_points(image);

    std::vector<Cluster> clusters = find_clusters(out.map);
    clusters = merge_brotherhood(clusters, out.map, static_cast<int>(params.brotherhood_dist));

    std::vector<Cluster> live;
    for (Cluster& cl : clusters) {
        if (cl.degenerate) {
            ++out.dissolved_clusters;
            out.dissolved_pixels.insert(out.dissolved_pixels.end(), cl.cluster_points.begin(),
                                        cl.cluster_points.end());
        } else {
            live.push_back(std::move(cl));
        }
    }
    for (size_t i = 0; i < live.size(); ++i) live[i].id = static_cast<int>(i);
    out.labels = make_labels(out.map, live);
    std::sort(out.dissolved_pixels.begin(), out.dissolved_pixels.end());

    for (Cluster& cl : live) {
        extract_branches(cl, out.map, out.labels, window_of(params));
        ClusterAnalysis ca;
        ca.cluster = std::move(cl);
        characterize(ca, params);
        out.clusters.push_back(std::move(ca));
    }
    return out;
}

PairScore pair_score_values(double ext_dev, double int_dev, double curv, const WeightRow& row) {
    PairScore s;
    s.ext_term = row.ext * ext_dev;
    s.int_term = row.inte * int_dev;
    s.cur_term = row.cur * curv;
    s.pi = s.ext_term + s.int_term + s.cur_term;
    return s;
}

PairScore pair_score(const ClusterAnalysis& ca, int i, int j, const WeightRow& row) {
    if (i > j) std::swap(i, j);  // canonical orientation keeps the score exactly symmetric
    double ext_dev = straightness_deviation(ca.geom[i].alpha, ca.geom[j].alpha);
    double int_dev = straightness_deviation(ca.geom[i].beta, ca.geom[j].beta);
    return pair_score_values(ext_dev, int_dev, ca.curv(i, j), row);
}

namespace {

// Greedy minimum-score pairing over `avail`, `rounds` times. Ties fall to the
// lexicographically smallest index pair.
std::vector<ResolvedPair> greedy_pairs(const ClusterAnalysis& ca, const WeightRow& row,
                                       std::vector<int>& avail, int rounds) {
    std::vector<ResolvedPair> out;
    for (int round = 0; round < rounds; ++round) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (size_t x = 0; x < avail.size(); ++x) {
            for (size_t y = x + 1; y < avail.size(); ++y) {
                double pi = pair_score(ca, avail[x], avail[y], row).pi;
                if (pi < best) {
                    best = pi;
                    bi = avail[x];
                    bj = avail[y];
                }
            }
        }
        if (bi < 0) break;
        ResolvedPair rp;
        rp.a = {ca.cluster.id, bi};
        rp.b = {ca.cluster.id, bj};
        rp.path = ca.path(bi, bj);
        rp.pi = best;
        out.push_back(std::move(rp));
        std::erase(avail, bi);
        std::erase(avail, bj);
    }
    return out;
}

}  // namespace

ClusterResolution resolve_even_rank(const ClusterAnalysis& ca, const WeightRow& row) {
    int r = ca.rank();
    if (r < 2 || r % 2 != 0) throw std::invalid_argument("resolve_even_rank needs an even rank");
    ClusterResolution res;
    res.cluster_id = ca.cluster.id;
    res.kind = ClusterKind::EvenRank;
    std::vector<int> avail(r);
    for (int i = 0; i < r; ++i) avail[i] = i;
    res.pairs = greedy_pairs(ca, row, avail, r / 2);
    return res;
}

OddRankPartial resolve_odd_rank(const ClusterAnalysis& ca, const WeightRow& row) {
    int r = ca.rank();
    if (r < 5 || r % 2 == 0) throw std::invalid_argument("resolve_odd_rank needs odd rank >= 5");
    OddRankPartial out;
    out.partial.cluster_id = ca.cluster.id;
    out.partial.kind = ClusterKind::OddRank;
    std::vector<int> avail(r);
    for (int i = 0; i < r; ++i) avail[i] = i;
    out.partial.pairs = greedy_pairs(ca, row, avail, (r - 3) / 2);
    out.residual = avail;
    std::sort(out.residual.begin(), out.residual.end());
    return out;
}

ThreeRankDecision classify_3rank(const ClusterAnalysis& ca, const std::vector<int>& branches,
                                 const ThreeRankContext& ctx, const ParamSet& params) {
    if (branches.size() != 3) throw std::invalid_argument("classify_3rank needs three branches");
    ThreeRankDecision decision;

    // Retraced: a short straight arm to an end point whose removal leaves a smooth
    // opposite pair. Closest end point wins, then the flattest arm.
    int best_k = -1;
    for (int k : branches) {
        const auto& d_ep = ctx.dist_end_point[k];
        if (!d_ep || *d_ep > params.retrace_ep_dist) continue;
        if (ca.geom[k].self_curvature > params.retrace_curv_max) continue;
        std::vector<int> others;
        for (int b : branches)
            if (b != k) others.push_back(b);
        double pi = pair_score(ca, others[0], others[1], params.t_retrace).pi * kPercentScale;
        if (pi > params.retrace_pi_max) continue;
        if (best_k < 0) {
            best_k = k;
            continue;
        }
        auto key = [&](int b) {
            return std::tuple(*ctx.dist_end_point[b], ca.geom[b].self_curvature, b);
        };
        if (key(k) < key(best_k)) best_k = k;
    }
    if (best_k >= 0) {
        decision.kind = ClusterKind::Retraced;
        decision.retraced_branch = best_k;
        return decision;
    }

    // T pattern: two arms continue each other while the third joins them steeply, and
    // no arm sits right next to an end point or another junction.
    bool far_enough = true;
    for (int b : branches) {
        double nearest = std::numeric_limits<double>::infinity();
        if (ctx.dist_end_point[b]) nearest = std::min(nearest, double(*ctx.dist_end_point[b]));
        if (ctx.dist_3rank[b]) nearest = std::min(nearest, double(*ctx.dist_3rank[b]));
        if (nearest < params.tpattern_min_dist) far_enough = false;
    }
    if (far_enough) {
        double band = 180.0 * params.tpattern_tol_pct / 100.0;
        double best_gap = std::numeric_limits<double>::infinity();
        for (size_t x = 0; x < 3; ++x) {
            for (size_t y = x + 1; y < 3; ++y) {
                int i = branches[x], j = branches[y];
                int k = branches[3 - x - y];
                double fold = fold180(ca.geom[i].alpha - ca.geom[j].alpha);
                if (std::abs(180.0 - fold) > band) continue;
                double stem_i = pair_score(ca, k, i, params.normal).pi * kPercentScale;
                double stem_j = pair_score(ca, k, j, params.normal).pi * kPercentScale;
                if (stem_i > params.tpattern_pi_max || stem_j > params.tpattern_pi_max) continue;
                if (std::abs(180.0 - fold) < best_gap) {
                    best_gap = std::abs(180.0 - fold);
                    decision.collinear_a = i;
                    decision.collinear_b = j;
                }
            }
        }
        if (decision.collinear_a >= 0) {
            decision.kind = ClusterKind::TPattern;
            return decision;
        }
    }

    decision.kind = ClusterKind::Normal3;
    return decision;
}

void resolve_3rank(const ClusterAnalysis& ca, const std::vector<int>& branches,
                   const ThreeRankDecision& decision, const ParamSet& params,
                   ClusterResolution& out) {
    auto push_pair = [&](int i, int j, const WeightRow& row) {
        ResolvedPair rp;
        rp.a = {ca.cluster.id, i};
        rp.b = {ca.cluster.id, j};
        rp.path = ca.path(i, j);
        rp.pi = pair_score(ca, i, j, row).pi;
        out.pairs.push_back(std::move(rp));
    };

    switch (decision.kind) {
        case ClusterKind::Retraced: {
            int k = decision.retraced_branch;
            std::vector<int> others;
            for (int b : branches)
                if (b != k) others.push_back(b);
            std::sort(others.begin(), others.end());
            // The passage runs i -> k (tail out), then k -> j (tail back).
            push_pair(others[0], k, params.t_retrace);
            push_pair(k, others[1], params.t_retrace);
            return;
        }
        case ClusterKind::TPattern: {
            int i = decision.collinear_a, j = decision.collinear_b;
            push_pair(std::min(i, j), std::max(i, j), params.t_retrace);
            for (int b : branches)
                if (b != i && b != j) out.disjoint.push_back({ca.cluster.id, b});
            return;
        }
        case ClusterKind::Normal3: {
            double best = std::numeric_limits<double>::infinity();
            int bi = -1, bj = -1;
            for (size_t x = 0; x < 3; ++x) {
                for (size_t y = x + 1; y < 3; ++y) {
                    double pi = pair_score(ca, branches[x], branches[y], params.normal).pi;
                    if (pi < best) {
                        best = pi;
                        bi = branches[x];
                        bj = branches[y];
                    }
                }
            }
            push_pair(bi, bj, params.normal);
            for (int b : branches)
                if (b != bi && b != bj) out.disjoint.push_back({ca.cluster.id, b});
            return;
        }
        default:
            throw std::invalid_argument("use classify_3rank first (coupled needs both clusters)");
    }
}

namespace {

ThreeRankContext make_context(const Analysis& analysis, const ClusterAnalysis& ca) {
    ThreeRankContext ctx;
    int r = ca.rank();
    ctx.dist_end_point.resize(r);
    ctx.dist_3rank.resize(r);
    for (int b = 0; b < r; ++b) {
        const Branch& br = ca.cluster.branches[b];
        ctx.dist_end_point[b] = br.distance_to_end_point;
        if (br.reached_cluster && br.distance_to_cluster) {
            int other = *br.reached_cluster;
            if (other != ca.cluster.id && analysis.clusters[other].rank() == 3)
                ctx.dist_3rank[b] = br.distance_to_cluster;
        }
    }
    return ctx;
}

// One corridor candidate between two 3-rank clusters.
struct CoupleCandidate {
    int trace_count = 0;
    int a = -1, b = -1;              // cluster ids, a < b
    int branch_a = -1, branch_b = -1;
    std::vector<Pixel> corridor;     // walk order from a's side
};

std::vector<CoupleCandidate> couple_candidates(const Analysis& analysis,
                                               const std::vector<int>& three,
                                               const ParamSet& params) {
    std::set<int> is_three(three.begin(), three.end());
    std::vector<CoupleCandidate> out;
    for (int id : three) {
        const ClusterAnalysis& ca = analysis.clusters[id];
        for (int bi = 0; bi < ca.rank(); ++bi) {
            const Branch& br = ca.cluster.branches[bi];
            if (!br.reached_cluster || !br.distance_to_cluster) continue;
            int other = *br.reached_cluster;
            if (other <= id || !is_three.count(other)) continue;  // one direction is enough
            int traces = *br.distance_to_cluster - 1;
            if (traces > params.coupled_shared_max) continue;

            // Exactly one corridor may connect the two, and the partner arm on the
            // other side must be identifiable.
            int links = 0;
            for (const Branch& x : ca.cluster.branches)
                if (x.reached_cluster && *x.reached_cluster == other) ++links;
            const ClusterAnalysis& cb = analysis.clusters[other];
            int back_links = 0, partner = -1;
            for (int bj = 0; bj < cb.rank(); ++bj) {
                const Branch& x = cb.cluster.branches[bj];
                if (x.reached_cluster && *x.reached_cluster == id) {
                    ++back_links;
                    partner = bj;
                }
            }
            if (links != 1 || back_links != 1) continue;

            CoupleCandidate cand;
            cand.trace_count = traces;
            cand.a = id;
            cand.b = other;
            cand.branch_a = bi;
            cand.branch_b = partner;
            // Re-walk the corridor: the recorded window may be shorter than the run.
            Pixel prev = br.anchor, cur = br.first_outward;
            while (analysis.labels.at(cur) < 0) {
                cand.corridor.push_back(cur);
                Pixel next = cur;
                for (auto [dr, dc] : kNeighbors8) {
                    Pixel n{cur.row + dr, cur.col + dc};
                    if (analysis.map.ink(n) && n != prev) {
                        next = n;
                        break;
                    }
                }
                prev = cur;
                cur = next;
            }
            out.push_back(std::move(cand));
        }
    }
    std::sort(out.begin(), out.end(), [](const CoupleCandidate& x, const CoupleCandidate& y) {
        return std::tuple(x.trace_count, x.a, x.b) < std::tuple(y.trace_count, y.a, y.b);
    });
    return out;
}

// Virtual 4-rank junction for a coupled pair: the four outer arms of both clusters
// over the union pixel set, with the internal direction taken against the fused
// center of gravity.
struct FusedJunction {
    ClusterAnalysis ca;
    std::vector<BranchRef> refs;  // fused branch index -> original branch
};

FusedJunction fuse(const Analysis& analysis, const CoupleCandidate& cand,
                   const ParamSet& params) {
    const ClusterAnalysis& A = analysis.clusters[cand.a];
    const ClusterAnalysis& B = analysis.clusters[cand.b];

    FusedJunction fj;
    fj.ca.cluster.id = cand.a;
    fj.ca.cluster.cluster_points = A.cluster.cluster_points;
    fj.ca.cluster.cluster_points.insert(fj.ca.cluster.cluster_points.end(),
                                        B.cluster.cluster_points.begin(),
                                        B.cluster.cluster_points.end());
    std::sort(fj.ca.cluster.cluster_points.begin(), fj.ca.cluster.cluster_points.end());

    std::vector<Pixel> outer_anchors;
    auto take = [&](const ClusterAnalysis& src, int id, int skip) {
        for (int b = 0; b < src.rank(); ++b) {
            if (b == skip) continue;
            fj.ca.cluster.branches.push_back(src.cluster.branches[b]);
            fj.refs.push_back({id, b});
            outer_anchors.push_back(src.cluster.branches[b].anchor);
        }
    };
    take(A, cand.a, cand.branch_a);
    take(B, cand.b, cand.branch_b);
    characterize(fj.ca, params, cand.corridor, &outer_anchors);
    return fj;
}

// Average matching score of the three ways to pair four arms, on the percent scale.
double fused_matching_score(const ClusterAnalysis& ca, const ParamSet& params) {
    static const int kMatchings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -std::numeric_limits<double>::infinity();
    for (const auto& m : kMatchings) {
        double avg = (pair_score(ca, m[0], m[1], params.coupled).pi +
                      pair_score(ca, m[2], m[3], params.coupled).pi) /
                     2.0 * kPercentScale;
        best_min = std::min(best_min, avg);
        best_max = std::max(best_max, avg);
    }
    return params.coupled_use_min ? best_min : best_max;
}

}  // namespace

std::vector<ClusterResolution> resolve_all(const Analysis& analysis, const ParamSet& params) {
    std::vector<ClusterResolution> out;
    std::vector<int> three;

    for (const ClusterAnalysis& ca : analysis.clusters) {
        int r = ca.rank();
        if (r < 2) continue;  // dissolved upstream; nothing to resolve
        if (r == 3) {
            three.push_back(ca.cluster.id);
        } else if (r % 2 == 0) {
            const WeightRow& row = r <= 4 ? params.normal : params.odd_rank;
            out.push_back(resolve_even_rank(ca, row));
        }
    }
    for (const ClusterAnalysis& ca : analysis.clusters) {
        int r = ca.rank();
        if (r < 5 || r % 2 == 0) continue;
        OddRankPartial part = resolve_odd_rank(ca, params.odd_rank);
        ThreeRankContext ctx = make_context(analysis, ca);
        ThreeRankDecision decision = classify_3rank(ca, part.residual, ctx, params);
        resolve_3rank(ca, part.residual, decision, params, part.partial);
        out.push_back(std::move(part.partial));
    }

    // 3-rank clusters: decide each alone, then let qualifying corridor neighbours
    // form coupled double junctions before the leftovers resolve on their own.
    std::map<int, ThreeRankDecision> decisions;
    for (int id : three)
        decisions[id] = classify_3rank(analysis.clusters[id], {0, 1, 2},
                                       make_context(analysis, analysis.clusters[id]), params);

    std::map<int, ClusterResolution> fused;
    for (const CoupleCandidate& cand : couple_candidates(analysis, three, params)) {
        if (fused.count(cand.a) || fused.count(cand.b)) continue;
        if (decisions[cand.a].kind != ClusterKind::Normal3 ||
            decisions[cand.b].kind != ClusterKind::Normal3)
            continue;
        FusedJunction fj = fuse(analysis, cand, params);
        if (fused_matching_score(fj.ca, params) > params.coupled_pi_max) continue;

        ClusterResolution res = resolve_even_rank(fj.ca, params.coupled);
        res.kind = ClusterKind::Coupled;
        res.cluster_id = cand.a;
        res.fused_members = {cand.a, cand.b};
        res.fused_extra_pixels = cand.corridor;
        for (ResolvedPair& rp : res.pairs) {
            rp.a = fj.refs[rp.a.branch];
            rp.b = fj.refs[rp.b.branch];
        }
        fused[cand.a] = res;
        fused[cand.b] = res;
    }

    for (int id : three) {
        auto it = fused.find(id);
        if (it != fused.end()) {
            if (it->second.cluster_id == id) out.push_back(it->second);  // once, under min id
            continue;
        }
        ClusterResolution res;
        res.cluster_id = id;
        res.kind = decisions[id].kind;
        resolve_3rank(analysis.clusters[id], {0, 1, 2}, decisions[id], params, res);
        out.push_back(std::move(res));
    }
    return out;
}

const char* to_string(ClusterKind kind) {
    switch (kind) {
        case ClusterKind::EvenRank: return "even";
        case ClusterKind::OddRank: return "odd";
        case ClusterKind::TPattern: return "t";
        case ClusterKind::Retraced: return "retraced";
        case ClusterKind::Coupled: return "coupled";
        case ClusterKind::Normal3: return "normal3";
    }
    return "?";
}

}  // namespace inktrace
