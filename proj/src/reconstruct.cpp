#include "inktrace/reconstruct.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace inktrace {

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::ESTNC: return "estnc";
        case Scenario::RSENC: return "rsenc";
        case Scenario::RSEOC: return "rseoc";
    }
    return "?";
}

std::optional<Scenario> scenario_from_string(const std::string& name) {
    std::string low;
    for (char c : name) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (low == "estnc") return Scenario::ESTNC;
    if (low == "rsenc") return Scenario::RSENC;
    if (low == "rseoc") return Scenario::RSEOC;
    return std::nullopt;
}

StartModel StartModel::for_image(int width, int height, const ParamSet& params) {
    StartModel m;
    m.mean_row = height * params.start_mean_row_frac;
    m.mean_col = width * params.start_mean_col_frac;
    m.sigma_row = height * params.start_sigma_row_frac;
    m.sigma_col = width * params.start_sigma_col_frac;
    return m;
}

Pixel select_start_point(const std::vector<Pixel>& candidates, const StartModel& model) {
    if (candidates.empty()) throw std::invalid_argument("no start candidates");
    const Pixel* best = nullptr;
    double best_d = 0;
    for (const Pixel& p : candidates) {
        double dr = (p.row - model.mean_row) / model.sigma_row;
        double dc = (p.col - model.mean_col) / model.sigma_col;
        double d = dr * dr + dc * dc;
        if (d > 4.0) continue;  // outside the 2-sigma ellipse
        if (!best || d < best_d ||
            (d == best_d && std::pair(p.col, p.row) < std::pair(best->col, best->row))) {
            best = &p;
            best_d = d;
        }
    }
    if (best) return *best;
    // Fallback: leftmost candidate, topmost on ties.
    const Pixel* left = &candidates.front();
    for (const Pixel& p : candidates)
        if (std::pair(p.col, p.row) < std::pair(left->col, left->row)) left = &p;
    return *left;
}

Pixel next_component(Pixel from, const std::vector<Pixel>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("no next-component candidates");
    const Pixel* best = &candidates.front();
    auto key = [&](const Pixel& p) {
        double dr = p.row - from.row, dc = p.col - from.col;
        return std::tuple(dr * dr + dc * dc, p.col, p.row);
    };
    for (const Pixel& p : candidates)
        if (key(p) < key(*best)) best = &p;
    return *best;
}

std::vector<Pixel> RecoveredTrajectory::flat() const {
    std::vector<Pixel> out;
    for (const Component& c : components)
        out.insert(out.end(), c.points.begin(), c.points.end());
    return out;
}

// ---------------------------------------------------------------------------
// Traverser

struct Traverser::Impl {
    const Analysis* analysis = nullptr;
    std::map<int, const ClusterResolution*> by_cluster;
    std::map<const ClusterResolution*, std::vector<char>> used;
    std::set<Pixel> traced;

    const ClassMap& map() const { return analysis->map; }
    const ClusterLabels& labels() const { return analysis->labels; }

    std::vector<Pixel> ink_neighbors(Pixel p) const {
        std::vector<Pixel> out;
        for (auto [dr, dc] : kNeighbors8) {
            Pixel n{p.row + dr, p.col + dc};
            if (map().ink(n)) out.push_back(n);
        }
        return out;
    }

    // Full outward run of an arm, ending state included.
    struct Run {
        std::vector<Pixel> pixels;
        Pixel terminus{};
        bool end_point = false;
        bool cluster = false;
    };

    Run walk_arm(Pixel anchor, Pixel first) const {
        Run run;
        Pixel prev = anchor, cur = first;
        long cap = static_cast<long>(map().width) * map().height + 2;
        for (long i = 0; i < cap; ++i) {
            if (labels().at(cur) >= 0) {
                run.terminus = cur;
                run.cluster = true;
                return run;
            }
            if (map().at(cur) == PixelClass::EndPoint) {
                run.terminus = cur;
                run.end_point = true;
                return run;
            }
            if (map().at(cur) != PixelClass::TracePoint) {
                run.terminus = cur;  // dissolved tangle
                return run;
            }
            run.pixels.push_back(cur);
            Pixel next = cur;
            bool found = false;
            for (Pixel nb : ink_neighbors(cur)) {
                if (nb != prev) {
                    next = nb;
                    found = true;
                    break;
                }
            }
            if (!found) {
                run.terminus = cur;
                return run;
            }
            prev = cur;
            cur = next;
        }
        run.terminus = first;
        return run;
    }

    int find_pair(const ClusterResolution* res, BranchRef ref) const {
        const std::vector<char>& flags = used.at(res);
        for (size_t i = 0; i < res->pairs.size(); ++i)
            if (!flags[i] && (res->pairs[i].a == ref || res->pairs[i].b == ref))
                return static_cast<int>(i);
        return -1;
    }

    int find_branch(int cluster, Pixel anchor, Pixel outward) const {
        const auto& branches = analysis->clusters[cluster].cluster.branches;
        for (size_t i = 0; i < branches.size(); ++i)
            if (branches[i].anchor == anchor && branches[i].first_outward == outward)
                return static_cast<int>(i);
        return -1;
    }
};

Traverser::Traverser(const Analysis& analysis, const std::vector<ClusterResolution>& resolutions)
    : impl_(std::make_shared<Impl>()) {
    impl_->analysis = &analysis;
    for (const ClusterResolution& res : resolutions) {
        impl_->by_cluster[res.cluster_id] = &res;
        for (int id : res.fused_members) impl_->by_cluster[id] = &res;
        impl_->used[&res] = std::vector<char>(res.pairs.size(), 0);
    }
}

bool Traverser::pixel_traced(Pixel p) const { return impl_->traced.count(p) != 0; }
void Traverser::mark_traced(Pixel p) { impl_->traced.insert(p); }

std::vector<Pixel> Traverser::untraced_end_points() const {
    std::vector<Pixel> out;
    for (Pixel p : impl_->map().end_points())
        if (!impl_->traced.count(p)) out.push_back(p);
    return out;
}

std::vector<Pixel> Traverser::untraced_loop_starts() const {
    // Pick one seed per untraced region nothing traced touches and no end point
    // seeds: closed loops, circuits through clusters, stranded tangles.
    const ClassMap& map = impl_->map();
    std::set<Pixel> untraced;
    for (Pixel p : map.ink_pixels())
        if (!impl_->traced.count(p)) untraced.insert(p);

    std::vector<Pixel> seeds;
    std::set<Pixel> visited;
    for (Pixel p : untraced) {
        if (visited.count(p)) continue;
        std::vector<Pixel> region{p};
        visited.insert(p);
        bool touched = false, has_end = false;
        for (size_t i = 0; i < region.size(); ++i) {
            Pixel q = region[i];
            if (map.at(q) == PixelClass::EndPoint) has_end = true;
            for (auto [dr, dc] : kNeighbors8) {
                Pixel n{q.row + dr, q.col + dc};
                if (!map.ink(n)) continue;
                if (impl_->traced.count(n)) {
                    touched = true;
                } else if (!visited.count(n)) {
                    visited.insert(n);
                    region.push_back(n);
                }
            }
        }
        if (touched || has_end) continue;
        Pixel seed = region.front();
        bool found_trace = false;
        for (Pixel q : region) {
            bool is_trace = map.at(q) == PixelClass::TracePoint;
            if (is_trace && !found_trace) {
                seed = q;
                found_trace = true;
            } else if (is_trace == found_trace && q < seed) {
                seed = q;
            }
        }
        seeds.push_back(seed);
    }
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

std::vector<Pixel> Traverser::untraced_orphan_seeds() const {
    // Extremities of untraced stretches that touch the traced world or a cluster.
    const ClassMap& map = impl_->map();
    std::vector<Pixel> out;
    for (Pixel p : map.ink_pixels()) {
        if (impl_->traced.count(p) || map.at(p) != PixelClass::TracePoint) continue;
        if (impl_->labels().at(p) >= 0) continue;
        bool boundary = false;
        for (auto [dr, dc] : kNeighbors8) {
            Pixel n{p.row + dr, p.col + dc};
            if (!map.ink(n)) continue;
            if (impl_->traced.count(n) || impl_->labels().at(n) >= 0) boundary = true;
        }
        if (boundary) out.push_back(p);
    }
    return out;  // ink_pixels scan order is already sorted
}

Component Traverser::trace_component(Pixel start) {
    Impl& im = *impl_;
    const ClassMap& map = im.map();
    Component comp;
    auto append = [&](Pixel p) {
        comp.points.push_back(p);
        im.traced.insert(p);
    };

    // Establish the walk state (prev, cur) from the seed kind.
    Pixel prev = start, cur = start;
    bool have_cur = false;
    PixelClass sc = map.at(start);
    if (sc == PixelClass::EndPoint) {
        append(start);
        auto nbs = im.ink_neighbors(start);
        prev = start;
        cur = nbs.front();
        have_cur = true;
    } else if (sc == PixelClass::TracePoint && im.labels().at(start) < 0) {
        append(start);
        auto nbs = im.ink_neighbors(start);  // exactly two
        auto structured = [&](Pixel p) { return im.traced.count(p) || im.labels().at(p) >= 0; };
        bool s0 = structured(nbs[0]), s1 = structured(nbs[1]);
        prev = start;  // the walk must not step back through its seed
        if (s0 != s1) {
            cur = s0 ? nbs[1] : nbs[0];  // walk away from the traced side
        } else if (s0 && s1) {
            cur = nbs[0];
        } else {
            // Fresh loop: prefer the cheaper (straight) first step, then the smaller.
            bool straight0 = adjacent4(start, nbs[0]), straight1 = adjacent4(start, nbs[1]);
            int pick = straight0 == straight1 ? (nbs[0] < nbs[1] ? 0 : 1) : (straight0 ? 0 : 1);
            cur = nbs[pick];
        }
        have_cur = true;
    } else {
        // Blob pixel (or stray member): greedy mode below handles it.
        cur = start;
        have_cur = true;
        prev = start;
    }

    long cap = 4L * map.width * map.height + 16;
    while (have_cur && cap-- > 0) {
        int cid = im.labels().at(cur);
        if (cid >= 0) {
            // Cluster passage: consume resolved pairs until the trail exits or ends.
            auto res_it = im.by_cluster.find(cid);
            int b = im.find_branch(cid, cur, prev);
            if (res_it == im.by_cluster.end() || b < 0) {
                append(cur);
                break;
            }
            const ClusterResolution* res = res_it->second;
            BranchRef at{cid, b};
            bool exited = false;
            while (true) {
                int pi = im.find_pair(res, at);
                if (pi < 0) {
                    append(im.analysis->clusters[at.cluster].cluster.branches[at.branch].anchor);
                    break;  // disjoint arm or spent cluster: the component ends here
                }
                im.used[res][pi] = 1;
                const ResolvedPair& pair = res->pairs[pi];
                std::vector<Pixel> path = pair.path;
                BranchRef other = pair.a == at ? pair.b : pair.a;
                if (pair.b == at) std::reverse(path.begin(), path.end());
                for (Pixel q : path) append(q);

                const Branch& exit_arm =
                    im.analysis->clusters[other.cluster].cluster.branches[other.branch];
                Impl::Run run = im.walk_arm(exit_arm.anchor, exit_arm.first_outward);
                if (run.end_point && im.find_pair(res, other) >= 0) {
                    // Retraced tail: out to the end point and straight back.
                    for (Pixel q : run.pixels) append(q);
                    append(run.terminus);
                    for (auto it = run.pixels.rbegin(); it != run.pixels.rend(); ++it) append(*it);
                    at = other;
                    continue;
                }
                for (Pixel q : run.pixels) append(q);
                if (run.end_point) {
                    append(run.terminus);
                    break;  // pen lifts at the end point
                }
                if (run.cluster) {
                    prev = run.pixels.empty() ? exit_arm.anchor : run.pixels.back();
                    cur = run.terminus;
                    exited = true;
                    break;
                }
                if (map.at(run.terminus) == PixelClass::BranchPoint) {
                    prev = run.pixels.empty() ? exit_arm.anchor : run.pixels.back();
                    cur = run.terminus;
                    exited = true;
                    break;
                }
                break;  // exhausted arm: nowhere to go
            }
            if (!exited) break;
            continue;
        }

        PixelClass pc = map.at(cur);
        if (pc == PixelClass::EndPoint) {
            append(cur);
            break;
        }
        if (pc == PixelClass::TracePoint) {
            append(cur);
            auto nbs = im.ink_neighbors(cur);
            Pixel next{-1, -1};
            bool found = false;
            for (Pixel nb : nbs)
                if (nb != prev) {
                    next = nb;
                    found = true;
                    break;
                }
            if (!found) break;
            if (next == comp.points.front() && map.at(next) == PixelClass::TracePoint &&
                comp.points.size() > 2) {
                append(next);  // the loop closes on its seed
                break;
            }
            prev = cur;
            cur = next;
            continue;
        }
        // Blob pixel: scribble greedily through whatever is still untraced.
        append(cur);
        Pixel next{-1, -1};
        bool found = false;
        for (Pixel nb : im.ink_neighbors(cur)) {
            if (!im.traced.count(nb) && im.labels().at(nb) < 0) {
                next = nb;
                found = true;
                break;
            }
        }
        if (!found) break;
        prev = cur;
        cur = next;
    }
    return comp;
}

// ---------------------------------------------------------------------------
// Scenario driver

namespace {

Pixel map_to_end_point(Pixel real, const std::vector<Pixel>& end_points) {
    const Pixel* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Pixel& ep : end_points) {
        double dr = ep.row - real.row, dc = ep.col - real.col;
        double d = std::sqrt(dr * dr + dc * dc);
        if (d < best_d || (d == best_d && best && ep < *best)) {
            best = &ep;
            best_d = d;
        }
    }
    if (!best || best_d > 2.0) throw std::runtime_error("ground truth misaligned");
    return *best;
}

// Splices every leftover pixel into an existing component as a micro detour
// (... p, q, p ...), starting each round from the smallest leftover.
void splice_leftovers(Traverser& traverser, const Analysis& analysis,
                      std::vector<Component>& components) {
    while (true) {
        Pixel q{-1, -1};
        Pixel p{-1, -1};
        bool found = false;
        for (Pixel cand : analysis.map.ink_pixels()) {
            if (traverser.pixel_traced(cand)) continue;
            for (auto [dr, dc] : kNeighbors8) {
                Pixel n{cand.row + dr, cand.col + dc};
                if (analysis.map.ink(n) && traverser.pixel_traced(n)) {
                    if (!found || cand < q) {
                        q = cand;
                        p = n;
                        found = true;
                    }
                    break;
                }
            }
        }
        if (!found) return;
        bool spliced = false;
        for (Component& comp : components) {
            auto it = std::find(comp.points.begin(), comp.points.end(), p);
            if (it == comp.points.end()) continue;
            comp.points.insert(it + 1, {q, p});
            spliced = true;
            break;
        }
        if (!spliced) components.push_back(Component{{q}});
        traverser.mark_traced(q);
    }
}

}  // namespace

RecoveredTrajectory recover(const Analysis& analysis,
                            const std::vector<ClusterResolution>& resolutions,
                            const ParamSet& params, Scenario scenario,
                            const std::vector<std::vector<Pixel>>* gt_strokes) {
    RecoveredTrajectory out;
    out.scenario = scenario;
    out.params_hash = params.hash();

    Traverser traverser(analysis, resolutions);
    StartModel model = StartModel::for_image(analysis.image.width, analysis.image.height, params);
    std::vector<Component>& comps = out.components;
    auto last_end = [&]() { return comps.back().points.back(); };

    if (scenario == Scenario::ESTNC) {
        while (true) {
            std::vector<Pixel> cands = traverser.untraced_end_points();
            for (Pixel p : traverser.untraced_loop_starts()) cands.push_back(p);
            if (cands.empty()) break;
            Pixel seed = comps.empty() ? select_start_point(cands, model)
                                       : next_component(last_end(), cands);
            comps.push_back(traverser.trace_component(seed));
        }
    } else {
        if (!gt_strokes) throw std::invalid_argument("scenario needs ground truth strokes");
        std::vector<Pixel> end_points = analysis.map.end_points();
        std::vector<Pixel> starts;
        for (const auto& stroke : *gt_strokes) {
            if (stroke.empty()) continue;
            starts.push_back(map_to_end_point(stroke.front(), end_points));
        }
        if (scenario == Scenario::RSEOC) {
            for (Pixel s : starts) {
                if (traverser.pixel_traced(s)) continue;  // covered by an earlier passage
                comps.push_back(traverser.trace_component(s));
            }
        } else {
            std::vector<Pixel> remaining = starts;
            while (true) {
                std::vector<Pixel> open;
                for (Pixel s : remaining)
                    if (!traverser.pixel_traced(s)) open.push_back(s);
                if (open.empty()) break;
                Pixel seed = comps.empty() ? select_start_point(open, model)
                                           : next_component(last_end(), open);
                comps.push_back(traverser.trace_component(seed));
                std::erase(remaining, seed);
            }
        }
    }

    // Leftover sweep: free ends and fresh loops first, then stretches hanging off
    // the traced world, then pixel-level detours.
    while (true) {
        std::vector<Pixel> cands = traverser.untraced_end_points();
        for (Pixel p : traverser.untraced_loop_starts()) cands.push_back(p);
        if (!cands.empty()) {
            Pixel seed = comps.empty() ? select_start_point(cands, model)
                                       : next_component(last_end(), cands);
            comps.push_back(traverser.trace_component(seed));
            continue;
        }
        std::vector<Pixel> orphans = traverser.untraced_orphan_seeds();
        if (!orphans.empty()) {
            Pixel seed = comps.empty() ? orphans.front() : next_component(last_end(), orphans);
            comps.push_back(traverser.trace_component(seed));
            continue;
        }
        break;
    }
    splice_leftovers(traverser, analysis, out.components);
    return out;
}

std::string write_trajectory(const RecoveredTrajectory& t) {
    std::ostringstream out;
    out << "# scenario " << to_string(t.scenario) << "\n";
    out << "# params " << t.params_hash << "\n";
    long order = 0;
    for (size_t ci = 0; ci < t.components.size(); ++ci)
        for (const Pixel& p : t.components[ci].points)
            out << ci << " " << p.col << " " << p.row << " " << order++ << "\n";
    return out.str();
}

RecoveredTrajectory parse_trajectory(const std::string& text, const std::string& name) {
    RecoveredTrajectory t;
    std::istringstream in(text);
    std::string line;
    long expected_order = 0;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fail = [&](const std::string& what) {
            throw std::runtime_error(name + ":" + std::to_string(line_no) + ": " + what);
        };
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key, value;
            hs >> key >> value;
            if (key == "scenario") {
                auto s = scenario_from_string(value);
                if (!s) fail("unknown scenario '" + value + "'");
                t.scenario = *s;
            } else if (key == "params") {
                t.params_hash = value;
            }
            continue;
        }
        std::istringstream ls(line);
        long ci, x, y, order;
        if (!(ls >> ci >> x >> y >> order)) fail("expected 'component x y order'");
        if (ci < 0 || ci > static_cast<long>(t.components.size()))
            fail("component index out of sequence");
        if (ci == static_cast<long>(t.components.size())) t.components.emplace_back();
        if (order != expected_order++) fail("order index out of sequence");
        t.components[ci].points.push_back({static_cast<int>(y), static_cast<int>(x)});
    }
    return t;
}

}  // namespace inktrace
