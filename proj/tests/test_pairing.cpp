#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "inktrace/pairing.hpp"

using namespace inktrace;
using doctest::Approx;

namespace {

Analysis analyze_fixture(const OnlineTrajectory& t, const ParamSet& params = {}) {
    Specimen s = make_specimen("fixture", t);
    return analyze(s.raster.image, params);
}

std::vector<ClusterResolution> resolve_fixture(const OnlineTrajectory& t,
                                               const ParamSet& params = {}) {
    Analysis a = analyze_fixture(t, params);
    return resolve_all(a, params);
}

std::set<std::string> kinds_of(const std::vector<ClusterResolution>& res) {
    std::set<std::string> kinds;
    for (const auto& r : res) kinds.insert(to_string(r.kind));
    return kinds;
}

const Branch& branch_of(const Analysis& a, BranchRef ref) {
    return a.clusters[ref.cluster].cluster.branches[ref.branch];
}

}  // namespace

TEST_CASE("continuity score is the exact weighted sum of its three terms") {
    WeightRow normal{0.20, 0.05, 0.75};
    PairScore s = pair_score_values(10.0, 20.0, 30.0, normal);
    CHECK(s.ext_term == 2.0);
    CHECK(s.int_term == 1.0);
    CHECK(s.cur_term == 22.5);
    CHECK(s.pi == 25.5);

    WeightRow t_row{0.95, 0.00, 0.05};
    PairScore t = pair_score_values(100.0, 77.0, 40.0, t_row);
    CHECK(t.pi == Approx(95.0 + 0.0 + 2.0).epsilon(1e-15));
}

TEST_CASE("a plus crossing becomes one even 4-rank cluster paired straight through") {
    ParamSet params;
    Analysis a = analyze_fixture(fixtures::plus_crossing());
    REQUIRE(a.clusters.size() == 1);
    const ClusterAnalysis& ca = a.clusters[0];
    CHECK(ca.rank() == 4);
    CHECK(static_cast<int>(ca.geom.size()) == ca.rank());

    auto res = resolve_all(a, params);
    REQUIRE(res.size() == 1);
    CHECK(res[0].kind == ClusterKind::EvenRank);
    CHECK(res[0].pairs.size() == 2);
    CHECK(res[0].disjoint.empty());
    // each resolved pair joins nearly opposite writing directions
    for (const auto& pr : res[0].pairs) {
        double da = fold180(ca.geom[pr.a.branch].alpha - ca.geom[pr.b.branch].alpha);
        CHECK(da > 150.0);
    }
    // scores come out in non-decreasing greedy order
    for (size_t i = 0; i + 1 < res[0].pairs.size(); ++i)
        CHECK(res[0].pairs[i].pi <= res[0].pairs[i + 1].pi + 1e-12);
}

TEST_CASE("cluster characterization invariants on the plus fixture") {
    Analysis a = analyze_fixture(fixtures::plus_crossing());
    REQUIRE(a.clusters.size() == 1);
    const ClusterAnalysis& ca = a.clusters[0];
    int r = ca.rank();
    // center of gravity is the anchor mean
    double sum_row = 0, sum_col = 0;
    for (Pixel p : ca.cluster.anchor_points) {
        sum_row += p.row;
        sum_col += p.col;
    }
    CHECK(ca.ccg_row == Approx(sum_row / ca.cluster.anchor_points.size()));
    CHECK(ca.ccg_col == Approx(sum_col / ca.cluster.anchor_points.size()));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            if (i == j) continue;
            CHECK(ca.curv(i, j) == ca.curv(j, i));
            const auto& fwd = ca.path(i, j);
            auto rev = ca.path(j, i);
            std::reverse(rev.begin(), rev.end());
            CHECK(fwd == rev);
            REQUIRE(!fwd.empty());
            CHECK(fwd.front() == ca.cluster.branches[i].anchor);
            CHECK(fwd.back() == ca.cluster.branches[j].anchor);
        }
    }
}

TEST_CASE("pair scores are symmetric in the branch order") {
    ParamSet params;
    Analysis a = analyze_fixture(fixtures::x_crossing(60));
    REQUIRE(!a.clusters.empty());
    const ClusterAnalysis& ca = a.clusters[0];
    for (int i = 0; i < ca.rank(); ++i)
        for (int j = i + 1; j < ca.rank(); ++j) {
            PairScore ij = pair_score(ca, i, j, params.normal);
            PairScore ji = pair_score(ca, j, i, params.normal);
            CHECK(ij.pi == Approx(ji.pi).epsilon(1e-12));
        }
}

TEST_CASE("the T fixture classifies as a T pattern with a disjoint stem") {
    Analysis a = analyze_fixture(fixtures::t_junction());
    REQUIRE(a.clusters.size() == 1);
    ParamSet params;
    auto res = resolve_all(a, params);
    REQUIRE(res.size() == 1);
    CHECK(res[0].kind == ClusterKind::TPattern);
    REQUIRE(res[0].pairs.size() == 1);
    REQUIRE(res[0].disjoint.size() == 1);
    // the paired branches are the collinear bar halves
    const ClusterAnalysis& ca = a.clusters[0];
    const auto& pr = res[0].pairs[0];
    CHECK(fold180(ca.geom[pr.a.branch].alpha - ca.geom[pr.b.branch].alpha) > 170.0);

    // with an impossible stem-pair budget the same trio falls through to normal
    ParamSet tight = params;
    tight.tpattern_pi_max = 0.0001;
    auto res2 = resolve_fixture(fixtures::t_junction(), tight);
    REQUIRE(res2.size() == 1);
    CHECK(res2[0].kind == ClusterKind::Normal3);
}

TEST_CASE("the retraced fixture pairs its tail into both passages") {
    auto res = resolve_fixture(fixtures::retraced_tail());
    REQUIRE(res.size() == 1);
    CHECK(res[0].kind == ClusterKind::Retraced);
    REQUIRE(res[0].pairs.size() == 2);
    CHECK(res[0].disjoint.empty());
    // exactly one branch ref appears in both pairs: the doubled tail
    std::map<std::pair<int, int>, int> uses;
    for (const auto& pr : res[0].pairs) {
        ++uses[{pr.a.cluster, pr.a.branch}];
        ++uses[{pr.b.cluster, pr.b.branch}];
    }
    int doubled = 0;
    for (const auto& [ref, n] : uses) doubled += n == 2 ? 1 : 0;
    CHECK(doubled == 1);

    // out of tail reach, the cluster is no longer retraced
    ParamSet params;
    params.retrace_ep_dist = 5;
    auto res2 = resolve_fixture(fixtures::retraced_tail(), params);
    REQUIRE(res2.size() == 1);
    CHECK(res2[0].kind != ClusterKind::Retraced);
}

TEST_CASE("the coupled fixture fuses its two junctions into one resolution") {
    ParamSet params;
    Analysis a = analyze_fixture(fixtures::coupled_junctions());
    REQUIRE(a.clusters.size() == 2);
    auto res = resolve_all(a, params);
    REQUIRE(res.size() == 1);
    CHECK(res[0].kind == ClusterKind::Coupled);
    CHECK(res[0].fused_members.size() == 2);
    CHECK(!res[0].fused_extra_pixels.empty());
    REQUIRE(res[0].pairs.size() == 2);
    // every resolved pair bridges the two clusters
    for (const auto& pr : res[0].pairs) {
        CHECK(pr.a.cluster != pr.b.cluster);
        const auto& path = pr.path;
        REQUIRE(!path.empty());
        CHECK(path.front() == branch_of(a, pr.a).anchor);
        CHECK(path.back() == branch_of(a, pr.b).anchor);
    }

    // a corridor over the shared-branch budget keeps the junctions separate
    ParamSet narrow = params;
    narrow.coupled_shared_max = 5;
    auto res2 = resolve_fixture(fixtures::coupled_junctions(), narrow);
    CHECK(res2.size() == 2);
    CHECK(kinds_of(res2) == std::set<std::string>{"normal3"});

    // an impossible matching budget also rejects the fuse
    ParamSet strict = params;
    strict.coupled_pi_max = 0.0001;
    auto res3 = resolve_fixture(fixtures::coupled_junctions(), strict);
    CHECK(res3.size() == 2);
    CHECK(kinds_of(res3).count("coupled") == 0);
}

TEST_CASE("a triple crossing resolves as one rank-6 cluster with three pairs") {
    Analysis a = analyze_fixture(fixtures::triple_crossing());
    REQUIRE(a.clusters.size() == 1);
    CHECK(a.clusters[0].rank() == 6);
    ParamSet params;
    auto res = resolve_all(a, params);
    REQUIRE(res.size() == 1);
    CHECK(res[0].kind == ClusterKind::EvenRank);
    CHECK(res[0].pairs.size() == 3);
    const ClusterAnalysis& ca = a.clusters[0];
    for (const auto& pr : res[0].pairs) {
        double da = fold180(ca.geom[pr.a.branch].alpha - ca.geom[pr.b.branch].alpha);
        CHECK(da > 150.0);
    }
}

TEST_CASE("resolve_even_rank rejects odd ranks") {
    Analysis a = analyze_fixture(fixtures::t_junction());
    REQUIRE(a.clusters.size() == 1);
    ParamSet params;
    CHECK_THROWS_AS(resolve_even_rank(a.clusters[0], params.normal), std::invalid_argument);
}

TEST_CASE("resolve_all orders evens, then high odds, then 3-ranks") {
    // one X on the left, one T far to the right
    OnlineTrajectory combo = fixtures::x_crossing(60);
    OnlineTrajectory tee = fixtures::t_junction();
    for (auto& stroke : tee.strokes) {
        for (auto& p : stroke) p.x += 110;
        combo.strokes.push_back(stroke);
    }
    ParamSet params;
    Specimen s = make_specimen("combo", combo);
    Analysis a = analyze(s.raster.image, params);
    auto res = resolve_all(a, params);
    REQUIRE(res.size() >= 2);
    bool seen_three = false;
    for (const auto& r : res) {
        bool is_three = r.kind == ClusterKind::TPattern || r.kind == ClusterKind::Retraced ||
                        r.kind == ClusterKind::Coupled || r.kind == ClusterKind::Normal3;
        if (seen_three) CHECK(is_three);
        seen_three = seen_three || is_three;
    }
    CHECK(kinds_of(res).count("t") == 1);
}

TEST_CASE("degenerate tangles dissolve instead of becoming clusters") {
    // a 2x2 block has four branch points and no external arms
    SkeletonImage img = SkeletonImage::blank(8, 8);
    img.set(3, 3, true);
    img.set(3, 4, true);
    img.set(4, 3, true);
    img.set(4, 4, true);
    ParamSet params;
    Analysis a = analyze(img, params);
    CHECK(a.clusters.empty());
    CHECK(a.dissolved_clusters == 1);
    CHECK(a.dissolved_pixels.size() == 4);
    CHECK(resolve_all(a, params).empty());
}
