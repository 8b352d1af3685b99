#include "inktrace/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace inktrace {

namespace {

[[noreturn]] void fail_at(const std::string& name, int line, const std::string& what) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

OnlineTrajectory parse_online(const std::string& text, const std::string& name) {
    OnlineTrajectory t;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = line;
        size_t h = s.find('#');
        if (h != std::string::npos) s = s.substr(0, h);
        std::istringstream ls(s);
        long stroke;
        double x, y;
        if (!(ls >> stroke)) continue;  // blank or comment-only line
        if (!(ls >> x >> y)) fail_at(name, line_no, "expected 'stroke x y'");
        if (stroke < 0 || stroke > static_cast<long>(t.strokes.size()))
            fail_at(name, line_no, "stroke index out of sequence");
        if (stroke == static_cast<long>(t.strokes.size())) t.strokes.emplace_back();
        t.strokes[stroke].push_back({x, y});
    }
    return t;
}

std::string write_online(const OnlineTrajectory& t) {
    std::ostringstream out;
    out.precision(17);
    for (size_t i = 0; i < t.strokes.size(); ++i)
        for (const OnlinePoint& p : t.strokes[i]) out << i << " " << p.x << " " << p.y << "\n";
    return out.str();
}

std::vector<Pixel> bresenham_line(Pixel a, Pixel b) {
    // Compute in canonical endpoint order so both directions draw identical pixels.
    if (b < a) {
        std::vector<Pixel> rev = bresenham_line(b, a);
        std::reverse(rev.begin(), rev.end());
        return rev;
    }
    std::vector<Pixel> out;
    int x0 = a.col, y0 = a.row, x1 = b.col, y1 = b.row;
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        out.push_back({y0, x0});
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
    return out;
}

Rasterized rasterize(const OnlineTrajectory& t, double scale, int margin) {
    std::vector<std::vector<Pixel>> raw;
    int min_row = std::numeric_limits<int>::max(), min_col = min_row;
    int max_row = std::numeric_limits<int>::min(), max_col = max_row;
    for (const auto& stroke : t.strokes) {
        std::vector<Pixel> px;
        for (const OnlinePoint& p : stroke) {
            Pixel q{static_cast<int>(std::lround(p.y * scale)),
                    static_cast<int>(std::lround(p.x * scale))};
            px.push_back(q);
            min_row = std::min(min_row, q.row);
            max_row = std::max(max_row, q.row);
            min_col = std::min(min_col, q.col);
            max_col = std::max(max_col, q.col);
        }
        raw.push_back(std::move(px));
    }
    Rasterized out;
    if (raw.empty() || min_row > max_row) {
        out.image = SkeletonImage::blank(2 * margin + 1, 2 * margin + 1);
        return out;
    }
    int width = max_col - min_col + 2 * margin + 1;
    int height = max_row - min_row + 2 * margin + 1;
    out.image = SkeletonImage::blank(width, height);
    for (auto& stroke : raw) {
        std::vector<Pixel> run;
        for (Pixel& q : stroke) {
            q.row += margin - min_row;
            q.col += margin - min_col;
            if (run.empty()) {
                run.push_back(q);
                continue;
            }
            std::vector<Pixel> seg = bresenham_line(run.back(), q);
            for (size_t i = 1; i < seg.size(); ++i) run.push_back(seg[i]);
        }
        // Collapse consecutive repeats; genuine retraces still revisit pixels.
        std::vector<Pixel> dedup;
        for (Pixel q : run)
            if (dedup.empty() || q != dedup.back()) dedup.push_back(q);
        for (Pixel q : dedup) out.image.set(q.row, q.col, true);
        out.strokes.push_back(std::move(dedup));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalization and error metrics

namespace {

// Natural cubic spline over strictly increasing knots.
struct Spline {
    std::vector<double> t, v, m2;

    static Spline fit(const std::vector<double>& t, const std::vector<double>& v) {
        Spline s;
        s.t = t;
        s.v = v;
        size_t n = t.size();
        s.m2.assign(n, 0.0);
        if (n < 3) return s;  // linear; second derivatives stay zero
        std::vector<double> a(n, 0), b(n, 0), c(n, 0), d(n, 0);
        for (size_t i = 1; i + 1 < n; ++i) {
            double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
            a[i] = h0;
            b[i] = 2.0 * (h0 + h1);
            c[i] = h1;
            d[i] = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
        }
        // Thomas algorithm on rows 1..n-2 (natural ends pinned at zero).
        for (size_t i = 2; i + 1 < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        for (size_t i = n - 2; i >= 1; --i) {
            s.m2[i] = (d[i] - c[i] * (i + 2 < n ? s.m2[i + 1] : 0.0)) / b[i];
            if (i == 1) break;
        }
        return s;
    }

    double eval(double x) const {
        size_t n = t.size();
        if (x <= t.front()) x = t.front();
        if (x >= t.back()) x = t.back();
        size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin();
        if (i > 0) --i;
        if (i + 1 >= n) i = n - 2;
        double h = t[i + 1] - t[i], dt = x - t[i];
        double slope = (v[i + 1] - v[i]) / h - h / 6.0 * (2.0 * m2[i] + m2[i + 1]);
        return v[i] + dt * slope + dt * dt * m2[i] / 2.0 +
               dt * dt * dt * (m2[i + 1] - m2[i]) / (6.0 * h);
    }
};

// Arc-length spline resample of an ordered pixel run to n points.
void resample(const std::vector<Pixel>& pts_in, int n, std::vector<double>& xs,
              std::vector<double>& ys) {
    std::vector<Pixel> pts;
    for (Pixel p : pts_in)
        if (pts.empty() || p != pts.back()) pts.push_back(p);
    if (pts.empty()) throw std::invalid_argument("cannot normalize an empty sequence");
    if (pts.size() < 2) throw std::invalid_argument("sequence has zero spatial extent");

    std::vector<double> t(pts.size(), 0.0), px(pts.size()), py(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        px[i] = pts[i].col;
        py[i] = pts[i].row;
        if (i > 0)
            t[i] = t[i - 1] + std::hypot(px[i] - px[i - 1], py[i] - py[i - 1]);
    }
    double total = t.back();
    for (double& u : t) u /= total;
    Spline sx = Spline::fit(t, px), sy = Spline::fit(t, py);
    xs.resize(n);
    ys.resize(n);
    for (int i = 0; i < n; ++i) {
        double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        xs[i] = sx.eval(u);
        ys[i] = sy.eval(u);
    }
}

// Min-max into the unit box with a shared span so the aspect ratio survives.
void unit_box(std::vector<double>& xs, std::vector<double>& ys) {
    // Copy the extrema before writing: the minmax iterators alias the vectors.
    double x0 = *std::min_element(xs.begin(), xs.end());
    double x1 = *std::max_element(xs.begin(), xs.end());
    double y0 = *std::min_element(ys.begin(), ys.end());
    double y1 = *std::max_element(ys.begin(), ys.end());
    double span = std::max(x1 - x0, y1 - y0);
    if (span < 1e-12) throw std::invalid_argument("sequence has zero spatial extent");
    for (double& x : xs) x = (x - x0) / span;
    for (double& y : ys) y = (y - y0) / span;
}

int dedup_size(const std::vector<Pixel>& pts) {
    int n = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        if (i == 0 || pts[i] != pts[i - 1]) ++n;
    return n;
}

}  // namespace

NormalizedPair normalize_pair(const std::vector<Pixel>& real_pts,
                              const std::vector<Pixel>& est_pts) {
    NormalizedPair p;
    int n = dedup_size(real_pts);
    if (n < 2) throw std::invalid_argument("sequence has zero spatial extent");
    resample(real_pts, n, p.real_x, p.real_y);
    resample(est_pts, n, p.est_x, p.est_y);
    unit_box(p.real_x, p.real_y);
    unit_box(p.est_x, p.est_y);
    return p;
}

double rmse(const NormalizedPair& p) {
    size_t n = p.real_x.size();
    if (n == 0 || p.est_x.size() != n) throw std::invalid_argument("rmse needs equal lengths");
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        double dx = p.real_x[i] - p.est_x[i], dy = p.real_y[i] - p.est_y[i];
        acc += dx * dx + dy * dy;
    }
    return std::sqrt(acc / n);
}

double snr_db(const NormalizedPair& p) {
    size_t n = p.real_x.size();
    if (n == 0 || p.est_x.size() != n) throw std::invalid_argument("snr needs equal lengths");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += p.real_x[i];
        my += p.real_y[i];
    }
    mx /= n;
    my /= n;
    double signal = 0, error = 0;
    for (size_t i = 0; i < n; ++i) {
        signal += (p.real_x[i] - mx) * (p.real_x[i] - mx) +
                  (p.real_y[i] - my) * (p.real_y[i] - my);
        double dx = p.real_x[i] - p.est_x[i], dy = p.real_y[i] - p.est_y[i];
        error += dx * dx + dy * dy;
    }
    if (signal < 1e-15) throw std::runtime_error("zero signal variance");
    if (error <= 0) return 120.0;
    return std::min(120.0, 10.0 * std::log10(signal / error));
}

double dtw(const NormalizedPair& p) {
    size_t n = p.real_x.size(), m = p.est_x.size();
    if (n == 0 || m == 0) throw std::invalid_argument("dtw needs non-empty sequences");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur.assign(m + 1, kInf);
        for (size_t j = 1; j <= m; ++j) {
            double dx = p.real_x[i - 1] - p.est_x[j - 1];
            double dy = p.real_y[i - 1] - p.est_y[j - 1];
            double c = std::sqrt(dx * dx + dy * dy);
            cur[j] = c + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double complexity(int n_components, int n_rank3, int n_rank_higher) {
    return 0.6 * n_components + 0.3 * n_rank3 + 0.1 * n_rank_higher;
}

// ---------------------------------------------------------------------------
// Pairing accuracy against ground truth

namespace {

struct EvalUnit {
    std::set<Pixel> pixels;
    std::map<std::pair<Pixel, Pixel>, BranchRef> arm;   // (anchor, outward) -> branch
    std::vector<std::pair<BranchRef, BranchRef>> resolved;
    int arm_count = 0;
    ClusterKind kind = ClusterKind::EvenRank;
};

std::pair<BranchRef, BranchRef> canonical(BranchRef a, BranchRef b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::vector<EvalUnit> build_units(const Analysis& analysis,
                                  const std::vector<ClusterResolution>& resolutions) {
    std::vector<EvalUnit> units;
    for (const ClusterResolution& res : resolutions) {
        EvalUnit u;
        u.kind = res.kind;
        std::vector<int> ids = res.fused_members;
        if (ids.empty()) ids.push_back(res.cluster_id);
        for (int id : ids) {
            const Cluster& cl = analysis.clusters[id].cluster;
            u.pixels.insert(cl.cluster_points.begin(), cl.cluster_points.end());
            for (size_t b = 0; b < cl.branches.size(); ++b)
                u.arm[{cl.branches[b].anchor, cl.branches[b].first_outward}] =
                    BranchRef{id, static_cast<int>(b)};
        }
        u.pixels.insert(res.fused_extra_pixels.begin(), res.fused_extra_pixels.end());
        u.arm_count = res.fused_members.empty()
                          ? analysis.clusters[res.cluster_id].rank()
                          : static_cast<int>(u.arm.size()) - 2;  // corridor arms are internal
        for (const ResolvedPair& rp : res.pairs) u.resolved.push_back(canonical(rp.a, rp.b));
        std::sort(u.resolved.begin(), u.resolved.end());
        units.push_back(std::move(u));
    }
    return units;
}

}  // namespace

AccuracyReport cluster_accuracy(const Analysis& analysis,
                                const std::vector<ClusterResolution>& resolutions,
                                const std::vector<std::vector<Pixel>>& gt_strokes) {
    AccuracyReport report;
    std::vector<EvalUnit> units = build_units(analysis, resolutions);

    // Derive the ground-truth passages of every unit from the stroke pixel runs.
    const BranchRef kNone{-1, -1};
    std::vector<std::vector<std::pair<BranchRef, BranchRef>>> truth(units.size());
    for (const auto& stroke : gt_strokes) {
        int inside = -1;         // unit index the pen is currently in
        BranchRef entry = kNone;
        bool half = false;       // the segment started without an outside pixel
        for (size_t i = 0; i <= stroke.size(); ++i) {
            int now = -1;
            if (i < stroke.size())
                for (size_t un = 0; un < units.size(); ++un)
                    if (units[un].pixels.count(stroke[i])) {
                        now = static_cast<int>(un);
                        break;
                    }
            if (now == inside) continue;
            if (inside >= 0) {
                // Leaving `inside` (possibly straight into another unit).
                if (!half) {
                    BranchRef exit = kNone;
                    if (i < stroke.size()) {
                        auto it = units[inside].arm.find({stroke[i - 1], stroke[i]});
                        if (it != units[inside].arm.end()) exit = it->second;
                        if (entry == kNone || exit == kNone) {
                            ++report.unmatched;
                            truth[inside].push_back(canonical(kNone, kNone));
                        } else {
                            truth[inside].push_back(canonical(entry, exit));
                        }
                    }
                    // Ending inside the unit is a half passage: ignored.
                }
            }
            if (now >= 0) {
                half = i == 0;
                entry = kNone;
                if (i > 0) {
                    auto it = units[now].arm.find({stroke[i], stroke[i - 1]});
                    if (it != units[now].arm.end()) entry = it->second;
                }
            }
            inside = now;
        }
    }

    for (size_t un = 0; un < units.size(); ++un) {
        std::sort(truth[un].begin(), truth[un].end());
        bool ok = truth[un] == units[un].resolved;
        ++report.total;
        if (ok) ++report.solved;
        auto& rank_slot = report.by_rank[units[un].arm_count];
        auto& kind_slot = report.by_kind[to_string(units[un].kind)];
        if (ok) {
            ++rank_slot.first;
            ++kind_slot.first;
        }
        ++rank_slot.second;
        ++kind_slot.second;
    }
    report.theta = report.total ? static_cast<double>(report.solved) / report.total : 1.0;
    return report;
}

double component_count_abc(const std::vector<int>& real_counts,
                           const std::vector<int>& est_counts) {
    if (real_counts.empty() && est_counts.empty()) return 0.0;
    if (real_counts.empty() || est_counts.empty()) return 2.0;
    int hi = 0;
    for (int v : real_counts) hi = std::max(hi, v);
    for (int v : est_counts) hi = std::max(hi, v);
    std::vector<double> p(hi + 1, 0.0), q(hi + 1, 0.0);
    for (int v : real_counts) p[std::max(0, v)] += 1.0 / real_counts.size();
    for (int v : est_counts) q[std::max(0, v)] += 1.0 / est_counts.size();
    double abc = 0.0;
    for (int v = 0; v <= hi; ++v) abc += std::abs(p[v] - q[v]);
    return abc;
}

Specimen make_specimen(std::string id, OnlineTrajectory truth, double scale) {
    Specimen s;
    s.id = std::move(id);
    s.raster = rasterize(truth, scale);
    s.truth = std::move(truth);
    return s;
}

AccuracyReport corpus_accuracy(const std::vector<Specimen>& corpus, const ParamSet& params) {
    AccuracyReport agg;
    for (const Specimen& s : corpus) {
        Analysis analysis = analyze(s.raster.image, params);
        std::vector<ClusterResolution> res = resolve_all(analysis, params);
        AccuracyReport r = cluster_accuracy(analysis, res, s.raster.strokes);
        agg.solved += r.solved;
        agg.total += r.total;
        agg.unmatched += r.unmatched;
        for (const auto& [rank, sc] : r.by_rank) {
            agg.by_rank[rank].first += sc.first;
            agg.by_rank[rank].second += sc.second;
        }
        for (const auto& [kind, sc] : r.by_kind) {
            agg.by_kind[kind].first += sc.first;
            agg.by_kind[kind].second += sc.second;
        }
    }
    agg.theta = agg.total ? static_cast<double>(agg.solved) / agg.total : 1.0;
    return agg;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

std::vector<double> sweep_values(int delta_index, double lo, double hi, int max_steps) {
    (void)delta_index;
    std::vector<double> values;
    if (max_steps < 2 || hi <= lo) return {lo};
    double step = std::max(1.0, std::round((hi - lo) / (max_steps - 1)));
    for (double v = lo; v <= hi + 1e-9; v += step) values.push_back(v);
    if (std::abs(values.back() - hi) > 1e-9) values.push_back(hi);
    return values;
}

namespace {

// Cluster analysis only depends on the geometry deltas (9..11), so one sweep pass can
// reuse a specimen's analysis across every value of a resolution-side parameter.
class AnalysisCache {
  public:
    explicit AnalysisCache(const std::vector<Specimen>& corpus) : corpus_(corpus) {}

    double theta(const ParamSet& p) {
        const std::vector<Analysis>& analyses = get(p);
        long solved = 0, total = 0;
        for (size_t i = 0; i < corpus_.size(); ++i) {
            std::vector<ClusterResolution> res = resolve_all(analyses[i], p);
            AccuracyReport r = cluster_accuracy(analyses[i], res, corpus_[i].raster.strokes);
            solved += r.solved;
            total += r.total;
        }
        return total ? static_cast<double>(solved) / total : 1.0;
    }

  private:
    const std::vector<Analysis>& get(const ParamSet& p) {
        auto key = std::make_tuple(p.branch_window, p.brotherhood_dist, p.curvature_samples);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            std::vector<Analysis> v;
            v.reserve(corpus_.size());
            for (const Specimen& s : corpus_) v.push_back(analyze(s.raster.image, p));
            it = cache_.emplace(std::move(key), std::move(v)).first;
        }
        return it->second;
    }

    const std::vector<Specimen>& corpus_;
    std::map<std::tuple<double, double, double>, std::vector<Analysis>> cache_;
};

}  // namespace

SensitivityRow sensitivity_sweep(const std::vector<Specimen>& corpus, const ParamSet& params,
                                 int delta_index, double lo, double hi, int max_steps) {
    SensitivityRow row;
    row.delta_index = delta_index;
    row.values = sweep_values(delta_index, lo, hi, max_steps);
    AnalysisCache cache(corpus);
    for (double v : row.values) {
        ParamSet p = params;
        p.set_delta(delta_index, v);
        row.theta.push_back(cache.theta(p));
    }
    for (size_t i = 0; i + 1 < row.theta.size(); ++i)
        row.grade.push_back(row.theta[i + 1] - row.theta[i]);
    return row;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    double pos = q * (v.size() - 1);
    size_t i = static_cast<size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    double frac = pos - i;
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

}  // namespace

std::vector<StabilityCell> stability_sweep(const std::vector<Specimen>& corpus,
                                           const ParamSet& params,
                                           const std::vector<double>& etas, int reps,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    AnalysisCache cache(corpus);
    std::vector<StabilityCell> cells;
    for (double eta : etas) {
        StabilityCell cell;
        cell.eta = eta;
        for (int rep = 0; rep < reps; ++rep) {
            ParamSet p = params;
            for (WeightRow* row : {&p.normal, &p.t_retrace, &p.coupled, &p.odd_rank}) {
                for (double* w : {&row->ext, &row->inte, &row->cur}) {
                    double sigma = eta * std::abs(*w);
                    if (sigma > 0) *w = std::normal_distribution<double>(*w, sigma)(rng);
                }
                double s = std::abs(row->ext) + std::abs(row->inte) + std::abs(row->cur);
                if (s > 1e-12) {
                    row->ext /= s;
                    row->inte /= s;
                    row->cur /= s;
                }
            }
            cell.theta.push_back(cache.theta(p));
        }
        cell.median = quantile(cell.theta, 0.5);
        cell.q1 = quantile(cell.theta, 0.25);
        cell.q3 = quantile(cell.theta, 0.75);
        cells.push_back(std::move(cell));
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Per-image evaluation table

MetricRow evaluate_specimen(const Specimen& specimen, const RecoveredTrajectory& recovered,
                            const ParamSet& params) {
    MetricRow row;
    row.id = specimen.id;
    row.scenario = to_string(recovered.scenario);
    row.n_real = static_cast<int>(specimen.raster.strokes.size());
    row.n_est = static_cast<int>(recovered.components.size());

    Analysis analysis = analyze(specimen.raster.image, params);
    std::vector<ClusterResolution> res = resolve_all(analysis, params);
    row.theta = cluster_accuracy(analysis, res, specimen.raster.strokes).theta;

    int n3 = 0, nh = 0;
    for (const ClusterAnalysis& ca : analysis.clusters) {
        if (ca.rank() == 3) ++n3;
        if (ca.rank() > 3) ++nh;
    }
    row.complexity = complexity(row.n_real, n3, nh);

    std::vector<Pixel> real;
    for (const auto& s : specimen.raster.strokes) real.insert(real.end(), s.begin(), s.end());
    NormalizedPair pair = normalize_pair(real, recovered.flat());
    row.rmse = rmse(pair);
    row.snr = snr_db(pair);
    row.dtw = dtw(pair);
    return row;
}

EvaluationTable tabulate(std::vector<MetricRow> rows) {
    EvaluationTable table;
    std::vector<double> cx;
    for (const MetricRow& r : rows) cx.push_back(r.complexity);
    table.tertile_low = quantile(cx, 1.0 / 3.0);
    table.tertile_high = quantile(cx, 2.0 / 3.0);
    for (MetricRow& r : rows) {
        r.band = r.complexity <= table.tertile_low    ? "low"
                 : r.complexity <= table.tertile_high ? "medium"
                                                      : "high";
    }
    table.rows = std::move(rows);

    std::map<std::pair<std::string, int>, std::vector<const MetricRow*>> groups;
    auto band_order = [](const std::string& b) { return b == "low" ? 0 : b == "medium" ? 1 : 2; };
    for (const MetricRow& r : table.rows) groups[{r.scenario, band_order(r.band)}].push_back(&r);

    for (const auto& [key, members] : groups) {
        BandSummary s;
        s.scenario = key.first;
        s.band = key.second == 0 ? "low" : key.second == 1 ? "medium" : "high";
        s.images = static_cast<int>(members.size());
        auto mean_se = [&](auto get, double& mean, double& se) {
            double m = 0;
            for (const MetricRow* r : members) m += get(*r);
            m /= members.size();
            double var = 0;
            for (const MetricRow* r : members) var += (get(*r) - m) * (get(*r) - m);
            mean = m;
            se = members.size() > 1
                     ? std::sqrt(var / (members.size() - 1)) / std::sqrt(double(members.size()))
                     : 0.0;
        };
        mean_se([](const MetricRow& r) { return r.rmse; }, s.rmse_mean, s.rmse_se);
        mean_se([](const MetricRow& r) { return r.snr; }, s.snr_mean, s.snr_se);
        mean_se([](const MetricRow& r) { return r.dtw; }, s.dtw_mean, s.dtw_se);
        double dummy;
        mean_se([](const MetricRow& r) { return r.theta; }, s.theta_mean, dummy);
        table.summary.push_back(std::move(s));
    }
    return table;
}

std::string to_csv(const EvaluationTable& table) {
    std::ostringstream out;
    out.precision(17);
    out << "id,scenario,band,n_real,n_est,theta,rmse,snr,dtw,complexity\n";
    for (const MetricRow& r : table.rows)
        out << r.id << "," << r.scenario << "," << r.band << "," << r.n_real << "," << r.n_est
            << "," << r.theta << "," << r.rmse << "," << r.snr << "," << r.dtw << ","
            << r.complexity << "\n";
    return out.str();
}

std::string summary_csv(const EvaluationTable& table) {
    std::ostringstream out;
    out.precision(17);
    out << "scenario,band,images,rmse_mean,rmse_se,snr_mean,snr_se,dtw_mean,dtw_se,theta_mean\n";
    for (const BandSummary& s : table.summary)
        out << s.scenario << "," << s.band << "," << s.images << "," << s.rmse_mean << ","
            << s.rmse_se << "," << s.snr_mean << "," << s.snr_se << "," << s.dtw_mean << ","
            << s.dtw_se << "," << s.theta_mean << "\n";
    return out.str();
}

std::vector<MetricRow> parse_metric_csv(const std::string& text, const std::string& name) {
    std::vector<MetricRow> rows;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("id,", 0) == 0) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 10) fail_at(name, line_no, "expected 10 columns");
        MetricRow r;
        try {
            r.id = cells[0];
            r.scenario = cells[1];
            r.band = cells[2];
            r.n_real = std::stoi(cells[3]);
            r.n_est = std::stoi(cells[4]);
            r.theta = std::stod(cells[5]);
            r.rmse = std::stod(cells[6]);
            r.snr = std::stod(cells[7]);
            r.dtw = std::stod(cells[8]);
            r.complexity = std::stod(cells[9]);
        } catch (const std::exception&) {
            fail_at(name, line_no, "bad numeric cell");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace inktrace
