// inktrace: recover writing order from thinned handwriting images and evaluate the
// result against on-line ground truth.
//
// Subcommands:
//   synthesize   online trajectories (or --random seeds) -> PBM + aligned ground truth
//   recover      PBM skeletons -> ordered trajectories (+ optional SVG overlays)
//   evaluate     recovered trajectories + ground truth -> metrics.csv + summary.csv
//   sweep        sensitivity / stability scans over a corpus -> CSV + SVG plots
//   report       re-aggregate a metrics.csv into a banded summary

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "inktrace/eval.hpp"
#include "inktrace/pbm.hpp"
#include "inktrace/svg.hpp"
#include "inktrace/synthetic.hpp"

namespace fs = std::filesystem;
using namespace inktrace;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct CommonOpts {
    std::string params_file;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_jobs = true) {
    cmd->add_option("--params", opts.params_file, "parameter file (key=value lines)");
    cmd->add_option("--set", opts.sets, "override one parameter, e.g. --set delta9=7")
        ->take_all();
    cmd->add_option("-o,--out", opts.out_dir, "output directory")->capture_default_str();
    if (with_jobs) cmd->add_option("-j,--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
}

// Flags beat the file, the file beats the built-in defaults.
ParamSet make_params(const CommonOpts& opts) {
    ParamSet p;
    if (!opts.params_file.empty()) p = ParamSet::load_file(opts.params_file);
    for (const std::string& s : opts.sets) p.set(s);
    p.validate();
    return p;
}

fs::path ensure_out(const CommonOpts& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

// Runs job(i) for i in [0, n) on opts.jobs threads; exceptions become error strings.
// Results must be written by index so output order never depends on scheduling.
int parallel_for(int n, int jobs, const std::function<std::string(int)>& job) {
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::vector<std::string> errors;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            std::string err = job(i);
            if (!err.empty()) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors.push_back(std::move(err));
            }
        }
    };
    int n_threads = std::max(1, std::min(jobs, n));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    return errors.empty() ? 0 : 1;
}

// The aligned ground-truth file keeps the rasterized pixel runs in online form
// (x = column, y = row), so it lines up with the PBM without re-rasterizing.
std::string gt_text(const Rasterized& raster) {
    OnlineTrajectory t;
    for (const auto& run : raster.strokes) {
        std::vector<OnlinePoint> stroke;
        stroke.reserve(run.size());
        for (const Pixel& p : run) stroke.push_back({double(p.col), double(p.row)});
        t.strokes.push_back(std::move(stroke));
    }
    return write_online(t);
}

std::vector<std::vector<Pixel>> gt_strokes(const OnlineTrajectory& t) {
    std::vector<std::vector<Pixel>> runs;
    for (const auto& stroke : t.strokes) {
        std::vector<Pixel> run;
        run.reserve(stroke.size());
        for (const OnlinePoint& p : stroke)
            run.push_back({int(std::lround(p.y)), int(std::lround(p.x))});
        runs.push_back(std::move(run));
    }
    return runs;
}

Specimen load_specimen(const fs::path& pbm_path, const fs::path& gt_path) {
    Specimen s;
    s.id = pbm_path.stem().string();
    s.raster.image = parse_pbm(slurp(pbm_path), pbm_path.string());
    s.truth = parse_online(slurp(gt_path), gt_path.string());
    s.raster.strokes = gt_strokes(s.truth);
    return s;
}

std::vector<Specimen> load_corpus(const fs::path& dir) {
    std::vector<fs::path> pbms;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".pbm") pbms.push_back(entry.path());
    std::sort(pbms.begin(), pbms.end());
    std::vector<Specimen> corpus;
    for (const fs::path& pbm : pbms) {
        fs::path gt = pbm;
        gt.replace_extension(".gt");
        if (!fs::exists(gt)) {
            std::cerr << "warning: skipping " << pbm.string() << " (no ground truth next to it)\n";
            continue;
        }
        corpus.push_back(load_specimen(pbm, gt));
    }
    if (corpus.empty()) throw std::runtime_error("no .pbm/.gt pairs in " + dir.string());
    return corpus;
}

int cmd_synthesize(const std::vector<std::string>& inputs, int random_count,
                   std::uint64_t seed, double scale, const CommonOpts& opts) {
    fs::path out = ensure_out(opts);
    struct Item {
        std::string stem;
        OnlineTrajectory truth;
    };
    std::vector<Item> items;
    for (const std::string& file : inputs) {
        OnlineTrajectory t = parse_online(slurp(file), file);
        if (t.strokes.empty()) throw std::runtime_error(file + ": no strokes");
        items.push_back({fs::path(file).stem().string(), std::move(t)});
    }
    for (int k = 0; k < random_count; ++k)
        items.push_back({"synthetic-" + std::to_string(seed + k), synthetic_trajectory(seed + k)});
    if (items.empty()) {
        std::cerr << "error: nothing to synthesize (pass files or --random N)\n";
        return 1;
    }
    return parallel_for(int(items.size()), opts.jobs, [&](int i) -> std::string {
        try {
            Rasterized raster = rasterize(items[i].truth, scale);
            write_pbm(raster.image, (out / (items[i].stem + ".pbm")).string());
            spill(out / (items[i].stem + ".gt"), gt_text(raster));
            return "";
        } catch (const std::exception& e) {
            return items[i].stem + ": " + e.what();
        }
    });
}

int cmd_recover(const std::vector<std::string>& images, const std::string& scenario_name,
                bool svg, const CommonOpts& opts) {
    auto scenario = scenario_from_string(scenario_name);
    if (!scenario) {
        std::cerr << "error: unknown scenario '" << scenario_name << "'\n";
        return 1;
    }
    ParamSet params = make_params(opts);
    fs::path out = ensure_out(opts);
    std::mutex log_mutex;
    return parallel_for(int(images.size()), opts.jobs, [&](int i) -> std::string {
        const fs::path pbm_path(images[i]);
        try {
            SkeletonImage image = parse_pbm(slurp(pbm_path), pbm_path.string());
            Analysis analysis = analyze(image, params);
            if (!analysis.dissolved_pixels.empty()) {
                std::lock_guard<std::mutex> lock(log_mutex);
                const Pixel& p = analysis.dissolved_pixels.front();
                std::cerr << "warning: " << pbm_path.string() << ": "
                          << analysis.dissolved_pixels.size()
                          << " ink pixels form degenerate tangles outside any cluster"
                          << " (first at row " << p.row << ", col " << p.col << ")\n";
            }
            std::vector<ClusterResolution> res = resolve_all(analysis, params);
            const std::vector<std::vector<Pixel>>* gt = nullptr;
            std::vector<std::vector<Pixel>> runs;
            if (*scenario != Scenario::ESTNC) {
                fs::path gt_path = pbm_path;
                gt_path.replace_extension(".gt");
                runs = gt_strokes(parse_online(slurp(gt_path), gt_path.string()));
                gt = &runs;
            }
            RecoveredTrajectory t = recover(analysis, res, params, *scenario, gt);
            std::string stem = pbm_path.stem().string();
            spill(out / (stem + ".traj"), write_trajectory(t));
            if (svg) spill(out / (stem + ".svg"), svg_overlay(image, t));
            return "";
        } catch (const std::exception& e) {
            return pbm_path.string() + ": " + e.what();
        }
    });
}

int cmd_evaluate(const std::vector<std::string>& trajs, const std::string& data_dir,
                 const CommonOpts& opts) {
    ParamSet params = make_params(opts);
    fs::path out = ensure_out(opts);
    std::vector<std::string> unpaired;
    struct Job {
        fs::path traj, pbm, gt;
    };
    std::vector<Job> jobs;
    for (const std::string& file : trajs) {
        Job j;
        j.traj = fs::path(file);
        fs::path base = data_dir.empty() ? j.traj.parent_path() : fs::path(data_dir);
        j.pbm = base / (j.traj.stem().string() + ".pbm");
        j.gt = base / (j.traj.stem().string() + ".gt");
        if (!fs::exists(j.pbm) || !fs::exists(j.gt)) {
            unpaired.push_back(file);
            continue;
        }
        jobs.push_back(std::move(j));
    }
    for (const std::string& f : unpaired)
        std::cerr << "error: " << f << ": no matching .pbm/.gt pair, skipped\n";

    std::vector<MetricRow> rows(jobs.size());
    int rc = parallel_for(int(jobs.size()), opts.jobs, [&](int i) -> std::string {
        try {
            Specimen s = load_specimen(jobs[i].pbm, jobs[i].gt);
            RecoveredTrajectory t =
                parse_trajectory(slurp(jobs[i].traj), jobs[i].traj.string());
            rows[i] = evaluate_specimen(s, t, params);
            return "";
        } catch (const std::exception& e) {
            return jobs[i].traj.string() + ": " + e.what();
        }
    });
    EvaluationTable table = tabulate(std::move(rows));
    spill(out / "metrics.csv", to_csv(table));
    spill(out / "summary.csv", summary_csv(table));
    return (rc != 0 || !unpaired.empty()) ? 1 : 0;
}

int cmd_sweep(const std::string& kind, const std::string& corpus_dir, int reps,
              std::uint64_t seed, const CommonOpts& opts) {
    ParamSet params = make_params(opts);
    fs::path out = ensure_out(opts);
    std::vector<Specimen> corpus = load_corpus(corpus_dir);
    std::ostringstream csv;
    if (kind == "sensitivity") {
        csv << "delta,value,theta,grade\n";
        for (int k = 1; k <= 11; ++k) {
            auto range = sweep_range(k);
            SensitivityRow row = sensitivity_sweep(corpus, params, k, range[0], range[1]);
            SeriesPlot plot;
            plot.title = "theta vs delta" + std::to_string(k);
            plot.x_label = "delta" + std::to_string(k);
            plot.y_label = "theta";
            plot.series.push_back({"theta", row.values, row.theta});
            spill(out / ("sensitivity_delta" + std::to_string(k) + ".svg"), svg_plot(plot));
            for (size_t i = 0; i < row.values.size(); ++i) {
                csv << k << "," << row.values[i] << "," << row.theta[i] << ",";
                if (i > 0) csv << row.grade[i - 1];
                csv << "\n";
            }
        }
        spill(out / "sensitivity.csv", csv.str());
    } else if (kind == "stability") {
        std::vector<double> etas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
        std::vector<StabilityCell> cells = stability_sweep(corpus, params, etas, reps, seed);
        csv << "eta,rep,theta\n";
        BoxPlot plot;
        plot.title = "theta under weight noise";
        plot.x_label = "eta";
        plot.y_label = "theta";
        for (const StabilityCell& c : cells) {
            for (size_t r = 0; r < c.theta.size(); ++r)
                csv << c.eta << "," << r << "," << c.theta[r] << "\n";
            double lo = c.theta.empty() ? 0 : *std::min_element(c.theta.begin(), c.theta.end());
            double hi = c.theta.empty() ? 0 : *std::max_element(c.theta.begin(), c.theta.end());
            char label[32];
            std::snprintf(label, sizeof label, "%.1f", c.eta);
            plot.boxes.push_back({label, c.median, c.q1, c.q3, lo, hi});
        }
        spill(out / "stability.csv", csv.str());
        spill(out / "stability.svg", svg_boxplot(plot));
    } else {
        std::cerr << "error: unknown sweep kind '" << kind << "'\n";
        return 1;
    }
    return 0;
}

int cmd_report(const std::string& metrics_file, bool svg, const CommonOpts& opts) {
    fs::path out = ensure_out(opts);
    std::vector<MetricRow> rows = parse_metric_csv(slurp(metrics_file), metrics_file);
    EvaluationTable table = tabulate(std::move(rows));
    spill(out / "summary.csv", summary_csv(table));
    if (svg) {
        BoxPlot plot;
        plot.title = "theta by band";
        plot.x_label = "scenario/band";
        plot.y_label = "theta";
        for (const BandSummary& b : table.summary) {
            std::vector<double> thetas;
            for (const MetricRow& r : table.rows)
                if (r.scenario == b.scenario && r.band == b.band) thetas.push_back(r.theta);
            std::sort(thetas.begin(), thetas.end());
            if (thetas.empty()) continue;
            auto q = [&](double f) {
                double pos = f * (thetas.size() - 1);
                size_t i = size_t(pos);
                if (i + 1 >= thetas.size()) return thetas.back();
                return thetas[i] + (pos - i) * (thetas[i + 1] - thetas[i]);
            };
            plot.boxes.push_back(
                {b.scenario + "/" + b.band, q(0.5), q(0.25), q(0.75), thetas.front(), thetas.back()});
        }
        spill(out / "summary.svg", svg_boxplot(plot));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"writing-order recovery for thinned handwriting images"};
    app.require_subcommand(1);

    CommonOpts syn_opts, rec_opts, eval_opts, sweep_opts, rep_opts;

    auto* syn = app.add_subcommand("synthesize", "rasterize trajectories into PBM + ground truth");
    std::vector<std::string> syn_inputs;
    int syn_random = 0;
    std::uint64_t syn_seed = 1;
    double syn_scale = 1.0;
    syn->add_option("files", syn_inputs, "online trajectory files (stroke x y per line)");
    syn->add_option("--random", syn_random, "also generate N seeded synthetic drawings");
    syn->add_option("--seed", syn_seed, "seed for --random");
    syn->add_option("--scale", syn_scale, "coordinate scale before rasterization");
    add_common(syn, syn_opts);

    auto* rec = app.add_subcommand("recover", "recover writing order from PBM skeletons");
    std::vector<std::string> rec_images;
    std::string rec_scenario = "estnc";
    bool rec_svg = false;
    rec->add_option("images", rec_images, "PBM skeleton images")->required();
    rec->add_option("--scenario", rec_scenario, "estnc | rsenc | rseoc")->capture_default_str();
    rec->add_flag("--svg", rec_svg, "write an SVG overlay per image");
    add_common(rec, rec_opts);

    auto* eva = app.add_subcommand("evaluate", "score recovered trajectories against ground truth");
    std::vector<std::string> eva_trajs;
    std::string eva_data;
    eva->add_option("trajectories", eva_trajs, "recovered .traj files")->required();
    eva->add_option("--data", eva_data, "directory holding the .pbm/.gt pairs (default: alongside)");
    add_common(eva, eval_opts);

    auto* swp = app.add_subcommand("sweep", "parameter sensitivity / stability scans");
    std::string swp_kind = "sensitivity", swp_corpus;
    int swp_reps = 10;
    std::uint64_t swp_seed = 1;
    swp->add_option("--kind", swp_kind, "sensitivity | stability")->capture_default_str();
    swp->add_option("--corpus", swp_corpus, "directory of .pbm/.gt pairs")->required();
    swp->add_option("--reps", swp_reps, "repetitions per noise level")->capture_default_str();
    swp->add_option("--seed", swp_seed, "noise seed");
    add_common(swp, sweep_opts, false);

    auto* rep = app.add_subcommand("report", "aggregate a metrics.csv into a banded summary");
    std::string rep_metrics;
    bool rep_svg = false;
    rep->add_option("metrics", rep_metrics, "metrics.csv from evaluate")->required();
    rep->add_flag("--svg", rep_svg, "also write a box plot of theta per band");
    add_common(rep, rep_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (syn->parsed()) return cmd_synthesize(syn_inputs, syn_random, syn_seed, syn_scale, syn_opts);
        if (rec->parsed()) return cmd_recover(rec_images, rec_scenario, rec_svg, rec_opts);
        if (eva->parsed()) return cmd_evaluate(eva_trajs, eva_data, eval_opts);
        if (swp->parsed()) return cmd_sweep(swp_kind, swp_corpus, swp_reps, swp_seed, sweep_opts);
        if (rep->parsed()) return cmd_report(rep_metrics, rep_svg, rep_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
