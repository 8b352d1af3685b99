#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "inktrace/eval.hpp"
#include "inktrace/pbm.hpp"
#include "inktrace/reconstruct.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace inktrace;

namespace {

const fs::path kBase = fs::temp_directory_path() / "inktrace-cli-tests";

fs::path fresh_dir(const std::string& name) {
    fs::path dir = kBase / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

struct RunResult {
    int code = -1;
    std::string err;
};

RunResult run(const std::string& args) {
    fs::create_directories(kBase);
    fs::path err_file = kBase / "stderr.log";
    std::string cmd = std::string("\"") + INKTRACE_CLI_PATH + "\" " + args + " 2> \"" +
                      err_file.string() + "\"";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_file);
    return r;
}

// Writes a fixture as the .txt input synthesize expects.
fs::path write_truth(const fs::path& dir, const std::string& stem, const OnlineTrajectory& t) {
    fs::path file = dir / (stem + ".txt");
    spill(file, write_online(t));
    return file;
}

int component_count(const fs::path& traj) {
    return static_cast<int>(parse_trajectory(slurp(traj), traj.string()).components.size());
}

// One synthesized .pbm/.gt pair ready for recover/evaluate.
fs::path synthesize_one(const std::string& test, const std::string& stem,
                        const OnlineTrajectory& t) {
    fs::path dir = fresh_dir(test);
    fs::path truth = write_truth(dir, stem, t);
    RunResult r = run("synthesize \"" + truth.string() + "\" -o \"" + dir.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / (stem + ".pbm")));
    REQUIRE(fs::exists(dir / (stem + ".gt")));
    return dir;
}

}  // namespace

TEST_CASE("cli: synthesize writes parseable image and ground-truth pairs") {
    fs::path dir = synthesize_one("syn", "plus", fixtures::plus_crossing());
    SkeletonImage img = parse_pbm(slurp(dir / "plus.pbm"), "plus.pbm");
    CHECK(img.width > 10);
    OnlineTrajectory gt = parse_online(slurp(dir / "plus.gt"), "plus.gt");
    REQUIRE(gt.strokes.size() == 2);
    // every ground-truth sample is an ink pixel of the written image
    for (const auto& stroke : gt.strokes)
        for (const OnlinePoint& p : stroke)
            CHECK(img.at({static_cast<int>(p.y), static_cast<int>(p.x)}));
}

TEST_CASE("cli: synthesize rejects a trajectory with no strokes") {
    fs::path dir = fresh_dir("syn-empty");
    fs::path file = dir / "empty.txt";
    spill(file, "# just a comment\n");
    RunResult r = run("synthesize \"" + file.string() + "\" -o \"" + dir.string() + "\"");
    CHECK(r.code == 1);
    CHECK(r.err.find("no strokes") != std::string::npos);
    CHECK(!fs::exists(dir / "empty.pbm"));
}

TEST_CASE("cli: seeded random synthesis is byte identical") {
    fs::path a = fresh_dir("syn-rand-a");
    fs::path b = fresh_dir("syn-rand-b");
    REQUIRE(run("synthesize --random 3 --seed 9 -o \"" + a.string() + "\"").code == 0);
    REQUIRE(run("synthesize --random 3 --seed 9 -o \"" + b.string() + "\" -j 3").code == 0);
    for (int k = 9; k < 12; ++k) {
        std::string stem = "synthetic-" + std::to_string(k);
        CAPTURE(stem);
        REQUIRE(fs::exists(a / (stem + ".pbm")));
        CHECK(slurp(a / (stem + ".pbm")) == slurp(b / (stem + ".pbm")));
        CHECK(slurp(a / (stem + ".gt")) == slurp(b / (stem + ".gt")));
    }
}

TEST_CASE("cli: recover traces the expected component counts") {
    fs::path dir = synthesize_one("rec-counts", "line", fixtures::straight_line());
    REQUIRE(run("recover \"" + (dir / "line.pbm").string() + "\" -o \"" + dir.string() + "\"")
                .code == 0);
    CHECK(component_count(dir / "line.traj") == 1);
    std::string header = slurp(dir / "line.traj").substr(0, 17);
    CHECK(header == "# scenario estnc\n");

    fs::path dir2 = synthesize_one("rec-counts2", "plus", fixtures::plus_crossing());
    REQUIRE(run("recover \"" + (dir2 / "plus.pbm").string() + "\" -o \"" + dir2.string() + "\"")
                .code == 0);
    CHECK(component_count(dir2 / "plus.traj") == 2);
}

TEST_CASE("cli: recover honors the scenario flag and ground truth") {
    fs::path dir = synthesize_one("rec-scn", "t", fixtures::t_junction());
    for (const std::string sc : {"rsenc", "rseoc"}) {
        RunResult r = run("recover \"" + (dir / "t.pbm").string() + "\" --scenario " + sc +
                          " -o \"" + dir.string() + "\"");
        CAPTURE(sc);
        REQUIRE(r.code == 0);
        CHECK(slurp(dir / "t.traj").substr(0, 12 + sc.size()) == "# scenario " + sc + "\n");
    }
    RunResult bad = run("recover \"" + (dir / "t.pbm").string() + "\" --scenario nope -o \"" +
                        dir.string() + "\"");
    CHECK(bad.code == 1);
    CHECK(bad.err.find("unknown scenario") != std::string::npos);
}

TEST_CASE("cli: recover without ground truth fails for replayed scenarios") {
    fs::path dir = synthesize_one("rec-nogt", "line", fixtures::straight_line());
    fs::remove(dir / "line.gt");
    RunResult r = run("recover \"" + (dir / "line.pbm").string() + "\" --scenario rseoc -o \"" +
                      dir.string() + "\"");
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("cli: recover emits an svg overlay on request") {
    fs::path dir = synthesize_one("rec-svg", "x", fixtures::x_crossing(60));
    REQUIRE(run("recover \"" + (dir / "x.pbm").string() + "\" --svg -o \"" + dir.string() + "\"")
                .code == 0);
    std::string svg = slurp(dir / "x.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("cli: recover is byte identical across runs and job counts") {
    fs::path dir = synthesize_one("rec-det", "tri", fixtures::triple_crossing());
    fs::path out1 = fresh_dir("rec-det-1");
    fs::path out2 = fresh_dir("rec-det-2");
    std::string img = (dir / "tri.pbm").string();
    REQUIRE(run("recover \"" + img + "\" --scenario rseoc -o \"" + out1.string() + "\"").code == 0);
    REQUIRE(run("recover \"" + img + "\" --scenario rseoc -o \"" + out2.string() + "\" -j 4")
                .code == 0);
    CHECK(slurp(out1 / "tri.traj") == slurp(out2 / "tri.traj"));
}

TEST_CASE("cli: recover warns when the image is not a thin skeleton") {
    fs::path dir = fresh_dir("rec-warn");
    SkeletonImage img = testsup::image_from({
        "........",
        ".##.....",
        ".##.....",
        "...#....",
        "....#...",
        ".....#..",
    });
    write_pbm(img, (dir / "blob.pbm").string());
    RunResult r = run("recover \"" + (dir / "blob.pbm").string() + "\" -o \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    CHECK(r.err.find("warning:") != std::string::npos);
    CHECK(r.err.find("degenerate tangles") != std::string::npos);
    CHECK(r.err.find("row 1, col 1") != std::string::npos);
    CHECK(fs::exists(dir / "blob.traj"));
}

TEST_CASE("cli: evaluate writes metric and summary tables") {
    fs::path dir = synthesize_one("eval", "line", fixtures::straight_line());
    write_truth(dir, "plus", fixtures::plus_crossing());
    REQUIRE(run("synthesize \"" + (dir / "plus.txt").string() + "\" -o \"" + dir.string() + "\"")
                .code == 0);
    REQUIRE(run("recover \"" + (dir / "line.pbm").string() + "\" \"" + (dir / "plus.pbm").string() +
                "\" --scenario rseoc -o \"" + dir.string() + "\"")
                .code == 0);
    RunResult r = run("evaluate \"" + (dir / "line.traj").string() + "\" \"" +
                      (dir / "plus.traj").string() + "\" -o \"" + dir.string() + "\"");
    REQUIRE(r.code == 0);
    std::vector<MetricRow> rows = parse_metric_csv(slurp(dir / "metrics.csv"), "metrics.csv");
    REQUIRE(rows.size() == 2);
    for (const MetricRow& row : rows) {
        CAPTURE(row.id);
        CHECK(row.scenario == "rseoc");
        CHECK(row.theta == 1.0);
        CHECK(row.rmse <= 1e-9);  // replayed starts on clean fixtures recover exactly
        CHECK(row.snr == 120.0);
    }
    CHECK(slurp(dir / "summary.csv").rfind("scenario,band,", 0) == 0);
}

TEST_CASE("cli: evaluate lists unpaired trajectories and fails") {
    fs::path dir = synthesize_one("eval-unpaired", "line", fixtures::straight_line());
    REQUIRE(run("recover \"" + (dir / "line.pbm").string() + "\" -o \"" + dir.string() + "\"")
                .code == 0);
    spill(dir / "stray.traj", "# scenario estnc\n# params x\n0 1 1 0\n");
    RunResult r = run("evaluate \"" + (dir / "line.traj").string() + "\" \"" +
                      (dir / "stray.traj").string() + "\" -o \"" + dir.string() + "\"");
    CHECK(r.code == 1);
    CHECK(r.err.find("stray.traj: no matching .pbm/.gt pair, skipped") != std::string::npos);
    // the paired file still lands in the table
    std::vector<MetricRow> rows = parse_metric_csv(slurp(dir / "metrics.csv"), "metrics.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].id == "line");
}

TEST_CASE("cli: parameter overrides beat the file which beats the defaults") {
    fs::path dir = synthesize_one("params", "line", fixtures::straight_line());
    fs::path pfile = dir / "params.txt";
    spill(pfile, "delta9=7\n");

    ParamSet flag_only;
    flag_only.set("delta9=9");
    fs::path out_flag = fresh_dir("params-flag");
    REQUIRE(run("recover \"" + (dir / "line.pbm").string() + "\" --set delta9=9 -o \"" +
                out_flag.string() + "\"")
                .code == 0);
    CHECK(parse_trajectory(slurp(out_flag / "line.traj"), "t").params_hash == flag_only.hash());

    // the flag wins over the file value
    fs::path out_both = fresh_dir("params-both");
    REQUIRE(run("recover \"" + (dir / "line.pbm").string() + "\" --params \"" + pfile.string() +
                "\" --set delta9=9 -o \"" + out_both.string() + "\"")
                .code == 0);
    CHECK(parse_trajectory(slurp(out_both / "line.traj"), "t").params_hash == flag_only.hash());

    ParamSet file_only;
    file_only.set("delta9=7");
    fs::path out_file = fresh_dir("params-file");
    REQUIRE(run("recover \"" + (dir / "line.pbm").string() + "\" --params \"" + pfile.string() +
                "\" -o \"" + out_file.string() + "\"")
                .code == 0);
    CHECK(parse_trajectory(slurp(out_file / "line.traj"), "t").params_hash == file_only.hash());

    RunResult bad = run("recover \"" + (dir / "line.pbm").string() + "\" --set bogus=1 -o \"" +
                        dir.string() + "\"");
    CHECK(bad.code == 1);
    CHECK(bad.err.find("error:") != std::string::npos);
}

TEST_CASE("cli: sensitivity sweep writes the grid table and one plot per parameter") {
    fs::path corpus = fresh_dir("sweep-corpus");
    write_truth(corpus, "plus", fixtures::plus_crossing());
    write_truth(corpus, "t", fixtures::t_junction());
    REQUIRE(run("synthesize \"" + (corpus / "plus.txt").string() + "\" \"" +
                (corpus / "t.txt").string() + "\" -o \"" + corpus.string() + "\"")
                .code == 0);
    fs::path out = fresh_dir("sweep-out");
    RunResult r = run("sweep --kind sensitivity --corpus \"" + corpus.string() + "\" -o \"" +
                      out.string() + "\"");
    REQUIRE(r.code == 0);
    std::string csv = slurp(out / "sensitivity.csv");
    CHECK(csv.rfind("delta,value,theta,grade\n", 0) == 0);
    std::set<std::string> deltas;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) deltas.insert(line.substr(0, line.find(',')));
    CHECK(deltas.size() == 11);
    for (int k = 1; k <= 11; ++k) {
        fs::path svg = out / ("sensitivity_delta" + std::to_string(k) + ".svg");
        CAPTURE(k);
        CHECK(fs::exists(svg));
    }
}

TEST_CASE("cli: stability sweep is seeded and fully written") {
    fs::path corpus = fresh_dir("stab-corpus");
    write_truth(corpus, "plus", fixtures::plus_crossing());
    REQUIRE(run("synthesize \"" + (corpus / "plus.txt").string() + "\" -o \"" + corpus.string() +
                "\"")
                .code == 0);
    fs::path out1 = fresh_dir("stab-out-1");
    fs::path out2 = fresh_dir("stab-out-2");
    std::string args = "sweep --kind stability --reps 3 --seed 5 --corpus \"" + corpus.string() +
                       "\" -o \"";
    REQUIRE(run(args + out1.string() + "\"").code == 0);
    REQUIRE(run(args + out2.string() + "\"").code == 0);
    std::string csv = slurp(out1 / "stability.csv");
    CHECK(csv == slurp(out2 / "stability.csv"));
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 6 * 3);  // header + six noise levels, three repetitions each
    CHECK(slurp(out1 / "stability.svg").find("<svg") != std::string::npos);

    RunResult bad = run("sweep --kind nope --corpus \"" + corpus.string() + "\" -o \"" +
                        out1.string() + "\"");
    CHECK(bad.code == 1);
}

TEST_CASE("cli: report reproduces the summary evaluate wrote") {
    fs::path dir = synthesize_one("report", "plus", fixtures::plus_crossing());
    write_truth(dir, "tri", fixtures::triple_crossing());
    REQUIRE(run("synthesize \"" + (dir / "tri.txt").string() + "\" -o \"" + dir.string() + "\"")
                .code == 0);
    REQUIRE(run("recover \"" + (dir / "plus.pbm").string() + "\" \"" + (dir / "tri.pbm").string() +
                "\" --scenario rsenc -o \"" + dir.string() + "\"")
                .code == 0);
    REQUIRE(run("evaluate \"" + (dir / "plus.traj").string() + "\" \"" +
                (dir / "tri.traj").string() + "\" -o \"" + dir.string() + "\"")
                .code == 0);
    fs::path out = fresh_dir("report-out");
    RunResult r = run("report \"" + (dir / "metrics.csv").string() + "\" --svg -o \"" +
                      out.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "summary.csv") == slurp(dir / "summary.csv"));
    CHECK(slurp(out / "summary.svg").find("<svg") != std::string::npos);
}
