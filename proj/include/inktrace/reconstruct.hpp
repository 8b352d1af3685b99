#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inktrace/pairing.hpp"

namespace inktrace {

enum class Scenario : std::uint8_t { ESTNC, RSENC, RSEOC };
const char* to_string(Scenario s);
std::optional<Scenario> scenario_from_string(const std::string& name);

// Gaussian prior for where writing starts, in pixels.
struct StartModel {
    double mean_row = 0, mean_col = 0;
    double sigma_row = 1, sigma_col = 1;

    static StartModel for_image(int width, int height, const ParamSet& params);
};

// End point closest to the prior mean if any lies inside the 2-sigma ellipse,
// otherwise the leftmost (ties by smallest row). Throws on an empty candidate list.
Pixel select_start_point(const std::vector<Pixel>& candidates, const StartModel& model);

// Candidate whose coordinates are nearest to `from` (Euclidean); ties prefer the
// smallest column, then the smallest row.
Pixel next_component(Pixel from, const std::vector<Pixel>& candidates);

// One pen-down: an ordered 8-connected pixel run. Retraced stretches repeat pixels.
struct Component {
    std::vector<Pixel> points;
    Pixel start() const { return points.front(); }
    Pixel end() const { return points.back(); }
};

struct RecoveredTrajectory {
    Scenario scenario = Scenario::ESTNC;
    std::string params_hash;
    std::vector<Component> components;

    std::vector<Pixel> flat() const;   // all points in recovered order
};

// Walks components across the resolved skeleton: arcs between terminals, resolved
// pairs through clusters, double-traced retraces, disjoint stems ending components.
// Each resolved pair is consumed at most once per recovery.
class Traverser {
  public:
    Traverser(const Analysis& analysis, const std::vector<ClusterResolution>& resolutions);

    // Start at an end point (or loop/orphan seed) and walk until the trajectory ends.
    Component trace_component(Pixel start);

    // End points not yet visited by any traced component.
    std::vector<Pixel> untraced_end_points() const;
    // Start pixels of untraversed closed loops (topmost-then-leftmost of each).
    std::vector<Pixel> untraced_loop_starts() const;
    // Seeds of arcs no component reached (dangling connectors etc.).
    std::vector<Pixel> untraced_orphan_seeds() const;

    bool pixel_traced(Pixel p) const;
    // Registers pixels spliced into components from outside (coverage detours).
    void mark_traced(Pixel p);

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Full reconstruction for one scenario. RSENC/RSEOC need the ground-truth strokes
// (ordered pixel runs); every stroke's first pixel (the pen-down spot) must sit within
// 2 px of a skeleton end point or the call throws "ground truth misaligned".
// Afterwards uncovered ink is swept into components so that every ink pixel is traced.
RecoveredTrajectory recover(const Analysis& analysis,
                            const std::vector<ClusterResolution>& resolutions,
                            const ParamSet& params, Scenario scenario,
                            const std::vector<std::vector<Pixel>>* gt_strokes = nullptr);

// Text form: header lines "# scenario <name>" and "# params <hash>", then one line
// per point: "component_index x y order_index" with a global order index.
std::string write_trajectory(const RecoveredTrajectory& t);
RecoveredTrajectory parse_trajectory(const std::string& text, const std::string& name = "<memory>");

}  // namespace inktrace
