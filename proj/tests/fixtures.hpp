#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "inktrace/eval.hpp"

// Hand-built drawings with known pen order. Each returns on-line ground truth; the
// raster comes from rasterize(). Coordinates are (x = col, y = row).
namespace fixtures {

using inktrace::OnlinePoint;
using inktrace::OnlineTrajectory;

inline OnlineTrajectory straight_line() {
    OnlineTrajectory t;
    t.strokes.push_back({{5, 8}, {45, 28}});
    return t;
}

// Horizontal then vertical stroke crossing at right angles: one rank-4 cluster.
inline OnlineTrajectory plus_crossing() {
    OnlineTrajectory t;
    t.strokes.push_back({{5, 30}, {65, 30}});
    t.strokes.push_back({{35, 5}, {35, 55}});
    return t;
}

// Two straight strokes through a common center, crossing at `degrees`.
inline OnlineTrajectory x_crossing(double degrees) {
    const double kPi = 3.14159265358979323846;
    double half = degrees / 2.0 * kPi / 180.0;
    OnlineTrajectory t;
    double cx = 40, cy = 40, len = 34;
    for (int s = 0; s < 2; ++s) {
        double a = (s == 0) ? half : -half;
        double dx = std::cos(a), dy = std::sin(a);
        t.strokes.push_back({{cx - dx * len, cy - dy * len}, {cx + dx * len, cy + dy * len}});
    }
    return t;
}

// Crossbar drawn left to right, then a stem dropped from its middle: a 3-rank
// T-junction whose bar halves line up and whose stem stays long enough that no
// branch looks retraced.
inline OnlineTrajectory t_junction() {
    OnlineTrajectory t;
    t.strokes.push_back({{5, 10}, {65, 10}});
    t.strokes.push_back({{35, 45}, {35, 10}});  // pen down at the free tip
    return t;
}

// One pen-down: in from the upper left, a short straight tail out to the right and
// back over itself, then on toward the lower right. The doubled tail is the
// retraced branch; the in/out arms line up.
inline OnlineTrajectory retraced_tail() {
    OnlineTrajectory t;
    t.strokes.push_back({{8, 8}, {36, 36}, {52, 36}, {36, 36}, {64, 64}});
    return t;
}

// Two crossing strokes whose middles merge into one shared horizontal run. Each end
// of the shared run is a 3-rank junction; together they form a coupled double
// junction, and each pen passes straight through it.
inline OnlineTrajectory coupled_junctions() {
    OnlineTrajectory t;
    t.strokes.push_back({{8, 10}, {40, 32}, {62, 32}, {94, 54}});
    t.strokes.push_back({{8, 54}, {40, 32}, {62, 32}, {94, 10}});
    return t;
}

// Three straight strokes through one point at 60 degree spacing: a rank-6 cluster.
inline OnlineTrajectory triple_crossing() {
    OnlineTrajectory t;
    const double kPi = 3.14159265358979323846;
    double cx = 45, cy = 45, len = 32;
    for (int s = 0; s < 3; ++s) {
        double a = s * 60.0 * kPi / 180.0;
        double dx = std::cos(a), dy = std::sin(a);
        t.strokes.push_back({{cx - dx * len, cy - dy * len}, {cx + dx * len, cy + dy * len}});
    }
    return t;
}

struct Golden {
    std::string name;
    OnlineTrajectory truth;
    // resolution kinds that must appear for this drawing
    std::vector<std::string> kinds;
};

// A shallow raster crossing may come out as one even cluster or as a coupled pair
// of 3-ranks; both read the pen straight through, so the X entries only require
// crossing-like kinds while the dedicated fixtures pin each 3-rank class.
inline std::vector<Golden> golden_suite() {
    return {
        {"straight-line", straight_line(), {}},
        {"plus-crossing", plus_crossing(), {"even"}},
        {"x-30", x_crossing(30), {}},
        {"x-45", x_crossing(45), {}},
        {"x-60", x_crossing(60), {}},
        {"t-junction", t_junction(), {"t"}},
        {"retraced-tail", retraced_tail(), {"retraced"}},
        {"coupled-junctions", coupled_junctions(), {"coupled"}},
        {"triple-crossing", triple_crossing(), {"even"}},
    };
}

}  // namespace fixtures
