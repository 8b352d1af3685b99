#include "inktrace/synthetic.hpp"

#include <cmath>
#include <random>

namespace inktrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One candidate drawing: 1-4 gently curved strokes aimed through a shared region so
// that any two of them cross at most once and never tangentially.
OnlineTrajectory propose(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int n = u01(rng) < 0.25 ? 1 : 2 + static_cast<int>(u01(rng) * 3.0);

    OnlineTrajectory t;
    double rotation = u01(rng) * 180.0;
    const double center_row = 55.0, center_col = 70.0;
    for (int k = 0; k < n; ++k) {
        double angle = rotation + k * 180.0 / n + (u01(rng) * 16.0 - 8.0);
        double length = 65.0 + u01(rng) * 30.0;
        double bias = u01(rng) * 5.0 - 2.5;
        double back = length * (0.35 + u01(rng) * 0.30);
        double offset = u01(rng) * 60.0 - 30.0;

        double rad = angle * kPi / 180.0;
        double dr = std::sin(rad), dc = std::cos(rad);
        double row = center_row - dr * back - dc * offset;
        double col = center_col - dc * back + dr * offset;

        std::vector<OnlinePoint> stroke{{col, row}};
        const double step = 7.0;
        int steps = static_cast<int>(std::lround(length / step));
        double a = angle;
        for (int i = 0; i < steps; ++i) {
            a += bias + (u01(rng) * 14.0 - 7.0);
            double r = a * kPi / 180.0;
            row += std::sin(r) * step;
            col += std::cos(r) * step;
            stroke.push_back({col, row});
        }
        t.strokes.push_back(std::move(stroke));
    }
    return t;
}

// A drawing is usable when it rasterizes to a skeleton whose stroke tips are real
// end points (pen-down spots must map onto the skeleton) and starts stay apart.
bool acceptable(const OnlineTrajectory& t) {
    Rasterized raster = rasterize(t);
    ClassMap map;
    try {
        map = classify_points(raster.image);
    } catch (const std::exception&) {
        return false;
    }
    for (const auto& stroke : raster.strokes) {
        if (stroke.size() < 2) return false;
        if (map.at(stroke.front()) != PixelClass::EndPoint) return false;
        if (map.at(stroke.back()) != PixelClass::EndPoint) return false;
    }
    for (size_t i = 0; i < raster.strokes.size(); ++i) {
        for (size_t j = i + 1; j < raster.strokes.size(); ++j) {
            Pixel a = raster.strokes[i].front(), b = raster.strokes[j].front();
            if (std::hypot(double(a.row - b.row), double(a.col - b.col)) < 6.0) return false;
        }
    }
    return true;
}

}  // namespace

OnlineTrajectory synthetic_trajectory(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    OnlineTrajectory t;
    for (int attempt = 0; attempt < 64; ++attempt) {
        t = propose(rng);
        if (acceptable(t)) return t;
    }
    return t;  // extremely unlikely; the corpus checks catch it if it matters
}

std::vector<Specimen> synthetic_corpus(int count, std::uint64_t seed) {
    std::vector<Specimen> corpus;
    corpus.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::string id = "synthetic-" + std::to_string(seed + k);
        corpus.push_back(make_specimen(std::move(id), synthetic_trajectory(seed + k)));
    }
    return corpus;
}

}  // namespace inktrace
