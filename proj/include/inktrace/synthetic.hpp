#pragma once

#include <cstdint>
#include <vector>

#include "inktrace/eval.hpp"

namespace inktrace {

// Deterministic multi-stroke trajectory for benchmarking: gently curved strokes whose
// orientations come from well-separated buckets so crossings are transversal. About a
// quarter of seeds yield a single stroke.
OnlineTrajectory synthetic_trajectory(std::uint64_t seed);

// Rasterized fixed-seed corpus: specimen k uses seed `seed + k`.
std::vector<Specimen> synthetic_corpus(int count, std::uint64_t seed);

}  // namespace inktrace
