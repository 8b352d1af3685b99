#pragma once

#include <string>

#include "inktrace/skeleton.hpp"

namespace inktrace {

// Portable bitmap I/O; ink pixels are black (1). Reading accepts P1 (ASCII) and P4
// (packed) with header comments; errors name the offending file.
SkeletonImage read_pbm(const std::string& path);
SkeletonImage parse_pbm(const std::string& bytes, const std::string& name = "<memory>");

// P1 with one packed digit row per line; P4 packs rows MSB-first.
std::string write_pbm_p1(const SkeletonImage& image);
std::string write_pbm_p4(const SkeletonImage& image);
void write_pbm(const SkeletonImage& image, const std::string& path, bool binary = false);

}  // namespace inktrace
