#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "inktrace/skeleton.hpp"

namespace testsup {

// ASCII-art skeletons: '#' is ink, anything else background. Rows may have uneven
// lengths; the image is as wide as the widest row.
inline inktrace::SkeletonImage image_from(const std::vector<std::string>& rows) {
    size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.size());
    inktrace::SkeletonImage img =
        inktrace::SkeletonImage::blank(static_cast<int>(width), static_cast<int>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            if (rows[r][c] == '#') img.set(static_cast<int>(r), static_cast<int>(c), true);
    return img;
}

inline std::set<inktrace::Pixel> ink_set(const inktrace::SkeletonImage& img) {
    std::set<inktrace::Pixel> s;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            if (img.at(r, c)) s.insert({r, c});
    return s;
}

}  // namespace testsup
