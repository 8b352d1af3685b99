#pragma once

#include <compare>
#include <cstddef>
#include <cstdlib>
#include <functional>

namespace inktrace {

// Image coordinate: row grows downward, col grows rightward.
// All angle math treats x = col, y = row.
struct Pixel {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// 8-neighborhood offsets in row-major scan order.
inline constexpr int kNeighbors8[8][2] = {
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

inline bool adjacent8(Pixel a, Pixel b) {
    int dr = std::abs(a.row - b.row), dc = std::abs(a.col - b.col);
    return (dr | dc) != 0 && dr <= 1 && dc <= 1;
}

// Straight adjacency (shares an edge, not just a corner).
inline bool adjacent4(Pixel a, Pixel b) {
    int dr = std::abs(a.row - b.row), dc = std::abs(a.col - b.col);
    return dr + dc == 1;
}

struct PixelHash {
    std::size_t operator()(Pixel p) const {
        return std::hash<long long>()((static_cast<long long>(p.row) << 32) ^
                                      static_cast<unsigned>(p.col));
    }
};

}  // namespace inktrace
