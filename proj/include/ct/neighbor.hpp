#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ct/colorspace.hpp"

namespace ct {

// Per-centroid nearest example pixels, fixed at construction. Each list is
// sorted by ascending distance to the build-time query point, ties broken
// by lower example index.
class NeighborIndex {
public:
    NeighborIndex() = default;
    NeighborIndex(int centroid_count, int entries_per_list, std::vector<std::uint32_t> flat);

    int centroid_count() const { return centroids_; }
    int entries_per_list() const { return entries_; }

    // Constant-time lookup of the stored list; throws IndexOutOfRange.
    std::span<const std::uint32_t> query(int m) const;

private:
    int centroids_ = 0;
    int entries_ = 0;
    std::vector<std::uint32_t> flat_;  // centroids_ * entries_ indices
};

// Exact k-nearest-neighbor lists of x0's pixels among y's pixels in
// normalized Lab space. Built once from the initial transferred image and
// never rebuilt. Each list holds min(k_nn, K) entries.
NeighborIndex build_index(const LabImage& x0, const LabImage& y, int k_nn, int threads = 1);

}  // namespace ct
