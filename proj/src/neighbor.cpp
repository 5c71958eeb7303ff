#include "ct/neighbor.hpp"

#include <algorithm>
#include <cmath>

#include "ct/errors.hpp"
#include "ct/parallel.hpp"

namespace ct {
namespace {

struct Point {
    double c[3];
    std::uint32_t idx;
};

inline double dist2(const double* a, const Point& p) {
    double d0 = a[0] - p.c[0];
    double d1 = a[1] - p.c[1];
    double d2 = a[2] - p.c[2];
    return d0 * d0 + d1 * d1 + d2 * d2;
}

// Candidate ordering is lexicographic on (distance, example index), which
// makes the k-best set unique even with duplicate points.
struct Candidate {
    double d2;
    std::uint32_t idx;
};

inline bool worse(const Candidate& a, const Candidate& b) {
    return a.d2 > b.d2 || (a.d2 == b.d2 && a.idx > b.idx);
}

// Bounded max-heap of the current k best candidates, worst on top.
class BestSet {
public:
    explicit BestSet(std::size_t k) : k_(k) { heap_.reserve(k); }

    bool full() const { return heap_.size() == k_; }
    double worst_d2() const { return heap_.front().d2; }

    void offer(const Candidate& c) {
        if (!full()) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end(), worse_cmp);
        } else if (worse(heap_.front(), c)) {
            std::pop_heap(heap_.begin(), heap_.end(), worse_cmp);
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end(), worse_cmp);
        }
    }

    // Ascending (distance, index) order.
    void drain_sorted(std::vector<Candidate>& out) {
        out.assign(heap_.begin(), heap_.end());
        std::sort(out.begin(), out.end(),
                  [](const Candidate& a, const Candidate& b) { return worse(b, a); });
    }

private:
    static bool worse_cmp(const Candidate& a, const Candidate& b) { return worse(b, a); }
    std::size_t k_;
    std::vector<Candidate> heap_;
};

class KdTree3 {
public:
    explicit KdTree3(std::vector<Point> pts) : pts_(std::move(pts)) {
        nodes_.reserve(2 * pts_.size() / kLeafSize + 2);
        root_ = build(0, pts_.size());
    }

    void knn(const double* query, BestSet& best) const { search(root_, query, best); }

private:
    static constexpr std::size_t kLeafSize = 16;
    static constexpr int kNone = -1;

    struct Node {
        double split = 0.0;
        int axis = 0;
        int left = kNone;
        int right = kNone;
        std::uint32_t begin = 0;  // leaf range when left == right == kNone
        std::uint32_t end = 0;
    };

    int build(std::size_t lo, std::size_t hi) {
        int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        if (hi - lo <= kLeafSize) {
            nodes_[id].begin = static_cast<std::uint32_t>(lo);
            nodes_[id].end = static_cast<std::uint32_t>(hi);
            return id;
        }
        // Split the widest axis at the median point.
        double mn[3], mx[3];
        for (int a = 0; a < 3; ++a) mn[a] = mx[a] = pts_[lo].c[a];
        for (std::size_t i = lo + 1; i < hi; ++i) {
            for (int a = 0; a < 3; ++a) {
                mn[a] = std::min(mn[a], pts_[i].c[a]);
                mx[a] = std::max(mx[a], pts_[i].c[a]);
            }
        }
        int axis = 0;
        for (int a = 1; a < 3; ++a) {
            if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;
        }
        std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(pts_.begin() + lo, pts_.begin() + mid, pts_.begin() + hi,
                         [axis](const Point& a, const Point& b) {
                             return a.c[axis] < b.c[axis] ||
                                    (a.c[axis] == b.c[axis] && a.idx < b.idx);
                         });
        double split = pts_[mid].c[axis];
        int left = build(lo, mid);
        int right = build(mid, hi);
        nodes_[id].split = split;
        nodes_[id].axis = axis;
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void search(int id, const double* q, BestSet& best) const {
        const Node& n = nodes_[id];
        if (n.left == kNone) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                best.offer({dist2(q, pts_[i]), pts_[i].idx});
            }
            return;
        }
        double delta = q[n.axis] - n.split;
        int near = delta < 0.0 ? n.left : n.right;
        int far = delta < 0.0 ? n.right : n.left;
        search(near, q, best);
        // An equal-distance point with a lower index can still displace the
        // current worst, so prune only on strict excess.
        if (!best.full() || delta * delta <= best.worst_d2()) {
            search(far, q, best);
        }
    }

    std::vector<Point> pts_;
    std::vector<Node> nodes_;
    int root_ = 0;
};

}  // namespace

NeighborIndex::NeighborIndex(int centroid_count, int entries_per_list,
                             std::vector<std::uint32_t> flat)
    : centroids_(centroid_count), entries_(entries_per_list), flat_(std::move(flat)) {}

std::span<const std::uint32_t> NeighborIndex::query(int m) const {
    if (m < 0 || m >= centroids_) {
        throw IndexOutOfRange("centroid index " + std::to_string(m) + " not in [0, " +
                              std::to_string(centroids_) + ")");
    }
    return {flat_.data() + static_cast<std::size_t>(m) * entries_,
            static_cast<std::size_t>(entries_)};
}

NeighborIndex build_index(const LabImage& x0, const LabImage& y, int k_nn, int threads) {
    if (k_nn < 1) throw ConfigInvalid("k_nn must be >= 1");
    const std::size_t centroid_count = x0.pixel_count();
    const std::size_t example_count = y.pixel_count();
    if (example_count == 0) throw EmptyExample("example image has no pixels");

    std::vector<Point> pts(example_count);
    for (std::size_t k = 0; k < example_count; ++k) {
        pts[k] = {{y.L[k], y.a[k], y.b[k]}, static_cast<std::uint32_t>(k)};
    }
    KdTree3 tree(std::move(pts));

    const int entries = static_cast<int>(std::min<std::size_t>(k_nn, example_count));
    std::vector<std::uint32_t> flat(centroid_count * entries);
    parallel_chunks(centroid_count, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<Candidate> sorted;
        for (std::size_t m = begin; m < end; ++m) {
            double q[3] = {x0.L[m], x0.a[m], x0.b[m]};
            BestSet best(entries);
            tree.knn(q, best);
            best.drain_sorted(sorted);
            for (int j = 0; j < entries; ++j) {
                flat[m * entries + j] = sorted[j].idx;
            }
        }
    });
    return NeighborIndex(static_cast<int>(centroid_count), entries, std::move(flat));
}

}  // namespace ct
