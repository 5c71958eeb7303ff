#include "ct/laplacian.hpp"

#include <algorithm>

#include "ct/errors.hpp"

namespace ct {
namespace {

inline int clamp_coord(int v, int hi) { return std::clamp(v, 0, hi - 1); }

void check_dims(const PlanarF64Image& img) {
    if (img.width < 1 || img.height < 1) {
        throw DimensionMismatch("convolution input must be at least 1x1");
    }
    for (const auto& p : img.planes) {
        if (p.size() != img.pixel_count()) {
            throw DimensionMismatch("plane size does not match image dimensions");
        }
    }
}

}  // namespace

LaplacianKernel default_kernel() {
    LaplacianKernel k;
    k.weights.fill(1.0);
    k.weights[12] = -24.0;
    return k;
}

PlanarF64Image convolve(const PlanarF64Image& img, const LaplacianKernel& k) {
    check_dims(img);
    constexpr int R = LaplacianKernel::kSize / 2;
    PlanarF64Image out(img.width, img.height, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        const std::vector<double>& in = img.planes[c];
        std::vector<double>& dst = out.planes[c];
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int dy = -R; dy <= R; ++dy) {
                    int sy = clamp_coord(y + dy, img.height);
                    for (int dx = -R; dx <= R; ++dx) {
                        int sx = clamp_coord(x + dx, img.width);
                        double w = k.weights[(dy + R) * LaplacianKernel::kSize + (dx + R)];
                        acc += w * in[static_cast<std::size_t>(sy) * img.width + sx];
                    }
                }
                dst[static_cast<std::size_t>(y) * img.width + x] = acc;
            }
        }
    }
    return out;
}

PlanarF64Image convolve_adjoint(const PlanarF64Image& img, const LaplacianKernel& k) {
    check_dims(img);
    constexpr int R = LaplacianKernel::kSize / 2;
    PlanarF64Image out(img.width, img.height, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        const std::vector<double>& in = img.planes[c];
        std::vector<double>& dst = out.planes[c];
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                double v = in[static_cast<std::size_t>(y) * img.width + x];
                for (int dy = -R; dy <= R; ++dy) {
                    int sy = clamp_coord(y + dy, img.height);
                    for (int dx = -R; dx <= R; ++dx) {
                        int sx = clamp_coord(x + dx, img.width);
                        double w = k.weights[(dy + R) * LaplacianKernel::kSize + (dx + R)];
                        dst[static_cast<std::size_t>(sy) * img.width + sx] += w * v;
                    }
                }
            }
        }
    }
    return out;
}

SourceLaplacian source_laplacian(const LabImage& normalized_source) {
    return {convolve(normalized_source.planar(), default_kernel())};
}

}  // namespace ct
