#pragma once

#include <array>

#include "ct/colorspace.hpp"

namespace ct {

// 5x5 zero-sum stencil. Constant images convolve to zero.
struct LaplacianKernel {
    static constexpr int kSize = 5;
    std::array<double, 25> weights{};

    double center_weight() const { return weights[12]; }
};

// Off-center weights 1, center -24.
LaplacianKernel default_kernel();

// Correlation with the stencil under replicate (clamp-to-edge) padding.
// Output dimensions equal the input's. Equals the pairwise form
// sum_{m' in window} w_{m'} (x_{m'} - x_m) since the weights sum to zero.
PlanarF64Image convolve(const PlanarF64Image& img, const LaplacianKernel& k);

// Transpose of the convolve operator (scatter form). Differs from convolve
// near the borders because of the replicate padding; the analytic objective
// gradient needs the true transpose.
PlanarF64Image convolve_adjoint(const PlanarF64Image& img, const LaplacianKernel& k);

// Laplacian of the normalized source, one plane per Lab channel. Computed
// once before the first iteration and never recomputed.
struct SourceLaplacian {
    PlanarF64Image planes;  // 3 channels

    int width() const { return planes.width; }
    int height() const { return planes.height; }
};

SourceLaplacian source_laplacian(const LabImage& normalized_source);

}  // namespace ct
