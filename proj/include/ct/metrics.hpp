#pragma once

#include <string>
#include <vector>

#include "ct/image.hpp"

namespace ct {

// 10*log10(255^2 / MSE) over all 3*W*H samples; +infinity when the images
// are identical.
double psnr(const RgbImage& a, const RgbImage& b);

// Mean structural similarity on Rec.601 luma with the standard 11x11
// Gaussian window (sigma 1.5) and constants, averaged over fully interior
// windows. Requires both images to be at least 11x11.
double ssim(const RgbImage& a, const RgbImage& b);

// Global mean/std matching in Lab: per channel, source values are shifted
// and scaled so their statistics match the example's. Simple sanity
// baseline, not a faithful reproduction of any published method.
RgbImage baseline_meanstd(const RgbImage& source, const RgbImage& example);

struct FrameMetrics {
    int q = 0;
    double ssim = 0.0;
    double psnr = 0.0;  // may be +infinity
};

struct MetricsReport {
    std::vector<FrameMetrics> frames;

    const FrameMetrics& final_frame() const;

    // {"frames":[{"q":...,"ssim":...,"psnr":...|null},...]}; null encodes
    // the infinite-PSNR sentinel.
    std::string to_json() const;
};

}  // namespace ct
