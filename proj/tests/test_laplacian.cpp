#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "ct/errors.hpp"
#include "ct/laplacian.hpp"

using namespace ct;

namespace {

// Reference convolution written differently on purpose: build an explicitly
// replicate-padded buffer, then run an unguarded 25-tap loop over it.
PlanarF64Image padded_reference(const PlanarF64Image& img, const LaplacianKernel& k) {
    const int w = img.width, h = img.height, r = 2;
    const int pw = w + 2 * r, ph = h + 2 * r;
    PlanarF64Image out(w, h, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        std::vector<double> pad(static_cast<std::size_t>(pw) * ph);
        for (int y = 0; y < ph; ++y) {
            int sy = std::clamp(y - r, 0, h - 1);
            for (int x = 0; x < pw; ++x) {
                int sx = std::clamp(x - r, 0, w - 1);
                pad[static_cast<std::size_t>(y) * pw + x] =
                    img.planes[c][static_cast<std::size_t>(sy) * w + sx];
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int t = 0; t < 25; ++t) {
                    int dy = t / 5, dx = t % 5;
                    acc += k.weights[t] *
                           pad[static_cast<std::size_t>(y + dy) * pw + (x + dx)];
                }
                out.planes[c][static_cast<std::size_t>(y) * w + x] = acc;
            }
        }
    }
    return out;
}

PlanarF64Image random_image(std::mt19937& rng, int w, int h, int channels = 1) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    PlanarF64Image img(w, h, channels);
    for (auto& plane : img.planes) {
        for (double& v : plane) v = dist(rng);
    }
    return img;
}

double max_abs_diff(const PlanarF64Image& a, const PlanarF64Image& b) {
    double worst = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        for (std::size_t i = 0; i < a.pixel_count(); ++i) {
            worst = std::max(worst, std::abs(a.planes[c][i] - b.planes[c][i]));
        }
    }
    return worst;
}

}  // namespace

TEST_SUITE("laplacian") {

TEST_CASE("default kernel shape") {
    LaplacianKernel k = default_kernel();
    double sum = 0.0;
    for (double w : k.weights) sum += w;
    CHECK(sum == 0.0);
    CHECK(k.center_weight() == -24.0);
    for (int i = 0; i < 25; ++i) {
        if (i != 12) CHECK(k.weights[i] == 1.0);
    }
}

TEST_CASE("constant image maps to zero") {
    LaplacianKernel k = default_kernel();
    PlanarF64Image img(9, 7, 2);
    for (auto& plane : img.planes) std::fill(plane.begin(), plane.end(), 3.75);
    PlanarF64Image out = convolve(img, k);
    for (const auto& plane : out.planes) {
        for (double v : plane) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("centered impulse reproduces the stencil") {
    LaplacianKernel k = default_kernel();
    PlanarF64Image img(7, 7, 1);
    img.planes[0][3 * 7 + 3] = 1.0;
    PlanarF64Image out = convolve(img, k);
    CHECK(out.planes[0][3 * 7 + 3] == -24.0);
    int ones = 0;
    for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 7; ++x) {
            if (x == 3 && y == 3) continue;
            double v = out.planes[0][y * 7 + x];
            if (std::abs(x - 3) <= 2 && std::abs(y - 3) <= 2) {
                CHECK(v == 1.0);
                ++ones;
            } else {
                CHECK(v == 0.0);
            }
        }
    }
    CHECK(ones == 24);
    CHECK(max_abs_diff(out, padded_reference(img, k)) < 1e-12);
}

TEST_CASE("linear ramp vanishes on interior pixels") {
    LaplacianKernel k = default_kernel();
    PlanarF64Image img(10, 8, 1);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 10; ++x) img.planes[0][y * 10 + x] = x;
    }
    PlanarF64Image out = convolve(img, k);
    for (int y = 2; y < 6; ++y) {
        for (int x = 2; x < 8; ++x) CHECK(std::abs(out.planes[0][y * 10 + x]) < 1e-12);
    }
}

TEST_CASE("matches padded reference on random images") {
    LaplacianKernel k = default_kernel();
    std::mt19937 rng(404);
    std::uniform_int_distribution<int> dim(1, 13);
    for (int trial = 0; trial < 20; ++trial) {
        PlanarF64Image img = random_image(rng, dim(rng), dim(rng));
        CHECK(max_abs_diff(convolve(img, k), padded_reference(img, k)) < 1e-10);
    }
}

TEST_CASE("linearity") {
    LaplacianKernel k = default_kernel();
    std::mt19937 rng(11);
    PlanarF64Image f = random_image(rng, 9, 9);
    PlanarF64Image g = random_image(rng, 9, 9);
    PlanarF64Image combo(9, 9, 1);
    for (std::size_t i = 0; i < combo.pixel_count(); ++i) {
        combo.planes[0][i] = 2.5 * f.planes[0][i] - 1.25 * g.planes[0][i];
    }
    PlanarF64Image lhs = convolve(combo, k);
    PlanarF64Image cf = convolve(f, k);
    PlanarF64Image cg = convolve(g, k);
    for (std::size_t i = 0; i < lhs.pixel_count(); ++i) {
        double expect = 2.5 * cf.planes[0][i] - 1.25 * cg.planes[0][i];
        CHECK(std::abs(lhs.planes[0][i] - expect) < 1e-10);
    }
}

TEST_CASE("pairwise neighbor-difference form equals the stencil") {
    // sum_{m'} w_{m'} (x_{m'} - x_m) over the 5x5 window with replicate
    // padding; identical to the zero-sum stencil applied directly.
    LaplacianKernel k = default_kernel();
    std::mt19937 rng(2024);
    PlanarF64Image img = random_image(rng, 8, 6);
    PlanarF64Image out = convolve(img, k);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 8; ++x) {
            double center = img.planes[0][y * 8 + x];
            double acc = 0.0;
            for (int dy = -2; dy <= 2; ++dy) {
                for (int dx = -2; dx <= 2; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    int sy = std::clamp(y + dy, 0, 5);
                    int sx = std::clamp(x + dx, 0, 7);
                    acc += img.planes[0][sy * 8 + sx] - center;
                }
            }
            CHECK(std::abs(out.planes[0][y * 8 + x] - acc) < 1e-10);
        }
    }
}

TEST_CASE("adjoint satisfies the inner-product identity") {
    LaplacianKernel k = default_kernel();
    std::mt19937 rng(555);
    for (int trial = 0; trial < 8; ++trial) {
        std::uniform_int_distribution<int> dim(1, 9);
        int w = dim(rng), h = dim(rng);
        PlanarF64Image f = random_image(rng, w, h);
        PlanarF64Image g = random_image(rng, w, h);
        PlanarF64Image af = convolve(f, k);
        PlanarF64Image atg = convolve_adjoint(g, k);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < f.pixel_count(); ++i) {
            lhs += af.planes[0][i] * g.planes[0][i];
            rhs += f.planes[0][i] * atg.planes[0][i];
        }
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("source laplacian equals per-channel convolution") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    LabImage src(6, 5);
    for (std::size_t i = 0; i < src.pixel_count(); ++i) {
        src.L[i] = dist(rng);
        src.a[i] = dist(rng);
        src.b[i] = dist(rng);
    }
    SourceLaplacian ds = source_laplacian(src);
    CHECK(ds.width() == 6);
    CHECK(ds.height() == 5);
    PlanarF64Image direct = convolve(src.planar(), default_kernel());
    CHECK(max_abs_diff(ds.planes, direct) == 0.0);

    LabImage flat(4, 4);
    for (std::size_t i = 0; i < flat.pixel_count(); ++i) {
        flat.L[i] = 0.25;
        flat.a[i] = 0.5;
        flat.b[i] = 0.75;
    }
    SourceLaplacian dflat = source_laplacian(flat);
    for (const auto& plane : dflat.planes.planes) {
        for (double v : plane) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("degenerate dimensions are rejected") {
    LaplacianKernel k = default_kernel();
    PlanarF64Image empty;
    CHECK_THROWS_AS(convolve(empty, k), DimensionMismatch);
    CHECK_THROWS_AS(convolve_adjoint(empty, k), DimensionMismatch);
}

}  // TEST_SUITE
