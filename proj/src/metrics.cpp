#include "ct/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "ct/colorspace.hpp"
#include "ct/errors.hpp"

namespace ct {
namespace {

void require_same_dims(const RgbImage& a, const RgbImage& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatch("image dimensions differ: " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                "x" + std::to_string(b.height));
    }
}

std::vector<double> luma_plane(const RgbImage& img) {
    std::vector<double> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                 0.114 * img.data[3 * i + 2];
    }
    return out;
}

// Normalized 11x11 Gaussian, sigma 1.5.
std::array<double, 121> ssim_window() {
    std::array<double, 121> w{};
    double total = 0.0;
    for (int y = 0; y < 11; ++y) {
        for (int x = 0; x < 11; ++x) {
            double dy = y - 5.0, dx = x - 5.0;
            w[y * 11 + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
            total += w[y * 11 + x];
        }
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

double psnr(const RgbImage& a, const RgbImage& b) {
    require_same_dims(a, b);
    double sse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    double mse = sse / static_cast<double>(a.data.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const RgbImage& a, const RgbImage& b) {
    require_same_dims(a, b);
    if (a.width < 11 || a.height < 11) {
        throw ImageTooSmall("ssim needs at least 11x11 images, got " +
                            std::to_string(a.width) + "x" + std::to_string(a.height));
    }
    static const std::array<double, 121> win = ssim_window();
    constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

    const std::vector<double> la = luma_plane(a);
    const std::vector<double> lb = luma_plane(b);
    const int w = a.width, h = a.height;

    double total = 0.0;
    std::size_t count = 0;
    for (int cy = 5; cy < h - 5; ++cy) {
        for (int cx = 5; cx < w - 5; ++cx) {
            double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int dy = -5; dy <= 5; ++dy) {
                const double* ra = la.data() + static_cast<std::size_t>(cy + dy) * w + cx;
                const double* rb = lb.data() + static_cast<std::size_t>(cy + dy) * w + cx;
                const double* wr = win.data() + (dy + 5) * 11 + 5;
                for (int dx = -5; dx <= 5; ++dx) {
                    double wt = wr[dx];
                    double va = ra[dx], vb = rb[dx];
                    ma += wt * va;
                    mb += wt * vb;
                    saa += wt * va * va;
                    sbb += wt * vb * vb;
                    sab += wt * (va * vb);  // grouped so ssim(a,b) == ssim(b,a) bit-exactly
                }
            }
            double var_a = saa - ma * ma;
            double var_b = sbb - mb * mb;
            double cov = sab - ma * mb;
            double score = ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
                           ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
            total += score;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

RgbImage baseline_meanstd(const RgbImage& source, const RgbImage& example) {
    LabImage s = srgb_to_lab(source);
    LabImage y = srgb_to_lab(example);

    auto stats = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        return std::pair<double, double>{mean, std::sqrt(var)};
    };
    auto remap = [&](std::vector<double>& sv, const std::vector<double>& yv) {
        auto [ms, ss] = stats(sv);
        auto [my, sy] = stats(yv);
        double ratio = ss < 1e-9 ? 1.0 : sy / ss;
        for (double& x : sv) x = (x - ms) * ratio + my;
    };
    remap(s.L, y.L);
    remap(s.a, y.a);
    remap(s.b, y.b);
    return lab_to_srgb(s);
}

const FrameMetrics& MetricsReport::final_frame() const {
    if (frames.empty()) throw IndexOutOfRange("metrics report has no frames");
    return frames.back();
}

std::string MetricsReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["frames"] = nlohmann::ordered_json::array();
    for (const FrameMetrics& f : frames) {
        nlohmann::ordered_json rec;
        rec["q"] = f.q;
        rec["ssim"] = f.ssim;
        if (std::isinf(f.psnr)) {
            rec["psnr"] = nullptr;
        } else {
            rec["psnr"] = f.psnr;
        }
        doc["frames"].push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
}

}  // namespace ct
