#include "ct/colorspace.hpp"

#include <cmath>

namespace ct {
namespace {

// sRGB -> XYZ, D65. The middle coefficient of the Y row is nudged by 1e-7
// so each row sums exactly to the reference white; grays then land exactly
// on the neutral axis instead of picking up ~1e-5 of chroma.
constexpr double kFwd[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151521, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// Exact inverse of kFwd, precomputed at full precision.
constexpr double kInv[3][3] = {
    {3.2404549850111386, -1.5371391384715574, -0.49853155325622894},
    {-0.96926657171112196, 1.8760112807842577, 0.041556090142641451},
    {0.055643439379757687, -0.20402589254317854, 1.0572251616100772},
};

constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

constexpr double kEpsilon = 216.0 / 24389.0;  // (6/29)^3
constexpr double kKappa = 24389.0 / 27.0;

double gamma_decode(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double gamma_encode(double c) {
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double u) {
    double u3 = u * u * u;
    return u3 > kEpsilon ? u3 : (116.0 * u - 16.0) / kKappa;
}

struct DecodeLut {
    double v[256];
    DecodeLut() {
        for (int i = 0; i < 256; ++i) v[i] = gamma_decode(i / 255.0);
    }
};

const DecodeLut& decode_lut() {
    static const DecodeLut lut;
    return lut;
}

std::uint8_t to_byte(double c) {
    long v = std::lround(c * 255.0);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    return static_cast<std::uint8_t>(v);
}

}  // namespace

PlanarF64Image LabImage::planar() const {
    PlanarF64Image out;
    out.width = width;
    out.height = height;
    out.planes = {L, a, b};
    return out;
}

LabImage srgb_to_lab(const RgbImage& img) {
    const auto& lut = decode_lut();
    LabImage out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        double r = lut.v[img.data[3 * i + 0]];
        double g = lut.v[img.data[3 * i + 1]];
        double bl = lut.v[img.data[3 * i + 2]];
        double x = kFwd[0][0] * r + kFwd[0][1] * g + kFwd[0][2] * bl;
        double y = kFwd[1][0] * r + kFwd[1][1] * g + kFwd[1][2] * bl;
        double z = kFwd[2][0] * r + kFwd[2][1] * g + kFwd[2][2] * bl;
        double fx = lab_f(x / kWhiteX);
        double fy = lab_f(y / kWhiteY);
        double fz = lab_f(z / kWhiteZ);
        out.L[i] = 116.0 * fy - 16.0;
        out.a[i] = 500.0 * (fx - fy);
        out.b[i] = 200.0 * (fy - fz);
    }
    return out;
}

RgbImage lab_to_srgb(const LabImage& img) {
    RgbImage out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        double fy = (img.L[i] + 16.0) / 116.0;
        double fx = fy + img.a[i] / 500.0;
        double fz = fy - img.b[i] / 200.0;
        double x = lab_f_inv(fx) * kWhiteX;
        double y = lab_f_inv(fy) * kWhiteY;
        double z = lab_f_inv(fz) * kWhiteZ;
        double rgb[3];
        rgb[0] = kInv[0][0] * x + kInv[0][1] * y + kInv[0][2] * z;
        rgb[1] = kInv[1][0] * x + kInv[1][1] * y + kInv[1][2] * z;
        rgb[2] = kInv[2][0] * x + kInv[2][1] * y + kInv[2][2] * z;
        for (int c = 0; c < 3; ++c) {
            double lin = rgb[c];
            if (lin < 0.0) lin = 0.0;
            if (lin > 1.0) lin = 1.0;
            out.data[3 * i + c] = to_byte(gamma_encode(lin));
        }
    }
    return out;
}

std::array<double, 3> normalize_lab(const LabPixel& p) {
    return {p.L / 100.0, (p.a + 128.0) / 255.0, (p.b + 128.0) / 255.0};
}

LabImage normalize_image(const LabImage& lab) {
    LabImage out(lab.width, lab.height);
    const std::size_t n = lab.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        out.L[i] = lab.L[i] / 100.0;
        out.a[i] = (lab.a[i] + 128.0) / 255.0;
        out.b[i] = (lab.b[i] + 128.0) / 255.0;
    }
    return out;
}

LabImage denormalize_image(const LabImage& unit) {
    LabImage out(unit.width, unit.height);
    const std::size_t n = unit.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        out.L[i] = unit.L[i] * 100.0;
        out.a[i] = unit.a[i] * 255.0 - 128.0;
        out.b[i] = unit.b[i] * 255.0 - 128.0;
    }
    return out;
}

}  // namespace ct
