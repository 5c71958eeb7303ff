#include "ct/imageio.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <csetjmp>
#include <memory>

#include "ct/errors.hpp"

namespace ct {
namespace {

// Posterior table memory is M*k_nn, so cap accidental huge inputs.
constexpr std::size_t kMaxPixels = std::size_t{1} << 26;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_dimensions(long w, long h, const std::filesystem::path& path) {
    if (w < 1 || h < 1) throw CorruptImage("non-positive dimensions in " + path.string());
    if (static_cast<unsigned long>(w) > kMaxPixels ||
        static_cast<unsigned long>(h) > kMaxPixels ||
        static_cast<std::size_t>(w) * static_cast<std::size_t>(h) > kMaxPixels) {
        throw CorruptImage("image too large in " + path.string());
    }
}

// --- PPM (P6, maxval 255) ---

// Header tokens are runs of digits separated by whitespace; exactly one
// whitespace byte separates the maxval from the payload. No comments.
long read_ppm_token(std::FILE* fp, const std::filesystem::path& path) {
    int c = std::fgetc(fp);
    bool saw_space = false;
    while (c != EOF && std::isspace(c)) {
        saw_space = true;
        c = std::fgetc(fp);
    }
    if (!saw_space || c == EOF || !std::isdigit(c)) {
        throw CorruptImage("bad PPM header in " + path.string());
    }
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > static_cast<long>(kMaxPixels)) {
            throw CorruptImage("PPM header value overflow in " + path.string());
        }
        c = std::fgetc(fp);
    }
    if (c != EOF) std::ungetc(c, fp);
    return value;
}

RgbImage load_ppm(std::FILE* fp, const std::filesystem::path& path) {
    if (std::fgetc(fp) != 'P' || std::fgetc(fp) != '6') {
        throw CorruptImage("bad PPM magic in " + path.string());
    }
    long w = read_ppm_token(fp, path);
    long h = read_ppm_token(fp, path);
    long maxval = read_ppm_token(fp, path);
    if (maxval != 255) {
        throw UnsupportedFormat("PPM maxval " + std::to_string(maxval) + " in " +
                                path.string() + " (only 255 supported)");
    }
    int sep = std::fgetc(fp);
    if (sep == EOF || !std::isspace(sep)) {
        throw CorruptImage("missing whitespace after PPM maxval in " + path.string());
    }
    check_dimensions(w, h, path);
    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    std::size_t want = img.data.size();
    if (std::fread(img.data.data(), 1, want, fp) != want) {
        throw CorruptImage("truncated PPM payload in " + path.string());
    }
    return img;
}

// --- PNG via libpng ---

RgbImage load_png(std::FILE* fp, const std::filesystem::path& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw CorruptImage("libpng init failed for " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw CorruptImage("libpng init failed for " + path.string());
    }

    RgbImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptImage("PNG decode failed for " + path.string());
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    if (w < 1 || h < 1 || w > kMaxPixels || h > kMaxPixels ||
        static_cast<std::size_t>(w) * h > kMaxPixels) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptImage("image too large in " + path.string());
    }

    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    // Normalize every standard layout to 8-bit RGB: palette expanded,
    // sub-byte gray widened, 16-bit scaled down with rounding, gray
    // replicated to three channels, alpha dropped.
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_scale_16(png);
    png_set_strip_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(w) * 3) {
        png_longjmp(png, 1);
    }

    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.data.assign(static_cast<std::size_t>(3) * w * h, 0);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) {
        rows[r] = img.data.data() + static_cast<std::size_t>(r) * w * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec) {
        throw FileNotFound("no such file: " + path.string());
    }
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    unsigned char sig[8] = {};
    std::size_t got = std::fread(sig, 1, sizeof(sig), fp.get());
    std::rewind(fp.get());
    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) {
        return load_png(fp.get(), path);
    }
    if (got >= 2 && sig[0] == 'P' && sig[1] == '6') {
        return load_ppm(fp.get(), path);
    }
    throw UnsupportedFormat("not a PNG or P6 PPM file: " + path.string());
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
    if (img.width < 1 || img.height < 1 ||
        img.data.size() != 3 * img.pixel_count()) {
        throw IoError("refusing to write malformed image to " + path.string());
    }
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed for " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed for " + path.string());
    }

    std::vector<png_bytep> rows(img.height);
    for (int r = 0; r < img.height; ++r) {
        rows[r] = const_cast<png_bytep>(img.data.data()) +
                  static_cast<std::size_t>(r) * img.width * 3;
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed for " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);

    if (std::fflush(fp.get()) != 0) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace ct
