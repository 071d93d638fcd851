#pragma once

#include "traclets/error.hpp"
#include "traclets/model.hpp"

#include <png.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace traclets {

/// 8-bit RGB PNG, no alpha, row 1 of the grid first.
inline std::vector<std::uint8_t> encode_png(const TracletImage& img) {
    if (img.n < 1 || img.pixels.size() != static_cast<std::size_t>(img.n) * static_cast<std::size_t>(img.n))
        throw InvariantError("encode_png: malformed image");
    static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed for direct PNG rows");

    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.n);
    image.height = static_cast<png_uint_32>(img.n);
    image.format = PNG_FORMAT_RGB;

    const auto* data = reinterpret_cast<const std::uint8_t*>(img.pixels.data());
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr))
        throw InvariantError(std::string("png sizing failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr))
        throw InvariantError(std::string("png encoding failed: ") + image.message);
    out.resize(size);
    return out;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

inline void encode_png(const TracletImage& img, const std::filesystem::path& path) {
    write_file(path, encode_png(img));
}

/// Any PNG libpng can read, converted to 8-bit RGB. Must be square.
inline TracletImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw InputError(std::string("not a readable PNG: ") + image.message);
    image.format = PNG_FORMAT_RGB;
    if (image.width != image.height || image.width < 1) {
        png_image_free(&image);
        throw InputError("PNG is not square");
    }
    TracletImage img(static_cast<int>(image.width), Rgb{});
    if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr))
        throw InputError(std::string("PNG decode failed: ") + image.message);
    return img;
}

inline TracletImage decode_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    try {
        return decode_png(bytes);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace traclets
