#include "amodal/png_io.hpp"

#include <cstring>
#include <fstream>

#include <zlib.h>

#include "amodal/errors.hpp"

namespace amodal {

namespace {

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
constexpr int kCompressionLevel = 6;  // fixed so encodes stay byte-stable

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, out.data() + type_at, static_cast<uInt>(4 + data.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> zlib_compress(const std::vector<std::uint8_t>& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  kCompressionLevel) != Z_OK)
        throw Error("png: zlib compression failed");
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> encode(const std::uint8_t* pixels, int height, int width,
                                 int channels) {
    const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
    std::vector<std::uint8_t> raw;
    raw.reserve((row_bytes + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);  // filter: none
        raw.insert(raw.end(), pixels + y * row_bytes, pixels + (y + 1) * row_bytes);
    }

    std::vector<std::uint8_t> out(kSignature, kSignature + 8);
    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                   // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);               // gray / truecolor
    ihdr.push_back(0);                                   // compression
    ihdr.push_back(0);                                   // filter method
    ihdr.push_back(0);                                   // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_compress(raw));
    append_chunk(out, "IEND", {});
    return out;
}

struct DecodedPng {
    int height = 0;
    int width = 0;
    int channels = 0;  // 1, 2, 3 or 4 as stored
    std::vector<std::uint8_t> pixels;
};

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

DecodedPng decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0)
        throw InvalidInputError("png: bad signature");

    DecodedPng out;
    int bit_depth = 0;
    int color_type = -1;
    std::vector<std::uint8_t> idat;

    std::size_t pos = 8;
    bool saw_end = false;
    while (pos + 12 <= bytes.size() && !saw_end) {
        const std::uint32_t len = get_u32(bytes.data() + pos);
        if (pos + 12 + len > bytes.size()) throw InvalidInputError("png: truncated chunk");
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        const std::uint8_t* data = bytes.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw InvalidInputError("png: bad IHDR");
            out.width = static_cast<int>(get_u32(data));
            out.height = static_cast<int>(get_u32(data + 4));
            bit_depth = data[8];
            color_type = data[9];
            if (data[12] != 0) throw InvalidInputError("png: interlaced images unsupported");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_end = true;
        }
        pos += 12 + len;
    }

    if (out.width <= 0 || out.height <= 0 || idat.empty())
        throw InvalidInputError("png: missing IHDR or IDAT");
    if (bit_depth != 8) throw InvalidInputError("png: only 8-bit depth supported");
    switch (color_type) {
        case 0: out.channels = 1; break;
        case 2: out.channels = 3; break;
        case 4: out.channels = 2; break;
        case 6: out.channels = 4; break;
        default: throw InvalidInputError("png: unsupported color type");
    }

    const std::size_t row_bytes = static_cast<std::size_t>(out.width) * out.channels;
    const std::size_t raw_size = (row_bytes + 1) * out.height;
    std::vector<std::uint8_t> raw(raw_size);
    uLongf dest_len = static_cast<uLongf>(raw_size);
    if (uncompress(raw.data(), &dest_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        dest_len != raw_size)
        throw InvalidInputError("png: corrupt image data");

    out.pixels.assign(row_bytes * out.height, 0);
    const int bpp = out.channels;
    for (int y = 0; y < out.height; ++y) {
        const std::uint8_t filter = raw[y * (row_bytes + 1)];
        const std::uint8_t* src = raw.data() + y * (row_bytes + 1) + 1;
        std::uint8_t* dst = out.pixels.data() + y * row_bytes;
        const std::uint8_t* prev = y > 0 ? out.pixels.data() + (y - 1) * row_bytes : nullptr;
        for (std::size_t x = 0; x < row_bytes; ++x) {
            const int left = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
            const int up = prev ? prev[x] : 0;
            const int up_left = (prev && x >= static_cast<std::size_t>(bpp)) ? prev[x - bpp] : 0;
            int value = src[x];
            switch (filter) {
                case 0: break;
                case 1: value += left; break;
                case 2: value += up; break;
                case 3: value += (left + up) / 2; break;
                case 4: value += paeth(left, up, up_left); break;
                default: throw InvalidInputError("png: unknown filter type");
            }
            dst[x] = static_cast<std::uint8_t>(value & 0xff);
        }
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("png: cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("png: cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("png: short write to " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
    return encode(image.data().data(), image.height(), image.width(), 3);
}

std::vector<std::uint8_t> encode_png(const BinaryMask& mask) {
    std::vector<std::uint8_t> gray(mask.bits().size());
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.bits()[i] ? 255 : 0;
    return encode(gray.data(), mask.height(), mask.width(), 1);
}

Image decode_png_image(std::span<const std::uint8_t> bytes) {
    const DecodedPng png = decode(bytes);
    Image out(png.height, png.width);
    for (int y = 0; y < png.height; ++y) {
        for (int x = 0; x < png.width; ++x) {
            const std::uint8_t* p =
                png.pixels.data() + (static_cast<std::size_t>(y) * png.width + x) * png.channels;
            RGB c;
            if (png.channels <= 2)
                c = RGB{p[0], p[0], p[0]};
            else
                c = RGB{p[0], p[1], p[2]};
            out.set(y, x, c);
        }
    }
    return out;
}

BinaryMask decode_png_mask(std::span<const std::uint8_t> bytes) {
    const DecodedPng png = decode(bytes);
    BinaryMask out(png.height, png.width);
    for (int y = 0; y < png.height; ++y) {
        for (int x = 0; x < png.width; ++x) {
            const std::uint8_t* p =
                png.pixels.data() + (static_cast<std::size_t>(y) * png.width + x) * png.channels;
            int luminance;
            if (png.channels <= 2)
                luminance = p[0];
            else
                luminance = (static_cast<int>(p[0]) + p[1] + p[2]) / 3;
            out.set(y, x, luminance > 127);
        }
    }
    return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
    write_file(path, encode_png(image));
}

void write_png(const std::filesystem::path& path, const BinaryMask& mask) {
    write_file(path, encode_png(mask));
}

Image read_png_image(const std::filesystem::path& path) {
    return decode_png_image(read_file(path));
}

BinaryMask read_png_mask(const std::filesystem::path& path) {
    return decode_png_mask(read_file(path));
}

}  // namespace amodal
