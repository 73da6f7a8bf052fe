#include "crosstrack/image.hpp"

#include <cstring>
#include <fstream>

#include "crosstrack/errors.hpp"

namespace crosstrack {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'R', '1'};

void write_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

template <typename T>
void write_raster(const std::string& path, const Raster<T>& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw MissingLog("cannot open raster for write: " + path);
    os.write(kMagic, 4);
    write_u32(os, static_cast<uint32_t>(img.width));
    write_u32(os, static_cast<uint32_t>(img.height));
    const unsigned char bpp = sizeof(T);
    os.write(reinterpret_cast<const char*>(&bpp), 1);
    for (const T& px : img.data) {
        // little-endian payload regardless of host
        for (size_t i = 0; i < sizeof(T); ++i) {
            const unsigned char byte = static_cast<unsigned char>((px >> (8 * i)) & 0xff);
            os.write(reinterpret_cast<const char*>(&byte), 1);
        }
    }
    if (!os) throw Error("raster write failed: " + path);
}

template <typename T>
Raster<T> read_raster(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingLog("cannot open raster: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError("bad raster magic: " + path);
    const uint32_t w = read_u32(is);
    const uint32_t h = read_u32(is);
    unsigned char bpp = 0;
    is.read(reinterpret_cast<char*>(&bpp), 1);
    if (bpp != sizeof(T)) throw ParseError("raster bpp mismatch: " + path);
    Raster<T> img(static_cast<int>(w), static_cast<int>(h));
    for (T& px : img.data) {
        px = 0;
        for (size_t i = 0; i < sizeof(T); ++i) {
            unsigned char byte;
            is.read(reinterpret_cast<char*>(&byte), 1);
            px = static_cast<T>(px | (static_cast<T>(byte) << (8 * i)));
        }
    }
    if (!is) throw ParseError("raster truncated: " + path);
    return img;
}

}  // namespace

void write_raster_u16(const std::string& path, const Raster<uint16_t>& img) {
    write_raster(path, img);
}
void write_raster_u8(const std::string& path, const Raster<uint8_t>& img) {
    write_raster(path, img);
}
Raster<uint16_t> read_raster_u16(const std::string& path) { return read_raster<uint16_t>(path); }
Raster<uint8_t> read_raster_u8(const std::string& path) { return read_raster<uint8_t>(path); }

}  // namespace crosstrack
