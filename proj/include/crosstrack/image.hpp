#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crosstrack {

// Dense row-major raster. Disparity images are 16-bit fixed point
// (disparity * 256), label images are 8-bit class codes.
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    T& at(int v, int u) { return data[static_cast<size_t>(v) * width + u]; }
    const T& at(int v, int u) const { return data[static_cast<size_t>(v) * width + u]; }
    bool same_size(int w, int h) const { return width == w && height == h; }
};

using DisparityRaster = Raster<uint16_t>;
using LabelRaster = Raster<uint8_t>;

inline constexpr double kDisparityScale = 256.0;

// Label codes used by the 8-bit rasters.
enum LabelCode : uint8_t {
    kLabelSky = 0,
    kLabelGround = 1,
    kLabelVehicle = 2,
    kLabelPedestrian = 3,
    kLabelBuilding = 4,
    kLabelOther = 5,
};

// Binary layout (little-endian): 4-byte magic "CTR1", uint32 width,
// uint32 height, uint8 bytes-per-pixel (1 or 2), then width*height*bpp
// payload bytes row-major.
void write_raster_u16(const std::string& path, const Raster<uint16_t>& img);
void write_raster_u8(const std::string& path, const Raster<uint8_t>& img);
Raster<uint16_t> read_raster_u16(const std::string& path);
Raster<uint8_t> read_raster_u8(const std::string& path);

}  // namespace crosstrack
