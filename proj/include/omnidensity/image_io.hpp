#pragma once
#include <string>
#include <vector>

#include "omnidensity/image.hpp"
#include "omnidensity/types.hpp"

namespace omni {

Image read_png(const std::string& path);
Image read_jpeg(const std::string& path);
Image read_image(const std::string& path);  // dispatches on extension
void write_png(const Image& img, const std::string& path);

// Float container: "FIMG" magic, u32 version/width/height/channels, then
// little-endian float32 planes row-major. Bit-exact interchange for maps.
void write_fimg(const std::vector<Planef>& planes, const std::string& path);
std::vector<Planef> read_fimg(const std::string& path);

void write_fimg(const Planed& map, const std::string& path);
Planed read_fimg_map(const std::string& path);

// 8-bit grayscale preview, values scaled by the map maximum.
void write_density_preview(const Planed& map, const std::string& path);

}  // namespace omni
