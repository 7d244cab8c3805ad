#include "omnidensity/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "omnidensity/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "fimg I/O assumes a little-endian host");

namespace omni {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  require(f != nullptr, Err::io_error, "cannot open " + path);
  return f;
}

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

float from_byte(unsigned char b) { return static_cast<float>(b) / 255.0f; }

unsigned char to_byte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<unsigned char>(c * 255.0f + 0.5f);
}

}  // namespace

Image read_png(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, Err::io_error, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(Err::io_error, "png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> bytes;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Err::io_error, "libpng failed reading " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int ch = static_cast<int>(png_get_channels(png, info));
  require(ch == 1 || ch == 3, Err::io_error, "unsupported png channel count");

  bytes.resize(static_cast<size_t>(w) * h * static_cast<size_t>(ch));
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y)
    row_ptrs[y] = bytes.data() + static_cast<size_t>(y) * w * static_cast<size_t>(ch);
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(static_cast<int>(w), static_cast<int>(h), ch);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < ch; ++c)
        img.at(x, y, c) =
            from_byte(bytes[(static_cast<size_t>(y) * w + x) * static_cast<size_t>(ch) +
                            static_cast<size_t>(c)]);
  return img;
}

void write_png(const Image& img, const std::string& path) {
  require(img.channels() == 1 || img.channels() == 3, Err::bad_argument,
          "png writer supports 1 or 3 channels");
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, Err::io_error, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(Err::io_error, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Err::io_error, "libpng failed writing " + path);
  }
  png_init_io(png, f.get());
  const int ch = img.channels();
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8,
               ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(static_cast<size_t>(img.width) * static_cast<size_t>(ch));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < ch; ++c)
        row[static_cast<size_t>(x) * static_cast<size_t>(ch) + static_cast<size_t>(c)] =
            to_byte(img.at(x, y, c));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::string path;
};

[[noreturn]] void jpeg_error_exit(j_common_ptr cinfo) {
  char buf[JMSG_LENGTH_MAX];
  (*cinfo->err->format_message)(cinfo, buf);
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  const std::string msg = std::string(buf) + " (" + mgr->path + ")";
  jpeg_destroy(cinfo);
  fail(Err::io_error, msg);
}

}  // namespace

Image read_jpeg(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  err.path = path;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const int ch = cinfo.output_components;
  require(ch == 1 || ch == 3, Err::io_error, "unsupported jpeg channel count");

  Image img(w, h, ch);
  std::vector<unsigned char> row(static_cast<size_t>(w) * static_cast<size_t>(ch));
  JSAMPROW rows[1] = {row.data()};
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c)
        img.at(x, y, c) = from_byte(
            row[static_cast<size_t>(x) * static_cast<size_t>(ch) + static_cast<size_t>(c)]);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

Image read_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "png") return read_png(path);
  if (ext == "jpg" || ext == "jpeg") return read_jpeg(path);
  fail(Err::bad_argument, "unsupported image extension ." + ext + " in " + path);
}

namespace {

constexpr char kFimgMagic[4] = {'F', 'I', 'M', 'G'};
constexpr std::uint32_t kFimgVersion = 1;

void put_u32(std::FILE* f, std::uint32_t v) {
  require(std::fwrite(&v, sizeof v, 1, f) == 1, Err::io_error, "short write");
}

std::uint32_t get_u32(std::FILE* f, const std::string& path) {
  std::uint32_t v = 0;
  require(std::fread(&v, sizeof v, 1, f) == 1, Err::io_error, "truncated fimg " + path);
  return v;
}

}  // namespace

void write_fimg(const std::vector<Planef>& planes, const std::string& path) {
  require(!planes.empty(), Err::bad_argument, "fimg needs at least one plane");
  const auto h = planes.front().rows();
  const auto w = planes.front().cols();
  for (const auto& p : planes)
    require(p.rows() == h && p.cols() == w, Err::dimension_mismatch,
            "fimg planes must share a shape");

  FilePtr f = open_file(path, "wb");
  require(std::fwrite(kFimgMagic, 1, 4, f.get()) == 4, Err::io_error, "short write");
  put_u32(f.get(), kFimgVersion);
  put_u32(f.get(), static_cast<std::uint32_t>(w));
  put_u32(f.get(), static_cast<std::uint32_t>(h));
  put_u32(f.get(), static_cast<std::uint32_t>(planes.size()));
  const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);
  for (const auto& p : planes)
    require(std::fwrite(p.data(), sizeof(float), n, f.get()) == n, Err::io_error,
            "short write to " + path);
}

std::vector<Planef> read_fimg(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  char magic[4];
  require(std::fread(magic, 1, 4, f.get()) == 4 && std::memcmp(magic, kFimgMagic, 4) == 0,
          Err::io_error, "not a fimg file: " + path);
  const std::uint32_t version = get_u32(f.get(), path);
  require(version == kFimgVersion, Err::schema_version_mismatch,
          "fimg version " + std::to_string(version));
  const std::uint32_t w = get_u32(f.get(), path);
  const std::uint32_t h = get_u32(f.get(), path);
  const std::uint32_t ch = get_u32(f.get(), path);
  require(w > 0 && h > 0 && ch > 0 && ch <= 16, Err::io_error, "bad fimg header " + path);

  std::vector<Planef> planes;
  const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);
  for (std::uint32_t c = 0; c < ch; ++c) {
    Planef p(h, w);
    require(std::fread(p.data(), sizeof(float), n, f.get()) == n, Err::io_error,
            "truncated fimg " + path);
    planes.push_back(std::move(p));
  }
  return planes;
}

void write_fimg(const Planed& map, const std::string& path) {
  write_fimg(std::vector<Planef>{map.cast<float>()}, path);
}

Planed read_fimg_map(const std::string& path) {
  const auto planes = read_fimg(path);
  require(planes.size() == 1, Err::io_error, "expected single-plane fimg " + path);
  return planes.front().cast<double>();
}

void write_density_preview(const Planed& map, const std::string& path) {
  Image img(static_cast<int>(map.cols()), static_cast<int>(map.rows()), 1);
  const double peak = map.maxCoeff();
  if (peak > 0) img.planes[0] = (map / peak).cast<float>();
  write_png(img, path);
}

}  // namespace omni
