#include "hfaid/imgproc/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include <jpeglib.h>
#include <jerror.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "hfaid/common/error.hpp"

namespace hfaid::imgproc {
namespace {

std::uint8_t quantize(float v) {
  const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  return static_cast<std::uint8_t>(c * 255.0f + 0.5f);
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
  bool truncated;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_emit_message(j_common_ptr cinfo, int level) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  // Premature end of data is only a warning to libjpeg; it pads the rest
  // of the image with gray. Treat it as a decode failure instead.
  if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) err->truncated = true;
}

// Returns false and fills `error` on failure. Kept free of objects with
// non-trivial destructors between setjmp and the libjpeg calls.
bool decode_jpeg_raw(const std::uint8_t* data, std::size_t size, std::vector<std::uint8_t>& pixels, int& width,
                     int& height, int& comps, std::string& error) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  std::memset(&err, 0, sizeof(err));
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_emit_message;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    error = err.message;
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  comps = cinfo.output_components;
  pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(comps));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = &pixels[static_cast<std::size_t>(cinfo.output_scanline) * static_cast<std::size_t>(width) *
                           static_cast<std::size_t>(comps)];
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  if (err.truncated) {
    error = "truncated JPEG stream";
    return false;
  }
  return true;
}

bool encode_jpeg_raw(const std::uint8_t* pixels, int width, int height, int comps, int quality,
                     unsigned char*& out, unsigned long& out_size, std::string& error) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  std::memset(&err, 0, sizeof(err));
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    error = err.message;
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = comps;
  cinfo.in_color_space = comps == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  if (comps == 3) {
    const int factor = quality < 95 ? 2 : 1;
    cinfo.comp_info[0].h_samp_factor = factor;
    cinfo.comp_info[0].v_samp_factor = factor;
    cinfo.comp_info[1].h_samp_factor = 1;
    cinfo.comp_info[1].v_samp_factor = 1;
    cinfo.comp_info[2].h_samp_factor = 1;
    cinfo.comp_info[2].v_samp_factor = 1;
  }
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(comps);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(&pixels[static_cast<std::size_t>(cinfo.next_scanline) * stride]);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

ImagePlane from_bytes(const std::vector<std::uint8_t>& pixels, int width, int height, int comps) {
  ImagePlane out(width, height, 3);
  const std::size_t n = out.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::uint8_t v = comps == 1 ? pixels[i] : pixels[i * 3 + c];
      out.data[i * 3 + c] = static_cast<float>(v) / 255.0f;
    }
  }
  return out;
}

std::vector<std::uint8_t> to_bytes(const ImagePlane& img) {
  std::vector<std::uint8_t> out(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) out[i] = quantize(img.data[i]);
  return out;
}

ImagePlane decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> pixels;
  int w = 0, h = 0, comps = 0;
  std::string error;
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), pixels, w, h, comps, error)) {
    throw FormatError("JPEG decode failed: " + error);
  }
  if (comps != 1 && comps != 3) throw FormatError("JPEG with unsupported component count");
  return from_bytes(pixels, w, h, comps);
}

}  // namespace

ImageFormat sniff_format(std::span<const std::uint8_t> b) {
  if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) return ImageFormat::jpeg;
  static constexpr std::uint8_t kPng[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (b.size() >= 8 && std::memcmp(b.data(), kPng, 8) == 0) return ImageFormat::png;
  if (b.size() >= 12 && std::memcmp(b.data(), "RIFF", 4) == 0 && std::memcmp(b.data() + 8, "WEBP", 4) == 0) {
    return ImageFormat::webp;
  }
  return ImageFormat::unknown;
}

std::string_view mime_type(ImageFormat f) {
  switch (f) {
    case ImageFormat::png: return "image/png";
    case ImageFormat::jpeg: return "image/jpeg";
    case ImageFormat::webp: return "image/webp";
    case ImageFormat::unknown: break;
  }
  return "application/octet-stream";
}

ImagePlane decode_image(std::span<const std::uint8_t> bytes) {
  const ImageFormat fmt = sniff_format(bytes);
  if (fmt == ImageFormat::unknown) throw FormatError("unsupported image format");
  if (fmt == ImageFormat::jpeg) return decode_jpeg(bytes);

  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat bgr;
  try {
    bgr = cv::imdecode(buf, cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw FormatError(std::string("image decode failed: ") + e.what());
  }
  if (bgr.empty() || bgr.type() != CV_8UC3) throw FormatError("image decode failed (truncated or corrupt stream)");
  ImagePlane out(bgr.cols, bgr.rows, 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(x, y, 0) = static_cast<float>(row[x][2]) / 255.0f;
      out.at(x, y, 1) = static_cast<float>(row[x][1]) / 255.0f;
      out.at(x, y, 2) = static_cast<float>(row[x][0]) / 255.0f;
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImagePlane load_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const ImagePlane& img) {
  const int type = img.channels == 1 ? CV_8UC1 : CV_8UC3;
  cv::Mat mat(img.height, img.width, type);
  for (int y = 0; y < img.height; ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width; ++x) {
      if (img.channels == 1) {
        row[x] = quantize(img.at(x, y));
      } else {
        row[3 * x + 0] = quantize(img.at(x, y, 2));
        row[3 * x + 1] = quantize(img.at(x, y, 1));
        row[3 * x + 2] = quantize(img.at(x, y, 0));
      }
    }
  }
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", mat, out)) throw IoError("PNG encode failed");
  return out;
}

void save_png(const ImagePlane& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<std::uint8_t> encode_jpeg(const ImagePlane& img, int quality) {
  if (quality < 1 || quality > 100) throw InvalidArgument("JPEG quality must be in 1..100");
  const auto pixels = to_bytes(img);
  unsigned char* out = nullptr;
  unsigned long out_size = 0;
  std::string error;
  const bool ok = encode_jpeg_raw(pixels.data(), img.width, img.height, img.channels, quality, out, out_size, error);
  std::vector<std::uint8_t> bytes;
  if (ok) bytes.assign(out, out + out_size);
  std::free(out);
  if (!ok) throw Error("JPEG encode failed: " + error);
  return bytes;
}

ImagePlane jpeg_roundtrip(const ImagePlane& img, int quality) {
  const auto bytes = encode_jpeg(img, quality);
  ImagePlane decoded = decode_jpeg(bytes);
  if (img.channels == 1) return extract_channel(decoded, 0);
  return decoded;
}

}  // namespace hfaid::imgproc
