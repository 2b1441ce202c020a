#include "evsynth/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include <opencv2/imgcodecs.hpp>

namespace evsynth {

namespace {

bool has_ext(const std::filesystem::path& path, const char* ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

// P5 only; comments and any maxval up to 255 accepted.
int next_pnm_int(std::istream& in, const std::string& origin) {
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = in.get();
    c = in.get();
  }
  int value = -1;
  while (c != EOF && std::isdigit(c)) {
    value = (value < 0 ? 0 : value) * 10 + (c - '0');
    c = in.get();
  }
  if (value < 0) throw IoError("malformed PGM header: " + origin);
  return value;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path.string());
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5')
    throw IoError("not a binary PGM (P5): " + path.string());
  const int width = next_pnm_int(in, path.string());
  const int height = next_pnm_int(in, path.string());
  const int maxval = next_pnm_int(in, path.string());
  if (width < 1 || height < 1 || maxval < 1 || maxval > 255)
    throw IoError("unsupported PGM header: " + path.string());

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw IoError("truncated PGM payload: " + path.string());

  GrayImage img(width, height);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    img.px[i] = bytes[i] / static_cast<double>(maxval);
  return img;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  const auto bytes = to_bytes(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing image: " + path.string());
}

}  // namespace

GrayImage load_gray(const std::filesystem::path& path) {
  if (has_ext(path, ".pgm")) return load_pgm(path);
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty()) throw IoError("unreadable image: " + path.string());
  GrayImage img(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) img.at(x, y) = row[x] / 255.0;
  }
  return img;
}

void save_gray(const GrayImage& img, const std::filesystem::path& path) {
  if (img.empty()) throw IoError("refusing to write empty image");
  if (has_ext(path, ".pgm")) {
    save_pgm(img, path);
    return;
  }
  const auto bytes = to_bytes(img);
  cv::Mat mat(img.height, img.width, CV_8UC1);
  for (int y = 0; y < img.height; ++y)
    std::copy_n(bytes.data() + static_cast<std::size_t>(y) * img.width,
                img.width, mat.ptr<std::uint8_t>(y));
  if (!cv::imwrite(path.string(), mat))
    throw IoError("cannot write image: " + path.string());
}

}  // namespace evsynth
