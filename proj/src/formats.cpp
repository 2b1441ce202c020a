#include "evsynth/formats.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace evsynth {

const char* format_error_name(FormatErrorCode code) noexcept {
  switch (code) {
    case FormatErrorCode::bad_magic: return "bad magic";
    case FormatErrorCode::bad_dimensions: return "bad dimensions";
    case FormatErrorCode::truncated_header: return "truncated header";
    case FormatErrorCode::truncated_record: return "truncated record";
    case FormatErrorCode::trailing_bytes: return "trailing bytes";
    case FormatErrorCode::coordinate_out_of_bounds:
      return "coordinate out of bounds";
    case FormatErrorCode::bad_polarity: return "bad polarity";
    case FormatErrorCode::nonmonotonic_timestamp:
      return "non-monotonic timestamp";
    case FormatErrorCode::unsorted_stream: return "unsorted stream";
  }
  return "unknown";
}

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_int_token(const std::string& token, std::size_t line, const char* what) {
  T value{};
  const char* begin = token.data();
  auto [ptr, ec] = std::from_chars(begin, begin + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != begin + token.size())
    throw ParseError(line, std::string("malformed ") + what + " '" + token + "'");
  return value;
}

double parse_double_token(const std::string& token, std::size_t line,
                          const char* what) {
  double value = 0.0;
  const char* begin = token.data();
  auto [ptr, ec] = std::from_chars(begin, begin + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != begin + token.size())
    throw ParseError(line, std::string("malformed ") + what + " '" + token + "'");
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

Box parse_box_fields(const std::vector<std::string>& f, std::size_t base,
                     std::size_t line) {
  Box b;
  b.cls = parse_int_token<int>(f[base], line, "class id");
  if (b.cls != kClassFace && b.cls != kClassEye)
    throw ParseError(line, "unknown class id " + f[base]);
  b.cx = parse_double_token(f[base + 1], line, "cx");
  b.cy = parse_double_token(f[base + 2], line, "cy");
  b.w = parse_double_token(f[base + 3], line, "w");
  b.h = parse_double_token(f[base + 4], line, "h");
  if (!(b.cx >= 0.0 && b.cx <= 1.0) || !(b.cy >= 0.0 && b.cy <= 1.0))
    throw ParseError(line, "out-of-range box center");
  if (!(b.w > 0.0 && b.w <= 1.0) || !(b.h > 0.0 && b.h <= 1.0))
    throw ParseError(line, "out-of-range box extent");
  return b;
}

}  // namespace

std::size_t write_events(const EventStream& stream, std::ostream& out) {
  if (stream.width < 1 || stream.height < 1 || stream.width > 0xffff ||
      stream.height > 0xffff)
    throw FormatError(FormatErrorCode::bad_dimensions, 4,
                      "stream dimensions must fit in [1, 65535]");

  std::string buf;
  buf.reserve(kEvsHeaderSize + kEvsRecordSize * stream.events.size());
  buf.append(reinterpret_cast<const char*>(kEvsMagic.data()), kEvsMagic.size());
  put_u16(buf, static_cast<std::uint16_t>(stream.width));
  put_u16(buf, static_cast<std::uint16_t>(stream.height));
  put_u64(buf, stream.events.size());

  std::uint64_t prev_t = 0;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    const std::size_t offset = kEvsHeaderSize + kEvsRecordSize * i;
    if (i > 0 && e.t < prev_t)
      throw FormatError(FormatErrorCode::unsorted_stream, offset,
                        "record " + std::to_string(i) +
                            " breaks timestamp order");
    if (e.x >= stream.width || e.y >= stream.height)
      throw FormatError(FormatErrorCode::coordinate_out_of_bounds, offset,
                        "record " + std::to_string(i) + " at (" +
                            std::to_string(e.x) + ", " + std::to_string(e.y) +
                            ")");
    if (e.p > 1)
      throw FormatError(FormatErrorCode::bad_polarity, offset,
                        "record " + std::to_string(i) + " has p=" +
                            std::to_string(e.p));
    prev_t = e.t;
    put_u64(buf, e.t);
    put_u16(buf, e.x);
    put_u16(buf, e.y);
    buf.push_back(static_cast<char>(e.p));
  }

  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write_events: output stream failed");
  return buf.size();
}

std::size_t write_events_file(const EventStream& stream,
                              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return write_events(stream, out);
}

EventStream read_events(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());

  if (data.size() < kEvsHeaderSize) {
    // a short file with a wrong magic is a magic error first
    if (data.size() >= 4 && !std::equal(kEvsMagic.begin(), kEvsMagic.end(), bytes))
      throw FormatError(FormatErrorCode::bad_magic, 0, "expected 'EVS1'");
    throw FormatError(FormatErrorCode::truncated_header, data.size(),
                      "header needs 16 bytes, got " +
                          std::to_string(data.size()));
  }
  if (!std::equal(kEvsMagic.begin(), kEvsMagic.end(), bytes))
    throw FormatError(FormatErrorCode::bad_magic, 0, "expected 'EVS1'");

  EventStream stream;
  stream.width = get_u16(bytes + 4);
  stream.height = get_u16(bytes + 6);
  if (stream.width < 1 || stream.height < 1)
    throw FormatError(FormatErrorCode::bad_dimensions, 4,
                      std::to_string(stream.width) + "x" +
                          std::to_string(stream.height));
  const std::uint64_t count = get_u64(bytes + 8);

  if (count > (std::numeric_limits<std::size_t>::max() - kEvsHeaderSize) /
                  kEvsRecordSize ||
      data.size() < kEvsHeaderSize + count * kEvsRecordSize) {
    // offset of the first missing byte
    const std::size_t have =
        data.size() < kEvsHeaderSize ? 0 : data.size() - kEvsHeaderSize;
    throw FormatError(FormatErrorCode::truncated_record, data.size(),
                      "header promises " + std::to_string(count) +
                          " records (" +
                          std::to_string(count * kEvsRecordSize) +
                          " bytes), got " + std::to_string(have));
  }
  if (data.size() > kEvsHeaderSize + count * kEvsRecordSize)
    throw FormatError(FormatErrorCode::trailing_bytes,
                      kEvsHeaderSize + count * kEvsRecordSize,
                      std::to_string(data.size() - kEvsHeaderSize -
                                     count * kEvsRecordSize) +
                          " bytes beyond the declared records");

  stream.events.reserve(count);
  std::uint64_t prev_t = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t offset = kEvsHeaderSize + kEvsRecordSize * i;
    const unsigned char* rec = bytes + offset;
    Event e;
    e.t = get_u64(rec);
    e.x = get_u16(rec + 8);
    e.y = get_u16(rec + 10);
    e.p = rec[12];
    if (e.x >= stream.width || e.y >= stream.height)
      throw FormatError(FormatErrorCode::coordinate_out_of_bounds, offset,
                        "record " + std::to_string(i) + " at (" +
                            std::to_string(e.x) + ", " + std::to_string(e.y) +
                            ") in " + std::to_string(stream.width) + "x" +
                            std::to_string(stream.height));
    if (e.p > 1)
      throw FormatError(FormatErrorCode::bad_polarity, offset,
                        "record " + std::to_string(i) + " has p=" +
                            std::to_string(e.p));
    if (i > 0 && e.t < prev_t)
      throw FormatError(FormatErrorCode::nonmonotonic_timestamp, offset,
                        "record " + std::to_string(i) + " goes back in time");
    prev_t = e.t;
    stream.events.push_back(e);
  }
  stream.duration_us = stream.events.empty() ? 0 : stream.events.back().t + 1;
  return stream;
}

EventStream read_events_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return read_events(in);
}

void write_events_csv(const EventStream& stream, std::ostream& out) {
  out << "t,x,y,p\n";
  for (const Event& e : stream.events)
    out << e.t << ',' << e.x << ',' << e.y << ',' << int(e.p) << '\n';
  if (!out) throw IoError("write_events_csv: output stream failed");
}

EventStream read_events_csv(std::istream& in, int width, int height) {
  if (width < 1 || height < 1 || width > 0xffff || height > 0xffff)
    throw ConfigError("read_events_csv: dimensions must fit in [1, 65535]");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing 't,x,y,p' header");
  ++line_no;
  if (trim(line) != "t,x,y,p")
    throw ParseError(line_no, "expected header 't,x,y,p', got '" + trim(line) + "'");

  EventStream stream;
  stream.width = width;
  stream.height = height;
  std::uint64_t prev_t = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    std::array<std::string, 4> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = stripped.find(',', start);
      const std::string tok =
          trim(comma == std::string::npos ? stripped.substr(start)
                                          : stripped.substr(start, comma - start));
      if (n >= 4) throw ParseError(line_no, "expected 4 comma-separated fields");
      fields[n++] = tok;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (n != 4) throw ParseError(line_no, "expected 4 comma-separated fields");

    Event e;
    e.t = parse_int_token<std::uint64_t>(fields[0], line_no, "timestamp");
    e.x = parse_int_token<std::uint16_t>(fields[1], line_no, "x");
    e.y = parse_int_token<std::uint16_t>(fields[2], line_no, "y");
    const int p = parse_int_token<int>(fields[3], line_no, "polarity");
    if (p != 0 && p != 1)
      throw ParseError(line_no, "polarity must be 0 or 1, got " + fields[3]);
    e.p = static_cast<std::uint8_t>(p);
    if (e.x >= width || e.y >= height)
      throw ParseError(line_no, "event coordinate outside " +
                                    std::to_string(width) + "x" +
                                    std::to_string(height));
    if (!stream.events.empty() && e.t < prev_t)
      throw ParseError(line_no, "timestamp goes back in time");
    prev_t = e.t;
    stream.events.push_back(e);
  }
  stream.duration_us = stream.events.empty() ? 0 : stream.events.back().t + 1;
  return stream;
}

std::vector<Box> read_labels(std::istream& in) {
  std::vector<Box> boxes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto fields = split_ws(stripped);
    if (fields.size() != 5)
      throw ParseError(line_no, "expected 5 fields 'class cx cy w h', got " +
                                    std::to_string(fields.size()));
    boxes.push_back(parse_box_fields(fields, 0, line_no));
  }
  return boxes;
}

std::vector<Box> read_labels_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file: " + path.string());
  return read_labels(in);
}

void write_labels(std::span<const Box> boxes, std::ostream& out) {
  char buf[128];
  for (const Box& b : boxes) {
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", b.cls, b.cx,
                  b.cy, b.w, b.h);
    out << buf;
  }
}

std::vector<Detection> read_predictions(std::istream& in) {
  std::vector<Detection> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto fields = split_ws(stripped);
    if (fields.size() != 7)
      throw ParseError(line_no,
                       "expected 7 fields 'image_id class confidence cx cy w "
                       "h', got " + std::to_string(fields.size()));
    Detection det;
    det.image_id = fields[0];
    det.confidence = parse_double_token(fields[2], line_no, "confidence");
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0))
      throw ParseError(line_no, "confidence outside [0, 1]");
    // splice class + box fields into the shared box parser
    std::vector<std::string> box_fields(fields.begin() + 1, fields.end());
    box_fields.erase(box_fields.begin() + 1);  // drop confidence
    Box b = parse_box_fields(box_fields, 0, line_no);
    det.cls = b.cls;
    det.box = b;
    preds.push_back(std::move(det));
  }
  return preds;
}

std::vector<Detection> read_predictions_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prediction file: " + path.string());
  return read_predictions(in);
}

void write_predictions(std::span<const Detection> preds, std::ostream& out) {
  char buf[192];
  for (const Detection& d : preds) {
    std::snprintf(buf, sizeof buf, " %d %.6f %.6f %.6f %.6f %.6f\n", d.cls,
                  d.confidence, d.box.cx, d.box.cy, d.box.w, d.box.h);
    out << d.image_id << buf;
  }
}

}  // namespace evsynth
