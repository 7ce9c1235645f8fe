#include "tensorscale/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace tensorscale {

namespace {

using json = nlohmann::json;

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json axes_for(int rank) {
  return rank == 2 ? json{"y", "x"} : json{"z", "y", "x"};
}

void write_sidecar(const fs::path& payload, const Shape& shape, const char* dtype) {
  json j;
  j["shape"] = shape.extents();
  j["dtype"] = dtype;
  j["axes"] = axes_for(shape.rank());
  write_text_atomic(sidecar_path(payload), j.dump(2) + "\n");
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

float get_f32(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= std::uint32_t(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

fs::path sidecar_path(const fs::path& payload) {
  return fs::path(payload.string() + ".json");
}

void write_text_atomic(const fs::path& path, std::string_view contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_field(const fs::path& path, const ScalarField& field) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(field.size()) * 4);
  for (Index p = 0; p < field.size(); ++p) put_f32(bytes, static_cast<float>(field[p]));
  write_text_atomic(path, bytes);
  write_sidecar(path, field.shape(), "f32");
}

void write_mask(const fs::path& path, const MaskField& mask) {
  write_text_atomic(path, std::string_view(reinterpret_cast<const char*>(mask.data()),
                                           static_cast<std::size_t>(mask.size())));
  write_sidecar(path, mask.shape(), "u8");
}

ScalarField read_field(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm" || ext == ".pnm") return read_pgm(path);

  json meta;
  try {
    meta = json::parse(read_bytes(sidecar_path(path)));
  } catch (const json::exception& e) {
    throw IoError("malformed sidecar for " + path.string() + ": " + e.what());
  }
  std::vector<Index> extents;
  std::string dtype;
  try {
    extents = meta.at("shape").get<std::vector<Index>>();
    dtype = meta.at("dtype").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError("malformed sidecar for " + path.string() + ": " + e.what());
  }
  if (meta.contains("axes") && meta["axes"].size() != extents.size())
    throw IoError("sidecar axes do not match shape: " + path.string());
  Shape shape = [&] {
    try {
      return Shape(extents);
    } catch (const std::exception& e) {
      throw IoError("bad shape in sidecar for " + path.string() + ": " + e.what());
    }
  }();

  const std::string bytes = read_bytes(path);
  const auto n = static_cast<std::size_t>(shape.size());
  ScalarField field(shape);
  if (dtype == "f32") {
    if (bytes.size() != 4 * n) throw IoError("payload size does not match sidecar: " + path.string());
    for (std::size_t i = 0; i < n; ++i) field[Index(i)] = get_f32(bytes.data() + 4 * i);
  } else if (dtype == "u8") {
    if (bytes.size() != n) throw IoError("payload size does not match sidecar: " + path.string());
    for (std::size_t i = 0; i < n; ++i) field[Index(i)] = static_cast<unsigned char>(bytes[i]);
  } else {
    throw IoError("unsupported dtype '" + dtype + "' in " + path.string());
  }
  return field;
}

MaskField read_mask(const fs::path& path) {
  const ScalarField f = read_field(path);
  MaskField m(f.shape());
  m.array() = (f.array() != 0.0).cast<std::uint8_t>();
  return m;
}

ScalarField read_pgm(const fs::path& path) {
  const std::string bytes = read_bytes(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skip_space();
    long v = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000) throw IoError("PGM header value too large: " + path.string());
      ++pos;
    }
    if (pos == start) throw IoError("malformed PGM header: " + path.string());
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw IoError("not a P2/P5 PGM file: " + path.string());
  const bool binary = bytes[1] == '5';
  pos = 2;
  const long width = number();
  const long height = number();
  const long maxval = number();
  if (width < 1 || height < 1) throw IoError("PGM has empty extent: " + path.string());
  if (maxval < 1 || maxval > 65535) throw IoError("PGM maxval out of range: " + path.string());

  ScalarField field(Shape{height, width});
  const auto n = static_cast<std::size_t>(width * height);
  const double scale = 1.0 / double(maxval);
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t depth = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + depth * n) throw IoError("truncated PGM payload: " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + depth * i);
      const unsigned v = depth == 2 ? (unsigned(p[0]) << 8) | p[1] : p[0];
      field[Index(i)] = double(v) * scale;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = number();
      if (v > maxval) throw IoError("PGM sample exceeds maxval: " + path.string());
      field[Index(i)] = double(v) * scale;
    }
  }
  return field;
}

void write_histogram_csv(const fs::path& path, const ScaleHistogram& hist) {
  std::ostringstream out;
  out.precision(9);
  out << "bin_center,count\n";
  for (const auto& b : hist.bins) out << b.center << ',' << b.count << '\n';
  write_text_atomic(path, out.str());
}

void write_orientation_preview(const fs::path& path, const ScalarField& angle, const ScalarField& anisotropy) {
  if (angle.rank() != 2 || !(angle.shape() == anisotropy.shape()))
    throw ShapeError("orientation preview needs matching 2D fields");
  std::string out = "P6\n" + std::to_string(angle.shape()[1]) + " " + std::to_string(angle.shape()[0]) + "\n255\n";
  for (Index p = 0; p < angle.size(); ++p) {
    // HSV with full saturation.
    const double h = std::clamp(angle[p] / M_PI, 0.0, 1.0) * 6.0;
    const double v = std::clamp(anisotropy[p], 0.0, 1.0);
    const int sector = std::min(5, static_cast<int>(h));
    const double f = h - sector;
    const double rgb[6][3] = {{1, f, 0}, {1 - f, 1, 0}, {0, 1, f}, {0, 1 - f, 1}, {f, 0, 1}, {1, 0, 1 - f}};
    for (int c = 0; c < 3; ++c) out.push_back(static_cast<char>(std::lround(255.0 * v * rgb[sector][c])));
  }
  write_text_atomic(path, out);
}

}  // namespace tensorscale
