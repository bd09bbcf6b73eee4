#include "tmpfc/pgm.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <vector>

#include "tmpfc/error.hpp"
#include "tmpfc/simd/kernels.hpp"

namespace tmpfc {
namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const char> bytes, const std::string& source) : b_(bytes), src_(source) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      const auto c = static_cast<unsigned char>(b_[pos_]);
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000) fail(std::string(what) + " out of range");
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + what);
    return static_cast<int>(v);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::FormatError, src_ + ": " + msg);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::span<const char> bytes() const { return b_; }

 private:
  std::span<const char> b_;
  const std::string& src_;
  std::size_t pos_ = 0;
};

PgmHeader parse_header(HeaderReader& r) {
  const auto b = r.bytes();
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '2')) {
    const std::string magic = b.size() >= 2 ? std::string(b.data(), 2) : std::string(b.data(), b.size());
    r.fail("unsupported magic '" + magic + "' (expected P5 or P2)");
  }
  PgmHeader h;
  h.binary = b[1] == '5';
  r.advance(2);
  h.width = r.read_int("width");
  h.height = r.read_int("height");
  h.maxval = r.read_int("maxval");
  if (h.width <= 0 || h.height <= 0) r.fail("non-positive dimensions");
  if (h.maxval <= 0 || h.maxval > 255) r.fail("maxval must lie in [1, 255]");
  return h;
}

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const auto size = static_cast<std::streamsize>(in.tellg());
  std::vector<char> buf(static_cast<std::size_t>(size));
  in.seekg(0);
  if (size > 0 && !in.read(buf.data(), size)) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return buf;
}

}  // namespace

BinaryGrid decode_pgm_mask(std::span<const char> bytes, const std::string& source, std::uint8_t cutoff) {
  HeaderReader r(bytes, source);
  const PgmHeader h = parse_header(r);
  BinaryGrid grid(h.width, h.height);
  const std::size_t n = grid.size();

  if (h.binary) {
    // exactly one whitespace byte separates maxval from the raster
    if (r.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[r.pos()]))) {
      r.fail("missing raster separator");
    }
    r.advance(1);
    if (bytes.size() - r.pos() < n) r.fail("truncated raster");
    const auto* raster = reinterpret_cast<const std::uint8_t*>(bytes.data() + r.pos());
    if (h.maxval < 255) {
      for (std::size_t i = 0; i < n; ++i) {
        if (raster[i] > h.maxval) r.fail("sample exceeds maxval");
      }
    }
    simd::active().binarize({raster, n}, grid.pixels(), cutoff);
    return grid;
  }

  auto px = grid.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const int v = r.read_int("sample");
    if (v > h.maxval) r.fail("sample exceeds maxval");
    px[i] = v > cutoff ? 1 : 0;
  }
  return grid;
}

BinaryGrid read_pgm_mask(const std::filesystem::path& path, std::uint8_t cutoff) {
  const auto buf = slurp(path);
  return decode_pgm_mask(buf, path.string(), cutoff);
}

PgmHeader read_pgm_header(const std::filesystem::path& path) {
  const auto buf = slurp(path);
  const std::string source = path.string();
  HeaderReader r(buf, source);
  return parse_header(r);
}

std::string encode_pgm(const BinaryGrid& grid) {
  std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + grid.size());
  const auto px = grid.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) out[header + i] = px[i] ? static_cast<char>(0xFF) : 0;
  return out;
}

void write_pgm(const std::filesystem::path& path, const BinaryGrid& grid) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const std::string bytes = encode_pgm(grid);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace tmpfc
