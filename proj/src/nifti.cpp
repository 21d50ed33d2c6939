#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <zlib.h>

#include "pcount/error.hpp"
#include "pcount/volume_io.hpp"
#include "probability.hpp"

namespace pcount {
namespace {

constexpr std::int32_t kHeaderSize = 348;

enum Datatype : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kInt32 = 8,
  kFloat32 = 16,
  kFloat64 = 64,
};

std::vector<unsigned char> read_plain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<unsigned char> read_gzip(const std::filesystem::path& path) {
  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (!gz) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> out;
  std::array<unsigned char, 1 << 16> chunk;
  for (;;) {
    const int n = gzread(gz, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int code = 0;
      std::string msg = gzerror(gz, &code);
      gzclose(gz);
      throw IoError(path.string() + ": gzip error: " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(gz);
  return out;
}

// Files starting with the gzip magic 0x1f 0x8b are inflated.
std::vector<unsigned char> read_maybe_gzip(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path.string());
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 0x1f && magic[1] == 0x8b) return read_gzip(path);
  return read_plain(path);
}

class ByteReader {
 public:
  ByteReader(const std::vector<unsigned char>& bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <class T>
  T get(std::size_t offset) const {
    if (offset + sizeof(T) > bytes_.size()) throw FormatError("NIfTI: truncated file");
    std::array<unsigned char, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + offset, sizeof(T));
    if (swap_) std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  }

 private:
  const std::vector<unsigned char>& bytes_;
  bool swap_;
};

bool host_is_little() { return std::endian::native == std::endian::little; }

std::int32_t read_i32_le(const std::vector<unsigned char>& b) {
  return static_cast<std::int32_t>(b[0] | (b[1] << 8) | (b[2] << 16) |
                                   (static_cast<std::uint32_t>(b[3]) << 24));
}
std::int32_t read_i32_be(const std::vector<unsigned char>& b) {
  return static_cast<std::int32_t>(b[3] | (b[2] << 8) | (b[1] << 16) |
                                   (static_cast<std::uint32_t>(b[0]) << 24));
}

template <class T>
void decode(const ByteReader& reader, std::size_t offset, std::size_t count,
            std::vector<double>& out) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = static_cast<double>(reader.get<T>(offset + i * sizeof(T)));
}

std::filesystem::path image_path_for(const std::filesystem::path& header_path) {
  std::string s = header_path.string();
  for (const char* ext : {".hdr.gz", ".hdr"}) {
    const std::string e = ext;
    if (s.size() > e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) {
      const std::string base = s.substr(0, s.size() - e.size());
      return e == ".hdr.gz" ? base + ".img.gz" : base + ".img";
    }
  }
  return std::filesystem::path(s).replace_extension(".img");
}

}  // namespace

Volume load_nifti(const std::filesystem::path& path, VolumeHeaderInfo* header) {
  const std::string name = path.string();
  const std::vector<unsigned char> bytes = read_maybe_gzip(path);
  if (bytes.size() < static_cast<std::size_t>(kHeaderSize))
    throw FormatError(name + ": shorter than a NIfTI-1 header");

  // sizeof_hdr must read 348 under exactly one byte order.
  bool file_little;
  if (read_i32_le(bytes) == kHeaderSize)
    file_little = true;
  else if (read_i32_be(bytes) == kHeaderSize)
    file_little = false;
  else
    throw FormatError(name + ": bad sizeof_hdr (not 348 in either byte order)");
  const ByteReader hdr(bytes, file_little != host_is_little());

  const char* magic = reinterpret_cast<const char*>(bytes.data() + 344);
  const bool single_file = std::memcmp(magic, "n+1\0", 4) == 0;
  const bool pair_file = std::memcmp(magic, "ni1\0", 4) == 0;
  if (!single_file && !pair_file) throw FormatError(name + ": bad NIfTI-1 magic");

  std::array<std::int16_t, 8> dim;
  for (int k = 0; k < 8; ++k) dim[k] = hdr.get<std::int16_t>(40 + 2 * k);
  const int ndim = dim[0];
  if (ndim < 1 || ndim > 7) throw FormatError(name + ": dim[0] out of range");
  std::array<std::size_t, 3> extent{1, 1, 1};
  for (int k = 1; k <= 3 && k <= ndim; ++k) {
    if (dim[k] < 1) throw FormatError(name + ": non-positive dim[" + std::to_string(k) + "]");
    extent[k - 1] = static_cast<std::size_t>(dim[k]);
  }
  for (int k = 4; k <= ndim; ++k)
    if (dim[k] > 1)
      throw FormatError(name + ": dim[" + std::to_string(k) + "] = " + std::to_string(dim[k]) +
                        "; only single-frame 3D volumes are supported");

  const auto datatype = hdr.get<std::int16_t>(70);
  std::size_t elem = 0;
  switch (datatype) {
    case kUint8: elem = 1; break;
    case kInt16: elem = 2; break;
    case kInt32: elem = 4; break;
    case kFloat32: elem = 4; break;
    case kFloat64: elem = 8; break;
    default: throw FormatError(name + ": unsupported datatype code " + std::to_string(datatype));
  }

  std::array<double, 3> voxel_size{1.0, 1.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    const double p = std::fabs(static_cast<double>(hdr.get<float>(80 + 4 * k)));
    // Missing or zero pixdim falls back to 1 mm.
    if (std::isfinite(p) && p > 0.0) voxel_size[k] = p;
  }

  const double vox_offset = hdr.get<float>(108);
  const double slope = hdr.get<float>(112);
  const double inter = hdr.get<float>(116);
  const bool rescale = std::isfinite(slope) && slope != 0.0 && std::isfinite(inter);

  const Dims dims{extent[0], extent[1], extent[2]};
  const std::size_t count = dims.size();

  std::vector<unsigned char> image_bytes;
  std::size_t offset = 0;
  const std::vector<unsigned char>* source = &bytes;
  if (single_file) {
    if (!std::isfinite(vox_offset) || vox_offset < kHeaderSize)
      throw FormatError(name + ": vox_offset inside the header");
    offset = static_cast<std::size_t>(vox_offset);
  } else {
    image_bytes = read_maybe_gzip(image_path_for(path));
    offset = std::isfinite(vox_offset) && vox_offset > 0 ? static_cast<std::size_t>(vox_offset) : 0;
    source = &image_bytes;
  }
  if (offset + count * elem > source->size()) throw FormatError(name + ": image data truncated");

  const ByteReader img(*source, file_little != host_is_little());
  std::vector<double> raw;
  switch (datatype) {
    case kUint8: decode<std::uint8_t>(img, offset, count, raw); break;
    case kInt16: decode<std::int16_t>(img, offset, count, raw); break;
    case kInt32: decode<std::int32_t>(img, offset, count, raw); break;
    case kFloat32: decode<float>(img, offset, count, raw); break;
    case kFloat64: decode<double>(img, offset, count, raw); break;
  }
  if (rescale)
    for (double& v : raw) v = slope * v + inter;

  Volume vol;
  vol.dims = dims;
  vol.voxel_size_mm = voxel_size;
  vol.data = detail::to_probabilities(raw, name);

  if (header) {
    header->source_format = SourceFormat::nifti1;
    header->original_dims = extent;
    header->scale_applied.reset();
    if (rescale) header->scale_applied = std::make_pair(slope, inter);
  }
  return vol;
}

}  // namespace pcount
