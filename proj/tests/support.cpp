#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>
#include <zlib.h>

namespace pcount::test {

Volume make_volume(Dims dims, std::vector<float> values) {
  Volume v(dims, {1.0, 1.0, 1.0});
  if (values.size() != dims.size()) throw std::logic_error("make_volume: size mismatch");
  v.data = std::move(values);
  return v;
}

Volume strip() { return make_volume({5, 1, 1}, {0.2f, 0.9f, 0.3f, 0.6f, 0.1f}); }

Volume random_quantized(std::mt19937_64& rng, std::size_t max_edge) {
  const Dims d{1 + rng() % max_edge, 1 + rng() % max_edge, 1 + rng() % max_edge};
  Volume v(d, {1.0, 1.0, 1.0});
  for (float& x : v.data) x = (rng() % 3 == 0) ? 0.0f : static_cast<float>(rng() % 33) / 32.0f;
  return v;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("pcount-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::size_t element_width(std::int16_t datatype) {
  switch (datatype) {
    case 2: return 1;
    case 4: return 2;
    case 8: case 16: return 4;
    case 64: return 8;
    default: return 1;
  }
}

template <class T>
void put(std::vector<std::uint8_t>& buf, std::size_t off, T value, bool swap) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if (swap) std::reverse(raw, raw + sizeof(T));
  std::memcpy(buf.data() + off, raw, sizeof(T));
}

void dump(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes, bool gzip) {
  if (gzip) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("gzopen failed");
    gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
    gzclose(f);
  } else {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

}  // namespace

void write_nifti(const std::filesystem::path& path, const NiftiSpec& spec, const std::vector<std::uint8_t>& payload) {
  const bool swap = spec.big_endian;  // tests run on little-endian hosts
  const std::size_t header_len = spec.pair ? 348 : 352;
  std::vector<std::uint8_t> hdr(header_len, 0);
  put<std::int32_t>(hdr, 0, spec.sizeof_hdr, swap);
  for (int k = 0; k < 8; ++k) put<std::int16_t>(hdr, 40 + 2 * k, spec.dim[k], swap);
  put<std::int16_t>(hdr, 70, spec.datatype, swap);
  put<std::int16_t>(hdr, 72, static_cast<std::int16_t>(8 * element_width(spec.datatype)), swap);
  for (int k = 0; k < 4; ++k) put<float>(hdr, 76 + 4 * k, spec.pixdim[k], swap);
  put<float>(hdr, 108, spec.pair ? 0.0f : 352.0f, swap);
  put<float>(hdr, 112, spec.scl_slope, swap);
  put<float>(hdr, 116, spec.scl_inter, swap);
  std::memcpy(hdr.data() + 344, spec.pair ? "ni1\0" : "n+1\0", 4);

  std::vector<std::uint8_t> data = payload;
  if (swap) {
    const std::size_t w = element_width(spec.datatype);
    for (std::size_t i = 0; i + w <= data.size(); i += w) std::reverse(data.begin() + i, data.begin() + i + w);
  }
  if (spec.pair) {
    dump(path, hdr, spec.gzip);
    std::string img = path.string();
    img.replace(img.rfind(".hdr"), 4, ".img");
    dump(img, data, spec.gzip);
  } else {
    hdr.insert(hdr.end(), data.begin(), data.end());
    dump(path, hdr, spec.gzip);
  }
}

}  // namespace pcount::test
