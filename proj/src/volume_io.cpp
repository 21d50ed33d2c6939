#include "pcount/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "pcount/error.hpp"
#include "probability.hpp"

namespace pcount {
namespace {

using nlohmann::json;

std::array<std::size_t, 3> read_dims(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 3) throw FormatError(name + ": dims must be [nx, ny, nz]");
  std::array<std::size_t, 3> d{};
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number_integer() || j[k].get<long long>() < 1)
      throw FormatError(name + ": dims must be positive integers");
    d[k] = j[k].get<std::size_t>();
  }
  return d;
}

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

Volume load_raw_json(const std::filesystem::path& path, VolumeHeaderInfo* header) {
  const std::string name = path.string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + name);
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw FormatError(name + ": " + e.what());
  }
  if (!meta.is_object()) throw FormatError(name + ": expected a JSON object");
  for (const char* key : {"dims", "data_file"})
    if (!meta.contains(key)) throw FormatError(name + ": missing key '" + key + "'");

  const auto extent = read_dims(meta["dims"], name);
  std::array<double, 3> voxel_size{1.0, 1.0, 1.0};
  if (meta.contains("voxel_size_mm")) {
    const json& vs = meta["voxel_size_mm"];
    if (!vs.is_array() || vs.size() != 3) throw FormatError(name + ": voxel_size_mm must have 3 entries");
    for (int k = 0; k < 3; ++k) {
      if (!vs[k].is_number() || !(vs[k].get<double>() > 0.0))
        throw FormatError(name + ": voxel sizes must be positive");
      voxel_size[k] = vs[k].get<double>();
    }
  }
  const std::string dtype = meta.value("dtype", "float32");
  if (dtype != "float32") throw FormatError(name + ": unknown dtype '" + dtype + "'");
  const std::string order = meta.value("byte_order", "little");
  if (order != "little" && order != "big") throw FormatError(name + ": unknown byte_order '" + order + "'");

  const std::filesystem::path blob_path = path.parent_path() / meta["data_file"].get<std::string>();
  std::ifstream blob(blob_path, std::ios::binary);
  if (!blob) throw IoError("cannot open " + blob_path.string());
  const std::vector<char> bytes{std::istreambuf_iterator<char>(blob), std::istreambuf_iterator<char>()};

  const Dims dims{extent[0], extent[1], extent[2]};
  if (bytes.size() != dims.size() * sizeof(float))
    throw FormatError(name + ": dims product " + std::to_string(dims.size()) + " does not match " +
                      std::to_string(bytes.size() / sizeof(float)) + " floats in " +
                      blob_path.filename().string());

  const bool swap = (order == "little") != (std::endian::native == std::endian::little);
  std::vector<double> raw(dims.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, bytes.data() + i * sizeof(float), sizeof bits);
    if (swap) bits = byteswap32(bits);
    raw[i] = std::bit_cast<float>(bits);
  }

  Volume vol;
  vol.dims = dims;
  vol.voxel_size_mm = voxel_size;
  vol.data = detail::to_probabilities(raw, name);
  if (header) {
    header->source_format = SourceFormat::raw_json;
    header->original_dims = extent;
    header->scale_applied.reset();
  }
  return vol;
}

void write_raw_json(const Volume& vol, const std::filesystem::path& json_path) {
  validate(vol);
  const std::filesystem::path blob_path = std::filesystem::path(json_path).replace_extension(".raw");
  {
    std::ofstream blob(blob_path, std::ios::binary | std::ios::trunc);
    if (!blob) throw IoError("cannot write " + blob_path.string());
    const bool swap = std::endian::native != std::endian::little;
    for (float v : vol.data) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
      if (swap) bits = byteswap32(bits);
      blob.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!blob) throw IoError("failed writing " + blob_path.string());
  }
  json meta = {
      {"dims", {vol.dims.nx, vol.dims.ny, vol.dims.nz}},
      {"voxel_size_mm", {vol.voxel_size_mm[0], vol.voxel_size_mm[1], vol.voxel_size_mm[2]}},
      {"data_file", blob_path.filename().string()},
      {"dtype", "float32"},
      {"byte_order", "little"},
  };
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + json_path.string());
  out << meta.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + json_path.string());
}

Volume load_volume(const std::filesystem::path& path, VolumeHeaderInfo* header) {
  if (path.extension() == ".json") return load_raw_json(path, header);
  return load_nifti(path, header);
}

Volume crop_to_foreground(const Volume& vol, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("crop eps must lie in [0, 1)");
  const Dims& d = vol.dims;
  std::array<std::size_t, 3> lo{d.nx, d.ny, d.nz};
  std::array<std::size_t, 3> hi{0, 0, 0};
  bool any = false;
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    if (!(static_cast<double>(vol.data[i]) > eps)) continue;
    const auto c = d.coords(i);
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
    any = true;
  }
  if (!any) return Volume(Dims{1, 1, 1}, vol.voxel_size_mm, 0.0f);

  const std::array<std::size_t, 3> extent{d.nx, d.ny, d.nz};
  for (int k = 0; k < 3; ++k) {
    if (lo[k] > 0) --lo[k];
    if (hi[k] + 1 < extent[k]) ++hi[k];
  }
  Volume out(Dims{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1}, vol.voxel_size_mm);
  for (std::size_t z = 0; z < out.dims.nz; ++z)
    for (std::size_t y = 0; y < out.dims.ny; ++y)
      for (std::size_t x = 0; x < out.dims.nx; ++x)
        out.at(x, y, z) = vol.at(x + lo[0], y + lo[1], z + lo[2]);
  return out;
}

namespace {

void pool_slice(const Volume& vol, Volume& out, std::size_t factor, std::size_t oz) {
  const Dims& d = vol.dims;
  const std::size_t z0 = oz * factor, z1 = std::min(z0 + factor, d.nz);
  for (std::size_t oy = 0; oy < out.dims.ny; ++oy) {
    const std::size_t y0 = oy * factor, y1 = std::min(y0 + factor, d.ny);
    for (std::size_t ox = 0; ox < out.dims.nx; ++ox) {
      const std::size_t x0 = ox * factor, x1 = std::min(x0 + factor, d.nx);
      double sum = 0.0;
      for (std::size_t z = z0; z < z1; ++z)
        for (std::size_t y = y0; y < y1; ++y)
          for (std::size_t x = x0; x < x1; ++x) sum += vol.at(x, y, z);
      const double n = static_cast<double>((z1 - z0) * (y1 - y0) * (x1 - x0));
      out.at(ox, oy, oz) = static_cast<float>(sum / n);
    }
  }
}

}  // namespace

Volume downsample(const Volume& vol, std::size_t factor, Exec exec) {
  if (factor < 1) throw InvalidArgument("downsample factor must be >= 1");
  if (factor == 1) return vol;
  const Dims& d = vol.dims;
  const auto ceil_div = [factor](std::size_t n) { return (n + factor - 1) / factor; };
  Volume out(Dims{ceil_div(d.nx), ceil_div(d.ny), ceil_div(d.nz)},
             {vol.voxel_size_mm[0] * factor, vol.voxel_size_mm[1] * factor,
              vol.voxel_size_mm[2] * factor});
  const auto nz = static_cast<std::int64_t>(out.dims.nz);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t oz = 0; oz < nz; ++oz) pool_slice(vol, out, factor, static_cast<std::size_t>(oz));
  } else {
    for (std::int64_t oz = 0; oz < nz; ++oz) pool_slice(vol, out, factor, static_cast<std::size_t>(oz));
  }
  return out;
}

}  // namespace pcount
