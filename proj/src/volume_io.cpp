#include "voxlink/volume_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "voxlink/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace voxlink {

namespace {

// ---------------------------------------------------------------- NIfTI-1

#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kDtFloat64 = 64;

template <typename T>
void swap_bytes(T& v) {
  auto* p = reinterpret_cast<unsigned char*>(&v);
  std::reverse(p, p + sizeof(T));
}

void swap_header(Nifti1Header& h) {
  swap_bytes(h.sizeof_hdr);
  for (auto& d : h.dim) swap_bytes(d);
  swap_bytes(h.datatype);
  swap_bytes(h.bitpix);
  for (auto& p : h.pixdim) swap_bytes(p);
  swap_bytes(h.vox_offset);
  swap_bytes(h.scl_slope);
  swap_bytes(h.scl_inter);
  swap_bytes(h.qform_code);
  swap_bytes(h.sform_code);
  swap_bytes(h.qoffset_x);
  swap_bytes(h.qoffset_y);
  swap_bytes(h.qoffset_z);
  for (auto& v : h.srow_x) swap_bytes(v);
  for (auto& v : h.srow_y) swap_bytes(v);
  for (auto& v : h.srow_z) swap_bytes(v);
}

struct GzReader {
  gzFile f = nullptr;
  explicit GzReader(const std::string& path) {
    f = gzopen(path.c_str(), "rb");
    if (!f) throw IoFailure("cannot open " + path);
  }
  ~GzReader() {
    if (f) gzclose(f);
  }
  void read_exact(void* dst, std::size_t n, const std::string& what) {
    // gzread handles plain (uncompressed) files transparently
    std::size_t got = 0;
    auto* out = static_cast<unsigned char*>(dst);
    while (got < n) {
      const unsigned chunk = static_cast<unsigned>(
          std::min<std::size_t>(n - got, 1u << 30));
      const int r = gzread(f, out + got, chunk);
      if (r <= 0) throw CorruptHeader("short read while reading " + what);
      got += static_cast<std::size_t>(r);
    }
  }
  void skip(std::size_t n) {
    std::vector<char> junk(std::min<std::size_t>(n, 1 << 16));
    std::size_t left = n;
    while (left > 0) {
      const std::size_t take = std::min(left, junk.size());
      read_exact(junk.data(), take, "padding");
      left -= take;
    }
  }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string nifti_mask_companion(const std::string& path) {
  if (ends_with(path, ".nii.gz")) {
    return path.substr(0, path.size() - 7) + ".mask.nii.gz";
  }
  return path.substr(0, path.size() - 4) + ".mask.nii";
}

Volume load_nifti(const std::string& path, LoadInfo* info, bool want_mask);

Volume load_nifti_payload(const std::string& path, LoadInfo* info) {
  GzReader in(path);
  Nifti1Header h{};
  in.read_exact(&h, sizeof(h), "NIfTI-1 header");

  bool swapped = false;
  if (h.sizeof_hdr != 348) {
    swap_header(h);
    swapped = true;
    if (h.sizeof_hdr != 348) {
      throw CorruptHeader("sizeof_hdr is not 348 in " + path);
    }
  }
  const bool magic_n1 = std::memcmp(h.magic, "n+1", 4) == 0;
  const bool magic_ni1 = std::memcmp(h.magic, "ni1", 4) == 0;
  if (!magic_n1 && !magic_ni1) {
    throw CorruptHeader("bad magic bytes in " + path);
  }
  if (magic_ni1) {
    throw UnsupportedFormat("two-file NIfTI-1 (.hdr/.img) not supported: " +
                            path);
  }
  if (h.dim[0] < 3 || h.dim[0] > 4 || (h.dim[0] == 4 && h.dim[4] > 1)) {
    throw UnsupportedFormat("only 3D NIfTI volumes supported: " + path);
  }
  Volume v;
  for (int a = 0; a < 3; ++a) {
    v.dims[a] = h.dim[a + 1];
    if (v.dims[a] <= 0) throw CorruptHeader("non-positive dim in " + path);
    const float sp = h.pixdim[a + 1];
    v.spacing[a] = (sp > 0.0f) ? sp : 1.0;
  }
  if (h.qform_code > 0) {
    v.origin = {h.qoffset_x, h.qoffset_y, h.qoffset_z};
  } else if (h.sform_code > 0) {
    v.origin = {h.srow_x[3], h.srow_y[3], h.srow_z[3]};
  }

  const std::size_t n =
      static_cast<std::size_t>(v.dims[0]) * v.dims[1] * v.dims[2];
  std::size_t offset = static_cast<std::size_t>(h.vox_offset);
  if (offset < 348) offset = 348;
  in.skip(offset - 348);

  v.data.resize(n);
  auto read_as = [&](auto tag) {
    using T = decltype(tag);
    std::vector<T> raw(n);
    in.read_exact(raw.data(), n * sizeof(T), "voxel payload");
    if (swapped && sizeof(T) > 1) {
      for (auto& x : raw) swap_bytes(x);
    }
    for (std::size_t i = 0; i < n; ++i) v.data[i] = static_cast<float>(raw[i]);
  };
  switch (h.datatype) {
    case kDtUint8:
      read_as(std::uint8_t{});
      break;
    case kDtInt16:
      read_as(std::int16_t{});
      break;
    case kDtFloat32:
      read_as(float{});
      break;
    case kDtFloat64:
      read_as(double{});
      break;
    default:
      throw UnsupportedFormat("NIfTI datatype " + std::to_string(h.datatype) +
                              " not supported: " + path);
  }
  if (h.scl_slope != 0.0f && !(h.scl_slope == 1.0f && h.scl_inter == 0.0f)) {
    for (auto& x : v.data) x = h.scl_slope * x + h.scl_inter;
  }
  std::size_t nans = 0;
  for (auto& x : v.data) {
    if (!std::isfinite(x)) {
      x = 0.0f;
      ++nans;
    }
  }
  if (info) info->nan_replaced += nans;
  return v;
}

Volume load_nifti(const std::string& path, LoadInfo* info, bool want_mask) {
  Volume v = load_nifti_payload(path, info);
  if (want_mask) {
    const std::string mask_path = nifti_mask_companion(path);
    if (fs::exists(mask_path)) {
      Volume mv = load_nifti_payload(mask_path, nullptr);
      if (mv.dims != v.dims) {
        throw DimensionMismatch("mask companion dims differ: " + mask_path);
      }
      v.mask.resize(v.data.size());
      for (std::size_t i = 0; i < v.data.size(); ++i) {
        v.mask[i] = mv.data[i] > 0.5f ? 1 : 0;
      }
    }
  }
  return v;
}

void write_nifti_payload(const Volume& v, const std::string& path,
                         bool as_mask) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = static_cast<std::int16_t>(v.dims[0]);
  h.dim[2] = static_cast<std::int16_t>(v.dims[1]);
  h.dim[3] = static_cast<std::int16_t>(v.dims[2]);
  for (int a = 4; a < 8; ++a) h.dim[a] = 1;
  h.datatype = as_mask ? kDtUint8 : kDtFloat32;
  h.bitpix = as_mask ? 8 : 32;
  h.pixdim[0] = 1.0f;
  for (int a = 0; a < 3; ++a) {
    h.pixdim[a + 1] = static_cast<float>(v.spacing[a]);
  }
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.xyzt_units = 2;  // mm
  h.qform_code = 1;
  h.sform_code = 1;
  h.qoffset_x = static_cast<float>(v.origin[0]);
  h.qoffset_y = static_cast<float>(v.origin[1]);
  h.qoffset_z = static_cast<float>(v.origin[2]);
  h.srow_x[0] = static_cast<float>(v.spacing[0]);
  h.srow_y[1] = static_cast<float>(v.spacing[1]);
  h.srow_z[2] = static_cast<float>(v.spacing[2]);
  h.srow_x[3] = h.qoffset_x;
  h.srow_y[3] = h.qoffset_y;
  h.srow_z[3] = h.qoffset_z;
  std::memcpy(h.magic, "n+1", 4);

  const char pad[4] = {0, 0, 0, 0};
  std::vector<std::uint8_t> bytes;
  if (as_mask) {
    bytes.assign(v.mask.begin(), v.mask.end());
  }

  const std::string tmp = path + ".tmp";
  if (ends_with(path, ".gz")) {
    gzFile f = gzopen(tmp.c_str(), "wb6");
    if (!f) throw IoFailure("cannot open " + tmp + " for writing");
    bool ok = gzwrite(f, &h, sizeof(h)) == static_cast<int>(sizeof(h)) &&
              gzwrite(f, pad, 4) == 4;
    if (ok) {
      if (as_mask) {
        ok = gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size())) ==
             static_cast<int>(bytes.size());
      } else {
        const std::size_t nbytes = v.data.size() * sizeof(float);
        ok = gzwrite(f, v.data.data(), static_cast<unsigned>(nbytes)) ==
             static_cast<int>(nbytes);
      }
    }
    gzclose(f);
    if (!ok) throw IoFailure("short write to " + tmp);
  } else {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + tmp + " for writing");
    f.write(reinterpret_cast<const char*>(&h), sizeof(h));
    f.write(pad, 4);
    if (as_mask) {
      f.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    } else {
      f.write(reinterpret_cast<const char*>(v.data.data()),
              static_cast<std::streamsize>(v.data.size() * sizeof(float)));
    }
    if (!f) throw IoFailure("short write to " + tmp);
  }
  fs::rename(tmp, path);
}

void save_nifti(const Volume& v, const std::string& path) {
  write_nifti_payload(v, path, false);
  if (v.has_mask()) {
    write_nifti_payload(v, nifti_mask_companion(path), true);
  }
}

// ------------------------------------------------------------- raw format

std::string raw_sidecar(const std::string& path) { return path + ".json"; }

std::string raw_mask_path(const std::string& path) {
  return path.substr(0, path.size() - 4) + ".mask";
}

Volume load_raw(const std::string& path, LoadInfo* info) {
  std::ifstream sc(raw_sidecar(path));
  if (!sc) throw IoFailure("missing sidecar " + raw_sidecar(path));
  json j;
  try {
    sc >> j;
  } catch (const json::exception& e) {
    throw CorruptHeader("bad sidecar JSON: " + std::string(e.what()));
  }
  if (j.value("dtype", "") != "f32") {
    throw UnsupportedFormat("raw dtype must be f32");
  }
  Volume v;
  for (int a = 0; a < 3; ++a) {
    v.dims[a] = j.at("dims").at(a).get<int>();
    v.spacing[a] = j.at("spacing").at(a).get<double>();
    v.origin[a] = j.at("origin").at(a).get<double>();
  }
  if (v.dims[0] <= 0 || v.dims[1] <= 0 || v.dims[2] <= 0) {
    throw DimensionMismatch("non-positive dims in sidecar");
  }
  const std::size_t n =
      static_cast<std::size_t>(v.dims[0]) * v.dims[1] * v.dims[2];
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot open " + path);
  v.data.resize(n);
  f.read(reinterpret_cast<char*>(v.data.data()),
         static_cast<std::streamsize>(n * sizeof(float)));
  if (static_cast<std::size_t>(f.gcount()) != n * sizeof(float)) {
    throw DimensionMismatch("payload shorter than dims in " + path);
  }
  std::size_t nans = 0;
  for (auto& x : v.data) {
    if (!std::isfinite(x)) {
      x = 0.0f;
      ++nans;
    }
  }
  if (info) info->nan_replaced += nans;

  const std::string mp = raw_mask_path(path);
  if (fs::exists(mp)) {
    std::ifstream mf(mp, std::ios::binary);
    if (!mf) throw IoFailure("cannot open " + mp);
    v.mask.resize(n);
    mf.read(reinterpret_cast<char*>(v.mask.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(mf.gcount()) != n) {
      throw DimensionMismatch("mask payload shorter than dims in " + mp);
    }
  }
  return v;
}

void save_raw(const Volume& v, const std::string& path) {
  json j;
  j["dims"] = {v.dims[0], v.dims[1], v.dims[2]};
  j["spacing"] = {v.spacing[0], v.spacing[1], v.spacing[2]};
  j["origin"] = {v.origin[0], v.origin[1], v.origin[2]};
  j["dtype"] = "f32";
  {
    const std::string tmp = raw_sidecar(path) + ".tmp";
    std::ofstream sc(tmp);
    if (!sc) throw IoFailure("cannot write sidecar for " + path);
    sc << j.dump(2) << "\n";
    if (!sc.flush()) throw IoFailure("short write to " + tmp);
    sc.close();
    fs::rename(tmp, raw_sidecar(path));
  }
  {
    const std::string tmp = path + ".tmp";
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + tmp + " for writing");
    f.write(reinterpret_cast<const char*>(v.data.data()),
            static_cast<std::streamsize>(v.data.size() * sizeof(float)));
    if (!f) throw IoFailure("short write to " + tmp);
    f.close();
    fs::rename(tmp, path);
  }
  const std::string mp = raw_mask_path(path);
  if (v.has_mask()) {
    const std::string tmp = mp + ".tmp";
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + tmp + " for writing");
    f.write(reinterpret_cast<const char*>(v.mask.data()),
            static_cast<std::streamsize>(v.mask.size()));
    if (!f) throw IoFailure("short write to " + tmp);
    f.close();
    fs::rename(tmp, mp);
  } else if (fs::exists(mp)) {
    fs::remove(mp);
  }
}

}  // namespace

Volume load_volume(const std::string& path, LoadInfo* info) {
  if (!fs::exists(path)) throw IoFailure("no such file: " + path);
  Volume v;
  if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) {
    v = load_nifti(path, info, true);
  } else if (ends_with(path, ".vol")) {
    v = load_raw(path, info);
  } else {
    throw UnsupportedFormat("unrecognized extension: " + path);
  }
  v.validate();
  return v;
}

void save_volume(const Volume& v, const std::string& path) {
  if (v.dims[0] <= 0 || v.dims[1] <= 0 || v.dims[2] <= 0 || v.data.empty()) {
    throw DimensionMismatch("refusing to save a 0-voxel volume");
  }
  v.validate();
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::exists(parent)) {
    throw IoFailure("parent directory missing: " + parent.string());
  }
  if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) {
    save_nifti(v, path);
  } else if (ends_with(path, ".vol")) {
    save_raw(v, path);
  } else {
    throw UnsupportedFormat("unrecognized extension: " + path);
  }
}

void Manifest::validate() const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.subject_id.empty()) {
      throw CorruptHeader("manifest entry with empty subject_id: " + e.path);
    }
    if (!seen.insert(e.path).second) {
      throw CorruptHeader("duplicate manifest path: " + e.path);
    }
  }
}

Manifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot open manifest " + path);
  std::string line;
  if (!std::getline(f, line)) throw CorruptHeader("empty manifest " + path);
  if (line != "path,subject_id,session_id,variant_tag") {
    throw CorruptHeader("bad manifest header: " + line);
  }
  Manifest m;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    ManifestEntry e;
    std::getline(ss, e.path, ',');
    std::getline(ss, e.subject_id, ',');
    std::getline(ss, e.session_id, ',');
    std::getline(ss, e.variant_tag, ',');
    m.entries.push_back(std::move(e));
  }
  m.validate();
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  m.validate();
  const std::string tmp = path + ".tmp";
  std::ofstream f(tmp);
  if (!f) throw IoFailure("cannot write manifest " + path);
  f << "path,subject_id,session_id,variant_tag\n";
  for (const auto& e : m.entries) {
    f << e.path << ',' << e.subject_id << ',' << e.session_id << ','
      << e.variant_tag << '\n';
  }
  if (!f.flush()) throw IoFailure("short write to " + tmp);
  f.close();
  fs::rename(tmp, path);
}

std::string resolve_manifest_path(const std::string& manifest_path,
                                  const std::string& entry_path) {
  fs::path p(entry_path);
  if (p.is_absolute()) return entry_path;
  return (fs::path(manifest_path).parent_path() / p).string();
}

}  // namespace voxlink
