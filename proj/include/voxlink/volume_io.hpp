#pragma once

#include <string>
#include <vector>

#include "voxlink/volume.hpp"

namespace voxlink {

struct LoadInfo {
  std::size_t nan_replaced = 0;  // NaN voxels zeroed at load
};

/// Load a volume from NIfTI-1 (.nii / .nii.gz) or the raw sidecar format
/// (<name>.vol + <name>.vol.json [+ <name>.mask]). Intensities are cast to
/// float32; NaNs are replaced by 0 and counted in `info`.
Volume load_volume(const std::string& path, LoadInfo* info = nullptr);

/// Save in the format implied by the extension. Data is float32 exact, so
/// save followed by load reproduces dims/spacing/data bit-identically.
/// A mask is persisted as a companion file.
void save_volume(const Volume& v, const std::string& path);

/// One dataset row: a volume file plus its ground-truth identity labels.
struct ManifestEntry {
  std::string path;
  std::string subject_id;
  std::string session_id;
  std::string variant_tag;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  /// Paths unique, subject ids non-empty.
  void validate() const;
};

/// CSV with header `path,subject_id,session_id,variant_tag`.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

/// Resolve a manifest-relative path against the directory of the manifest.
std::string resolve_manifest_path(const std::string& manifest_path,
                                  const std::string& entry_path);

}  // namespace voxlink
