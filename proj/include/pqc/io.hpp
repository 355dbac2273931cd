#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pqc/types.hpp"
#include "pqc/waveform.hpp"

namespace pqc {

/// UTF-8 JSON Lines, one record per line:
/// {"id":str,"samples_per_cycle":int,"n_cycles":int,"label":str|null,
///  "base_peak":float|null,"va":[...],"vb":[...],"vc":[...]}
/// plus "padded_from_cycles" when set. A dataset with a split gains one
/// trailer line {"split":{"train":[ids],"val":[ids],"test":[ids]}}.
Dataset read_dataset_jsonl(const std::string& path);
void write_dataset_jsonl(const Dataset& dataset, const std::string& path);

/// RFC-4180 CSV with a header row: id,f0,f1,... One row per matrix row.
void write_features_csv(const std::string& path,
                        const std::vector<std::string>& ids, const MatrixXd& x);
std::pair<std::vector<std::string>, MatrixXd> read_features_csv(
    const std::string& path);

/// CSV "id,cluster".
void write_assignments_csv(const std::string& path,
                           const std::vector<std::string>& ids,
                           const std::vector<int>& assignments);
std::pair<std::vector<std::string>, std::vector<int>> read_assignments_csv(
    const std::string& path);

/// Model container: 4-byte little-endian header length, UTF-8 JSON header,
/// then raw little-endian arrays in the order declared by header["arrays"].
struct BlobArray {
  std::string name;
  std::vector<Index> shape;
  std::string dtype;  // "f32" or "f64"
  std::vector<unsigned char> bytes;

  static BlobArray from(const std::string& name, std::vector<Index> shape,
                        const float* data, Index count);
  static BlobArray from(const std::string& name, std::vector<Index> shape,
                        const double* data, Index count);
  Index count() const;
  void to(float* out, Index count) const;
  void to(double* out, Index count) const;
};

void write_container(const std::string& path, nlohmann::json header,
                     const std::vector<BlobArray>& arrays);
std::pair<nlohmann::json, std::vector<BlobArray>> read_container(
    const std::string& path);

/// FNV-1a 64-bit hash of a file, as 16 hex digits. Used for artifact
/// fingerprints in run reports.
std::string fnv1a64_file(const std::string& path);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace pqc
