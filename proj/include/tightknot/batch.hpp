#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tightknot/records.hpp"
#include "tightknot/tightener.hpp"

namespace tightknot {

struct BatchConfig {
  TighteningConfig tightening;
  bool preprocess = false;
  PreprocessConfig preprocessing;
  std::size_t resample = 0;  // vertices per component before tightening; 0 keeps the input
  std::uint64_t topology_seed = 0;
  unsigned threads = 1;

  // Digest of everything that affects a row's numbers; keys resumed rows.
  std::string hash() const;
};

struct BatchOptions {
  // Rows already computed (e.g. a previous, possibly partial, output table).
  // A row is reused when label and config hash both match.
  RecordTable previous;
  // Called once per freshly computed row, serialised, in completion order.
  std::function<void(const InvariantRecord&)> on_row;
};

struct BatchSummary {
  std::size_t computed = 0;
  std::size_t reused = 0;
  std::size_t failed = 0;
};

// Rows in manifest order. Per-knot failures become rows with status
// "error"; a changed determinant gives status "topology-changed".
RecordTable batch_run(const std::vector<ManifestEntry>& manifest, const BatchConfig& config,
                      const BatchOptions& options = {}, BatchSummary* summary = nullptr);

// The per-knot pipeline: optional resample and preprocess, tighten,
// determinant check against the input, measurements.
InvariantRecord process_entry(const ManifestEntry& entry, const BatchConfig& config);

}  // namespace tightknot
