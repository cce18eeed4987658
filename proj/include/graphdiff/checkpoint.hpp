#pragma once

#include <string>
#include <vector>

#include "graphdiff/param_store.hpp"

namespace graphdiff::nn {

/// One named f64 array in a checkpoint container.
struct CheckpointEntry {
  std::string name;
  std::vector<int> dims;
  std::vector<double> data;
};

/// Versioned binary container, magic "GDF1", little-endian:
///   magic[4] | u32 entry count | entries
///   entry: u32 name length | name bytes | u8 ndim | u32 dims[ndim] | f64 data
/// Round-trips bit-exactly. Loading rejects bad magic (naming both versions)
/// and truncated files.
void write_checkpoint_entries(const std::string& path, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> read_checkpoint_entries(const std::string& path);

/// ParamStore serialization: parameters in creation order, then optimizer
/// moments under "opt.m." / "opt.v." / "opt.steps", then any extra entries
/// (model metadata, dataset stats) verbatim.
void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::vector<CheckpointEntry>& extra = {});

/// Restores parameter values and optimizer state into an already-constructed
/// store (names and shapes must match exactly); returns the extra entries.
std::vector<CheckpointEntry> load_checkpoint(const std::string& path, ParamStore& store);

/// Peeks at the extra entries without needing a ParamStore.
std::vector<CheckpointEntry> load_checkpoint_extras(const std::string& path);

}  // namespace graphdiff::nn
