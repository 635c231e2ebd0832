#pragma once

#include <filesystem>

#include "m3s/model.hpp"

namespace m3s {

/// Self-describing JSON checkpoint: format tag, training config + hash,
/// per-branch layer specs, every parameter tensor, the weight matrix and the
/// probability matrix. Floats are written in shortest round-trip form, so
/// save -> load -> save is byte-stable and training determinism carries
/// through to the file level.
inline constexpr const char* kCheckpointFormat = "m3s-checkpoint-v1";

void save_checkpoint(const M3sModel& model, const std::filesystem::path& path);

/// Throws CheckpointError on a missing/foreign format tag, config-hash
/// mismatch, or shape mismatch between specs and stored tensors.
M3sModel load_checkpoint(const std::filesystem::path& path);

}  // namespace m3s
