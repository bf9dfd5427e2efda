#pragma once

#include <cstdint>
#include <string>

#include "gmf/gcnn.hpp"

namespace gmf {

/// Model checkpoint: configuration, parameters, and the RNG descriptor
/// (seed and uniform-draw count) of the stream that produced the run.
/// Serialized as human-readable "key = value" text with 17-significant-digit
/// decimals, so a save/load round trip is bit exact.
struct Checkpoint {
  GcnnConfig config;
  GcnnParams params;
  std::uint64_t seed = 0;
  std::uint64_t draws = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

std::string checkpoint_to_string(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace gmf
