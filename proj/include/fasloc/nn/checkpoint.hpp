#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fasloc/nn/tensor.hpp"

namespace fasloc::nn {

inline constexpr char kCheckpointMagic[8] = {'F', 'A', 'S', 'L', 'O', 'C', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  Matrix value;
};

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::vector<CheckpointEntry> tensors;
};

/// Binary layout (little endian), see docs/checkpoint_format.md.
void save_checkpoint(const std::filesystem::path& path, const TensorList& params,
                     const std::map<std::string, std::string>& metadata);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint values into `params`; throws ValidationError when the
/// names, order or shapes differ from the manifest.
void restore(const Checkpoint& ckpt, const TensorList& params);

}  // namespace fasloc::nn
