#pragma once

// Checkpoint file: one UTF-8 JSON document with sorted keys,
//   { "class_weights": [...], "config": {...}, "format_version": 1,
//     "params": { name: {"data": [...], "shape": [...]} },
//     "running_stats": { name: {...} },
//     "standardization": {"mean": [...], "std": [...]} }
// Doubles are written in shortest round-trip form, so loading restores
// every value bit-exactly.

#include <filesystem>
#include <string>

#include "dsts/config.hpp"
#include "dsts/model.hpp"

namespace dsts {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  RunConfig config;
  TrainedModel model;
};

std::string checkpoint_to_string(const Checkpoint& ck);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dsts
