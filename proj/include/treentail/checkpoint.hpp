#pragma once

#include <filesystem>
#include <string>

#include "treentail/entailment.hpp"
#include "treentail/trainer.hpp"

namespace treentail {

inline constexpr std::string_view kCheckpointMagic = "TENT1";

struct Checkpoint {
  Model model;
  TrainConfig config;
};

// Layout: "TENT1", u32 LE length + UTF-8 JSON metadata (config, vocabulary,
// label order, precision), then for each tensor in declaration order a
// u64 LE rows, u64 LE cols header followed by little-endian scalars (f64, or
// f32 under single precision). Tensor order is the Slot order followed by
// the frozen and trainable embedding tables.
std::string encode_checkpoint(const Model& model, const TrainConfig& config);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace treentail
