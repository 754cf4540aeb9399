#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "promptsent/model.hpp"
#include "promptsent/training.hpp"

namespace promptsent {

enum class CheckpointErrorKind {
  kIo,             // cannot open, read or write
  kVersion,        // unsupported format version
  kCorrupt,        // bad magic, truncated, checksum mismatch, bad arrays
  kVocabMismatch,  // vocabulary fingerprint differs from the expected one
};

std::string_view checkpoint_error_name(CheckpointErrorKind kind);

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(CheckpointErrorKind kind, const std::string& message);
  CheckpointErrorKind kind() const { return kind_; }

 private:
  CheckpointErrorKind kind_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointManifest {
  ModelConfig model;
  TrainConfig train;
  std::uint64_t vocab_fingerprint = 0;
  std::size_t epoch = 0;
  nlohmann::json metrics = nlohmann::json::object();
  std::uint64_t adam_step = 0;
};

template <typename T>
struct LoadedCheckpoint {
  CheckpointManifest manifest;
  ModelParams<T> params;
  TrainState<T> state;  // moments present only if the file carried them
};

/// File layout, all integers little-endian:
///   "PSCK", u32 version, u32 manifest length, manifest JSON,
///   u32 array count, then per array: u32 name length, name, u32 rank,
///   u32 dims..., values as float32 (float64 when the manifest says so),
///   and finally a u64 FNV-1a checksum of every preceding byte.
/// Adam moments, when `state` is given, are stored as "adam.m.<name>" and
/// "adam.v.<name>". Writes to a temporary file and renames it into place.
template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ModelParams<T>& params,
                     const CheckpointManifest& manifest,
                     const TrainState<T>* state = nullptr);

/// Reads a checkpoint in any stored precision. When `expected_vocab` is set
/// and differs from the stored fingerprint, throws kVocabMismatch.
template <typename T>
LoadedCheckpoint<T> load_checkpoint(const std::filesystem::path& path,
                                    std::optional<std::uint64_t> expected_vocab = {});

/// Manifest only; validates the header and checksum.
CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& path);

}  // namespace promptsent
