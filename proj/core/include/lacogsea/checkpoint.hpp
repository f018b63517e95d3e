#pragma once

#include <filesystem>
#include <string>

#include "lacogsea/autoencoder.hpp"

namespace lacogsea {

inline constexpr const char* kCheckpointFormat = "lacogsea-autoencoder";
inline constexpr int kCheckpointVersion = 1;

/// Self-describing JSON checkpoint. Parameter tensors are stored row-major
/// as base64 little-endian float64 with their declared shapes, so the file
/// is byte-identical for identical parameters.
std::string serialize_model(const AutoencoderModel& model);
AutoencoderModel deserialize_model(const std::string& text);

void save_model(const AutoencoderModel& model, const std::filesystem::path& path);
AutoencoderModel load_model(const std::filesystem::path& path);

/// JSON: every hyperparameter actually used (defaults resolved), seed,
/// worker count and final losses.
std::string training_manifest(const AutoencoderModel& model, Eigen::Index samples, unsigned threads);

/// Latent matrix TSV: samples as rows, columns dim_0 .. dim_{D-1}.
std::string format_latent_matrix(const LatentMatrix& z);
LatentMatrix load_latent_matrix(const std::filesystem::path& path);

}  // namespace lacogsea
