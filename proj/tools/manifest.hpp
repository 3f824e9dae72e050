#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dtqw::cli {

inline constexpr std::string_view kManifestName = "manifest.json";

std::string sha256_hex(std::string_view bytes);

/// Writes files into one output directory and remembers their checksums.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  void write(const std::string& name, std::string_view content);
  const std::filesystem::path& dir() const { return dir_; }

  /// Emits manifest.json: command, resolved config, seed, threads, checksums.
  void write_manifest(std::string_view command, const nlohmann::json& config,
                      std::uint64_t seed, unsigned threads) const;

 private:
  std::filesystem::path dir_;
  nlohmann::json checksums_ = nlohmann::json::object();
};

/// A --config document. Plain configs carry only `config`; a manifest also
/// names its command and the seed/threads it ran with.
struct ConfigDocument {
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::string> command;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

ConfigDocument load_config(const std::filesystem::path& path);

}  // namespace dtqw::cli
