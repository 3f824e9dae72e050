#include "manifest.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "dtqw/error.hpp"

namespace dtqw::cli {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir_.string(), ec.message()));
}

void ArtifactWriter::write(const std::string& name, std::string_view content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  checksums_[name] = sha256_hex(content);
}

void ArtifactWriter::write_manifest(std::string_view command, const nlohmann::json& config,
                                    std::uint64_t seed, unsigned threads) const {
  const nlohmann::json manifest{
      {"command", command},
      {"config", config},
      {"seed", seed},
      {"threads", threads},
      {"artifacts", checksums_},
  };
  const auto path = dir_ / kManifestName;
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (!doc.is_object()) throw ConfigError(fmt::format("{}: expected a JSON object", path.string()));

  ConfigDocument result;
  if (!doc.contains("command")) {
    result.config = std::move(doc);
    return result;
  }
  // Manifest layout.
  if (!doc["command"].is_string()) throw ConfigError("'command' must be a string");
  result.command = doc["command"].get<std::string>();
  if (!doc.contains("config") || !doc["config"].is_object()) {
    throw ConfigError("manifest is missing the 'config' object");
  }
  result.config = doc["config"];
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("'seed' must be an unsigned integer");
    result.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_unsigned()) throw ConfigError("'threads' must be an unsigned integer");
    result.threads = doc["threads"].get<unsigned>();
  }
  return result;
}

}  // namespace dtqw::cli
