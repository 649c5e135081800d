#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pmm {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Reproducibility envelope written next to every command's outputs. The
/// stored argument vector is enough to regenerate them.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;  // full command line, program name first
  std::uint64_t seed = 0;
  std::string family_fingerprint;      // hex hash of the rate table
  std::string version = kArtifactVersion;
  std::vector<std::string> outputs;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  void write(const std::string& path) const;
  static RunManifest read(const std::string& path);
};

std::string fingerprint_hex(std::uint64_t fingerprint);

}  // namespace pmm
