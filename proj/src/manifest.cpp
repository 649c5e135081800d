#include "pmm/manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pmm {

std::string fingerprint_hex(std::uint64_t fingerprint) {
  std::ostringstream out;
  out << std::hex << fingerprint;
  return out.str();
}

std::string RunManifest::to_json() const {
  nlohmann::json doc;
  doc["subcommand"] = subcommand;
  doc["arguments"] = arguments;
  doc["seed"] = seed;
  doc["family_fingerprint"] = family_fingerprint;
  doc["version"] = version;
  doc["outputs"] = outputs;
  return doc.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  RunManifest m;
  m.subcommand = doc.at("subcommand").get<std::string>();
  m.arguments = doc.at("arguments").get<std::vector<std::string>>();
  m.seed = doc.at("seed").get<std::uint64_t>();
  m.family_fingerprint = doc.at("family_fingerprint").get<std::string>();
  m.version = doc.at("version").get<std::string>();
  m.outputs = doc.at("outputs").get<std::vector<std::string>>();
  return m;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << to_json() << "\n";
}

RunManifest RunManifest::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace pmm
