#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lanslab/field_io.hpp"

#ifndef LANSLAB_VERSION
#define LANSLAB_VERSION "unknown"
#endif

namespace lanslab::cli {

std::string version_string() { return LANSLAB_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"config", config.string()}, {"out", out.string()},
          {"seed", seed},       {"version", version},         {"params", params}};
}

std::string RunManifest::hash() const { return sha256_hex(to_json().dump()); }

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)), hash_(manifest_.hash()) {
  std::filesystem::create_directories(dir_);
  auto j = manifest_.to_json();
  j["manifest_hash"] = hash_;
  std::ofstream os(dir_ / "manifest.json");
  if (!os) throw std::runtime_error("cannot write to " + dir_.string());
  os << j.dump(2) << '\n';
}

std::filesystem::path ArtifactWriter::write_json(const std::string& name, nlohmann::json report) const {
  report["manifest_hash"] = hash_;
  report["seed"] = manifest_.seed;
  const auto path = dir_ / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << report.dump(2) << '\n';
  return path;
}

std::filesystem::path ArtifactWriter::csv_path(const std::string& name) const { return dir_ / name; }

std::ofstream ArtifactWriter::open_csv(const std::string& name) const {
  std::ofstream os(csv_path(name));
  if (!os) throw std::runtime_error("cannot write " + csv_path(name).string());
  os.precision(17);
  os << "# manifest_hash=" << hash_ << '\n';
  return os;
}

std::string ArtifactWriter::write_checkpoint(const std::string& stem, const VectorField& f, double time) const {
  const std::string name = stem + "." + hash_.substr(0, 12) + ".lfld";
  save_field(dir_ / name, f, time);
  return name;
}

}  // namespace lanslab::cli
