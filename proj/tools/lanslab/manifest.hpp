#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "lanslab/field.hpp"

namespace lanslab::cli {

struct RunManifest {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::string version;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
  // SHA-256 of the compact JSON form, lowercase hex.
  std::string hash() const;
};

std::string sha256_hex(const std::string& bytes);
std::string version_string();

// Writes artifacts under one directory, each citing the manifest hash.
class ArtifactWriter {
 public:
  // Creates dir and writes manifest.json into it.
  ArtifactWriter(std::filesystem::path dir, RunManifest manifest);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const RunManifest& manifest() const noexcept { return manifest_; }
  const std::string& hash() const noexcept { return hash_; }

  // Adds manifest_hash and seed, then writes pretty JSON.
  std::filesystem::path write_json(const std::string& name, nlohmann::json report) const;
  // Opens a CSV whose first line is "# manifest_hash=<hex>".
  std::filesystem::path csv_path(const std::string& name) const;
  std::ofstream open_csv(const std::string& name) const;
  // Binary field checkpoint named <stem>.<hash prefix>.lfld; returns the file name.
  std::string write_checkpoint(const std::string& stem, const VectorField& f, double time) const;

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
  std::string hash_;
};

}  // namespace lanslab::cli
