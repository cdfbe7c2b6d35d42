#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace llmmom::cli {

/// Output directory written through a sibling staging directory and moved
/// into place only on commit, so a failed command never leaves a
/// half-written tree behind. An existing destination is replaced only when
/// it is empty or carries the manifest of an earlier run.
class OutputDir {
 public:
  static constexpr const char* kManifest = "manifest.json";

  OutputDir(std::filesystem::path final_dir, std::string command);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  const std::filesystem::path& staging() const { return staging_; }
  std::filesystem::path file(const std::string& name) const { return staging_ / name; }
  const std::filesystem::path& final_dir() const { return final_; }

  /// Writes the manifest and renames staging into place.
  void commit();

 private:
  std::filesystem::path final_;
  std::filesystem::path staging_;
  std::string command_;
  bool committed_ = false;
};

}  // namespace llmmom::cli
