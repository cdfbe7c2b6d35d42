#include "output_dir.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "llmmom/digest.hpp"
#include "llmmom/error.hpp"

namespace llmmom::cli {

namespace fs = std::filesystem;

namespace {

bool replaceable(const fs::path& dir) {
  if (!fs::exists(dir)) return true;
  if (!fs::is_directory(dir)) return false;
  return fs::is_empty(dir) || fs::exists(dir / OutputDir::kManifest);
}

std::string file_digest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

}  // namespace

OutputDir::OutputDir(fs::path final_dir, std::string command)
    : final_(fs::absolute(std::move(final_dir)).lexically_normal()), command_(std::move(command)) {
  if (final_.filename().empty()) final_ = final_.parent_path();
  if (!replaceable(final_)) {
    throw PreconditionError("refusing to overwrite " + final_.string() +
                            ": it exists and was not written by this tool (no " + kManifest + ")");
  }
  staging_ = final_.parent_path() / ("." + final_.filename().string() + ".partial");
  fs::create_directories(final_.parent_path());
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

OutputDir::~OutputDir() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void OutputDir::commit() {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(staging_)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), staging_).generic_string());
  }
  std::sort(files.begin(), files.end());
  nlohmann::json manifest;
  manifest["command"] = command_;
  manifest["files"] = nlohmann::json::array();
  for (const auto& f : files) {
    manifest["files"].push_back({{"path", f}, {"sha256", file_digest(staging_ / f)}});
  }
  {
    std::ofstream out(staging_ / kManifest, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw DataError((staging_ / kManifest).string(), 0, "write failed");
  }
  fs::remove_all(final_);
  fs::rename(staging_, final_);
  committed_ = true;
}

}  // namespace llmmom::cli
