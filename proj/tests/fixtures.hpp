#pragma once

#include "gistline/content.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace fixtures {

inline const std::string kPackDir = GISTLINE_TEST_PACK;

inline const gistline::content::ContentPack& default_pack() {
  static const auto pack = gistline::content::load_pack(kPackDir);
  return pack;
}

// Fresh empty directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("gistline-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace fixtures
