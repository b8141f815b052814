#pragma once

#include "core/error.hpp"
#include "doctest.h"

namespace testsupport {

inline meshcount::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const meshcount::Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return meshcount::ErrorCode::InvalidArgument;
}

}  // namespace testsupport

#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const meshcount::Error& e) {
    return e.what();
  }
  FAIL("expected an exception");
  return {};
}

}  // namespace testsupport
