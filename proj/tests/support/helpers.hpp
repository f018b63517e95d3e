#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include <doctest.h>

#include "lacogsea/error.hpp"
#include "lacogsea/tsv.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lacogsea_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    lacogsea::tsv::write_file(p, content);
    return p;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing

/// Checks that `expr` throws lacogsea::Error of `kind` whose message contains `needle`.
#define CHECK_LACOGSEA_ERROR(expr, error_kind, needle)                                   \
  do {                                                                                    \
    bool thrown_ = false;                                                                 \
    try {                                                                                 \
      (void)(expr);                                                                       \
    } catch (const lacogsea::Error& e_) {                                                 \
      thrown_ = true;                                                                     \
      CHECK(e_.kind() == (error_kind));                                                   \
      CHECK_MESSAGE(std::string(e_.what()).find(needle) != std::string::npos, e_.what()); \
    }                                                                                     \
    CHECK_MESSAGE(thrown_, "expected lacogsea::Error from " #expr);                       \
  } while (0)
