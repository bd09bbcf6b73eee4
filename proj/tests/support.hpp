#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "tmpfc/types.hpp"

namespace tmpfc::testkit {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tmpfc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline OpacityCurve make_curve(std::vector<std::int64_t> a, Territory t = Territory::LAD, double fps = 15.0,
                               std::string id = "case") {
  return OpacityCurve{std::move(id), t, fps, std::move(a)};
}

inline BinaryGrid random_grid(int w, int h, double density, std::mt19937_64& rng) {
  BinaryGrid g(w, h);
  std::bernoulli_distribution on(density);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.set(x, y, on(rng));
  return g;
}

}  // namespace tmpfc::testkit
