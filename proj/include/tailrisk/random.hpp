#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tailrisk {

/// One step of the splitmix64 sequence; used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a of a label, so experiment names can take part in seed derivation.
std::uint64_t hash_label(std::string_view label) noexcept;

/// Folds a path of integers into a master seed. The result depends only on
/// the master seed and the path, never on the order in which streams are
/// created, which is what makes parallel replication reproducible.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept;

class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream derived(std::uint64_t master,
                              std::initializer_list<std::uint64_t> path) {
    return RandomStream(derive_seed(master, path));
  }

  std::uint64_t next() { return engine_(); }
  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace tailrisk
