#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "jrp/model.hpp"

namespace jrp {

// Deterministic stream splitting: child(k) seeds an independent generator
// from (seed, k).
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed) {}
  std::mt19937_64 child(std::uint64_t stream) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// tiny-exact, jrpd, general, colorful, gap(T) and setcover. The same seed and
// profile always give the same instance. Throws kBadProfile.
Instance generate_instance(const std::string& profile, std::uint64_t seed);

std::vector<std::string> profile_names();

}  // namespace jrp
