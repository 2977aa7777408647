#pragma once

#include <cstdint>
#include <random>

#include "subnorm/linalg.hpp"

namespace subnorm {

// Seeded random stream: mt19937_64 (bit-exact sequence fixed by the C++
// standard) with an explicit uniform-double mapping and Box-Muller normals,
// so the draw sequence depends only on the seed. `stream` derives independent
// substreams (one per replication) via splitmix64 on (seed, index).
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : seed_(seed), gen_(seed) {}

  static RngStream stream(uint64_t seed, uint64_t index);

  uint64_t seed() const { return seed_; }
  uint64_t draws() const { return draws_; }

  // uniform in [0, 1) with 53-bit resolution
  double uniform();
  // standard normal, Box-Muller (one cached value)
  double gaussian();
  // uniform integer in [0, n)
  uint64_t below(uint64_t n);

  Vector gaussian_vector(int n);
  Matrix gaussian_matrix(int rows, int cols);
  // k distinct indices from 0..p-1, sorted (partial Fisher-Yates)
  std::vector<int> sample_subset(int p, int k);

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace subnorm
