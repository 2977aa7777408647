#include "subnorm/rng.hpp"

#include <cmath>
#include <numbers>

namespace subnorm {

namespace {
uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

RngStream RngStream::stream(uint64_t seed, uint64_t index) {
  return RngStream(splitmix64(splitmix64(seed) ^ (index + 1)));
}

double RngStream::uniform() {
  ++draws_;
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u in (0,1] to keep log finite
  double u = 0.0;
  do {
    u = 1.0 - uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

uint64_t RngStream::below(uint64_t n) {
  if (n == 0) return 0;
  // rejection sampling to avoid modulo bias
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    ++draws_;
    x = gen_();
  } while (x >= limit);
  return x % n;
}

Vector RngStream::gaussian_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian();
  return v;
}

Matrix RngStream::gaussian_matrix(int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
  return m;
}

std::vector<int> RngStream::sample_subset(int p, int k) {
  std::vector<int> pool(p);
  for (int i = 0; i < p; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(below(static_cast<uint64_t>(p - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace subnorm
