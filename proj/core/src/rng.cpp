#include "nproxy/rng.hpp"

#include <cmath>
#include <numbers>

namespace nproxy {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t root_seed, std::vector<std::uint64_t> path)
    : root_seed_(root_seed), path_(std::move(path)) {
  // Two independent hash chains: one for the key, one for the counter tag.
  std::uint64_t hk = splitmix64(root_seed_);
  std::uint64_t ht = splitmix64(root_seed_ ^ 0x5851F42D4C957F2Dull);
  for (std::uint64_t index : path_) {
    hk = splitmix64(hk ^ splitmix64(index));
    ht = splitmix64(ht + splitmix64(index ^ 0x14057B7EF767814Full));
  }
  key_ = {static_cast<std::uint32_t>(hk), static_cast<std::uint32_t>(hk >> 32)};
  tag_ = ht;
}

RngStream RngStream::child(std::uint64_t index) const {
  std::vector<std::uint64_t> path = path_;
  path.push_back(index);
  return RngStream(root_seed_, std::move(path));
}

double RngStream::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

}  // namespace nproxy
