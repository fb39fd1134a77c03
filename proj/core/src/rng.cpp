#include "pcl/rng.hpp"

namespace pcl {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> fields) noexcept {
  // Each field is absorbed after an avalanche of the running state, so
  // (a, b) and (b, a) map to different seeds.
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t f : fields) h = splitmix64(h ^ splitmix64(f));
  return h;
}

}  // namespace pcl
