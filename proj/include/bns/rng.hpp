#pragma once

#include <cstdint>

namespace bns {

// splitmix64: used to expand a (seed, path, kind) key into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Draw categories get their own streams so that model variants which skip a
// subordinator consume identical randomness for the shared ones. That is
// what makes the theta=0 / rho'=1 path reductions bit-exact.
enum class Draw : std::uint64_t {
  kGaussian = 1,
  kZ = 2,
  kZb = 3,
  kZstar = 4,
  kGeneric = 5,
};

// xoshiro256++ stream, deterministically derived from (seed, unit, kind).
// Each (path, draw-kind) pair owns one; results are therefore independent
// of thread scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t unit, Draw kind);

  std::uint64_t next_u64();
  // uniform in [0, 1) with 53 random bits
  double uniform();
  double normal();
  double exponential(double rate);
  // Knuth multiplication method; fine for the small means used here.
  long poisson(double mean);
  double gamma(double shape, double rate);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bns
