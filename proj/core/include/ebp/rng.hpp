#pragma once
#include <cstdint>
#include <vector>

namespace ebp {

// Splittable counter-based generator. Every draw is a pure function of
// (key, counter), and split() derives an independent key, so any stream can
// be reconstructed from the seed and the split path alone. Training relies
// on this for bitwise-reproducible runs and for checkpoint resume without
// serializing generator state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double uniform();      // [0, 1)
  double uniform_pos();  // (0, 1]
  double normal();       // standard normal, Box-Muller, two draws per call
  double gamma(double shape, double rate);  // Marsaglia-Tsang
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);

  std::vector<double> normals(std::size_t count);

  // Independent child stream; split(i) != split(j) for i != j.
  Rng split(std::uint64_t idx) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace ebp
