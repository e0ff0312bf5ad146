#ifndef SGFL_RNG_HPP
#define SGFL_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace sgfl {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream identified by (seed, stream id).
///
/// Two streams with different ids never share counter space, so Monte Carlo
/// run r can be given Stream(seed, r) and produce the same numbers no matter
/// which thread evaluates it or in which order. Satisfies
/// UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in (0, 1).
  double uniform_open();
  /// Standard normal draw (Box-Muller, cached pair).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream. Children of the same parent with distinct
  /// labels are independent of each other and of the parent.
  Stream split(std::uint64_t label) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sgfl

#endif  // SGFL_RNG_HPP
