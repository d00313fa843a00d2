#pragma once

#include <array>
#include <cstdint>

namespace hgt {

using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

// Philox4x32-10 block (Salmon et al. 2011).
Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key);

std::uint64_t splitmix64(std::uint64_t x);
// Key of child `index` of a stream keyed `parent`; keys of Ulam words are
// built by folding this along the word.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index);

// Counter-based stream: the n-th draw is a pure function of (key, n).
class Stream {
  public:
    explicit Stream(std::uint64_t key) : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    std::uint64_t next_u64();
    // uniform on the open interval (0, 1)
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53; }
    double exponential(double rate);
    std::int64_t poisson(double mean);

  private:
    Philox4x32Key key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int avail_ = 0;
};

}  // namespace hgt
