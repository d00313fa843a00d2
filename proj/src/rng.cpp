#include "hgtree/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace hgt {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32Ctr philox4x32(Philox4x32Ctr c, Philox4x32Key k) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

std::uint64_t Stream::next_u64() {
    if (avail_ == 0) {
        auto o = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), 0u, 0u}, key_);
        ++block_;
        buf_[0] = (static_cast<std::uint64_t>(o[1]) << 32) | o[0];
        buf_[1] = (static_cast<std::uint64_t>(o[3]) << 32) | o[2];
        avail_ = 2;
    }
    return buf_[2 - avail_--];
}

double Stream::exponential(double rate) { return -std::log(uniform()) / rate; }

std::int64_t Stream::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        // inversion by sequential search
        double u = uniform();
        double p = std::exp(-mean), F = p;
        std::int64_t k = 0;
        while (u > F && k < 1000) {
            ++k;
            p *= mean / k;
            F += p;
        }
        return k;
    }
    // PTRS, Hormann (1993)
    const double slam = std::sqrt(mean), loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double U = uniform() - 0.5;
        double V = uniform();
        double us = 0.5 - std::abs(U);
        auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * U + mean + 0.43));
        if (us >= 0.07 && V <= vr) return k;
        if (k < 0 || (us < 0.013 && V > us)) continue;
        if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0))
            return k;
    }
}

}  // namespace hgt
