#pragma once

// Deterministic random number plumbing. Everything downstream needs
// bit-reproducible runs given (master_seed, trial_index), independent of the
// platform's libstdc++ distribution internals, so the generator and all the
// samplers live here.

#include <cstdint>
#include <vector>
#include <cmath>
#include <stdexcept>

namespace treepark {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna), seeded through splitmix64 as recommended.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n), n >= 1 (Lemire's multiply-shift with rejection)
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // number of failures before the first success with success chance 1/2;
    // one word of uniform bits read through count-trailing-zeros
    std::uint32_t geometric_half() {
        std::uint32_t k = 0;
        for (;;) {
            std::uint64_t u = next_u64();
            if (u != 0) return k + static_cast<std::uint32_t>(__builtin_ctzll(u));
            k += 64;  // 64 tails in a row, keep counting
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Fixed splitting hash: trial generators are derived from the master seed and
// the trial index, never from each other, so trial t is the same stream no
// matter how trials are partitioned across threads.
inline Rng derive_rng(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::uint64_t st = master_seed ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t a = splitmix64(st);
    st ^= stream_index * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL;
    std::uint64_t b = splitmix64(st);
    return Rng(a ^ (b + 0x1f83d9abfb41bd6bULL + (stream_index << 1)));
}

// Poisson sampler for a fixed rate, by cumulative-table inversion. The table
// runs until the cdf is within 2^-54 of 1 so a 53-bit uniform always lands.
class PoissonSampler {
public:
    explicit PoissonSampler(double lambda) : lambda_(lambda) {
        if (!(lambda >= 0.0) || lambda > 700.0)
            throw std::invalid_argument("PoissonSampler: rate out of range");
        double p = std::exp(-lambda);
        double cdf = p;
        cdf_.push_back(cdf);
        std::uint32_t k = 0;
        while (cdf < 1.0 - 0x1.0p-54 && k < 200000) {
            ++k;
            p *= lambda / k;
            cdf += p;
            cdf_.push_back(cdf);
        }
        cdf_.back() = 1.0;
    }

    std::uint32_t sample(Rng& rng) const {
        const double u = rng.next_double();
        // mean is small in every use here, linear scan beats binary search
        std::uint32_t k = 0;
        while (u >= cdf_[k]) ++k;
        return k;
    }

    double rate() const { return lambda_; }

private:
    double lambda_;
    std::vector<double> cdf_;
};

}  // namespace treepark
