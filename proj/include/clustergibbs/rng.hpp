#pragma once

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw 2011), the counter-based generator
// behind every random draw. Bits are a pure function of (key, counter), so the
// stream is identical on every platform and for every thread schedule.
//
// Stream layout: sample s of a run with seed S uses key = (lo32(S), hi32(S))
// and, for its n-th draw, counter = (lo32(n), lo32(s), hi32(s), hi32(n)). The first two
// output words form a 53-bit uniform in [0, 1).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace clustergibbs {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

// Uniform draws for one sample.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t index)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, index_(index) {}

    double uniform(std::uint64_t step) const {
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(index_),
             static_cast<std::uint32_t>(index_ >> 32), static_cast<std::uint32_t>(step >> 32)},
            key_);
        const std::uint64_t bits = (std::uint64_t{out[0]} << 32) | out[1];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
    std::uint64_t index_;
};

// Sequential draws from one Philox stream, for model generation and tests.
// Integer and real helpers are written out so results do not depend on the
// standard library's distribution implementations.
class Random {
public:
    explicit Random(std::uint64_t seed, std::uint64_t stream = 0) : stream_(seed, stream) {}

    double uniform() { return stream_.uniform(step_++); }

    double between(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    int below(int n) {
        const int k = static_cast<int>(uniform() * n);
        return k < n ? k : n - 1;
    }

    bool chance(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(below(static_cast<int>(i)))]);
    }

    // Uniform point on the unit sphere.
    std::array<double, 3> unit_vector() {
        const double z = between(-1.0, 1.0);
        const double phi = between(0.0, 2.0 * 3.14159265358979323846);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

private:
    SampleStream stream_;
    std::uint64_t step_ = 0;
};

} // namespace clustergibbs
