#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gibbsgeom {

// Counter-based stream: output i is a pure function of (key, i), so draws are
// reproducible independently of thread scheduling. Streams are derived from a
// root seed plus a path of labels/indices; sub-streams never collide with the
// parent's own counter sequence.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    static RngStream root(std::uint64_t seed) { return RngStream(mix(seed ^ 0x6a09e667f3bcc908ull)); }

    RngStream child(std::uint64_t index) const {
        return RngStream(mix(key_ ^ mix(index ^ 0xbb67ae8584caa73bull)));
    }

    RngStream child(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : label) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
        return RngStream(mix(key_ ^ mix(h)));
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard exponential via inversion; uniform() < 1 keeps the log finite.
    double exponential() { return -std::log1p(-uniform()); }

    double exponential(double rate) { return exponential() / rate; }

    // Exact Poisson count by summing unit-exponential spacings (safe for large mean).
    std::uint64_t poisson(double mean) {
        std::uint64_t n = 0;
        double acc = exponential();
        while (acc <= mean) {
            ++n;
            acc += exponential();
        }
        return n;
    }

    std::uint64_t counter() const { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace gibbsgeom
