#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace rta {

enum class StreamPurpose : std::uint64_t { Traffic = 1, OboInit = 2, OboRu = 3, Shuffle = 4 };

/// Entity id used for AP-side streams (scheduler shuffles).
inline constexpr std::uint64_t kAccessPointEntity = ~std::uint64_t{0};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the (seed, entity, purpose) substream.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t entity,
                                    StreamPurpose purpose) noexcept
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ entity);
    return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

/// One independent random stream. The integer and real mappings are done here
/// instead of through <random> distributions so that output is identical across
/// standard library implementations.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    RngStream(std::uint64_t seed, std::uint64_t entity, StreamPurpose purpose)
        : engine_(stream_seed(seed, entity, purpose))
    {
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive; n == 1 consumes no draw.
    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1)
            return 0;
        // reject the top partial bucket
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit)
            x = engine_();
        return x % n;
    }

    /// Fisher-Yates.
    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_{};
};

} // namespace rta
