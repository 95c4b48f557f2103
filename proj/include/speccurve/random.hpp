// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>
#include <random>

namespace speccurve
{

/// Seeded 64-bit Mersenne Twister with portable conversions to reals and
/// bounded integers (the std distributions are implementation-defined).
class Rng
{
public:
    explicit Rng( std::uint64_t seed = 0 ) : m_engine( seed ) {}

    std::uint64_t next() { return m_engine(); }

    /// Uniform in [0, 1).
    double uniform() { return double( m_engine() >> 11 ) * 0x1.0p-53; }

    double uniform( double lo, double hi ) { return lo + ( hi - lo ) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int( std::int64_t lo, std::int64_t hi )
    {
        const auto span = std::uint64_t( hi - lo ) + 1;
        // Rejection sampling keeps the draw exactly uniform.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t       x;
        do
            x = m_engine();
        while ( x >= limit );
        return lo + std::int64_t( x % span );
    }

    /// Independent child stream, e.g. one per worker job.
    static std::uint64_t derive( std::uint64_t seed, std::uint64_t stream )
    {
        // splitmix64 finalizer
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * ( stream + 1 );
        z = ( z ^ ( z >> 30 ) ) * 0xBF58476D1CE4E5B9ull;
        z = ( z ^ ( z >> 27 ) ) * 0x94D049BB133111EBull;
        return z ^ ( z >> 31 );
    }

private:
    std::mt19937_64 m_engine;
};

} // namespace speccurve
