#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace jetrl {

/// Every stochastic source in the toolkit draws from this engine. The
/// helpers below avoid std::*_distribution so that streams are identical
/// across standard library implementations.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Uniform double in [lo, hi).
double uniform_real(Rng& rng, double lo, double hi);

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Standard normal via Box-Muller (one value per call, no caching).
double standard_normal(Rng& rng);

/// Derives an independent child seed; used to split one run seed into
/// per-component streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::string serialize_rng(const Rng& rng);
Rng deserialize_rng(const std::string& text);

}  // namespace jetrl
