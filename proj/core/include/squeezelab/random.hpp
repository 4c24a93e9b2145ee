#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace squeezelab {

// Samples are generated in fixed-size chunks, each from its own engine seeded
// from (master seed, chunk index). Output therefore does not depend on how
// chunks are distributed over threads.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

using Engine = std::mt19937_64;

// SplitMix64 finalizer over the master seed and stream index.
constexpr std::uint64_t substream_seed(std::uint64_t master,
                                       std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Calls fill(engine, begin, end) once per chunk of [0, n).
template <typename Fill>
void for_each_chunk(std::size_t n, std::uint64_t seed, int threads,
                    const Fill& fill) {
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  auto run = [&](std::size_t first_chunk, std::size_t stride) {
    for (std::size_t c = first_chunk; c < chunks; c += stride) {
      Engine engine(substream_seed(seed, c));
      fill(engine, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                              std::max<std::size_t>(chunks, 1));
  if (workers == 1) {
    run(0, 1);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
}

}  // namespace squeezelab
