#pragma once

#include <cstdint>
#include <random>

namespace pco {

using Engine = std::mt19937_64;

/// Independent engine for replication `stream` under master `seed`.
/// Streams depend only on (seed, stream), never on execution order.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5043u};
  return Engine(seq);
}

}  // namespace pco
