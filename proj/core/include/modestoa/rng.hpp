#pragma once

#include <cstdint>
#include <random>

namespace modestoa {

/// Independent random streams derived from one 64-bit seed.
///
/// Every consumer names its stream with a domain tag plus up to two indices
/// (receiver, packet, noise block, ...), so results do not depend on the
/// order or the thread in which streams are drawn.
enum class RngDomain : std::uint64_t {
  Schedule = 1,
  Payload = 2,
  TxImpairments = 3,
  Amplitude = 4,
  CarrierPhase = 5,
  Noise = 6,
  ClockWalk = 7,
  Bootstrap = 8,
  Test = 99,
};

std::uint64_t splitmix64(std::uint64_t x);

std::mt19937_64 make_rng(std::uint64_t seed, RngDomain domain, std::uint64_t a = 0, std::uint64_t b = 0);

}  // namespace modestoa
