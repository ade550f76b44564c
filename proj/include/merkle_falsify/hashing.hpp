#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace merkle_falsify {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

enum class HashAlgorithm { kSha256Truncated, kIdealOracle };

std::string_view to_string(HashAlgorithm algorithm);

// Hash flavour plus output width b in bits. Valid widths are 1..256 for
// truncated SHA-256 and 1..64 for the ideal oracle; construction throws
// ConfigError otherwise.
class HashSpec {
 public:
  HashSpec(HashAlgorithm algorithm, unsigned bits);

  static HashSpec Sha256(unsigned bits) { return {HashAlgorithm::kSha256Truncated, bits}; }
  static HashSpec Ideal(unsigned bits) { return {HashAlgorithm::kIdealOracle, bits}; }

  static unsigned max_bits(HashAlgorithm algorithm);

  HashAlgorithm algorithm() const { return algorithm_; }
  unsigned bits() const { return bits_; }
  std::size_t byte_length() const { return (bits_ + 7) / 8; }

  friend bool operator==(const HashSpec&, const HashSpec&) = default;

 private:
  HashAlgorithm algorithm_;
  unsigned bits_;
};

// A b-bit hash value stored MSB-first in ceil(b/8) bytes. Bits past position
// b in the last byte are always zero, so byte equality is value equality.
class Digest {
 public:
  // Throws UsageError if the byte count does not match or pad bits are set.
  Digest(Bytes bytes, unsigned bit_length);

  // Keeps the most significant `bits` bits of `full` (first byte first).
  static Digest Truncate(ByteView full, unsigned bits);
  // Places the low `bits` bits of `value` (bits <= 64) left-aligned.
  static Digest FromValue(std::uint64_t value, unsigned bits);
  // Lowercase or uppercase hex of the padded bytes. Throws UsageError.
  static Digest FromHex(std::string_view hex, unsigned bits);

  const Bytes& bytes() const { return bytes_; }
  unsigned bit_length() const { return bit_length_; }
  std::string hex() const;

  friend bool operator==(const Digest&, const Digest&) = default;

 private:
  Bytes bytes_;
  unsigned bit_length_;
};

std::array<std::uint8_t, 32> sha256(ByteView input);

// Lazily memoized random oracle. The first query for input x draws the
// value from SHA-256(seed_be64 || x); later queries return the stored value.
// Not thread-safe: confine each instance to one thread.
class OracleState {
 public:
  explicit OracleState(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return table_.size(); }

  // Forgets every memoized answer and switches to a new seed.
  void reseed(std::uint64_t seed);

  Digest query(ByteView input, unsigned bits);

 private:
  std::uint64_t seed_;
  // Full 64-bit draw per input; a query at width b keeps its low b bits.
  std::unordered_map<std::string, std::uint64_t> table_;
};

// Hashes `input` to spec.bits() bits. `oracle` must be non-null exactly when
// spec uses the ideal oracle (UsageError otherwise).
Digest hash_bytes(ByteView input, const HashSpec& spec, OracleState* oracle = nullptr);

// H(left || right) over the padded byte representations.
Digest hash_concat(const Digest& left, const Digest& right, const HashSpec& spec,
                   OracleState* oracle = nullptr);

}  // namespace merkle_falsify
