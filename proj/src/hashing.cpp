#include "merkle_falsify/hashing.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <string>

#include "merkle_falsify/errors.hpp"

namespace merkle_falsify {

namespace {

std::uint8_t pad_mask(unsigned bits) {
  const unsigned used = bits % 8;
  return used == 0 ? 0xff : static_cast<std::uint8_t>(0xff << (8 - used));
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string_view to_string(HashAlgorithm algorithm) {
  switch (algorithm) {
    case HashAlgorithm::kSha256Truncated:
      return "sha256";
    case HashAlgorithm::kIdealOracle:
      return "ideal";
  }
  return "unknown";
}

unsigned HashSpec::max_bits(HashAlgorithm algorithm) {
  return algorithm == HashAlgorithm::kSha256Truncated ? 256 : 64;
}

HashSpec::HashSpec(HashAlgorithm algorithm, unsigned bits) : algorithm_(algorithm), bits_(bits) {
  if (bits < 1 || bits > max_bits(algorithm)) {
    throw ConfigError("hash bit length " + std::to_string(bits) + " outside [1, " +
                      std::to_string(max_bits(algorithm)) + "] for " +
                      std::string(to_string(algorithm)));
  }
}

Digest::Digest(Bytes bytes, unsigned bit_length)
    : bytes_(std::move(bytes)), bit_length_(bit_length) {
  if (bit_length == 0) throw UsageError("digest bit length must be positive");
  if (bytes_.size() != (bit_length + 7) / 8) {
    throw UsageError("digest has " + std::to_string(bytes_.size()) + " bytes, expected " +
                     std::to_string((bit_length + 7) / 8) + " for " +
                     std::to_string(bit_length) + " bits");
  }
  if ((bytes_.back() & ~pad_mask(bit_length) & 0xff) != 0) {
    throw UsageError("digest pad bits are not zero");
  }
}

Digest Digest::Truncate(ByteView full, unsigned bits) {
  const std::size_t n = (bits + 7) / 8;
  if (bits == 0 || n > full.size()) throw UsageError("cannot truncate to " + std::to_string(bits) + " bits");
  Bytes out(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
  out.back() &= pad_mask(bits);
  return Digest(std::move(out), bits);
}

Digest Digest::FromValue(std::uint64_t value, unsigned bits) {
  if (bits == 0 || bits > 64) throw UsageError("FromValue supports 1..64 bits");
  const std::size_t n = (bits + 7) / 8;
  if (bits < 64) value &= (std::uint64_t{1} << bits) - 1;
  // Left-align within n bytes; the shifted value can need up to 71 bits.
  const unsigned __int128 aligned = static_cast<unsigned __int128>(value) << (n * 8 - bits);
  Bytes out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<std::uint8_t>(aligned >> ((n - 1 - i) * 8));
  }
  return Digest(std::move(out), bits);
}

Digest Digest::FromHex(std::string_view hex, unsigned bits) {
  const std::size_t n = (bits + 7) / 8;
  if (bits == 0 || hex.size() != 2 * n) {
    throw UsageError("hex digest of length " + std::to_string(hex.size()) + " does not encode " +
                     std::to_string(bits) + " bits");
  }
  Bytes out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw UsageError("invalid hex digit in digest");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return Digest(std::move(out), bits);
}

std::string Digest::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes_.size() * 2);
  for (std::uint8_t b : bytes_) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

std::array<std::uint8_t, 32> sha256(ByteView input) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(input.data(), input.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 evaluation failed");
  }
  return out;
}

void OracleState::reseed(std::uint64_t seed) {
  seed_ = seed;
  table_.clear();
}

Digest OracleState::query(ByteView input, unsigned bits) {
  std::string key(reinterpret_cast<const char*>(input.data()), input.size());
  auto [it, inserted] = table_.try_emplace(std::move(key), 0);
  if (inserted) {
    Bytes buf(8 + input.size());
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(seed_ >> (56 - 8 * i));
    std::copy(input.begin(), input.end(), buf.begin() + 8);
    const auto full = sha256(buf);
    std::uint64_t word = 0;
    for (int i = 24; i < 32; ++i) word = word << 8 | full[i];
    it->second = word;
  }
  return Digest::FromValue(it->second, bits);
}

Digest hash_bytes(ByteView input, const HashSpec& spec, OracleState* oracle) {
  switch (spec.algorithm()) {
    case HashAlgorithm::kSha256Truncated:
      if (oracle != nullptr) throw UsageError("truncated SHA-256 takes no oracle state");
      return Digest::Truncate(sha256(input), spec.bits());
    case HashAlgorithm::kIdealOracle:
      if (oracle == nullptr) throw UsageError("ideal-oracle hashing requires an oracle state");
      return oracle->query(input, spec.bits());
  }
  throw UsageError("unknown hash algorithm");
}

Digest hash_concat(const Digest& left, const Digest& right, const HashSpec& spec,
                   OracleState* oracle) {
  if (left.bit_length() != spec.bits() || right.bit_length() != spec.bits()) {
    throw UsageError("hash_concat operands must both be " + std::to_string(spec.bits()) +
                     "-bit digests");
  }
  Bytes buf;
  buf.reserve(left.bytes().size() + right.bytes().size());
  buf.insert(buf.end(), left.bytes().begin(), left.bytes().end());
  buf.insert(buf.end(), right.bytes().begin(), right.bytes().end());
  return hash_bytes(buf, spec, oracle);
}

}  // namespace merkle_falsify
