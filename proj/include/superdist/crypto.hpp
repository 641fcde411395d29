#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "superdist/common.hpp"
#include "superdist/rng.hpp"
#include "superdist/sha256.hpp"

namespace superdist {

struct KeyPair {
  Bytes public_key;
  Bytes private_key;
};

// Pluggable digest/signature primitives for the container protocol. Two
// implementations ship: ed25519_suite() (crypto_ed25519.hpp, OpenSSL-backed)
// and the fast deterministic test double below.
struct CryptoSuite {
  std::string name;
  std::function<Digest(std::span<const std::uint8_t>)> digest;
  std::function<KeyPair(Rng&)> keygen;
  std::function<Bytes(const Bytes& private_key, std::span<const std::uint8_t>)> sign;
  std::function<bool(const Bytes& public_key, std::span<const std::uint8_t>,
                     const Bytes& signature)>
      verify;
};

// Keyed-hash stand-in for property tests: public and private key are the same
// 32 random bytes and a signature is sha256(key || message). Verifies and
// rejects bit flips exactly like a real scheme, with none of the cost.
// Offers no security against a holder of the public key; never ship it.
inline CryptoSuite test_double_suite() {
  CryptoSuite suite;
  suite.name = "test-double";
  suite.digest = [](std::span<const std::uint8_t> data) { return Sha256::hash(data); };
  suite.keygen = [](Rng& rng) {
    Bytes key(32);
    for (std::size_t i = 0; i < 32; i += 8) {
      const std::uint64_t word = rng.next();
      for (std::size_t j = 0; j < 8; ++j)
        key[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }
    return KeyPair{key, key};
  };
  suite.sign = [](const Bytes& private_key, std::span<const std::uint8_t> message) {
    Sha256 h;
    h.update(private_key.data(), private_key.size());
    h.update(message);
    const Digest d = h.finish();
    return Bytes(d.begin(), d.end());
  };
  suite.verify = [](const Bytes& public_key, std::span<const std::uint8_t> message,
                    const Bytes& signature) {
    Sha256 h;
    h.update(public_key.data(), public_key.size());
    h.update(message);
    const Digest d = h.finish();
    return signature.size() == d.size() && std::equal(d.begin(), d.end(), signature.begin());
  };
  return suite;
}

}  // namespace superdist
