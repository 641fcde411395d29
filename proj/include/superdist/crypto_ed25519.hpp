#pragma once

// Ed25519 suite backed by OpenSSL. Kept in its own header so that only targets
// that actually use real signatures need to link libcrypto.

#include <openssl/evp.h>

#include <memory>

#include "superdist/crypto.hpp"

namespace superdist {

namespace detail {

struct EvpPkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct EvpMdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, EvpPkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, EvpMdCtxDeleter>;

}  // namespace detail

// Raw 32-byte public keys, 32-byte private seeds, 64-byte signatures. Key
// material is derived from the caller's Rng so key generation is reproducible
// per seed, like everything else in the toolkit.
inline CryptoSuite ed25519_suite() {
  CryptoSuite suite;
  suite.name = "ed25519";
  suite.digest = [](std::span<const std::uint8_t> data) { return Sha256::hash(data); };
  suite.keygen = [](Rng& rng) {
    Bytes seed(32);
    for (std::size_t i = 0; i < 32; i += 8) {
      const std::uint64_t word = rng.next();
      for (std::size_t j = 0; j < 8; ++j)
        seed[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }
    detail::PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                                      seed.data(), seed.size()));
    if (!pkey) fail(Errc::invalid_receipt, "ed25519 keygen failed");
    Bytes pub(32);
    std::size_t pub_len = pub.size();
    if (EVP_PKEY_get_raw_public_key(pkey.get(), pub.data(), &pub_len) != 1 || pub_len != 32)
      fail(Errc::invalid_receipt, "ed25519 public key extraction failed");
    return KeyPair{pub, seed};
  };
  suite.sign = [](const Bytes& private_key, std::span<const std::uint8_t> message) {
    detail::PkeyPtr pkey(EVP_PKEY_new_raw_private_key(
        EVP_PKEY_ED25519, nullptr, private_key.data(), private_key.size()));
    if (!pkey) fail(Errc::invalid_receipt, "bad ed25519 private key");
    detail::MdCtxPtr ctx(EVP_MD_CTX_new());
    Bytes sig(64);
    std::size_t sig_len = sig.size();
    if (!ctx ||
        EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1 ||
        EVP_DigestSign(ctx.get(), sig.data(), &sig_len, message.data(), message.size()) != 1)
      fail(Errc::invalid_receipt, "ed25519 signing failed");
    sig.resize(sig_len);
    return sig;
  };
  suite.verify = [](const Bytes& public_key, std::span<const std::uint8_t> message,
                    const Bytes& signature) {
    detail::PkeyPtr pkey(EVP_PKEY_new_raw_public_key(
        EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
    if (!pkey) return false;
    detail::MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1)
      return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                            message.size()) == 1;
  };
  return suite;
}

}  // namespace superdist
