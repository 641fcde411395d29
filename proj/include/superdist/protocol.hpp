#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "superdist/common.hpp"
#include "superdist/crypto.hpp"
#include "superdist/licences.hpp"
#include "superdist/market.hpp"
#include "superdist/overlay.hpp"

namespace superdist {

// ---------------------------------------------------------------------------
// Signed container: content plus the chained licence entries accumulated over
// every resale. Entry signatures cover the association, the content digest,
// the digests of all prior entries and the entry's own fields, so any
// mutation invalidates the suffix of the chain.

struct LicenceEntry {
  Bytes seller_public_key;
  Bytes buyer_public_key;
  ConsumptionLicence consumption_licence;
  RedistributionLicence redistribution_licence;
  std::uint32_t resales_remaining = 0;  // after this sale; decreases by 1 per hop
  Bytes signature;                      // by the seller
};

struct SignedContainer {
  Bytes content;
  ContentAssociation association;
  std::vector<LicenceEntry> chain;  // index 0 = the originator's initial issue

  const LicenceEntry& last() const { return chain.back(); }
  const std::string& content_id() const { return association.content_id; }
};

namespace framing {

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_bytes(Bytes& out, std::span<const std::uint8_t> data) {
  out.insert(out.end(), data.begin(), data.end());
}

inline void put_text(Bytes& out, std::string_view text) {
  out.insert(out.end(), text.begin(), text.end());
}

// Bounds-checked little-endian reader.
class Cursor {
public:
  explicit Cursor(std::span<const std::uint8_t> data) : data_(data) {}

  bool done() const { return pos_ == data_.size(); }

  std::uint32_t get_u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t get_u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::span<const std::uint8_t> get_bytes(std::uint64_t n) {
    require(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string get_text(std::uint64_t n) {
    const auto b = get_bytes(n);
    return std::string(b.begin(), b.end());
  }

private:
  void require(std::uint64_t n) const {
    if (n > data_.size() - pos_) fail(Errc::parse_error, "truncated container");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline constexpr char kMagic[4] = {'S', 'D', 'C', '1'};

// Entry fields without the signature; this is also the tail of the signed
// message.
inline Bytes entry_fields_frame(const LicenceEntry& e) {
  Bytes out;
  put_u32(out, static_cast<std::uint32_t>(e.seller_public_key.size()));
  put_bytes(out, e.seller_public_key);
  put_u32(out, static_cast<std::uint32_t>(e.buyer_public_key.size()));
  put_bytes(out, e.buyer_public_key);
  const std::string cons = canonical_text(e.consumption_licence);
  put_u64(out, cons.size());
  put_text(out, cons);
  const std::string redist = canonical_text(e.redistribution_licence);
  put_u64(out, redist.size());
  put_text(out, redist);
  put_u32(out, e.resales_remaining);
  return out;
}

inline Bytes entry_frame(const LicenceEntry& e) {
  Bytes out = entry_fields_frame(e);
  put_u32(out, static_cast<std::uint32_t>(e.signature.size()));
  put_bytes(out, e.signature);
  return out;
}

inline Bytes entry_sign_message(const ContentAssociation& association,
                                const std::vector<Digest>& prior_entry_digests,
                                const LicenceEntry& entry) {
  Bytes msg;
  put_text(msg, "SDSG");
  const std::string assoc = canonical_text(association);
  put_u64(msg, assoc.size());
  put_text(msg, assoc);
  put_u64(msg, association.digest.size());
  put_bytes(msg, std::span<const std::uint8_t>(association.digest.data(),
                                               association.digest.size()));
  put_u32(msg, static_cast<std::uint32_t>(prior_entry_digests.size()));
  for (const Digest& d : prior_entry_digests)
    put_bytes(msg, std::span<const std::uint8_t>(d.data(), d.size()));
  const Bytes fields = entry_fields_frame(entry);
  put_u64(msg, fields.size());
  put_bytes(msg, fields);
  return msg;
}

}  // namespace framing

inline Bytes serialize(const SignedContainer& container) {
  Bytes out;
  out.insert(out.end(), std::begin(framing::kMagic), std::end(framing::kMagic));
  framing::put_u64(out, container.content.size());
  framing::put_bytes(out, container.content);
  const std::string assoc = canonical_text(container.association);
  framing::put_u64(out, assoc.size());
  framing::put_text(out, assoc);
  framing::put_u32(out, static_cast<std::uint32_t>(container.chain.size()));
  for (const LicenceEntry& e : container.chain) {
    const Bytes frame = framing::entry_frame(e);
    framing::put_bytes(out, frame);
  }
  return out;
}

// Strict: rejects trailing bytes and any section that is not in canonical
// form, so serialize(deserialize(b)) == b for every accepted input.
inline SignedContainer deserialize_container(std::span<const std::uint8_t> bytes) {
  framing::Cursor cur(bytes);
  const auto magic = cur.get_bytes(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(framing::kMagic)))
    fail(Errc::parse_error, "bad magic");

  SignedContainer c;
  const std::uint64_t content_len = cur.get_u64();
  const auto content = cur.get_bytes(content_len);
  c.content.assign(content.begin(), content.end());

  const std::string assoc_text = cur.get_text(cur.get_u64());
  c.association = parse_association(assoc_text);
  if (canonical_text(c.association) != assoc_text)
    fail(Errc::parse_error, "association not in canonical form");

  const std::uint32_t entry_count = cur.get_u32();
  c.chain.reserve(entry_count);
  for (std::uint32_t i = 0; i < entry_count; ++i) {
    LicenceEntry e;
    const auto seller = cur.get_bytes(cur.get_u32());
    e.seller_public_key.assign(seller.begin(), seller.end());
    const auto buyer = cur.get_bytes(cur.get_u32());
    e.buyer_public_key.assign(buyer.begin(), buyer.end());
    const std::string cons_text = cur.get_text(cur.get_u64());
    e.consumption_licence = parse_consumption_licence(cons_text);
    if (canonical_text(e.consumption_licence) != cons_text)
      fail(Errc::parse_error, "consumption licence not in canonical form");
    const std::string redist_text = cur.get_text(cur.get_u64());
    e.redistribution_licence = parse_redistribution_licence(redist_text);
    if (canonical_text(e.redistribution_licence) != redist_text)
      fail(Errc::parse_error, "redistribution licence not in canonical form");
    e.resales_remaining = cur.get_u32();
    const auto sig = cur.get_bytes(cur.get_u32());
    e.signature.assign(sig.begin(), sig.end());
    c.chain.push_back(std::move(e));
  }
  if (!cur.done()) fail(Errc::parse_error, "trailing bytes after container");
  return c;
}

// ---------------------------------------------------------------------------
// Verification.

struct VerifyReport {
  enum class Status : std::uint8_t {
    valid,
    content_mismatch,
    chain_broken,
    bad_signature,
    untrusted_origin,
  };

  Status status = Status::valid;
  std::size_t index = 0;  // offending entry for chain_broken / bad_signature

  bool valid() const { return status == Status::valid; }

  static VerifyReport ok() { return {}; }
  static VerifyReport content_mismatch() { return {Status::content_mismatch, 0}; }
  static VerifyReport chain_broken(std::size_t i) { return {Status::chain_broken, i}; }
  static VerifyReport bad_signature(std::size_t i) { return {Status::bad_signature, i}; }
  static VerifyReport untrusted_origin() { return {Status::untrusted_origin, 0}; }

  std::string to_string() const {
    switch (status) {
      case Status::valid: return "Valid";
      case Status::content_mismatch: return "ContentMismatch";
      case Status::chain_broken: return "ChainBroken(" + std::to_string(index) + ")";
      case Status::bad_signature: return "BadSignature(" + std::to_string(index) + ")";
      case Status::untrusted_origin: return "UntrustedOrigin";
    }
    return "?";
  }

  bool operator==(const VerifyReport&) const = default;
};

using TrustRoots = std::vector<Bytes>;

inline bool is_trusted(const TrustRoots& roots, const Bytes& key) {
  return std::find(roots.begin(), roots.end(), key) != roots.end();
}

// Structural verification: content digest, trusted origin, per-entry
// signatures, seller/buyer linkage and the strictly decrementing resale
// counter. Geography/time rules of past hops are not reconstructible from the
// chain and are not checked here; compliant devices enforce them at sale time.
inline VerifyReport verify(const SignedContainer& container, const TrustRoots& trust_roots,
                           const CryptoSuite& suite) {
  if (container.chain.empty()) return VerifyReport::chain_broken(0);
  if (suite.digest(std::span<const std::uint8_t>(container.content.data(),
                                                 container.content.size())) !=
      container.association.digest)
    return VerifyReport::content_mismatch();
  if (!is_trusted(trust_roots, container.chain.front().seller_public_key))
    return VerifyReport::untrusted_origin();

  std::vector<Digest> prior_digests;
  prior_digests.reserve(container.chain.size());
  for (std::size_t i = 0; i < container.chain.size(); ++i) {
    const LicenceEntry& e = container.chain[i];
    if (i > 0) {
      const LicenceEntry& prev = container.chain[i - 1];
      if (e.seller_public_key != prev.buyer_public_key)
        return VerifyReport::chain_broken(i);
      if (prev.resales_remaining == 0 ||
          e.resales_remaining != prev.resales_remaining - 1)
        return VerifyReport::chain_broken(i);
    }
    if (e.consumption_licence.association != container.association ||
        e.redistribution_licence.association != container.association)
      return VerifyReport::chain_broken(i);
    const Bytes message =
        framing::entry_sign_message(container.association, prior_digests, e);
    if (!suite.verify(e.seller_public_key,
                      std::span<const std::uint8_t>(message.data(), message.size()),
                      e.signature))
      return VerifyReport::bad_signature(i);
    const Bytes frame = framing::entry_frame(e);
    prior_digests.push_back(
        suite.digest(std::span<const std::uint8_t>(frame.data(), frame.size())));
  }
  return VerifyReport::ok();
}

// ---------------------------------------------------------------------------
// Packaging and resale.

inline SignedContainer package(const DigitalGood& good, const KeyPair& originator_keys,
                               std::uint32_t initial_resales, const CryptoSuite& suite) {
  if (!verify_association(good))
    fail(Errc::association_error, "package: good fails association check");

  SignedContainer c;
  c.content = good.content;
  c.association = good.consumption_licence.association;

  LicenceEntry e;
  e.seller_public_key = originator_keys.public_key;
  e.buyer_public_key = originator_keys.public_key;  // self-issue
  e.consumption_licence = good.consumption_licence;
  e.redistribution_licence = good.redistribution_licence;
  e.resales_remaining = initial_resales;
  const Bytes message = framing::entry_sign_message(c.association, {}, e);
  e.signature = suite.sign(originator_keys.private_key,
                           std::span<const std::uint8_t>(message.data(), message.size()));
  c.chain.push_back(std::move(e));
  return c;
}

struct Receipt {
  Bytes buyer_public_key;
  Bytes seller_public_key;
  Digest content_digest{};
  std::string transaction_id;
  Money amount = 0;
  Bytes signature;  // buyer's, over all prior fields
};

namespace framing {

inline Bytes receipt_sign_message(const Receipt& r) {
  Bytes msg;
  put_text(msg, "SDRC");
  put_u32(msg, static_cast<std::uint32_t>(r.buyer_public_key.size()));
  put_bytes(msg, r.buyer_public_key);
  put_u32(msg, static_cast<std::uint32_t>(r.seller_public_key.size()));
  put_bytes(msg, r.seller_public_key);
  put_bytes(msg, std::span<const std::uint8_t>(r.content_digest.data(),
                                               r.content_digest.size()));
  put_u32(msg, static_cast<std::uint32_t>(r.transaction_id.size()));
  put_text(msg, r.transaction_id);
  put_u64(msg, static_cast<std::uint64_t>(r.amount));
  return msg;
}

}  // namespace framing

// Honest-participant node state: enforces licence rules and the resale budget
// for the goods it holds. resales_done feeds the max_resales rule; the budget
// comes from the acquired chain entry.
class CompliantDevice {
public:
  explicit CompliantDevice(KeyPair keys) : keys_(std::move(keys)) {}

  static CompliantDevice create(Rng& rng, const CryptoSuite& suite) {
    return CompliantDevice(suite.keygen(rng));
  }

  const Bytes& public_key() const { return keys_.public_key; }
  const KeyPair& keys() const { return keys_; }

  struct Owned {
    SignedContainer container;
    std::uint32_t resales_remaining = 0;
    std::uint64_t resales_done = 0;
  };

  bool owns(const std::string& content_id) const {
    return owned_.find(content_id) != owned_.end();
  }

  const Owned& owned(const std::string& content_id) const {
    const auto it = owned_.find(content_id);
    if (it == owned_.end()) fail(Errc::not_owner, "device does not hold " + content_id);
    return it->second;
  }

  // Originator path: create the initial self-signed container and hold it.
  SignedContainer package_good(const DigitalGood& good, std::uint32_t initial_resales,
                               const CryptoSuite& suite) {
    SignedContainer c = package(good, keys_, initial_resales, suite);
    owned_[c.content_id()] = Owned{c, initial_resales, 0};
    return c;
  }

  // Buyer path: verify and store a container that names this device as buyer.
  void acquire(const SignedContainer& container, const TrustRoots& trust_roots,
               const CryptoSuite& suite) {
    const VerifyReport report = verify(container, trust_roots, suite);
    if (!report.valid())
      fail(Errc::association_error, "acquire: container rejected: " + report.to_string());
    if (container.last().buyer_public_key != keys_.public_key)
      fail(Errc::not_owner, "acquire: container was not sold to this device");
    owned_[container.content_id()] =
        Owned{container, container.last().resales_remaining, 0};
  }

  friend SignedContainer resell(const SignedContainer& container, CompliantDevice& seller,
                                const Bytes& buyer_public_key, const RuleContext& ctx,
                                const CryptoSuite& suite);
  friend Receipt issue_receipt(const CompliantDevice& buyer, const SignedContainer& container,
                               Money amount, const std::string& transaction_id,
                               const CryptoSuite& suite);

private:
  KeyPair keys_;
  std::map<std::string, Owned> owned_;
};

// Appends one chain entry signed by `seller` and returns the new container;
// the input container is not modified. The device decrements its own resale
// budget and bumps the resale count it feeds into rule contexts.
inline SignedContainer resell(const SignedContainer& container, CompliantDevice& seller,
                              const Bytes& buyer_public_key, const RuleContext& ctx,
                              const CryptoSuite& suite) {
  const auto it = seller.owned_.find(container.content_id());
  if (it == seller.owned_.end())
    fail(Errc::not_owner, "resell: device never acquired this good");
  CompliantDevice::Owned& owned = it->second;
  if (container.last().buyer_public_key != seller.public_key() ||
      serialize(container) != serialize(owned.container))
    fail(Errc::not_owner, "resell: container does not match the held copy");

  RuleContext effective = ctx;
  effective.resales_done = owned.resales_done;
  effective.validate();
  const Decision decision =
      evaluate(container.last().redistribution_licence.redistribution_rules, effective);
  if (!decision.allowed)
    fail(Errc::redistribution_denied,
         "resell: denied by " + std::string(rule_kind_name(decision.reason)));

  if (owned.resales_remaining == 0)
    fail(Errc::resale_limit_exhausted, "resell: no resales remaining");

  SignedContainer next = container;
  LicenceEntry e;
  e.seller_public_key = seller.public_key();
  e.buyer_public_key = buyer_public_key;
  e.consumption_licence = container.last().consumption_licence;
  e.redistribution_licence = container.last().redistribution_licence;
  e.resales_remaining = container.last().resales_remaining - 1;

  std::vector<Digest> prior_digests;
  prior_digests.reserve(next.chain.size());
  for (const LicenceEntry& prev : next.chain) {
    const Bytes frame = framing::entry_frame(prev);
    prior_digests.push_back(
        suite.digest(std::span<const std::uint8_t>(frame.data(), frame.size())));
  }
  const Bytes message =
      framing::entry_sign_message(next.association, prior_digests, e);
  e.signature = suite.sign(seller.keys_.private_key,
                           std::span<const std::uint8_t>(message.data(), message.size()));
  next.chain.push_back(std::move(e));

  owned.resales_remaining -= 1;
  owned.resales_done += 1;
  return next;
}

inline Receipt issue_receipt(const CompliantDevice& buyer, const SignedContainer& container,
                             Money amount, const std::string& transaction_id,
                             const CryptoSuite& suite) {
  if (amount < 0) fail(Errc::invalid_price, "receipt amount must be >= 0");
  const auto it = buyer.owned_.find(container.content_id());
  if (it == buyer.owned_.end() ||
      container.last().buyer_public_key != buyer.public_key())
    fail(Errc::not_owner, "issue_receipt: device does not hold this container");

  Receipt r;
  r.buyer_public_key = buyer.public_key();
  r.seller_public_key = container.last().seller_public_key;
  r.content_digest = container.association.digest;
  r.transaction_id = transaction_id;
  r.amount = amount;
  const Bytes message = framing::receipt_sign_message(r);
  r.signature = suite.sign(buyer.keys_.private_key,
                           std::span<const std::uint8_t>(message.data(), message.size()));
  return r;
}

// ---------------------------------------------------------------------------
// Central rewarding service for the decentralised flow: resellers redeem
// buyer-signed receipts; payouts follow the allocation arithmetic with the
// chain's upstream sellers as level-reward ancestors.

class RewardingService {
public:
  RewardingService(RemunerationScheme scheme, TrustRoots trust_roots, CryptoSuite suite)
      : scheme_(std::move(scheme)), trust_roots_(std::move(trust_roots)),
        suite_(std::move(suite)) {
    scheme_.validate();
  }

  void register_content(const Digest& digest, const Bytes& originator_public_key) {
    registered_.insert(digest_hex(digest));
    party_for_key(originator_public_key);  // pin the originator's node id
  }

  // Validates the receipt against the presented chain evidence and pays out.
  // A transaction id redeems at most once.
  std::vector<RonEntry> redeem(const Receipt& receipt, const SignedContainer& evidence) {
    if (redeemed_.count(receipt.transaction_id))
      fail(Errc::already_redeemed, "transaction already redeemed");
    if (!registered_.count(digest_hex(receipt.content_digest)))
      fail(Errc::invalid_receipt, "content not registered");

    const Bytes message = framing::receipt_sign_message(receipt);
    if (!suite_.verify(receipt.buyer_public_key,
                       std::span<const std::uint8_t>(message.data(), message.size()),
                       receipt.signature))
      fail(Errc::invalid_receipt, "receipt signature does not verify");

    if (evidence.association.digest != receipt.content_digest)
      fail(Errc::invalid_receipt, "receipt digest does not match the traded container");
    if (!verify(evidence, trust_roots_, suite_).valid())
      fail(Errc::invalid_receipt, "evidence chain does not verify");
    if (evidence.chain.size() < 2)
      fail(Errc::invalid_receipt, "evidence chain records no sale");
    if (evidence.last().buyer_public_key != receipt.buyer_public_key ||
        evidence.last().seller_public_key != receipt.seller_public_key)
      fail(Errc::invalid_receipt, "receipt parties do not match the chain");

    // Upstream sellers, nearest first, excluding the originator's self-issue.
    std::vector<NodeId> ancestors;
    for (std::size_t i = evidence.chain.size() - 1;
         i >= 2 && ancestors.size() < scheme_.levels(); --i)
      ancestors.push_back(party_for_key(evidence.chain[i].seller_public_key));

    const Bytes& originator_key = evidence.chain.front().seller_public_key;
    const bool from_peer = receipt.seller_public_key != originator_key;
    const Allocation alloc =
        allocate(receipt.amount, scheme_, ancestors.size(), from_peer);

    const std::uint32_t tx = next_transaction_++;
    const std::size_t before = ledger_.size();
    append_allocation_entries(ledger_, Party::of(party_for_key(receipt.buyer_public_key)),
                              ancestors, Party::of(party_for_key(originator_key)), alloc,
                              tx);
    redeemed_.insert(receipt.transaction_id);
    return std::vector<RonEntry>(ledger_.entries().begin() + before,
                                 ledger_.entries().end());
  }

  const RonLedger& ledger() const { return ledger_; }

  NodeId party_for_key(const Bytes& public_key) {
    const std::string hex = to_hex(public_key);
    const auto it = node_ids_.find(hex);
    if (it != node_ids_.end()) return it->second;
    const NodeId id{next_node_id_++};
    node_ids_.emplace(hex, id);
    return id;
  }

private:
  RemunerationScheme scheme_;
  TrustRoots trust_roots_;
  CryptoSuite suite_;
  std::set<std::string> registered_;
  std::set<std::string> redeemed_;
  std::unordered_map<std::string, NodeId> node_ids_;
  std::uint64_t next_node_id_ = 0;
  std::uint32_t next_transaction_ = 1;
  RonLedger ledger_;
};

// ---------------------------------------------------------------------------
// Central accounting service for the TAN flow: purchases are announced to the
// service, which issues transaction numbers and runs the remuneration scheme
// by walking the TAN chain.

class AccountingService {
public:
  struct TanRecord {
    std::string tan;
    std::string content_id;
    NodeId buyer{};
    std::optional<std::string> seller_tan;
    std::uint32_t entry_index = 0;  // per-content purchase counter, 1-based
  };

  void register_content(const std::string& content_id, RemunerationScheme scheme,
                        PriceSchedule schedule, std::uint32_t market_size) {
    scheme.validate();
    if (market_size < 1) fail(Errc::unsupported_config, "market_size must be >= 1");
    catalog_.emplace(content_id, CatalogEntry{std::move(scheme), std::move(schedule),
                                              market_size, 0});
  }

  // Records a purchase, pays everyone per the scheme and returns the buyer's
  // fresh TAN. A present seller_tan marks a peer purchase and seeds the
  // level-reward ancestor walk.
  std::string as_purchase(const std::string& content_id, NodeId buyer,
                          const std::optional<std::string>& seller_tan = std::nullopt) {
    const auto cat = catalog_.find(content_id);
    if (cat == catalog_.end()) fail(Errc::not_in_catalog, "unknown content " + content_id);
    CatalogEntry& entry = cat->second;

    std::vector<NodeId> ancestors;
    if (seller_tan) {
      const TanRecord* rec = find_tan(*seller_tan);
      if (rec == nullptr || rec->content_id != content_id)
        fail(Errc::unknown_tan, "unregistered seller TAN " + *seller_tan);
      const TanRecord* cursor = rec;
      while (cursor != nullptr && ancestors.size() < entry.scheme.levels()) {
        ancestors.push_back(cursor->buyer);
        cursor = cursor->seller_tan ? find_tan(*cursor->seller_tan) : nullptr;
      }
    }

    entry.sales += 1;
    const double saturation = std::min(
        1.0, static_cast<double>(entry.sales) / static_cast<double>(entry.market_size));
    const Money price = entry.schedule.price_at(saturation);
    const Allocation alloc =
        allocate(price, entry.scheme, ancestors.size(), seller_tan.has_value());
    append_allocation_entries(ledger_, Party::of(buyer), ancestors, Party::of(NodeId{0}),
                              alloc, entry.sales);

    TanRecord record;
    record.tan = make_tan();
    record.content_id = content_id;
    record.buyer = buyer;
    record.seller_tan = seller_tan;
    record.entry_index = entry.sales;
    tan_index_.emplace(record.tan, records_.size());
    records_.push_back(std::move(record));
    return records_.back().tan;
  }

  const RonLedger& ledger() const { return ledger_; }
  const std::vector<TanRecord>& tan_records() const { return records_; }

  void write_tan_csv(std::ostream& os) const {
    os << "tan,content_id,buyer,seller_tan,entry_index\n";
    for (const TanRecord& r : records_) {
      os << r.tan << ",\"" << csv_escape(r.content_id) << "\"," << r.buyer.value << ','
         << (r.seller_tan ? *r.seller_tan : "") << ',' << r.entry_index << '\n';
    }
  }

private:
  struct CatalogEntry {
    RemunerationScheme scheme;
    PriceSchedule schedule;
    std::uint32_t market_size = 1;
    std::uint32_t sales = 0;
  };

  static std::string csv_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      out.push_back(c);
      if (c == '"') out.push_back('"');
    }
    return out;
  }

  const TanRecord* find_tan(const std::string& tan) const {
    const auto it = tan_index_.find(tan);
    return it == tan_index_.end() ? nullptr : &records_[it->second];
  }

  std::string make_tan() {
    std::string digits = std::to_string(next_tan_++);
    if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
    return "TAN-" + digits;
  }

  std::map<std::string, CatalogEntry> catalog_;
  std::vector<TanRecord> records_;
  std::unordered_map<std::string, std::size_t> tan_index_;
  std::uint64_t next_tan_ = 1;
  RonLedger ledger_;
};

inline void write_receipts_csv(std::span<const Receipt> receipts, std::ostream& os) {
  os << "buyer_public_key,seller_public_key,content_digest,transaction_id,amount_cents,"
        "signature\n";
  for (const Receipt& r : receipts) {
    os << to_hex(r.buyer_public_key) << ',' << to_hex(r.seller_public_key) << ','
       << to_hex(r.content_digest.data(), r.content_digest.size()) << ','
       << r.transaction_id << ',' << r.amount << ',' << to_hex(r.signature) << '\n';
  }
}

}  // namespace superdist
