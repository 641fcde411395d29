#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "superdist/common.hpp"
#include "superdist/market.hpp"
#include "superdist/sha256.hpp"

namespace superdist {

enum class RuleKind : std::uint8_t {
  allow_all,
  deny_all,
  max_resales,
  not_before,
  min_distance_moved,
  max_saturation,
  all_of,
  any_of,
};

inline std::string_view rule_kind_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::allow_all: return "allow_all";
    case RuleKind::deny_all: return "deny_all";
    case RuleKind::max_resales: return "max_resales";
    case RuleKind::not_before: return "not_before";
    case RuleKind::min_distance_moved: return "min_distance_moved";
    case RuleKind::max_saturation: return "max_saturation";
    case RuleKind::all_of: return "all";
    case RuleKind::any_of: return "any";
  }
  return "?";
}

// Closed rule AST: the leaf conditions plus boolean combinators. Real-valued
// parameters are quantised at construction (millimetres, micro-saturation) so
// the canonical text form round-trips exactly.
struct Rule {
  RuleKind kind = RuleKind::allow_all;
  std::uint64_t limit = 0;     // max_resales
  std::int64_t ticks = 0;      // not_before
  double metres = 0.0;         // min_distance_moved
  double saturation = 0.0;     // max_saturation
  std::vector<Rule> children;  // all / any

  static Rule allow_all() { return Rule{}; }

  static Rule deny_all() {
    Rule r;
    r.kind = RuleKind::deny_all;
    return r;
  }

  static Rule max_resales(std::uint64_t limit) {
    Rule r;
    r.kind = RuleKind::max_resales;
    r.limit = limit;
    return r;
  }

  static Rule not_before(std::int64_t ticks) {
    Rule r;
    r.kind = RuleKind::not_before;
    r.ticks = ticks;
    return r;
  }

  static Rule min_distance_moved(double metres) {
    if (!(metres >= 0.0)) fail(Errc::invalid_rule, "min_distance_moved needs metres >= 0");
    Rule r;
    r.kind = RuleKind::min_distance_moved;
    r.metres = std::floor(metres * 1000.0 + 0.5) / 1000.0;
    return r;
  }

  static Rule max_saturation(double s) {
    if (!(s >= 0.0 && s <= 1.0)) fail(Errc::invalid_rule, "max_saturation needs s in [0,1]");
    Rule r;
    r.kind = RuleKind::max_saturation;
    r.saturation = std::floor(s * 1e6 + 0.5) / 1e6;
    return r;
  }

  static Rule all_of(std::vector<Rule> children) {
    if (children.empty()) fail(Errc::invalid_rule, "all() needs at least one rule");
    Rule r;
    r.kind = RuleKind::all_of;
    r.children = std::move(children);
    return r;
  }

  static Rule any_of(std::vector<Rule> children) {
    if (children.empty()) fail(Errc::invalid_rule, "any() needs at least one rule");
    Rule r;
    r.kind = RuleKind::any_of;
    r.children = std::move(children);
    return r;
  }

  bool operator==(const Rule&) const = default;
};

// Evaluation inputs for one prospective transaction.
struct RuleContext {
  std::int64_t now = 0;  // abstract ticks
  double distance_moved_since_acquisition = 0.0;
  std::uint64_t resales_done = 0;
  double market_saturation = 0.0;

  void validate() const {
    if (now < 0) fail(Errc::invalid_context, "now must be >= 0");
    if (!(distance_moved_since_acquisition >= 0.0))
      fail(Errc::invalid_context, "distance must be >= 0");
    if (!(market_saturation >= 0.0 && market_saturation <= 1.0))
      fail(Errc::invalid_context, "saturation must be in [0,1]");
  }
};

struct Decision {
  bool allowed = true;
  RuleKind reason = RuleKind::allow_all;  // first failing leaf when denied

  static Decision allow() { return Decision{}; }
  static Decision deny(RuleKind leaf) { return Decision{false, leaf}; }

  bool operator==(const Decision&) const = default;
};

// Pure and total over valid contexts. all() is conjunction, any() disjunction;
// a denial reports the first failing leaf.
inline Decision evaluate(const Rule& rule, const RuleContext& ctx) {
  switch (rule.kind) {
    case RuleKind::allow_all:
      return Decision::allow();
    case RuleKind::deny_all:
      return Decision::deny(RuleKind::deny_all);
    case RuleKind::max_resales:
      return ctx.resales_done < rule.limit ? Decision::allow()
                                           : Decision::deny(RuleKind::max_resales);
    case RuleKind::not_before:
      return ctx.now >= rule.ticks ? Decision::allow()
                                   : Decision::deny(RuleKind::not_before);
    case RuleKind::min_distance_moved:
      return ctx.distance_moved_since_acquisition >= rule.metres
                 ? Decision::allow()
                 : Decision::deny(RuleKind::min_distance_moved);
    case RuleKind::max_saturation:
      return ctx.market_saturation <= rule.saturation
                 ? Decision::allow()
                 : Decision::deny(RuleKind::max_saturation);
    case RuleKind::all_of:
      for (const Rule& child : rule.children) {
        const Decision d = evaluate(child, ctx);
        if (!d.allowed) return d;
      }
      return Decision::allow();
    case RuleKind::any_of: {
      Decision first_denial = Decision::deny(RuleKind::deny_all);
      bool have_denial = false;
      for (const Rule& child : rule.children) {
        const Decision d = evaluate(child, ctx);
        if (d.allowed) return Decision::allow();
        if (!have_denial) {
          first_denial = d;
          have_denial = true;
        }
      }
      return first_denial;
    }
  }
  fail(Errc::invalid_rule, "corrupt rule");
}

struct ContentAssociation {
  std::string content_id;
  Digest digest{};

  bool operator==(const ContentAssociation&) const = default;
};

struct ConsumptionLicence {
  Rule consumption_rules;
  RemunerationScheme remuneration;
  ContentAssociation association;
};

struct RedistributionLicence {
  Rule redistribution_rules;
  ContentAssociation association;
};

// The tradable compound: content plus the two licences bound to it.
struct DigitalGood {
  Bytes content;
  ConsumptionLicence consumption_licence;
  RedistributionLicence redistribution_licence;
};

inline DigitalGood make_good(Bytes content, Rule consumption_rules,
                             RemunerationScheme scheme, Rule redistribution_rules,
                             std::string content_id = {}) {
  if (content.empty()) fail(Errc::empty_content, "make_good: empty content");
  scheme.validate();
  ContentAssociation association;
  association.digest = Sha256::hash(content);
  association.content_id =
      content_id.empty() ? "sha256:" + digest_hex(association.digest) : std::move(content_id);

  DigitalGood good;
  good.consumption_licence =
      ConsumptionLicence{std::move(consumption_rules), std::move(scheme), association};
  good.redistribution_licence =
      RedistributionLicence{std::move(redistribution_rules), association};
  good.content = std::move(content);
  return good;
}

inline bool verify_association(const DigitalGood& good) {
  if (good.consumption_licence.association != good.redistribution_licence.association)
    return false;
  return Sha256::hash(good.content) == good.consumption_licence.association.digest;
}

// ---------------------------------------------------------------------------
// Canonical text form. Byte-stable: sorted keys, fixed-point reals, no
// insignificant whitespace. Digests and signatures over licences are taken
// over exactly these bytes.

namespace canonical {

inline void write_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

inline void write_rule(std::string& out, const Rule& rule) {
  out += rule_kind_name(rule.kind);
  switch (rule.kind) {
    case RuleKind::allow_all:
    case RuleKind::deny_all:
      return;
    case RuleKind::max_resales:
      out += '(' + std::to_string(rule.limit) + ')';
      return;
    case RuleKind::not_before:
      out += '(' + std::to_string(rule.ticks) + ')';
      return;
    case RuleKind::min_distance_moved:
      out += '(' + format_fixed(rule.metres, 3) + ')';
      return;
    case RuleKind::max_saturation:
      out += '(' + format_fixed(rule.saturation, 6) + ')';
      return;
    case RuleKind::all_of:
    case RuleKind::any_of:
      out += '(';
      for (std::size_t i = 0; i < rule.children.size(); ++i) {
        if (i > 0) out += ',';
        write_rule(out, rule.children[i]);
      }
      out += ')';
      return;
  }
}

inline void write_association(std::string& out, const ContentAssociation& a) {
  out += "association{content_id=";
  write_string(out, a.content_id);
  out += ",digest=";
  out += to_hex(a.digest.data(), a.digest.size());
  out += '}';
}

inline void write_scheme(std::string& out, const RemunerationScheme& s) {
  out += "scheme{collector_share=" + format_fixed(s.collector_share, 6) + ",level_shares=[";
  for (std::size_t i = 0; i < s.level_shares.size(); ++i) {
    if (i > 0) out += ',';
    out += format_fixed(s.level_shares[i], 6);
  }
  out += "],peer_rebate=" + format_fixed(s.peer_rebate, 6) +
         ",platform_share=" + format_fixed(s.platform_share, 6) + '}';
}

}  // namespace canonical

inline std::string canonical_text(const Rule& rule) {
  std::string out;
  canonical::write_rule(out, rule);
  return out;
}

inline std::string canonical_text(const ContentAssociation& a) {
  std::string out;
  canonical::write_association(out, a);
  return out;
}

inline std::string canonical_text(const RemunerationScheme& s) {
  std::string out;
  canonical::write_scheme(out, s);
  return out;
}

inline std::string canonical_text(const ConsumptionLicence& lic) {
  std::string out = "consumption_licence{association=";
  canonical::write_association(out, lic.association);
  out += ",remuneration=";
  canonical::write_scheme(out, lic.remuneration);
  out += ",rules=";
  canonical::write_rule(out, lic.consumption_rules);
  out += '}';
  return out;
}

inline std::string canonical_text(const RedistributionLicence& lic) {
  std::string out = "redistribution_licence{association=";
  canonical::write_association(out, lic.association);
  out += ",rules=";
  canonical::write_rule(out, lic.redistribution_rules);
  out += '}';
  return out;
}

// Licence equality is canonical-byte equality.
inline bool operator==(const ConsumptionLicence& a, const ConsumptionLicence& b) {
  return canonical_text(a) == canonical_text(b);
}

inline bool operator==(const RedistributionLicence& a, const RedistributionLicence& b) {
  return canonical_text(a) == canonical_text(b);
}

inline bool operator==(const DigitalGood& a, const DigitalGood& b) {
  return a.content == b.content && a.consumption_licence == b.consumption_licence &&
         a.redistribution_licence == b.redistribution_licence;
}

// ---------------------------------------------------------------------------
// Parser for the canonical form. Callers that need strict canonicality
// re-serialise the parse result and compare bytes.

namespace canonical {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  bool done() const { return pos_ == text_.size(); }

  void expect(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token)
      fail(Errc::parse_error, "expected '" + std::string(token) + "' at offset " +
                                  std::to_string(pos_));
    pos_ += token.size();
  }

  bool try_consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  std::string parse_string() {
    expect("\"");
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail(Errc::parse_error, "dangling escape");
        out.push_back(text_[pos_++]);
      } else if (c == '"') {
        return out;
      } else {
        out.push_back(c);
      }
    }
    fail(Errc::parse_error, "unterminated string");
  }

  std::uint64_t parse_uint() {
    std::uint64_t value = 0;
    const auto res = std::from_chars(cur(), end(), value);
    if (res.ec != std::errc{}) fail(Errc::parse_error, "expected unsigned integer");
    pos_ += static_cast<std::size_t>(res.ptr - cur());
    return value;
  }

  std::int64_t parse_int() {
    std::int64_t value = 0;
    const auto res = std::from_chars(cur(), end(), value);
    if (res.ec != std::errc{}) fail(Errc::parse_error, "expected integer");
    pos_ += static_cast<std::size_t>(res.ptr - cur());
    return value;
  }

  double parse_double() {
    double value = 0.0;
    const auto res = std::from_chars(cur(), end(), value);
    if (res.ec != std::errc{}) fail(Errc::parse_error, "expected number");
    pos_ += static_cast<std::size_t>(res.ptr - cur());
    return value;
  }

  Digest parse_digest() {
    if (pos_ + 64 > text_.size()) fail(Errc::parse_error, "truncated digest");
    const auto bytes = parse_hex(text_.substr(pos_, 64));
    if (!bytes || bytes->size() != 32) fail(Errc::parse_error, "bad digest hex");
    pos_ += 64;
    Digest d{};
    std::copy(bytes->begin(), bytes->end(), d.begin());
    return d;
  }

  Rule parse_rule() {
    if (try_consume("allow_all")) return Rule::allow_all();
    if (try_consume("deny_all")) return Rule::deny_all();
    if (try_consume("max_resales(")) {
      const std::uint64_t limit = parse_uint();
      expect(")");
      return Rule::max_resales(limit);
    }
    if (try_consume("not_before(")) {
      const std::int64_t ticks = parse_int();
      expect(")");
      return Rule::not_before(ticks);
    }
    if (try_consume("min_distance_moved(")) {
      const double metres = parse_double();
      expect(")");
      return Rule::min_distance_moved(metres);
    }
    if (try_consume("max_saturation(")) {
      const double s = parse_double();
      expect(")");
      return Rule::max_saturation(s);
    }
    const bool is_all = try_consume("all(");
    if (is_all || try_consume("any(")) {
      std::vector<Rule> children;
      children.push_back(parse_rule());
      while (try_consume(",")) children.push_back(parse_rule());
      expect(")");
      return is_all ? Rule::all_of(std::move(children)) : Rule::any_of(std::move(children));
    }
    fail(Errc::parse_error, "expected rule at offset " + std::to_string(pos_));
  }

  ContentAssociation parse_association() {
    expect("association{content_id=");
    ContentAssociation a;
    a.content_id = parse_string();
    expect(",digest=");
    a.digest = parse_digest();
    expect("}");
    return a;
  }

  RemunerationScheme parse_scheme() {
    expect("scheme{collector_share=");
    RemunerationScheme s;
    s.collector_share = parse_double();
    expect(",level_shares=[");
    if (!try_consume("]")) {
      s.level_shares.push_back(parse_double());
      while (try_consume(",")) s.level_shares.push_back(parse_double());
      expect("]");
    }
    expect(",peer_rebate=");
    s.peer_rebate = parse_double();
    expect(",platform_share=");
    s.platform_share = parse_double();
    expect("}");
    s.validate();
    return s;
  }

  ConsumptionLicence parse_consumption_licence() {
    expect("consumption_licence{association=");
    ConsumptionLicence lic;
    lic.association = parse_association();
    expect(",remuneration=");
    lic.remuneration = parse_scheme();
    expect(",rules=");
    lic.consumption_rules = parse_rule();
    expect("}");
    return lic;
  }

  RedistributionLicence parse_redistribution_licence() {
    expect("redistribution_licence{association=");
    RedistributionLicence lic;
    lic.association = parse_association();
    expect(",rules=");
    lic.redistribution_rules = parse_rule();
    expect("}");
    return lic;
  }

private:
  const char* cur() const { return text_.data() + pos_; }
  const char* end() const { return text_.data() + text_.size(); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace canonical

inline ConsumptionLicence parse_consumption_licence(std::string_view text) {
  canonical::Parser p(text);
  ConsumptionLicence lic = p.parse_consumption_licence();
  if (!p.done()) fail(Errc::parse_error, "trailing bytes after licence");
  return lic;
}

inline RedistributionLicence parse_redistribution_licence(std::string_view text) {
  canonical::Parser p(text);
  RedistributionLicence lic = p.parse_redistribution_licence();
  if (!p.done()) fail(Errc::parse_error, "trailing bytes after licence");
  return lic;
}

inline ContentAssociation parse_association(std::string_view text) {
  canonical::Parser p(text);
  ContentAssociation a = p.parse_association();
  if (!p.done()) fail(Errc::parse_error, "trailing bytes after association");
  return a;
}

}  // namespace superdist
