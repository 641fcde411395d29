#include <string>

#include "doctest.h"
#include "superdist/rng.hpp"
#include "superdist/sha256.hpp"
#include "test_support.hpp"

using namespace superdist;

TEST_CASE("sha256 matches the FIPS test vectors") {
  CHECK_EQ(digest_hex(Sha256::hash(std::string_view{})),
           "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK_EQ(digest_hex(Sha256::hash(std::string_view{"abc"})),
           "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_EQ(digest_hex(Sha256::hash(std::string_view{
               "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"})),
           "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 incremental update equals one-shot") {
  const std::string text =
      "the quick brown fox jumps over the lazy dog, repeatedly and at odd offsets";
  const Digest whole = Sha256::hash(text);
  for (std::size_t split : {std::size_t{1}, std::size_t{7}, std::size_t{63},
                            std::size_t{64}, std::size_t{65}}) {
    Sha256 h;
    h.update(text.data(), std::min(split, text.size()));
    if (split < text.size()) h.update(text.data() + split, text.size() - split);
    CHECK_EQ(digest_hex(h.finish()), digest_hex(whole));
  }
}

TEST_CASE("hex round trip") {
  const Bytes data = {0x00, 0x01, 0xab, 0xff, 0x10};
  const std::string hex = to_hex(data);
  CHECK_EQ(hex, "0001abff10");
  const auto back = parse_hex(hex);
  REQUIRE(back.has_value());
  CHECK_EQ(*back, data);
  CHECK_FALSE(parse_hex("abc").has_value());
  CHECK_FALSE(parse_hex("zz").has_value());
}

TEST_CASE("rng streams are deterministic per seed and distinct per stream") {
  Rng a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff_seed = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next();
    if (x != b.next()) all_equal = false;
    if (x != c.next()) any_diff_seed = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_seed);
  CHECK_NE(mix_seed(7, 0), mix_seed(7, 1));
  CHECK_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST_CASE("uniform_below stays in range and hits every bucket") {
  Rng rng(1234);
  std::array<int, 7> hits{};
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t v = rng.uniform_below(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK_GT(h, 800);  // ~1000 expected per bucket
}

TEST_CASE("uniform01 stays in [0,1)") {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform01();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("format_fixed is stable") {
  CHECK_EQ(format_fixed(0.1, 6), "0.100000");
  CHECK_EQ(format_fixed(1.0 / 3.0, 6), "0.333333");
  CHECK_EQ(format_fixed(-0.0, 6), "0.000000");
  CHECK_EQ(format_fixed(75.0, 6), "75.000000");
  CHECK_EQ(format_fixed(100.0, 3), "100.000");
}
