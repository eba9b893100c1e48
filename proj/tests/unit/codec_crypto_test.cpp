#include <gtest/gtest.h>

#include <random>

#include "bzreg/codec.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/error.hpp"
#include "fixtures.hpp"

namespace bzreg {
namespace {

using testing::entry;
using testing::ws;

TEST(Codec, RoundTrips) {
  const TaggedValue v{7, std::string("p\0q", 3)};
  EXPECT_EQ(codec::decode_tagged(codec::encode(v)), v);
  const auto e = entry(3, 9, 2, "b");
  EXPECT_EQ(codec::decode_entry(codec::encode(e)), e);

  KeyRing ring(4, SignatureKind::kKeyedDigest, 1);
  const auto w = make_witness_set(ws({{1, 1}, {2, 1}, {3, 1}}), Signer(ring, ProcessId::reader(2)));
  EXPECT_EQ(codec::decode_witness_set(codec::encode(w)), w);
  InformSet is{{w, w}};
  EXPECT_EQ(codec::decode_inform_set(codec::encode(is)), is);
}

TEST(Codec, RejectsTruncationAndTrailingBytes) {
  const auto bytes = codec::encode(entry(1, 1));
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    EXPECT_FALSE(codec::decode_entry(bytes.substr(0, cut))) << cut;
  }
  EXPECT_FALSE(codec::decode_entry(bytes + "x"));
}

TEST(Codec, RejectsUnsortedWitnessSet) {
  WitnessSet w;
  w.signer = 1;
  w.entries = {entry(2, 1), entry(1, 1)};
  EXPECT_FALSE(codec::decode_witness_set(codec::encode(w)));
}

TEST(Codec, ArbitraryBytesNeverCrash) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5000; ++i) {
    Bytes b(rng() % 64, '\0');
    for (auto& c : b) c = static_cast<char>(rng());
    (void)codec::decode_tagged(b);
    (void)codec::decode_entry(b);
    (void)codec::decode_witness_set(b);
    (void)codec::decode_inform_set(b);
  }
}

TEST(Codec, SigningPayloadIgnoresInputOrder) {
  auto a = ws({{1, 1}, {2, 1}, {3, 1}});
  auto b = a;
  std::swap(b[0], b[2]);
  KeyRing ring(4, SignatureKind::kKeyedDigest, 1);
  const Signer signer(ring, ProcessId::reader(1));
  EXPECT_EQ(make_witness_set(a, signer), make_witness_set(b, signer));
}

class CryptoTest : public ::testing::TestWithParam<SignatureKind> {};

TEST_P(CryptoTest, SignVerifyContract) {
  KeyRing ring(4, GetParam(), 42);
  const auto p1 = ProcessId::reader(1);
  const auto p2 = ProcessId::reader(2);
  const Bytes m = "message";
  const auto sig = ring.sign(p1, m);
  EXPECT_TRUE(ring.verify(p1, m, sig));
  EXPECT_FALSE(ring.verify(p2, m, sig));
  Bytes flipped = m;
  flipped[0] ^= 1;
  EXPECT_FALSE(ring.verify(p1, flipped, sig));
  EXPECT_FALSE(ring.verify(p1, m, sig.substr(1)));
  EXPECT_FALSE(ring.verify(ProcessId::reader(9), m, sig));
  EXPECT_EQ(ring.sign(p1, m), sig);
}

TEST_P(CryptoTest, RingsFromOneSeedAgree) {
  KeyRing a(3, GetParam(), 5), b(3, GetParam(), 5), c(3, GetParam(), 6);
  const auto p = ProcessId::writer();
  EXPECT_EQ(a.sign(p, "x"), b.sign(p, "x"));
  EXPECT_FALSE(c.verify(p, "x", a.sign(p, "x")));
}

TEST_P(CryptoTest, UnknownSignerThrows) {
  KeyRing ring(2, GetParam());
  try {
    ring.sign(ProcessId::reader(3), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownProcess);
  }
}

TEST_P(CryptoTest, WitnessAndInformSetVerification) {
  const auto cfg = Config::make(4, 1);
  KeyRing ring(4, GetParam(), 3);
  const auto e = ws({{1, 1}, {2, 1}, {3, 1}});
  std::vector<WitnessSet> members;
  for (int i = 1; i <= 3; ++i) {
    members.push_back(make_witness_set(e, Signer(ring, ProcessId::reader(i))));
  }
  for (const auto& m : members) EXPECT_TRUE(verify_witness_set(m, ring, cfg, m.signer));
  EXPECT_FALSE(verify_witness_set(members[0], ring, cfg, 2));

  InformSet is{members};
  EXPECT_TRUE(verify_inform_set(is, ring, cfg));

  InformSet forged = is;
  forged.members[1].signature[0] ^= 1;
  EXPECT_FALSE(verify_inform_set(forged, ring, cfg));

  InformSet dup{{members[0], members[0], members[1]}};
  EXPECT_FALSE(verify_inform_set(dup, ring, cfg));
}

INSTANTIATE_TEST_SUITE_P(Schemes, CryptoTest,
                         ::testing::Values(SignatureKind::kKeyedDigest, SignatureKind::kEd25519),
                         [](const auto& info) {
                           return info.param == SignatureKind::kEd25519 ? "Ed25519" : "KeyedDigest";
                         });

}  // namespace
}  // namespace bzreg
