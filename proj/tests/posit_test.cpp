#include "clarinet/posit.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "oracle.hpp"
#include "test_util.hpp"

using namespace clarinet;

namespace {

uint32_t f32_bits(float f) {
  uint32_t b;
  std::memcpy(&b, &f, 4);
  return b;
}

float f32_of(uint32_t b) {
  float f;
  std::memcpy(&f, &b, 4);
  return f;
}

void specials_and_examples() {
  const PositConfig c8{8, 0};

  CHECK(extract({0x00, c8}).kind == PositKind::Zero);
  CHECK(extract({0x80, c8}).kind == PositKind::NaR);

  const UnpackedPosit one = extract({0x40, c8});
  CHECK(one.kind == PositKind::Regular);
  CHECK(!one.negative && one.scale == 0 && one.frac == 0);

  const UnpackedPosit maxp = extract({0x7F, c8});
  CHECK(maxp.scale == 6);
  CHECK(value_as_double({0x7F, c8}) == 64.0);

  const UnpackedPosit minus_one = extract({0xC0, c8});
  CHECK(minus_one.negative && minus_one.scale == 0 && minus_one.frac == 0);

  CHECK_EQ(normalize(UnpackedPosit::regular(false, 0, 0, 0), c8).pattern, 0x40u);
  // 9.0 = 1.001 * 2^3 sits exactly between 8 and 10 at this width; even wins
  CHECK_EQ(posit_from_double(9.0, c8).pattern, 0x78u);
  CHECK_EQ(posit_from_double((double)(1 << 20), c8).pattern, 0x7Fu);  // maxpos saturation
  CHECK_EQ(posit_from_double(1e-9, c8).pattern, 0x01u);               // minpos saturation
  CHECK_EQ(posit_from_double(-1e-9, c8).pattern, 0xFFu);

  CHECK_EQ(rational_string(value_as_rational(extract({0x40, c8}))), std::string("1"));
  CHECK_EQ(rational_string(value_as_rational(extract({0x01, c8}))), std::string("1/64"));
  CHECK_EQ(rational_string(value_as_rational(extract({0x62, c8}))), std::string("9/4"));

  for (uint64_t special : {0x00ull, 0x80ull}) {  // callers handle Zero/NaR themselves
    try {
      value_as_rational(extract({special, c8}));
      CHECK(false);
    } catch (const std::domain_error&) {
      CHECK(true);
    }
  }
}

void binary32_examples() {
  const PositConfig c8{8, 0};
  const PositConfig c16{16, 1};

  CHECK_EQ(posit_from_binary32(f32_bits(1.5f), c8).pattern, 0x50u);
  CHECK_EQ(posit_from_binary32(f32_bits(1.5f), c16).pattern, 0x4800u);
  CHECK_EQ(posit_from_binary32(f32_bits(INFINITY), c8).pattern, 0x80u);
  CHECK_EQ(posit_from_binary32(f32_bits(-INFINITY), c16).pattern, 0x8000u);
  CHECK_EQ(posit_from_binary32(f32_bits(NAN), c8).pattern, 0x80u);
  CHECK_EQ(posit_from_binary32(0x80000000u, c8).pattern, 0x00u);  // -0 is Zero
  CHECK_EQ(posit_from_binary32(0x00000001u, c8).pattern, 0x01u);  // tiny subnormal saturates

  CHECK_EQ(binary32_from_posit({0x7F, c8}), f32_bits(64.0f));
  CHECK_EQ(binary32_from_posit({0x00, c8}), 0u);
  CHECK_EQ(binary32_from_posit({0x80, c8}), 0x7FC00000u);
  CHECK(std::isnan(f32_of(binary32_from_posit({0x8000, c16}))));
}

void roundtrip_exhaustive(const PositConfig& cfg) {
  for (uint64_t p = 0; p < (1ull << cfg.n); ++p) {
    const PositBits back = normalize(extract({p, cfg}), cfg);
    if (back.pattern != p) {
      CHECK_MSG(false, "normalize(extract(0x%llx)) = 0x%llx (n=%d es=%d)",
                (unsigned long long)p, (unsigned long long)back.pattern, cfg.n, cfg.es);
      return;
    }
  }
  CHECK(true);
}

void roundtrip_sampled(const PositConfig& cfg, int samples) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < samples; ++i) {
    const uint64_t p = rng() & cfg.pattern_mask();
    const PositBits back = normalize(extract({p, cfg}), cfg);
    CHECK_MSG(back.pattern == p, "pattern 0x%llx n=%d", (unsigned long long)p, cfg.n);
    if (back.pattern != p) return;
  }
}

void oracle_equivalence(const PositConfig& cfg, int samples) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < samples; ++i) {
    const uint64_t p = rng() & cfg.pattern_mask();
    if (oracle::classify(p, cfg) != oracle::Class::Regular) continue;
    const mpq_class want = oracle::posit_value(p, cfg);
    const mpq_class got = oracle::rational(value_as_rational(extract({p, cfg})));
    if (!(want == got)) {
      CHECK_MSG(false, "value mismatch for 0x%llx (n=%d es=%d)", (unsigned long long)p, cfg.n,
                cfg.es);
      return;
    }
  }
  CHECK(true);
}

void monotone_order(const PositConfig& cfg) {
  // two's-complement integer order = real order, NaR excluded
  int64_t sign_bit = 1ll << (cfg.n - 1);
  mpq_class prev;
  bool have_prev = false;
  for (int64_t s = -(sign_bit - 1); s < sign_bit; ++s) {
    const uint64_t pattern = (uint64_t)s & cfg.pattern_mask();
    mpq_class v = oracle::classify(pattern, cfg) == oracle::Class::Zero
                      ? mpq_class(0)
                      : oracle::posit_value(pattern, cfg);
    if (have_prev && !(prev < v)) {
      CHECK_MSG(false, "order violated at signed pattern %lld (n=%d)", (long long)s, cfg.n);
      return;
    }
    prev = v;
    have_prev = true;
  }
  CHECK(true);
}

void rne_against_oracle(const PositConfig& cfg, int samples) {
  // random dyadic rationals with wide mantissas, rounded both ways
  std::mt19937_64 rng(13);
  for (int i = 0; i < samples; ++i) {
    const int fw = 1 + (int)(rng() % 40);
    const uint64_t frac = rng() & ((1ull << fw) - 1);
    const int scale = (int)(rng() % (4 * (unsigned)cfg.max_scale())) - 2 * cfg.max_scale();
    const bool neg = rng() & 1;

    const UnpackedPosit u = UnpackedPosit::regular(neg, scale, frac, fw);
    const PositBits got = normalize(u, cfg);
    const uint64_t want = oracle::round_to_posit(oracle::rational(value_as_rational(u)), cfg);
    if (got.pattern != want) {
      CHECK_MSG(false, "RNE mismatch: scale=%d frac=0x%llx/%d neg=%d -> 0x%llx want 0x%llx",
                scale, (unsigned long long)frac, fw, neg, (unsigned long long)got.pattern,
                (unsigned long long)want);
      return;
    }
  }
  CHECK(true);
}

void f32_roundtrip_when_exact(const PositConfig& cfg) {
  // posit -> binary32 -> posit is the identity whenever the posit fits
  // binary32 exactly (always for n <= 16 and for (24,1); (32,2) has posits
  // with 25..27 fraction bits that binary32 cannot hold)
  std::mt19937_64 rng(17);
  const int samples = cfg.n <= 16 ? 0 : 200000;
  auto check_one = [&](uint64_t p) {
    const UnpackedPosit u = extract({p, cfg});
    if (u.kind == PositKind::Regular && (u.frac_width > 23 || u.scale < -126 || u.scale > 127))
      return true;  // not exactly representable; RNE applies instead
    const uint32_t f = binary32_from_posit({p, cfg});
    return posit_from_binary32(f, cfg).pattern == p;
  };
  if (cfg.n <= 16) {
    for (uint64_t p = 0; p < (1ull << cfg.n); ++p)
      if (!check_one(p)) {
        CHECK_MSG(false, "f32 roundtrip failed for 0x%llx n=%d", (unsigned long long)p, cfg.n);
        return;
      }
  } else {
    for (int i = 0; i < samples; ++i) {
      const uint64_t p = rng() & cfg.pattern_mask();
      if (!check_one(p)) {
        CHECK_MSG(false, "f32 roundtrip failed for 0x%llx n=%d", (unsigned long long)p, cfg.n);
        return;
      }
    }
  }
  CHECK(true);
}

void f32_to_posit_rne(const PositConfig& cfg, int samples) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < samples; ++i) {
    const uint32_t w = (uint32_t)rng();
    const float f = f32_of(w);
    if (!std::isfinite(f)) continue;
    const PositBits got = posit_from_binary32(w, cfg);
    if (f == 0.0f) {
      CHECK_EQ(got.pattern, 0u);
      continue;
    }
    // exact rational of the float via its dyadic decomposition
    int e;
    const double m = std::frexp((double)f, &e);
    const int64_t mant = (int64_t)std::ldexp(m, 53);
    const uint64_t want = oracle::round_to_posit(oracle::rational({mant, e - 53}), cfg);
    if (got.pattern != want) {
      CHECK_MSG(false, "f32->posit mismatch for 0x%08x (n=%d es=%d)", w, cfg.n, cfg.es);
      return;
    }
  }
  CHECK(true);
}

void rne_wide_fraction(const PositConfig& cfg, int samples) {
  // significands wider than 64 bits round the same way as the oracle
  std::mt19937_64 rng(47);
  for (int i = 0; i < samples; ++i) {
    const int fw = 65 + (int)(rng() % 60);
    const uint128 frac = ((uint128)rng() << 64 | rng()) & (((uint128)1 << fw) - 1);
    const int scale = (int)(rng() % (2 * (unsigned)cfg.max_scale())) - cfg.max_scale();
    const bool neg = rng() & 1;

    const PositBits got = normalize(UnpackedPosit::regular(neg, scale, frac, fw), cfg);

    mpz_class num = 0;  // 2^fw + frac, assembled from the two halves
    mpz_class hi((unsigned long)(uint64_t)(frac >> 64));
    num = (hi << 64) + mpz_class((unsigned long)(uint64_t)frac);
    num += mpz_class(1) << fw;
    mpq_class v(num);
    v /= mpq_class(mpz_class(1) << fw);
    if (scale >= 0) v *= mpq_class(mpz_class(1) << scale);
    else v /= mpq_class(mpz_class(1) << -scale);
    if (neg) v = -v;
    const uint64_t want = oracle::round_to_posit(v, cfg);
    if (got.pattern != want) {
      CHECK_MSG(false, "wide RNE mismatch: fw=%d scale=%d -> 0x%llx want 0x%llx", fw, scale,
                (unsigned long long)got.pattern, (unsigned long long)want);
      return;
    }
  }
  CHECK(true);
}

void f32_posit_f32_identity(const PositConfig& cfg, int samples) {
  // binary32 -> posit -> binary32 is the identity whenever the binary32
  // value is exactly representable in the target config. Exact binary32
  // inputs: every regular posit of a narrow config is one (<= 20 fraction
  // bits), so those are sampled directly; for wide configs random floats
  // are filtered through the exact-value oracle.
  std::mt19937_64 rng(31);
  int exact_cases = 0;
  for (int i = 0; i < samples; ++i) {
    uint32_t w;
    if (cfg.n <= 24) {
      const uint64_t q = rng() & cfg.pattern_mask();
      if (oracle::classify(q, cfg) != oracle::Class::Regular) continue;
      w = binary32_from_posit({q, cfg});
    } else {
      w = (uint32_t)rng();
    }
    const float f = f32_of(w);
    if (!std::isfinite(f) || f == 0.0f) continue;
    const PositBits p = posit_from_binary32(w, cfg);
    const UnpackedPosit u = extract(p);
    if (u.kind != PositKind::Regular) continue;
    int e;
    const double m = std::frexp((double)f, &e);
    const int64_t mant = (int64_t)std::ldexp(m, 53);
    const bool representable =
        oracle::posit_value(p.pattern, cfg) == oracle::rational({mant, e - 53});
    if (!representable) continue;
    ++exact_cases;
    if (binary32_from_posit(p) != w) {
      CHECK_MSG(false, "f32 0x%08x not recovered through n=%d", w, cfg.n);
      return;
    }
  }
  CHECK(exact_cases > samples / 10);
}

void rounding_never_makes_specials() {
  const PositConfig c8{8, 0};
  // values straddling the maxpos boundary and the minpos boundary
  CHECK(normalize(UnpackedPosit::regular(false, 100, 0, 0), c8).pattern == 0x7F);
  CHECK(normalize(UnpackedPosit::regular(true, 100, 0, 0), c8).pattern == 0x81);
  CHECK(normalize(UnpackedPosit::regular(false, -100, 0, 0), c8).pattern == 0x01);
  CHECK(normalize(UnpackedPosit::regular(true, -100, 1, 1), c8).pattern == 0xFF);
  // just above maxpos rounds down to maxpos, never to NaR
  CHECK(normalize(UnpackedPosit::regular(false, 6, 0x7F, 7), c8).pattern == 0x7F);
}

void default_es_table() {
  CHECK_EQ(PositConfig::with_default_es(8).es, 0);
  CHECK_EQ(PositConfig::with_default_es(16).es, 1);
  CHECK_EQ(PositConfig::with_default_es(24).es, 1);
  CHECK_EQ(PositConfig::with_default_es(32).es, 2);
  CHECK_EQ(PositConfig({16, 1}).max_scale(), 28);
  CHECK_EQ(PositConfig({32, 2}).quire_width(), 512);
  CHECK_EQ(PositConfig({24, 1}).quire_width(), 288);
}

}  // namespace

int main() {
  specials_and_examples();
  binary32_examples();
  default_es_table();
  rounding_never_makes_specials();

  roundtrip_exhaustive({8, 0});
  roundtrip_exhaustive({16, 1});
  roundtrip_sampled({24, 1}, 200000);
  roundtrip_sampled({32, 2}, 200000);
  roundtrip_sampled({24, 2}, 50000);  // encode/decode work even where the quire cannot
  roundtrip_sampled({13, 2}, 50000);
  roundtrip_sampled({64, 4}, 20000);

  oracle_equivalence({8, 0}, 256);
  oracle_equivalence({16, 1}, 20000);
  oracle_equivalence({32, 2}, 20000);

  monotone_order({8, 0});
  monotone_order({16, 1});

  rne_against_oracle({8, 0}, 4000);
  rne_against_oracle({16, 1}, 4000);
  rne_against_oracle({32, 2}, 2000);

  f32_roundtrip_when_exact({8, 0});
  f32_roundtrip_when_exact({16, 1});
  f32_roundtrip_when_exact({24, 1});
  f32_roundtrip_when_exact({32, 2});

  f32_to_posit_rne({8, 0}, 20000);
  f32_to_posit_rne({16, 1}, 20000);
  f32_to_posit_rne({32, 2}, 5000);

  f32_posit_f32_identity({16, 1}, 20000);
  f32_posit_f32_identity({32, 2}, 5000);

  rne_wide_fraction({8, 0}, 1500);
  rne_wide_fraction({16, 1}, 1500);
  rne_wide_fraction({32, 2}, 800);

  return TEST_MAIN_RESULT();
}
