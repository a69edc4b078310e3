#include "clarinet/posit.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace clarinet {

PositConfig PositConfig::with_default_es(int n) {
  int es;
  switch (n) {
    case 8: es = 0; break;
    case 16: es = 1; break;
    case 24: es = 1; break;
    case 32: es = 2; break;
    default: es = n <= 8 ? 0 : (n <= 24 ? 1 : 2); break;
  }
  return PositConfig{n, es};
}

UnpackedPosit extract(const PositBits& p) {
  const PositConfig& cfg = p.config;
  const uint64_t pat = p.pattern & cfg.pattern_mask();
  if (pat == 0) return UnpackedPosit::zero();
  if (pat == cfg.nar_pattern()) return UnpackedPosit::nar();

  const int m = cfg.n - 1;  // magnitude bits after the sign
  const bool negative = (pat >> m) & 1;
  // Negative patterns carry the remaining fields in two's complement.
  const uint64_t mag = negative ? ((~pat + 1) & cfg.pattern_mask()) : pat;
  const uint64_t body = mag & ((m == 64) ? ~0ull : ((1ull << m) - 1));

  const int first = (body >> (m - 1)) & 1;
  int run = 0;
  while (run < m && (((body >> (m - 1 - run)) & 1) == (uint64_t)first)) ++run;
  const int k = first ? run - 1 : -run;

  // Bits below the regime terminator (none if the run fills the word).
  const int avail = run < m ? m - run - 1 : 0;
  const uint64_t rest = avail > 0 ? (body & ((1ull << avail) - 1)) : 0;

  const int e_bits = avail < cfg.es ? avail : cfg.es;
  uint64_t exp = e_bits > 0 ? (rest >> (avail - e_bits)) : 0;
  exp <<= (cfg.es - e_bits);  // truncated low exponent bits read as zero

  const int frac_width = avail - e_bits;
  const uint64_t frac = frac_width > 0 ? (rest & ((1ull << frac_width) - 1)) : 0;

  const int scale = (k << cfg.es) + (int)exp;
  return UnpackedPosit::regular(negative, scale, frac, frac_width);
}

namespace {

// Accumulates an MSB-first bit stream into the top `cap` bits plus
// guard/sticky for RNE.
struct BitSink {
  uint64_t kept = 0;
  int cap = 0;
  int pos = 0;
  int guard = 0;
  bool guard_set = false;
  bool sticky = false;

  void push(uint128 bits, int width) {
    if (width <= 0) return;
    while (width > 0) {
      if (pos < cap) {
        int take = cap - pos < width ? cap - pos : width;
        kept = (kept << take) | (uint64_t)(bits >> (width - take));
        bits &= (width - take == 128) ? ~(uint128)0 : (((uint128)1 << (width - take)) - 1);
        pos += take;
        width -= take;
      } else if (!guard_set) {
        guard = (int)((bits >> (width - 1)) & 1);
        guard_set = true;
        bits &= (width - 1 == 128) ? ~(uint128)0 : (((uint128)1 << (width - 1)) - 1);
        pos += 1;
        width -= 1;
      } else {
        sticky = sticky || bits != 0;
        return;
      }
    }
  }

  void pad_to_cap() {
    if (pos < cap) {
      kept <<= (cap - pos);
      pos = cap;
    }
  }
};

int bit_length(uint128 v) {
  int n = 0;
  while (v) {
    v >>= 1;
    ++n;
  }
  return n;
}

// sign of a*2^ea - b*2^eb for a, b > 0
int cmp_dyadic(uint128 a, int ea, uint128 b, int eb) {
  const int top_a = bit_length(a) + ea, top_b = bit_length(b) + eb;
  if (top_a != top_b) return top_a < top_b ? -1 : 1;
  if (ea >= eb) {
    const uint128 A = a << (ea - eb);  // fits: equal leading-bit positions
    return A < b ? -1 : (A > b ? 1 : 0);
  }
  const uint128 B = b << (eb - ea);
  return a < B ? -1 : (a > B ? 1 : 0);
}

}  // namespace

PositBits normalize(const UnpackedPosit& u, const PositConfig& cfg) {
  if (u.kind == PositKind::Zero) return {0, cfg};
  if (u.kind == PositKind::NaR) return {cfg.nar_pattern(), cfg};

  const int m = cfg.n - 1;
  int scale = u.scale;
  uint64_t mag;

  if (scale > cfg.max_scale()) {
    mag = cfg.maxpos_pattern();
  } else if (scale < cfg.min_scale()) {
    mag = cfg.minpos_pattern();
  } else {
    const int k = scale >> cfg.es;
    const int e = scale - (k << cfg.es);
    const int reg_w = k >= 0 ? (k + 2 > m ? m : k + 2) : (-k + 1 > m ? m : -k + 1);
    int drop_e = reg_w + cfg.es - m;  // exponent bits that do not fit
    if (drop_e < 0) drop_e = 0;

    BitSink sink;
    sink.cap = m;
    if (k >= 0) {
      int ones = k + 1;
      while (ones > 0) {  // k+1 ones then a zero terminator
        int chunk = ones > 63 ? 63 : ones;
        sink.push(((uint128)1 << chunk) - 1, chunk);
        ones -= chunk;
      }
      sink.push(0, 1);
    } else {
      sink.push(0, -k);  // -k zeros then a one terminator
      sink.push(1, 1);
    }
    sink.push((uint128)e, cfg.es);
    sink.push(u.frac, u.frac_width);
    sink.pad_to_cap();
    mag = sink.kept;

    if (drop_e == 0) {
      // All dropped bits are fraction bits, where the distance to the next
      // pattern always equals 2x the guard weight, so guard/sticky RNE is
      // exact round-to-nearest with ties to the even pattern.
      const bool round_up = sink.guard_set && sink.guard == 1 && (sink.sticky || (mag & 1));
      if (round_up) ++mag;
      if (mag > cfg.maxpos_pattern()) mag = cfg.maxpos_pattern();
    } else if (mag >= cfg.maxpos_pattern()) {
      mag = cfg.maxpos_pattern();  // rounding further up would reach NaR
    } else {
      // Exponent bits were truncated by the regime: the bracketing posits
      // are whole binades apart, so compare against their exact midpoint.
      //   v = (2^fw + frac) * 2^(scale - fw)
      //   M = (2^(sq - sp) + 1) * 2^(sp - 1)
      const uint64_t q = mag + 1;
      const int sp = extract({mag, cfg}).scale;
      const int sq = extract({q, cfg}).scale;
      const int c = cmp_dyadic(((uint128)1 << u.frac_width) | u.frac, scale - u.frac_width,
                               ((uint128)1 << (sq - sp)) | 1, sp - 1);
      if (c > 0 || (c == 0 && (mag & 1))) mag = q;
    }
    assert(mag >= 1);
  }

  uint64_t pattern = u.negative ? ((~mag + 1) & cfg.pattern_mask()) : mag;
  return {pattern, cfg};
}

PositBits posit_from_binary32(uint32_t w, const PositConfig& cfg) {
  const bool neg = w >> 31;
  const int exp8 = (w >> 23) & 0xFF;
  const uint32_t man = w & 0x7FFFFF;

  if (exp8 == 0xFF) return {cfg.nar_pattern(), cfg};  // Inf and NaN
  if (exp8 == 0 && man == 0) return {0, cfg};
  if (exp8 == 0) {
    // subnormal: man * 2^-149, renormalise around the top set bit
    const int t = 31 - std::countl_zero(man);
    return normalize(UnpackedPosit::regular(neg, t - 149, man - (1u << t), t), cfg);
  }
  return normalize(UnpackedPosit::regular(neg, exp8 - 127, man, 23), cfg);
}

uint32_t binary32_from_posit(const PositBits& p) {
  const UnpackedPosit u = extract(p);
  if (u.kind == PositKind::Zero) return 0;
  if (u.kind == PositKind::NaR) return 0x7FC00000u;  // canonical quiet NaN

  const uint32_t sign = u.negative ? 0x80000000u : 0;
  int scale = u.scale;
  uint128 frac = u.frac;
  int fw = u.frac_width;

  // Round the significand to 24 bits (hidden + 23) if it is wider.
  if (fw > 23) {
    const int drop = fw - 23;
    const uint128 dropped = frac & (((uint128)1 << drop) - 1);
    const uint128 half = (uint128)1 << (drop - 1);
    frac >>= drop;
    fw = 23;
    if (dropped > half || (dropped == half && (frac & 1))) {
      ++frac;
      if (frac >> 23) {  // carried into the hidden bit
        frac = 0;
        ++scale;
      }
    }
  }

  if (scale > 127) return sign | 0x7F800000u;  // out of range, unreachable for n <= 32
  if (scale >= -126) {
    uint32_t man = fw > 0 ? (uint32_t)frac << (23 - fw) : 0;
    return sign | ((uint32_t)(scale + 127) << 23) | man;
  }

  // subnormal range: value = 1.frac * 2^scale with scale < -126.
  // The mantissa field counts units of 2^-149.
  const uint128 sig = ((uint128)1 << fw) | frac;
  const int lsb_exp = scale - fw + 149;  // exponent of sig's LSB in those units
  if (lsb_exp >= 0) return sign | (uint32_t)(sig << lsb_exp);
  const int drop = -lsb_exp;
  if (drop > fw + 1) return sign;  // below half of 2^-149, rounds to zero
  const uint128 dropped = sig & (((uint128)1 << drop) - 1);
  const uint128 half = (uint128)1 << (drop - 1);
  uint128 man = sig >> drop;
  if (dropped > half || (dropped == half && (man & 1))) ++man;
  return sign | (uint32_t)man;  // a carry to bit 23 lands in the normal range, still correct
}

Dyadic value_as_rational(const UnpackedPosit& u) {
  if (u.kind != PositKind::Regular)
    throw std::domain_error("value_as_rational: Zero/NaR have no rational value");
  if (u.frac_width > 62)
    throw std::domain_error("value_as_rational: significand too wide");
  int64_t mant = (int64_t)(((uint64_t)1 << u.frac_width) | (uint64_t)u.frac);
  if (u.negative) mant = -mant;
  return {mant, u.scale - u.frac_width};
}

std::string rational_string(const Dyadic& d) {
  int64_t num = d.mantissa;
  int e = d.exponent;
  while (num != 0 && (num & 1) == 0 && e < 0) {
    num >>= 1;
    ++e;
  }
  if (e >= 0) {
    unsigned __int128 v = (num < 0 ? -(unsigned __int128)num : (unsigned __int128)num);
    v <<= e;
    std::string digits;
    if (v == 0) digits = "0";
    while (v > 0) {
      digits.insert(digits.begin(), char('0' + (int)(v % 10)));
      v /= 10;
    }
    return (num < 0 ? "-" : "") + digits;
  }
  unsigned __int128 den = (unsigned __int128)1 << -e;
  std::string dd;
  while (den > 0) {
    dd.insert(dd.begin(), char('0' + (int)(den % 10)));
    den /= 10;
  }
  return std::to_string(num) + "/" + dd;
}

double value_as_double(const UnpackedPosit& u) {
  if (u.kind == PositKind::Zero) return 0.0;
  if (u.kind == PositKind::NaR) return std::numeric_limits<double>::quiet_NaN();
  double sig = 1.0 + std::ldexp((double)(uint64_t)u.frac, -u.frac_width);
  double v = std::ldexp(sig, u.scale);
  return u.negative ? -v : v;
}

double value_as_double(const PositBits& p) { return value_as_double(extract(p)); }

PositBits posit_from_double(double v, const PositConfig& cfg) {
  if (v == 0.0) return {0, cfg};
  if (!std::isfinite(v)) return {cfg.nar_pattern(), cfg};
  int e;
  double m = std::frexp(std::fabs(v), &e);  // m in [0.5, 1)
  // 53-bit significand, exact for any finite double
  uint64_t sig = (uint64_t)std::ldexp(m, 53);
  const int t = 63 - std::countl_zero(sig);
  return normalize(UnpackedPosit::regular(v < 0, e - 53 + t, sig - (1ull << t), t), cfg);
}

}  // namespace clarinet
