#include "oracle.hpp"

#include <stdexcept>
#include <string>

namespace clarinet::oracle {

Class classify(uint64_t pattern, const PositConfig& cfg) {
  pattern &= cfg.pattern_mask();
  if (pattern == 0) return Class::Zero;
  if (pattern == cfg.nar_pattern()) return Class::NaR;
  return Class::Regular;
}

static std::string magnitude_bits(uint64_t pattern, const PositConfig& cfg, bool* sign) {
  pattern &= cfg.pattern_mask();
  *sign = (pattern >> (cfg.n - 1)) & 1;
  mpz_class mag = (unsigned long)0;
  mpz_class p;
  mpz_import(p.get_mpz_t(), 1, 1, sizeof(pattern), 0, 0, &pattern);
  if (*sign) {
    mpz_class two_n = 1;
    two_n <<= cfg.n;
    mag = two_n - p;
  } else {
    mag = p;
  }
  std::string bits;
  for (int i = cfg.n - 2; i >= 0; --i)
    bits += mpz_tstbit(mag.get_mpz_t(), i) ? '1' : '0';
  return bits;  // n-1 chars, MSB first
}

Fields parse_fields(uint64_t pattern, const PositConfig& cfg) {
  if (classify(pattern, cfg) != Class::Regular)
    throw std::domain_error("oracle: fields of a special value");
  Fields f{};
  const std::string bits = magnitude_bits(pattern, cfg, &f.sign);

  size_t i = 0;
  const char lead = bits[0];
  while (i < bits.size() && bits[i] == lead) ++i;
  const long run = (long)i;
  f.k = lead == '1' ? run - 1 : -run;
  if (i < bits.size()) ++i;  // regime terminator

  f.exp = 0;
  for (int e = 0; e < cfg.es; ++e) {
    f.exp <<= 1;
    if (i < bits.size()) f.exp |= bits[i++] == '1';
  }

  f.frac = 0;
  f.frac_width = 0;
  while (i < bits.size()) {
    f.frac <<= 1;
    f.frac |= bits[i++] == '1';
    ++f.frac_width;
  }
  return f;
}

mpq_class posit_value(uint64_t pattern, const PositConfig& cfg) {
  const Fields f = parse_fields(pattern, cfg);
  // value = (-1)^s * useed^k * 2^exp * (1 + frac/2^fw), useed = 2^(2^es)
  const long scale = f.k * (1L << cfg.es) + f.exp;
  mpq_class two_scale;
  if (scale >= 0) {
    mpz_class num = 1;
    num <<= scale;
    two_scale = mpq_class(num);
  } else {
    mpz_class den = 1;
    den <<= -scale;
    two_scale = mpq_class(1) / mpq_class(den);
  }
  mpz_class den = 1;
  den <<= f.frac_width;
  mpq_class sig = mpq_class(den + f.frac) / mpq_class(den);
  mpq_class v = two_scale * sig;
  v.canonicalize();
  return f.sign ? mpq_class(-v) : v;
}

static uint64_t negate_pattern(uint64_t mag_pattern, const PositConfig& cfg) {
  return (~mag_pattern + 1) & cfg.pattern_mask();
}

uint64_t round_to_posit(const mpq_class& v, const PositConfig& cfg) {
  if (v == 0) return 0;
  if (v < 0) return negate_pattern(round_to_posit(mpq_class(-v), cfg), cfg);

  const uint64_t maxpos = cfg.maxpos_pattern();
  if (v >= posit_value(maxpos, cfg)) return maxpos;
  if (v <= posit_value(1, cfg)) return 1;  // nonzero below minpos saturates to minpos

  // largest P with value(P) <= v; patterns 1..maxpos are monotone
  uint64_t lo = 1, hi = maxpos;
  while (lo + 1 < hi) {
    const uint64_t mid = lo + (hi - lo) / 2;
    if (posit_value(mid, cfg) <= v) lo = mid;
    else hi = mid;
  }
  const mpq_class below = v - posit_value(lo, cfg);
  const mpq_class above = posit_value(hi, cfg) - v;
  if (below < above) return lo;
  if (above < below) return hi;
  return (lo & 1) == 0 ? lo : hi;  // tie: even pattern
}

mpq_class rational(const Dyadic& d) {
  mpq_class m((long)d.mantissa);
  if (d.exponent >= 0) {
    mpz_class num = 1;
    num <<= d.exponent;
    m *= mpq_class(num);
  } else {
    mpz_class den = 1;
    den <<= -d.exponent;
    m /= mpq_class(den);
  }
  m.canonicalize();
  return m;
}

}  // namespace clarinet::oracle
