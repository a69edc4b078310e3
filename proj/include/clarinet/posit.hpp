#ifndef CLARINET_POSIT_HPP
#define CLARINET_POSIT_HPP

#include <cstdint>
#include <string>

namespace clarinet {

using uint128 = unsigned __int128;

// Width/exponent pair that parameterises every posit operation.
// Arithmetic (quire mul/div paths) is exercised for n in {8,16,24,32};
// encode/decode work for any 2 <= n <= 64, 0 <= es <= 4.
struct PositConfig {
  int n = 32;
  int es = 2;

  int max_scale() const { return (n - 2) << es; }
  int min_scale() const { return -max_scale(); }
  int quire_width() const { return quire_segments() * 32; }  // == n*n/2 for byte-even widths
  int quire_segments() const { return (n * n + 63) / 64; }
  int quire_frac_bits() const { return 2 * max_scale(); }

  uint64_t pattern_mask() const { return n == 64 ? ~0ull : ((1ull << n) - 1); }
  uint64_t nar_pattern() const { return 1ull << (n - 1); }
  uint64_t maxpos_pattern() const { return nar_pattern() - 1; }
  uint64_t minpos_pattern() const { return 1; }

  bool valid() const { return n >= 2 && n <= 64 && es >= 0 && es <= 4; }
  bool operator==(const PositConfig&) const = default;

  // es defaults used throughout: 8->0, 16->1, 24->1, 32->2.
  static PositConfig with_default_es(int n);
};

enum class PositKind : uint8_t { Zero, NaR, Regular };

// Raw n-bit pattern. Bits above n-1 are kept zero.
struct PositBits {
  uint64_t pattern = 0;
  PositConfig config;
};

// Decoded form. For Regular values:
//   value = (-1)^negative * 2^scale * (1 + frac / 2^frac_width)
// where scale folds regime and exponent together. frac_width may exceed
// what the target width can encode; normalize() rounds.
struct UnpackedPosit {
  PositKind kind = PositKind::Zero;
  bool negative = false;
  int scale = 0;
  uint128 frac = 0;
  int frac_width = 0;

  static UnpackedPosit zero() { return {}; }
  static UnpackedPosit nar() { return {PositKind::NaR, false, 0, 0, 0}; }
  static UnpackedPosit regular(bool neg, int scale, uint128 frac, int fw) {
    return {PositKind::Regular, neg, scale, frac, fw};
  }
};

// Field decode. Total on well-formed patterns; never fails.
UnpackedPosit extract(const PositBits& p);

// Encode with round-to-nearest-even over the dropped tail. Saturates at
// maxpos/minpos; never produces Zero or NaR from a Regular input.
PositBits normalize(const UnpackedPosit& u, const PositConfig& config);

// IEEE-754 binary32 <-> posit. +-0 -> Zero, Inf/NaN -> NaR; NaR -> canonical
// quiet NaN. Both directions round RNE when the target cannot hold the value
// exactly (posit -> binary32 is exact whenever frac_width <= 23 and the scale
// is in binary32 range).
PositBits posit_from_binary32(uint32_t word, const PositConfig& config);
uint32_t binary32_from_posit(const PositBits& p);

// Exact dyadic value mantissa * 2^exponent of a Regular posit.
struct Dyadic {
  int64_t mantissa = 0;
  int exponent = 0;
};

// Exact rational value of a Regular unpacked posit (throws on Zero/NaR).
// Requires frac_width <= 62, which holds for anything extract() produces.
Dyadic value_as_rational(const UnpackedPosit& u);

// "9/4"-style exact rendering of a dyadic value.
std::string rational_string(const Dyadic& d);

// Debug/report helper. Exact for every pattern with n <= 32.
double value_as_double(const PositBits& p);
double value_as_double(const UnpackedPosit& u);

// Convenience: round a binary64 value into a posit (same RNE/saturation rules
// as normalize; used by the kernel library to build posit data from doubles).
PositBits posit_from_double(double v, const PositConfig& config);

}  // namespace clarinet

#endif
