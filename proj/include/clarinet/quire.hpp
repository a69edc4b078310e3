#ifndef CLARINET_QUIRE_HPP
#define CLARINET_QUIRE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "clarinet/posit.hpp"

namespace clarinet {

enum class FusedOp : uint8_t { MulAdd, MulSub, DivAdd, DivSub };

struct QuireOpCounters {
  uint64_t inits = 0;
  uint64_t accumulates = 0;
  uint64_t reads = 0;

  QuireOpCounters& operator+=(const QuireOpCounters& o) {
    inits += o.inits;
    accumulates += o.accumulates;
    reads += o.reads;
    return *this;
  }
};

// Fixed-point n^2/2-bit accumulator stored as 32-bit segments, each paired
// with a zero flag. The register is one two's-complement number with
// 2*(n-2)*2^es fraction bits, so minpos^2 sits exactly at bit 0 and maxpos^2
// fits below the carry-guard bits. NaR is a sticky flag beside the segments;
// only init with a non-NaR posit clears it.
class Quire {
 public:
  explicit Quire(const PositConfig& cfg);

  const PositConfig& config() const { return cfg_; }
  int width() const { return cfg_.quire_width(); }
  int frac_bits() const { return cfg_.quire_frac_bits(); }
  int segment_count() const { return (int)seg_.size(); }

  // Replaces the contents with the exact fixed-point image of p.
  void init(const PositBits& p);

  // MulAdd/MulSub add or subtract the exact product a*b. DivAdd/DivSub round
  // the quotient a/b once (RNE at 2n significand bits, or at the quire grid
  // if that is coarser) and then add or subtract it exactly.
  void accumulate(const UnpackedPosit& a, const UnpackedPosit& b, FusedOp op);

  // Sign, scale and a (n+2)-bit fraction with everything below folded into a
  // sticky bit, ready for one RNE rounding in normalize().
  UnpackedPosit read() const;
  PositBits read_posit() const;

  // Leading zero bits of the magnitude, counted segment-wise via the zero
  // flags. Callers must check is_nar() first.
  int leading_zero_count() const;

  bool is_nar() const { return nar_; }
  bool is_zero() const;

  // Hex segments most-significant first plus the zero-flag vector, e.g.
  //   00000000 00001000 | z: 10
  // ('1' marks a zero segment). A NaR quire dumps as "NaR".
  std::string dump() const;

  const std::vector<uint32_t>& segments() const { return seg_; }
  const std::vector<uint8_t>& zero_flags() const { return zero_; }
  const QuireOpCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

 private:
  void clear();
  void add_shifted(uint128 mant, int pos, bool negative);

  PositConfig cfg_;
  std::vector<uint32_t> seg_;   // seg_[0] holds bits 0..31
  std::vector<uint8_t> zero_;   // zero_[i] <=> seg_[i] == 0
  bool nar_ = false;
  mutable QuireOpCounters counters_;
};

// Value-style wrappers matching the op signatures used in the tests.
Quire quire_init(const Quire& q, const PositBits& p);
Quire quire_accumulate(const Quire& q, const UnpackedPosit& a, const UnpackedPosit& b, FusedOp op);
UnpackedPosit quire_read(const Quire& q);
int leading_zero_count(const Quire& q);

}  // namespace clarinet

#endif
