#include "clarinet/quire.hpp"

#include <bit>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace clarinet {

Quire::Quire(const PositConfig& cfg) : cfg_(cfg) {
  if (!cfg.valid()) throw std::invalid_argument("quire: invalid posit config");
  // Extremal products must be representable: bit 0 is minpos^2 and the top
  // magnitude bit must sit above maxpos^2.
  if (4 * cfg.max_scale() + 1 > cfg.quire_width())
    throw std::invalid_argument("quire: n^2/2 bits cannot span maxpos^2..minpos^2 for this (n,es)");
  seg_.assign(cfg.quire_segments(), 0);
  zero_.assign(cfg.quire_segments(), 1);
}

void Quire::clear() {
  std::fill(seg_.begin(), seg_.end(), 0);
  std::fill(zero_.begin(), zero_.end(), 1);
  nar_ = false;
}

bool Quire::is_zero() const {
  if (nar_) return false;
  for (uint8_t z : zero_)
    if (!z) return false;
  return true;
}

void Quire::init(const PositBits& p) {
  ++counters_.inits;
  clear();
  const UnpackedPosit u = extract(p);
  if (u.kind == PositKind::NaR) {
    nar_ = true;
    return;
  }
  if (u.kind == PositKind::Zero) return;
  const uint128 mant = ((uint128)1 << u.frac_width) | u.frac;
  add_shifted(mant, frac_bits() + u.scale - u.frac_width, u.negative);
}

void Quire::add_shifted(uint128 mant, int pos, bool negative) {
  if (pos < 0) throw std::domain_error("quire: operand finer than the quire grid");
  if (mant == 0) return;
  const int nseg = segment_count();
  int idx = pos / 32;
  const int off = pos % 32;
  // split into a 5th chunk before shifting so no bits fall off the top
  const uint128 hi_carry = off ? (mant >> (128 - off)) : 0;
  mant <<= off;

  uint32_t chunks[5];
  for (int i = 0; i < 4; ++i) chunks[i] = (uint32_t)(mant >> (32 * i));
  chunks[4] = (uint32_t)hi_carry;

  if (!negative) {
    uint64_t carry = 0;
    for (int i = 0; i < 5 && idx + i < nseg; ++i) {
      uint64_t s = (uint64_t)seg_[idx + i] + chunks[i] + carry;
      seg_[idx + i] = (uint32_t)s;
      carry = s >> 32;
    }
    for (int i = idx + 5; carry && i < nseg; ++i) {
      uint64_t s = (uint64_t)seg_[i] + carry;
      seg_[i] = (uint32_t)s;
      carry = s >> 32;
    }
    // carry past the top segment wraps, as a hardware register would
  } else {
    uint64_t borrow = 0;
    for (int i = 0; i < 5 && idx + i < nseg; ++i) {
      uint64_t s = (uint64_t)seg_[idx + i] - chunks[i] - borrow;
      seg_[idx + i] = (uint32_t)s;
      borrow = (s >> 32) ? 1 : 0;
    }
    for (int i = idx + 5; borrow && i < nseg; ++i) {
      uint64_t s = (uint64_t)seg_[i] - borrow;
      seg_[i] = (uint32_t)s;
      borrow = (s >> 32) ? 1 : 0;
    }
  }
  for (int i = 0; i < nseg; ++i) zero_[i] = seg_[i] == 0;
}

void Quire::accumulate(const UnpackedPosit& a, const UnpackedPosit& b, FusedOp op) {
  ++counters_.accumulates;
  if (nar_) return;
  if (a.kind == PositKind::NaR || b.kind == PositKind::NaR) {
    nar_ = true;
    return;
  }
  const bool subtract = op == FusedOp::MulSub || op == FusedOp::DivSub;
  const bool divide = op == FusedOp::DivAdd || op == FusedOp::DivSub;

  if (divide) {
    if (b.kind == PositKind::Zero) {
      nar_ = true;
      return;
    }
    if (a.kind == PositKind::Zero) return;
    if (cfg_.n > 32) throw std::invalid_argument("quire: fused divide supports n <= 32");

    const bool negate = (a.negative != b.negative) ^ subtract;
    const uint128 ma = ((uint128)1 << a.frac_width) | a.frac;
    const uint128 mb = ((uint128)1 << b.frac_width) | b.frac;
    // ratio = (ma/2^fwa)/(mb/2^fwb) in (1/2, 2); align and normalise.
    uint128 num = ma << b.frac_width;
    const uint128 den = mb << a.frac_width;
    int sq = a.scale - b.scale;
    if (num < den) {
      num <<= 1;
      --sq;
    }
    // Round once, at 2n significand bits or at the quire grid if coarser.
    int fw = 2 * cfg_.n;
    if (frac_bits() + sq < fw) fw = frac_bits() + sq;
    if (fw < 0) {
      // Quotient magnitude is below half the quire ULP unless it rounds up
      // to exactly one ULP. sq == -frac_bits()-1 with any remainder does.
      if (sq == -frac_bits() - 1 && num != den) add_shifted(1, 0, negate);
      return;
    }
    uint128 q = (num << fw) / den;
    const uint128 rem = (num << fw) % den;
    if (rem * 2 > den || (rem * 2 == den && (q & 1))) ++q;
    add_shifted(q, frac_bits() + sq - fw, negate);
    return;
  }

  if (a.kind == PositKind::Zero || b.kind == PositKind::Zero) return;
  const uint128 ma = ((uint128)1 << a.frac_width) | a.frac;
  const uint128 mb = ((uint128)1 << b.frac_width) | b.frac;
  const uint128 mant = ma * mb;
  const int fw = a.frac_width + b.frac_width;
  const bool negate = (a.negative != b.negative) ^ subtract;
  add_shifted(mant, frac_bits() + a.scale + b.scale - fw, negate);
}

int Quire::leading_zero_count() const {
  assert(!nar_);
  const int nseg = segment_count();
  // Work on the magnitude: negative contents are two's-complemented first.
  const bool negative = (seg_[nseg - 1] >> 31) & 1;
  if (!negative) {
    int lz = 0;
    int i = nseg - 1;
    while (i >= 0 && zero_[i]) {
      lz += 32;
      --i;
    }
    if (i < 0) return width();
    return lz + std::countl_zero(seg_[i]);
  }
  std::vector<uint32_t> mag(nseg);
  uint64_t carry = 1;
  for (int i = 0; i < nseg; ++i) {
    uint64_t s = (uint64_t)(uint32_t)~seg_[i] + carry;
    mag[i] = (uint32_t)s;
    carry = s >> 32;
  }
  int lz = 0;
  int i = nseg - 1;
  while (i >= 0 && mag[i] == 0) {
    lz += 32;
    --i;
  }
  if (i < 0) return width();
  return lz + std::countl_zero(mag[i]);
}

UnpackedPosit Quire::read() const {
  ++counters_.reads;
  if (nar_) return UnpackedPosit::nar();
  if (is_zero()) return UnpackedPosit::zero();

  const int nseg = segment_count();
  const bool negative = (seg_[nseg - 1] >> 31) & 1;
  std::vector<uint32_t> mag(seg_);
  if (negative) {
    uint64_t carry = 1;
    for (int i = 0; i < nseg; ++i) {
      uint64_t s = (uint64_t)(uint32_t)~seg_[i] + carry;
      mag[i] = (uint32_t)s;
      carry = s >> 32;
    }
  }

  const int lz = leading_zero_count();
  const int lead = width() - 1 - lz;  // index of the leading one
  const int scale = lead - frac_bits();

  auto bit_at = [&](int i) -> int {
    if (i < 0 || i >= width()) return 0;
    return (mag[i / 32] >> (i % 32)) & 1;
  };

  const int keep = cfg_.n + 2;  // fraction bits kept ahead of the sticky fold
  uint64_t frac = 0;
  int fw = lead < keep ? lead : keep;
  for (int i = 0; i < fw; ++i) frac = (frac << 1) | bit_at(lead - 1 - i);
  if (lead > keep) {
    bool sticky = false;
    for (int i = lead - keep - 1; i >= 0 && !sticky; --i) sticky = bit_at(i);
    frac = (frac << 1) | (sticky ? 1 : 0);
    fw = keep + 1;
  }
  return UnpackedPosit::regular(negative, scale, frac, fw);
}

PositBits Quire::read_posit() const { return normalize(read(), cfg_); }

std::string Quire::dump() const {
  if (nar_) return "NaR";
  std::ostringstream os;
  os << std::hex;
  for (int i = segment_count() - 1; i >= 0; --i) {
    os.width(8);
    os.fill('0');
    os << seg_[i];
    if (i > 0) os << ' ';
  }
  os << " | z: ";
  for (int i = segment_count() - 1; i >= 0; --i) os << (zero_[i] ? '1' : '0');
  return os.str();
}

Quire quire_init(const Quire& q, const PositBits& p) {
  Quire r = q;
  r.init(p);
  return r;
}

Quire quire_accumulate(const Quire& q, const UnpackedPosit& a, const UnpackedPosit& b, FusedOp op) {
  Quire r = q;
  r.accumulate(a, b, op);
  return r;
}

UnpackedPosit quire_read(const Quire& q) { return q.read(); }

int leading_zero_count(const Quire& q) { return q.leading_zero_count(); }

}  // namespace clarinet
