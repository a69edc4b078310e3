#ifndef CLARINET_KERNELS_HPP
#define CLARINET_KERNELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clarinet/quire.hpp"

namespace clarinet {

// Numeric execution modes:
//   f64      binary64 reference
//   f32      binary32 with fused multiply-add chains
//   pN       posit data, one quire accumulation (and rounding) per element
//   qN       posit data, whole accumulation fused in the quire, one rounding
//   f32-qN   binary32 data converted per element, quire accumulation
enum class ModeTag : uint8_t { F64Ref, F32, PN, QN, F32_QN };

struct NumericMode {
  ModeTag tag = ModeTag::F64Ref;
  PositConfig config{32, 2};

  std::string name() const;
  static NumericMode parse(const std::string& name);  // throws std::invalid_argument

  static NumericMode f64() { return {ModeTag::F64Ref, {}}; }
  static NumericMode f32() { return {ModeTag::F32, {}}; }
  static NumericMode qn(int n) { return {ModeTag::QN, PositConfig::with_default_es(n)}; }
  static NumericMode pn(int n) { return {ModeTag::PN, PositConfig::with_default_es(n)}; }
  static NumericMode f32_qn(int n) { return {ModeTag::F32_QN, PositConfig::with_default_es(n)}; }
};

struct ModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scalar result plus the raw bit pattern produced by the mode (posit pattern
// for pN/qN, binary32 word for f32/f32-qN) for bit-exact comparisons against
// emulator runs.
struct ScalarResult {
  double value = 0;
  uint32_t bits = 0;
};

ScalarResult xdot_full(std::span<const double> a, std::span<const double> b,
                       const NumericMode& mode, QuireOpCounters* counters = nullptr);
double xdot(std::span<const double> a, std::span<const double> b, const NumericMode& mode,
            QuireOpCounters* counters = nullptr);

Eigen::VectorXd xgemv(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                      const NumericMode& mode, QuireOpCounters* counters = nullptr);

Eigen::MatrixXd xgemm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const NumericMode& mode, QuireOpCounters* counters = nullptr);

// Upper-triangularisation by Givens rotations, pivot row j eliminating rows
// j+1..m-1 column by column. Rotation coefficients come from a binary32
// square root; posit modes compute them through fused divides and push the
// row updates through the quire (see kernels.cpp for the exact op budget).
// PN mode is refused: there is no posit square-root path.
Eigen::MatrixXd xgivens(const Eigen::MatrixXd& A, const NumericMode& mode,
                        QuireOpCounters* counters = nullptr);

struct FlowField {
  Eigen::MatrixXd u, v;
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> valid;
};

// Lucas-Kanade local velocity over a square window. Gradients and the 2x2
// solve run in binary32 (binary64 in the reference mode); the five window
// sums accumulate in the selected mode. normalize rescales 0..255 pixels to
// 0..16.
FlowField lucas_kanade_velocity(const Eigen::MatrixXd& frame1, const Eigen::MatrixXd& frame2,
                                int window, const NumericMode& mode, bool normalize,
                                QuireOpCounters* counters = nullptr);

enum class Kernel : uint8_t { Dot, Gemv, Gemm, Givens };
const char* kernel_name(Kernel k);
Kernel parse_kernel(const std::string& name);

// Quire op profile of one seeded kernel run (init/read pairs and the mean
// accumulation count between reads).
struct KernelAudit {
  uint64_t inits = 0;
  uint64_t reads = 0;
  uint64_t accumulates = 0;
  double accums_per_read = 0;
};
KernelAudit audit_kernel(Kernel k, int size, const NumericMode& mode, uint64_t seed);

// Deterministic per-trial input streams: splitmix64 seeded from
// (seed, kernel, size, trial), uniform doubles in [lo, hi).
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }
};

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c);

}  // namespace clarinet

#endif
