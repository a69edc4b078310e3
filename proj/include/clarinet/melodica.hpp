#ifndef CLARINET_MELODICA_HPP
#define CLARINET_MELODICA_HPP

#include <cstdint>
#include <optional>

#include "clarinet/quire.hpp"

namespace clarinet {

enum class MelodicaOpcode : uint8_t {
  FMA_P,
  FMS_P,
  FDA_P,
  FDS_P,
  FCVT_R_P,
  FCVT_P_R,
  FCVT_P_S,
  FCVT_S_P,
};

// operand1 carries a posit pattern (or a raw binary32 word for FCVT_P_S);
// operand2 is always a posit pattern. Presence must match the command.
struct MelodicaCommand {
  MelodicaOpcode op;
  std::optional<uint32_t> operand1;
  std::optional<uint32_t> operand2;
};

// Per-width pipeline constants. A fused op lands in the quire after
// fused_latency cycles (12/20/36 at n = 8/16/32, i.e. n+4); the quire adder
// is segmented into 32-bit stages, so its depth is the segment count
// (1/4/16). Converters are two-stage pipelines and respond after 2 cycles.
struct LatencyModel {
  PositConfig config;
  bool enabled = true;

  int fused_latency() const { return enabled ? config.n + 4 : 0; }
  int quire_stages() const { return config.quire_segments(); }
  int converter_latency() const { return enabled ? 2 : 0; }
};

struct MelodicaResponse {
  std::optional<uint32_t> result;  // posit pattern or binary32 word
  uint64_t response_at = 0;        // cycle the CPU sees a register-file result
  uint64_t completes_at = 0;       // cycle the quire state is architecturally settled
};

// One Melodica instance per emulated hart. Commands are issued with the
// current cycle; fused ops and quire init respond immediately and complete
// into the quire later, while a quire read first drains every outstanding
// fused op.
class Melodica {
 public:
  Melodica(const PositConfig& cfg, LatencyModel lat)
      : cfg_(cfg), quire_(cfg), lat_(lat) {}

  MelodicaResponse execute(const MelodicaCommand& cmd, uint64_t now);

  const PositConfig& config() const { return cfg_; }
  const Quire& quire() const { return quire_; }
  Quire& quire() { return quire_; }
  uint64_t quire_busy_until() const { return quire_busy_; }

 private:
  PositConfig cfg_;
  Quire quire_;
  LatencyModel lat_;
  uint64_t quire_busy_ = 0;
};

}  // namespace clarinet

#endif
