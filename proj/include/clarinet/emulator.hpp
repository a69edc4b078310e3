#ifndef CLARINET_EMULATOR_HPP
#define CLARINET_EMULATOR_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "clarinet/assembler.hpp"
#include "clarinet/isa.hpp"
#include "clarinet/melodica.hpp"

namespace clarinet {

// Per-instruction occupancy charges. The five-stage pipeline is not modelled
// structurally; each retired instruction advances the cycle counter by its
// occupancy, a small scoreboard stalls consumers of slow results (FMADD.S
// answers two cycles after its pipeline frees), and Melodica commands that
// return a register value pay a fixed request/response round trip on top of
// their two-stage conversion latency. Fused posit ops issue in one cycle and
// land in the quire fused_latency (n+4) cycles later; a quire read first
// waits out every outstanding fused op.
struct CostTable {
  bool enabled = true;
  uint32_t base = 1;
  uint32_t taken_branch = 2;
  uint32_t jump = 2;
  uint32_t mem = 2;  // no cache model: every access costs the same
  uint32_t mul = 3;
  uint32_t divrem = 16;
  uint32_t fadd = 5;
  uint32_t fmul = 5;
  uint32_t fmadd_occupancy = 12;
  uint32_t fmadd_result = 14;
  uint32_t fdiv = 16;
  uint32_t fsqrt = 16;
  uint32_t fmisc = 1;     // sign injection, fmv
  uint32_t fcvt_int = 2;  // int <-> float conversions
  uint32_t posit_issue = 1;         // fused ops + quire init: fire-and-forget
  uint32_t melodica_response = 5;   // round trip for value-returning commands

  static CostTable standard() { return {}; }
  static CostTable null_model() {
    CostTable t;
    t.enabled = false;
    return t;
  }
};

enum class InstrCategory : uint8_t {
  FloatCompute,
  FloatLdSt,
  PositCompute,
  FloatPositInterop,
  PositLdSt,
  Others,
};

constexpr int kCategoryCount = 6;
const char* category_name(InstrCategory c);
InstrCategory static_category(Mnemonic m);

struct CycleLedger {
  std::array<uint64_t, kCategoryCount> cycles{};
  uint64_t total() const {
    uint64_t t = 0;
    for (uint64_t c : cycles) t += c;
    return t;
  }
  uint64_t operator[](InstrCategory c) const { return cycles[(size_t)c]; }
};

enum class Trap : uint8_t { None, IllegalInstruction, MisalignedAccess, OutOfBounds };
enum class HaltReason : uint8_t { None, Ebreak, JumpToSelf, Budget, Trapped };

struct TraceEntry {
  uint32_t pc;
  uint32_t word;
  Instruction instr;
  InstrCategory category;
  uint64_t cost;  // stall + occupancy actually charged
};

class Machine {
 public:
  explicit Machine(const PositConfig& cfg, size_t mem_size = 1 << 20,
                   CostTable costs = CostTable::standard());

  void load_words(const std::vector<uint32_t>& words, uint32_t addr);
  void load_bytes(const std::vector<uint8_t>& bytes, uint32_t addr);
  void load_program(const AssembledProgram& prog) { load_words(prog.words, prog.base); }

  uint32_t pc() const { return pc_; }
  void set_pc(uint32_t pc) { pc_ = pc; }
  uint32_t gpr(int i) const { return x_[i]; }
  void set_gpr(int i, uint32_t v) {
    if (i) x_[i] = v;
  }
  uint32_t fpr_bits(int i) const { return f_[i]; }
  void set_fpr_bits(int i, uint32_t v) { f_[i] = v; }
  uint32_t prf(int i) const { return p_[i]; }
  void set_prf(int i, uint32_t v) { p_[i] = v & (uint32_t)config().pattern_mask(); }

  const PositConfig& config() const { return mel_.config(); }
  Melodica& melodica() { return mel_; }
  const Melodica& melodica() const { return mel_; }

  uint8_t read_byte(uint32_t addr) const { return mem_.at(addr); }
  uint32_t read_u32(uint32_t addr) const;
  void write_u32(uint32_t addr, uint32_t v);
  size_t memory_size() const { return mem_.size(); }

  bool halted() const { return halt_ != HaltReason::None; }
  HaltReason halt_reason() const { return halt_; }
  Trap trap() const { return trap_; }
  uint32_t trap_pc() const { return trap_pc_; }
  uint64_t cycles() const { return cycle_; }
  uint64_t instructions() const { return retired_; }

  // Executes one instruction; returns false once halted or trapped.
  bool step();

  struct RunResult {
    uint64_t instructions = 0;
    uint64_t cycles = 0;
    HaltReason halt = HaltReason::None;
    Trap trap = Trap::None;
    uint32_t trap_pc = 0;
  };
  RunResult run(uint64_t max_instructions);

  const std::vector<TraceEntry>& trace() const { return trace_; }

  // Category totals. Integer loads feeding a pmv.w.x in the same basic block
  // (and stores fed by pmv.x.w) are attributed to posit ld/st, the way those
  // accesses show up when posit data lives behind integer types.
  CycleLedger ledger() const;

  std::string format_trace() const;

 private:
  bool take_trap(Trap t);
  bool mem_check(uint32_t addr, uint32_t size, Trap* out);

  Melodica mel_;
  CostTable costs_;
  std::vector<uint8_t> mem_;
  uint32_t pc_ = 0;
  std::array<uint32_t, 32> x_{};
  std::array<uint32_t, 32> f_{};
  std::array<uint32_t, 32> p_{};
  std::array<uint64_t, 32> ready_x_{};
  std::array<uint64_t, 32> ready_f_{};
  std::array<uint64_t, 32> ready_p_{};
  uint64_t cycle_ = 0;
  uint64_t retired_ = 0;
  HaltReason halt_ = HaltReason::None;
  Trap trap_ = Trap::None;
  uint32_t trap_pc_ = 0;
  std::vector<TraceEntry> trace_;
};

}  // namespace clarinet

#endif
