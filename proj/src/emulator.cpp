#include "clarinet/emulator.hpp"

#include <cfenv>
#include <cmath>
#include <cstring>
#include <sstream>

namespace clarinet {

namespace {

float as_float(uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

uint32_t as_bits(float f) {
  uint32_t b;
  std::memcpy(&b, &f, 4);
  return b;
}

int32_t cvt_w_s(float f) {
  if (std::isnan(f)) return INT32_MAX;
  if (f >= 2147483648.0f) return INT32_MAX;
  if (f <= -2147483904.0f) return INT32_MIN;  // below any float rounding to >= INT32_MIN
  long r = std::lrintf(f);
  if (r > INT32_MAX) return INT32_MAX;
  if (r < INT32_MIN) return INT32_MIN;
  return (int32_t)r;
}

uint32_t cvt_wu_s(float f) {
  if (std::isnan(f)) return UINT32_MAX;
  if (f >= 4294967296.0f) return UINT32_MAX;
  if (f <= -1.0f) return 0;
  long long r = std::llrintf(f);
  if (r < 0) return 0;
  return (uint32_t)r;
}

}  // namespace

const char* category_name(InstrCategory c) {
  switch (c) {
    case InstrCategory::FloatCompute: return "float compute";
    case InstrCategory::FloatLdSt: return "float ld/st";
    case InstrCategory::PositCompute: return "posit compute";
    case InstrCategory::FloatPositInterop: return "float-posit interop";
    case InstrCategory::PositLdSt: return "posit ld/st";
    default: return "others";
  }
}

InstrCategory static_category(Mnemonic m) {
  switch (m) {
    case Mnemonic::FADD_S:
    case Mnemonic::FSUB_S:
    case Mnemonic::FMUL_S:
    case Mnemonic::FDIV_S:
    case Mnemonic::FSQRT_S:
    case Mnemonic::FMADD_S:
    case Mnemonic::FMSUB_S:
    case Mnemonic::FSGNJ_S:
    case Mnemonic::FSGNJN_S:
    case Mnemonic::FSGNJX_S:
      return InstrCategory::FloatCompute;
    case Mnemonic::FLW:
    case Mnemonic::FSW:
      return InstrCategory::FloatLdSt;
    case Mnemonic::FMA_P:
    case Mnemonic::FMS_P:
    case Mnemonic::FDA_P:
    case Mnemonic::FDS_P:
    case Mnemonic::FCVT_R_P:
    case Mnemonic::FCVT_P_R:
      return InstrCategory::PositCompute;
    case Mnemonic::FCVT_P_S:
    case Mnemonic::FCVT_S_P:
    case Mnemonic::PMV_X_W:
    case Mnemonic::PMV_W_X:
      return InstrCategory::FloatPositInterop;
    case Mnemonic::PLW:
    case Mnemonic::PSW:
      return InstrCategory::PositLdSt;
    default:
      return InstrCategory::Others;
  }
}

Machine::Machine(const PositConfig& cfg, size_t mem_size, CostTable costs)
    : mel_(cfg, LatencyModel{cfg, costs.enabled}), costs_(costs), mem_(mem_size, 0) {}

void Machine::load_words(const std::vector<uint32_t>& words, uint32_t addr) {
  for (uint32_t w : words) {
    write_u32(addr, w);
    addr += 4;
  }
}

void Machine::load_bytes(const std::vector<uint8_t>& bytes, uint32_t addr) {
  for (uint8_t b : bytes) mem_.at(addr++) = b;
}

uint32_t Machine::read_u32(uint32_t addr) const {
  return (uint32_t)mem_.at(addr) | (uint32_t)mem_.at(addr + 1) << 8 |
         (uint32_t)mem_.at(addr + 2) << 16 | (uint32_t)mem_.at(addr + 3) << 24;
}

void Machine::write_u32(uint32_t addr, uint32_t v) {
  mem_.at(addr) = (uint8_t)v;
  mem_.at(addr + 1) = (uint8_t)(v >> 8);
  mem_.at(addr + 2) = (uint8_t)(v >> 16);
  mem_.at(addr + 3) = (uint8_t)(v >> 24);
}

bool Machine::take_trap(Trap t) {
  trap_ = t;
  trap_pc_ = pc_;
  halt_ = HaltReason::Trapped;
  return false;
}

bool Machine::mem_check(uint32_t addr, uint32_t size, Trap* out) {
  if ((uint64_t)addr + size > mem_.size()) {
    *out = Trap::OutOfBounds;
    return false;
  }
  if (size > 1 && addr % size != 0) {
    *out = Trap::MisalignedAccess;
    return false;
  }
  return true;
}

bool Machine::step() {
  if (halt_ != HaltReason::None) return false;

  if (pc_ % 4 != 0) return take_trap(Trap::MisalignedAccess);
  if ((uint64_t)pc_ + 4 > mem_.size()) return take_trap(Trap::OutOfBounds);
  const uint32_t word = read_u32(pc_);
  const Instruction in = decode(word);
  if (in.mnemonic == Mnemonic::ILLEGAL) return take_trap(Trap::IllegalInstruction);
  const MnemonicInfo& info = mnemonic_info(in.mnemonic);

  // scoreboard: wait for source operands
  const uint64_t t0 = cycle_;
  uint64_t t = t0;
  auto wait_for = [&](RegFile f, uint8_t r) {
    if (f == RegFile::None) return;
    uint64_t rt = f == RegFile::X ? ready_x_[r] : (f == RegFile::F ? ready_f_[r] : ready_p_[r]);
    if (rt > t) t = rt;
  };
  wait_for(info.rs1, in.rs1);
  if (info.rs2sel < 0) wait_for(info.rs2, in.rs2);
  if (info.format == InstrFormat::R4) wait_for(RegFile::F, in.rs3);

  uint32_t next_pc = pc_ + 4;
  uint64_t charge = costs_.enabled ? costs_.base : 0;
  uint64_t result_latency = 0;  // 0 = same as charge
  RegFile dst_file = RegFile::None;
  uint8_t dst_reg = 0;

  auto set_x = [&](uint8_t rd, uint32_t v) {
    if (rd) x_[rd] = v;
    dst_file = RegFile::X;
    dst_reg = rd;
  };
  auto set_f = [&](uint8_t rd, uint32_t bits) {
    f_[rd] = bits;
    dst_file = RegFile::F;
    dst_reg = rd;
  };
  auto set_p = [&](uint8_t rd, uint32_t pat) {
    p_[rd] = pat & (uint32_t)config().pattern_mask();
    dst_file = RegFile::P;
    dst_reg = rd;
  };
  auto cost = [&](uint32_t c) { charge = costs_.enabled ? c : 0; };

  const uint32_t a = x_[in.rs1];
  const uint32_t b = x_[in.rs2];

  switch (in.mnemonic) {
    case Mnemonic::LUI: set_x(in.rd, (uint32_t)in.imm << 12); break;
    case Mnemonic::AUIPC: set_x(in.rd, pc_ + ((uint32_t)in.imm << 12)); break;
    case Mnemonic::JAL:
      set_x(in.rd, pc_ + 4);
      next_pc = pc_ + (uint32_t)in.imm;
      cost(costs_.jump);
      break;
    case Mnemonic::JALR:
      set_x(in.rd, pc_ + 4);
      next_pc = (a + (uint32_t)in.imm) & ~1u;
      cost(costs_.jump);
      break;
    case Mnemonic::BEQ:
    case Mnemonic::BNE:
    case Mnemonic::BLT:
    case Mnemonic::BGE:
    case Mnemonic::BLTU:
    case Mnemonic::BGEU: {
      bool taken = false;
      switch (in.mnemonic) {
        case Mnemonic::BEQ: taken = a == b; break;
        case Mnemonic::BNE: taken = a != b; break;
        case Mnemonic::BLT: taken = (int32_t)a < (int32_t)b; break;
        case Mnemonic::BGE: taken = (int32_t)a >= (int32_t)b; break;
        case Mnemonic::BLTU: taken = a < b; break;
        default: taken = a >= b; break;
      }
      if (taken) {
        next_pc = pc_ + (uint32_t)in.imm;
        cost(costs_.taken_branch);
      }
      break;
    }
    case Mnemonic::LB:
    case Mnemonic::LH:
    case Mnemonic::LW:
    case Mnemonic::LBU:
    case Mnemonic::LHU: {
      const uint32_t addr = a + (uint32_t)in.imm;
      const uint32_t size = in.mnemonic == Mnemonic::LW    ? 4
                            : (in.mnemonic == Mnemonic::LB || in.mnemonic == Mnemonic::LBU) ? 1
                                                                                            : 2;
      Trap tr;
      if (!mem_check(addr, size, &tr)) return take_trap(tr);
      uint32_t v = 0;
      for (uint32_t k = 0; k < size; ++k) v |= (uint32_t)mem_[addr + k] << (8 * k);
      if (in.mnemonic == Mnemonic::LB) v = (uint32_t)(int32_t)(int8_t)v;
      if (in.mnemonic == Mnemonic::LH) v = (uint32_t)(int32_t)(int16_t)v;
      set_x(in.rd, v);
      cost(costs_.mem);
      break;
    }
    case Mnemonic::SB:
    case Mnemonic::SH:
    case Mnemonic::SW: {
      const uint32_t addr = a + (uint32_t)in.imm;
      const uint32_t size =
          in.mnemonic == Mnemonic::SW ? 4 : (in.mnemonic == Mnemonic::SB ? 1 : 2);
      Trap tr;
      if (!mem_check(addr, size, &tr)) return take_trap(tr);
      for (uint32_t k = 0; k < size; ++k) mem_[addr + k] = (uint8_t)(b >> (8 * k));
      cost(costs_.mem);
      break;
    }
    case Mnemonic::ADDI: set_x(in.rd, a + (uint32_t)in.imm); break;
    case Mnemonic::SLTI: set_x(in.rd, (int32_t)a < in.imm); break;
    case Mnemonic::SLTIU: set_x(in.rd, a < (uint32_t)in.imm); break;
    case Mnemonic::XORI: set_x(in.rd, a ^ (uint32_t)in.imm); break;
    case Mnemonic::ORI: set_x(in.rd, a | (uint32_t)in.imm); break;
    case Mnemonic::ANDI: set_x(in.rd, a & (uint32_t)in.imm); break;
    case Mnemonic::SLLI: set_x(in.rd, a << in.imm); break;
    case Mnemonic::SRLI: set_x(in.rd, a >> in.imm); break;
    case Mnemonic::SRAI: set_x(in.rd, (uint32_t)((int32_t)a >> in.imm)); break;
    case Mnemonic::ADD: set_x(in.rd, a + b); break;
    case Mnemonic::SUB: set_x(in.rd, a - b); break;
    case Mnemonic::SLL: set_x(in.rd, a << (b & 31)); break;
    case Mnemonic::SLT: set_x(in.rd, (int32_t)a < (int32_t)b); break;
    case Mnemonic::SLTU: set_x(in.rd, a < b); break;
    case Mnemonic::XOR: set_x(in.rd, a ^ b); break;
    case Mnemonic::SRL: set_x(in.rd, a >> (b & 31)); break;
    case Mnemonic::SRA: set_x(in.rd, (uint32_t)((int32_t)a >> (b & 31))); break;
    case Mnemonic::OR: set_x(in.rd, a | b); break;
    case Mnemonic::AND: set_x(in.rd, a & b); break;
    case Mnemonic::MUL:
      set_x(in.rd, a * b);
      cost(costs_.mul);
      break;
    case Mnemonic::MULH:
      set_x(in.rd, (uint32_t)(((int64_t)(int32_t)a * (int64_t)(int32_t)b) >> 32));
      cost(costs_.mul);
      break;
    case Mnemonic::MULHSU:
      set_x(in.rd, (uint32_t)(((int64_t)(int32_t)a * (uint64_t)b) >> 32));
      cost(costs_.mul);
      break;
    case Mnemonic::MULHU:
      set_x(in.rd, (uint32_t)(((uint64_t)a * (uint64_t)b) >> 32));
      cost(costs_.mul);
      break;
    case Mnemonic::DIV:
      set_x(in.rd, b == 0 ? UINT32_MAX
                          : (a == 0x80000000u && b == UINT32_MAX
                                 ? a
                                 : (uint32_t)((int32_t)a / (int32_t)b)));
      cost(costs_.divrem);
      break;
    case Mnemonic::DIVU:
      set_x(in.rd, b == 0 ? UINT32_MAX : a / b);
      cost(costs_.divrem);
      break;
    case Mnemonic::REM:
      set_x(in.rd, b == 0 ? a
                          : (a == 0x80000000u && b == UINT32_MAX
                                 ? 0
                                 : (uint32_t)((int32_t)a % (int32_t)b)));
      cost(costs_.divrem);
      break;
    case Mnemonic::REMU:
      set_x(in.rd, b == 0 ? a : a % b);
      cost(costs_.divrem);
      break;

    case Mnemonic::FLW: {
      const uint32_t addr = a + (uint32_t)in.imm;
      Trap tr;
      if (!mem_check(addr, 4, &tr)) return take_trap(tr);
      set_f(in.rd, read_u32(addr));
      cost(costs_.mem);
      break;
    }
    case Mnemonic::FSW: {
      const uint32_t addr = a + (uint32_t)in.imm;
      Trap tr;
      if (!mem_check(addr, 4, &tr)) return take_trap(tr);
      write_u32(addr, f_[in.rs2]);
      cost(costs_.mem);
      break;
    }
    case Mnemonic::FMADD_S:
    case Mnemonic::FMSUB_S: {
      const float x = as_float(f_[in.rs1]), y = as_float(f_[in.rs2]), z = as_float(f_[in.rs3]);
      set_f(in.rd, as_bits(std::fmaf(x, y, in.mnemonic == Mnemonic::FMADD_S ? z : -z)));
      cost(costs_.fmadd_occupancy);
      result_latency = costs_.enabled ? costs_.fmadd_result : 0;
      break;
    }
    case Mnemonic::FADD_S:
      set_f(in.rd, as_bits(as_float(f_[in.rs1]) + as_float(f_[in.rs2])));
      cost(costs_.fadd);
      break;
    case Mnemonic::FSUB_S:
      set_f(in.rd, as_bits(as_float(f_[in.rs1]) - as_float(f_[in.rs2])));
      cost(costs_.fadd);
      break;
    case Mnemonic::FMUL_S:
      set_f(in.rd, as_bits(as_float(f_[in.rs1]) * as_float(f_[in.rs2])));
      cost(costs_.fmul);
      break;
    case Mnemonic::FDIV_S:
      set_f(in.rd, as_bits(as_float(f_[in.rs1]) / as_float(f_[in.rs2])));
      cost(costs_.fdiv);
      break;
    case Mnemonic::FSQRT_S: {
      const float x = as_float(f_[in.rs1]);
      set_f(in.rd, x < 0 ? 0x7FC00000u : as_bits(std::sqrt(x)));
      cost(costs_.fsqrt);
      break;
    }
    case Mnemonic::FSGNJ_S:
      set_f(in.rd, (f_[in.rs1] & 0x7FFFFFFFu) | (f_[in.rs2] & 0x80000000u));
      cost(costs_.fmisc);
      break;
    case Mnemonic::FSGNJN_S:
      set_f(in.rd, (f_[in.rs1] & 0x7FFFFFFFu) | (~f_[in.rs2] & 0x80000000u));
      cost(costs_.fmisc);
      break;
    case Mnemonic::FSGNJX_S:
      set_f(in.rd, f_[in.rs1] ^ (f_[in.rs2] & 0x80000000u));
      cost(costs_.fmisc);
      break;
    case Mnemonic::FCVT_W_S:
      set_x(in.rd, (uint32_t)cvt_w_s(as_float(f_[in.rs1])));
      cost(costs_.fcvt_int);
      break;
    case Mnemonic::FCVT_WU_S:
      set_x(in.rd, cvt_wu_s(as_float(f_[in.rs1])));
      cost(costs_.fcvt_int);
      break;
    case Mnemonic::FCVT_S_W:
      set_f(in.rd, as_bits((float)(int32_t)a));
      cost(costs_.fcvt_int);
      break;
    case Mnemonic::FCVT_S_WU:
      set_f(in.rd, as_bits((float)a));
      cost(costs_.fcvt_int);
      break;
    case Mnemonic::FMV_X_W:
      set_x(in.rd, f_[in.rs1]);
      cost(costs_.fmisc);
      break;
    case Mnemonic::FMV_W_X:
      set_f(in.rd, a);
      cost(costs_.fmisc);
      break;

    case Mnemonic::FMA_P:
    case Mnemonic::FMS_P:
    case Mnemonic::FDA_P:
    case Mnemonic::FDS_P: {
      MelodicaOpcode op;
      switch (in.mnemonic) {
        case Mnemonic::FMA_P: op = MelodicaOpcode::FMA_P; break;
        case Mnemonic::FMS_P: op = MelodicaOpcode::FMS_P; break;
        case Mnemonic::FDA_P: op = MelodicaOpcode::FDA_P; break;
        default: op = MelodicaOpcode::FDS_P; break;
      }
      mel_.execute({op, p_[in.rs1], p_[in.rs2]}, t);
      cost(costs_.posit_issue);
      break;
    }
    case Mnemonic::FCVT_R_P:
      mel_.execute({MelodicaOpcode::FCVT_R_P, p_[in.rs1], std::nullopt}, t);
      cost(costs_.posit_issue);
      break;
    case Mnemonic::FCVT_P_R: {
      const MelodicaResponse r = mel_.execute({MelodicaOpcode::FCVT_P_R, std::nullopt, std::nullopt}, t);
      set_p(in.rd, *r.result);
      cost((uint32_t)(r.response_at - t) + costs_.melodica_response);
      break;
    }
    case Mnemonic::FCVT_P_S: {
      const MelodicaResponse r = mel_.execute({MelodicaOpcode::FCVT_P_S, f_[in.rs1], std::nullopt}, t);
      set_p(in.rd, *r.result);
      cost((uint32_t)(r.response_at - t) + costs_.melodica_response);
      break;
    }
    case Mnemonic::FCVT_S_P: {
      const MelodicaResponse r = mel_.execute({MelodicaOpcode::FCVT_S_P, p_[in.rs1], std::nullopt}, t);
      set_f(in.rd, *r.result);
      cost((uint32_t)(r.response_at - t) + costs_.melodica_response);
      break;
    }
    case Mnemonic::PLW: {
      const uint32_t addr = a + (uint32_t)in.imm;
      const uint32_t size = (uint32_t)posit_memory_bytes(config().n);
      Trap tr;
      if (!mem_check(addr, size, &tr)) return take_trap(tr);
      uint32_t v = 0;
      for (uint32_t k = 0; k < size; ++k) v |= (uint32_t)mem_[addr + k] << (8 * k);
      set_p(in.rd, v);
      cost(costs_.mem);
      break;
    }
    case Mnemonic::PSW: {
      const uint32_t addr = a + (uint32_t)in.imm;
      const uint32_t size = (uint32_t)posit_memory_bytes(config().n);
      Trap tr;
      if (!mem_check(addr, size, &tr)) return take_trap(tr);
      const uint32_t v = p_[in.rs2];
      for (uint32_t k = 0; k < size; ++k) mem_[addr + k] = (uint8_t)(v >> (8 * k));
      cost(costs_.mem);
      break;
    }
    case Mnemonic::PMV_X_W:
      // raw bits, no numeric interpretation
      set_x(in.rd, p_[in.rs1]);
      cost(costs_.fmisc);
      break;
    case Mnemonic::PMV_W_X:
      set_p(in.rd, a);
      cost(costs_.fmisc);
      break;

    case Mnemonic::EBREAK:
      halt_ = HaltReason::Ebreak;
      break;
    case Mnemonic::ECALL:
      return take_trap(Trap::IllegalInstruction);  // no environment services
    case Mnemonic::CSRRS: {
      if (in.rs1 != 0) return take_trap(Trap::IllegalInstruction);  // read-only counters
      if (in.imm == 0xC00) set_x(in.rd, (uint32_t)cycle_);
      else if (in.imm == 0xC80) set_x(in.rd, (uint32_t)(cycle_ >> 32));
      else return take_trap(Trap::IllegalInstruction);
      break;
    }
    case Mnemonic::ILLEGAL:
      return take_trap(Trap::IllegalInstruction);
  }

  cycle_ = t + charge;
  ++retired_;
  if (dst_file != RegFile::None) {
    const uint64_t ready = t + (result_latency ? result_latency : charge);
    if (dst_file == RegFile::X && dst_reg != 0) ready_x_[dst_reg] = ready;
    if (dst_file == RegFile::F) ready_f_[dst_reg] = ready;
    if (dst_file == RegFile::P) ready_p_[dst_reg] = ready;
  }
  trace_.push_back({pc_, word, in, static_category(in.mnemonic), cycle_ - t0});

  if (next_pc == pc_ && halt_ == HaltReason::None) halt_ = HaltReason::JumpToSelf;
  pc_ = next_pc;
  return halt_ == HaltReason::None;
}

Machine::RunResult Machine::run(uint64_t max_instructions) {
  RunResult r;
  while (retired_ < max_instructions) {
    if (!step()) break;
  }
  if (halt_ == HaltReason::None) halt_ = HaltReason::Budget;
  r.instructions = retired_;
  r.cycles = cycle_;
  r.halt = halt_;
  r.trap = trap_;
  r.trap_pc = trap_pc_;
  return r;
}

CycleLedger Machine::ledger() const {
  std::vector<InstrCategory> cat(trace_.size());
  for (size_t i = 0; i < trace_.size(); ++i) cat[i] = trace_[i].category;

  // Attribute integer loads/stores that carry posit data (they flank pmv
  // moves inside one basic block) to the posit ld/st category.
  std::array<int64_t, 32> last_load;
  std::array<bool, 32> from_pmv;
  last_load.fill(-1);
  from_pmv.fill(false);
  auto block_end = [&] {
    last_load.fill(-1);
    from_pmv.fill(false);
  };
  for (size_t i = 0; i < trace_.size(); ++i) {
    const Instruction& in = trace_[i].instr;
    const MnemonicInfo& info = mnemonic_info(in.mnemonic);
    switch (in.mnemonic) {
      case Mnemonic::PMV_W_X:
        if (last_load[in.rs1] >= 0) cat[last_load[in.rs1]] = InstrCategory::PositLdSt;
        break;
      case Mnemonic::SB:
      case Mnemonic::SH:
      case Mnemonic::SW:
        if (from_pmv[in.rs2]) cat[i] = InstrCategory::PositLdSt;
        break;
      default: break;
    }
    if (info.rd == RegFile::X && in.rd != 0) {
      const bool is_load = in.mnemonic == Mnemonic::LB || in.mnemonic == Mnemonic::LH ||
                           in.mnemonic == Mnemonic::LW || in.mnemonic == Mnemonic::LBU ||
                           in.mnemonic == Mnemonic::LHU;
      last_load[in.rd] = is_load ? (int64_t)i : -1;
      from_pmv[in.rd] = in.mnemonic == Mnemonic::PMV_X_W;
    }
    switch (in.mnemonic) {
      case Mnemonic::BEQ:
      case Mnemonic::BNE:
      case Mnemonic::BLT:
      case Mnemonic::BGE:
      case Mnemonic::BLTU:
      case Mnemonic::BGEU:
      case Mnemonic::JAL:
      case Mnemonic::JALR:
      case Mnemonic::EBREAK:
        block_end();
        break;
      default: break;
    }
  }

  CycleLedger ledger;
  for (size_t i = 0; i < trace_.size(); ++i) ledger.cycles[(size_t)cat[i]] += trace_[i].cost;
  return ledger;
}

std::string Machine::format_trace() const {
  std::ostringstream os;
  os << std::hex;
  for (const TraceEntry& e : trace_) {
    os << "0x";
    os.width(8);
    os.fill('0');
    os << e.pc << std::dec << "  " << disassemble(e.instr) << "  [" << category_name(e.category)
       << ", " << e.cost << "]\n"
       << std::hex;
  }
  return os.str();
}

}  // namespace clarinet
