#include "clarinet/isa.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace clarinet {

namespace {

constexpr uint8_t OPC_LOAD = 0x03, OPC_LOAD_FP = 0x07, OPC_OP_IMM = 0x13, OPC_AUIPC = 0x17,
                  OPC_STORE = 0x23, OPC_STORE_FP = 0x27, OPC_OP = 0x33, OPC_LUI = 0x37,
                  OPC_FMADD = 0x43, OPC_FMSUB = 0x47, OPC_OP_FP = 0x53, OPC_BRANCH = 0x63,
                  OPC_JALR = 0x67, OPC_JAL = 0x6F, OPC_SYSTEM = 0x73;

constexpr int f7(int funct5, int fmt) { return (funct5 << 2) | fmt; }

using RF = RegFile;
using IF = InstrFormat;

// Order must match the Mnemonic enum.
const std::vector<MnemonicInfo> kTable = {
    {Mnemonic::LUI, "lui", IF::U, OPC_LUI, -1, -1, -1, RF::X, RF::None, RF::None},
    {Mnemonic::AUIPC, "auipc", IF::U, OPC_AUIPC, -1, -1, -1, RF::X, RF::None, RF::None},
    {Mnemonic::JAL, "jal", IF::J, OPC_JAL, -1, -1, -1, RF::X, RF::None, RF::None},
    {Mnemonic::JALR, "jalr", IF::I, OPC_JALR, 0, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::BEQ, "beq", IF::B, OPC_BRANCH, 0, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::BNE, "bne", IF::B, OPC_BRANCH, 1, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::BLT, "blt", IF::B, OPC_BRANCH, 4, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::BGE, "bge", IF::B, OPC_BRANCH, 5, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::BLTU, "bltu", IF::B, OPC_BRANCH, 6, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::BGEU, "bgeu", IF::B, OPC_BRANCH, 7, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::LB, "lb", IF::I, OPC_LOAD, 0, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::LH, "lh", IF::I, OPC_LOAD, 1, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::LW, "lw", IF::I, OPC_LOAD, 2, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::LBU, "lbu", IF::I, OPC_LOAD, 4, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::LHU, "lhu", IF::I, OPC_LOAD, 5, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::SB, "sb", IF::S, OPC_STORE, 0, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::SH, "sh", IF::S, OPC_STORE, 1, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::SW, "sw", IF::S, OPC_STORE, 2, -1, -1, RF::None, RF::X, RF::X},
    {Mnemonic::ADDI, "addi", IF::I, OPC_OP_IMM, 0, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::SLTI, "slti", IF::I, OPC_OP_IMM, 2, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::SLTIU, "sltiu", IF::I, OPC_OP_IMM, 3, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::XORI, "xori", IF::I, OPC_OP_IMM, 4, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::ORI, "ori", IF::I, OPC_OP_IMM, 6, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::ANDI, "andi", IF::I, OPC_OP_IMM, 7, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::SLLI, "slli", IF::I, OPC_OP_IMM, 1, 0x00, -1, RF::X, RF::X, RF::None},
    {Mnemonic::SRLI, "srli", IF::I, OPC_OP_IMM, 5, 0x00, -1, RF::X, RF::X, RF::None},
    {Mnemonic::SRAI, "srai", IF::I, OPC_OP_IMM, 5, 0x20, -1, RF::X, RF::X, RF::None},
    {Mnemonic::ADD, "add", IF::R, OPC_OP, 0, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::SUB, "sub", IF::R, OPC_OP, 0, 0x20, -1, RF::X, RF::X, RF::X},
    {Mnemonic::SLL, "sll", IF::R, OPC_OP, 1, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::SLT, "slt", IF::R, OPC_OP, 2, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::SLTU, "sltu", IF::R, OPC_OP, 3, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::XOR, "xor", IF::R, OPC_OP, 4, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::SRL, "srl", IF::R, OPC_OP, 5, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::SRA, "sra", IF::R, OPC_OP, 5, 0x20, -1, RF::X, RF::X, RF::X},
    {Mnemonic::OR, "or", IF::R, OPC_OP, 6, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::AND, "and", IF::R, OPC_OP, 7, 0x00, -1, RF::X, RF::X, RF::X},
    {Mnemonic::MUL, "mul", IF::R, OPC_OP, 0, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::MULH, "mulh", IF::R, OPC_OP, 1, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::MULHSU, "mulhsu", IF::R, OPC_OP, 2, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::MULHU, "mulhu", IF::R, OPC_OP, 3, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::DIV, "div", IF::R, OPC_OP, 4, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::DIVU, "divu", IF::R, OPC_OP, 5, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::REM, "rem", IF::R, OPC_OP, 6, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::REMU, "remu", IF::R, OPC_OP, 7, 0x01, -1, RF::X, RF::X, RF::X},
    {Mnemonic::FLW, "flw", IF::I, OPC_LOAD_FP, 2, -1, -1, RF::F, RF::X, RF::None},
    {Mnemonic::FSW, "fsw", IF::S, OPC_STORE_FP, 2, -1, -1, RF::None, RF::X, RF::F},
    {Mnemonic::FMADD_S, "fmadd.s", IF::R4, OPC_FMADD, 0, -1, -1, RF::F, RF::F, RF::F},
    {Mnemonic::FMSUB_S, "fmsub.s", IF::R4, OPC_FMSUB, 0, -1, -1, RF::F, RF::F, RF::F},
    {Mnemonic::FADD_S, "fadd.s", IF::R, OPC_OP_FP, 0, f7(0x00, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FSUB_S, "fsub.s", IF::R, OPC_OP_FP, 0, f7(0x01, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FMUL_S, "fmul.s", IF::R, OPC_OP_FP, 0, f7(0x02, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FDIV_S, "fdiv.s", IF::R, OPC_OP_FP, 0, f7(0x03, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FSQRT_S, "fsqrt.s", IF::R, OPC_OP_FP, 0, f7(0x0B, 0), 0x00, RF::F, RF::F, RF::None},
    {Mnemonic::FSGNJ_S, "fsgnj.s", IF::R, OPC_OP_FP, 0, f7(0x04, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FSGNJN_S, "fsgnjn.s", IF::R, OPC_OP_FP, 1, f7(0x04, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FSGNJX_S, "fsgnjx.s", IF::R, OPC_OP_FP, 2, f7(0x04, 0), -1, RF::F, RF::F, RF::F},
    {Mnemonic::FCVT_W_S, "fcvt.w.s", IF::R, OPC_OP_FP, 0, f7(0x18, 0), 0x00, RF::X, RF::F, RF::None},
    {Mnemonic::FCVT_WU_S, "fcvt.wu.s", IF::R, OPC_OP_FP, 0, f7(0x18, 0), 0x01, RF::X, RF::F, RF::None},
    {Mnemonic::FCVT_S_W, "fcvt.s.w", IF::R, OPC_OP_FP, 0, f7(0x1A, 0), 0x00, RF::F, RF::X, RF::None},
    {Mnemonic::FCVT_S_WU, "fcvt.s.wu", IF::R, OPC_OP_FP, 0, f7(0x1A, 0), 0x01, RF::F, RF::X, RF::None},
    {Mnemonic::FMV_X_W, "fmv.x.w", IF::R, OPC_OP_FP, 0, f7(0x1C, 0), 0x00, RF::X, RF::F, RF::None},
    {Mnemonic::FMV_W_X, "fmv.w.x", IF::R, OPC_OP_FP, 0, f7(0x1E, 0), 0x00, RF::F, RF::X, RF::None},
    // Posit space: four consecutive function codes under fmt=10.
    {Mnemonic::FMA_P, "fma.p", IF::R, OPC_OP_FP, 0, f7(0x00, kPositFmt), -1, RF::None, RF::P, RF::P},
    {Mnemonic::FMS_P, "fms.p", IF::R, OPC_OP_FP, 0, f7(0x01, kPositFmt), -1, RF::None, RF::P, RF::P},
    {Mnemonic::FDA_P, "fda.p", IF::R, OPC_OP_FP, 0, f7(0x02, kPositFmt), -1, RF::None, RF::P, RF::P},
    {Mnemonic::FDS_P, "fds.p", IF::R, OPC_OP_FP, 0, f7(0x03, kPositFmt), -1, RF::None, RF::P, RF::P},
    // Conversion group: fmt encodes the result type, rs2 selects the source.
    {Mnemonic::FCVT_R_P, "fcvt.r.p", IF::R, OPC_OP_FP, 0, f7(0x08, kPositFmt), kRs2SelPosit, RF::None, RF::P, RF::None},
    {Mnemonic::FCVT_P_R, "fcvt.p.r", IF::R, OPC_OP_FP, 0, f7(0x08, kPositFmt), kRs2SelQuire, RF::P, RF::None, RF::None},
    {Mnemonic::FCVT_P_S, "fcvt.p.s", IF::R, OPC_OP_FP, 0, f7(0x08, kPositFmt), kRs2SelBinary32, RF::P, RF::F, RF::None},
    {Mnemonic::FCVT_S_P, "fcvt.s.p", IF::R, OPC_OP_FP, 0, f7(0x08, 0), kRs2SelPosit, RF::F, RF::P, RF::None},
    {Mnemonic::PLW, "plw", IF::I, OPC_LOAD_FP, kPositWidthFunct3, -1, -1, RF::P, RF::X, RF::None},
    {Mnemonic::PSW, "psw", IF::S, OPC_STORE_FP, kPositWidthFunct3, -1, -1, RF::None, RF::X, RF::P},
    {Mnemonic::PMV_X_W, "pmv.x.w", IF::R, OPC_OP_FP, 0, f7(0x1C, kPositFmt), kRs2SelPosit, RF::X, RF::P, RF::None},
    {Mnemonic::PMV_W_X, "pmv.w.x", IF::R, OPC_OP_FP, 0, f7(0x1E, kPositFmt), kRs2SelBinary32, RF::P, RF::X, RF::None},
    {Mnemonic::ECALL, "ecall", IF::Sys, OPC_SYSTEM, 0, -1, -1, RF::None, RF::None, RF::None},
    {Mnemonic::EBREAK, "ebreak", IF::Sys, OPC_SYSTEM, 0, -1, -1, RF::None, RF::None, RF::None},
    {Mnemonic::CSRRS, "csrrs", IF::Sys, OPC_SYSTEM, 2, -1, -1, RF::X, RF::X, RF::None},
    {Mnemonic::ILLEGAL, "illegal", IF::Sys, 0, -1, -1, -1, RF::None, RF::None, RF::None},
};

void check_reg(uint8_t r) {
  if (r >= 32) throw std::out_of_range("register index out of range");
}

void check_imm(int32_t imm, int bits) {  // signed range
  const int32_t lo = -(1 << (bits - 1)), hi = (1 << (bits - 1)) - 1;
  if (imm < lo || imm > hi) throw std::out_of_range("immediate out of range");
}

uint32_t enc_b_imm(int32_t imm) {
  check_imm(imm, 13);
  if (imm & 1) throw std::out_of_range("branch offset must be even");
  uint32_t u = (uint32_t)imm;
  return ((u >> 12) & 1) << 31 | ((u >> 5) & 0x3F) << 25 | ((u >> 1) & 0xF) << 8 |
         ((u >> 11) & 1) << 7;
}

uint32_t enc_j_imm(int32_t imm) {
  check_imm(imm, 21);
  if (imm & 1) throw std::out_of_range("jump offset must be even");
  uint32_t u = (uint32_t)imm;
  return ((u >> 20) & 1) << 31 | ((u >> 1) & 0x3FF) << 21 | ((u >> 11) & 1) << 20 |
         ((u >> 12) & 0xFF) << 12;
}

int32_t dec_b_imm(uint32_t w) {
  uint32_t u = ((w >> 31) & 1) << 12 | ((w >> 7) & 1) << 11 | ((w >> 25) & 0x3F) << 5 |
               ((w >> 8) & 0xF) << 1;
  return (int32_t)(u << 19) >> 19;
}

int32_t dec_j_imm(uint32_t w) {
  uint32_t u = ((w >> 31) & 1) << 20 | ((w >> 12) & 0xFF) << 12 | ((w >> 20) & 1) << 11 |
               ((w >> 21) & 0x3FF) << 1;
  return (int32_t)(u << 11) >> 11;
}

}  // namespace

const std::vector<MnemonicInfo>& mnemonic_table() { return kTable; }

const MnemonicInfo& mnemonic_info(Mnemonic m) { return kTable[(size_t)m]; }

int posit_memory_bytes(int n) { return n <= 8 ? 1 : (n <= 16 ? 2 : 4); }

uint32_t encode(const Instruction& i) {
  const MnemonicInfo& info = mnemonic_info(i.mnemonic);
  if (i.mnemonic == Mnemonic::ILLEGAL) throw std::invalid_argument("cannot encode illegal");
  check_reg(i.rd);
  check_reg(i.rs1);
  check_reg(i.rs2);
  check_reg(i.rs3);

  const uint32_t opcode = info.opcode;
  switch (info.format) {
    case IF::R: {
      uint32_t rs2f = info.rs2sel >= 0 ? (uint32_t)info.rs2sel : i.rs2;
      return (uint32_t)info.funct7 << 25 | rs2f << 20 | (uint32_t)i.rs1 << 15 |
             (uint32_t)info.funct3 << 12 | (uint32_t)i.rd << 7 | opcode;
    }
    case IF::R4:
      return (uint32_t)i.rs3 << 27 | (uint32_t)i.rs2 << 20 | (uint32_t)i.rs1 << 15 |
             (uint32_t)i.rd << 7 | opcode;
    case IF::I: {
      if (i.mnemonic == Mnemonic::SLLI || i.mnemonic == Mnemonic::SRLI ||
          i.mnemonic == Mnemonic::SRAI) {
        if (i.imm < 0 || i.imm > 31) throw std::out_of_range("shift amount out of range");
        return (uint32_t)info.funct7 << 25 | (uint32_t)i.imm << 20 | (uint32_t)i.rs1 << 15 |
               (uint32_t)info.funct3 << 12 | (uint32_t)i.rd << 7 | opcode;
      }
      check_imm(i.imm, 12);
      return ((uint32_t)i.imm & 0xFFF) << 20 | (uint32_t)i.rs1 << 15 |
             (uint32_t)info.funct3 << 12 | (uint32_t)i.rd << 7 | opcode;
    }
    case IF::S: {
      check_imm(i.imm, 12);
      uint32_t u = (uint32_t)i.imm;
      return ((u >> 5) & 0x7F) << 25 | (uint32_t)i.rs2 << 20 | (uint32_t)i.rs1 << 15 |
             (uint32_t)info.funct3 << 12 | (u & 0x1F) << 7 | opcode;
    }
    case IF::B:
      return enc_b_imm(i.imm) | (uint32_t)i.rs2 << 20 | (uint32_t)i.rs1 << 15 |
             (uint32_t)info.funct3 << 12 | opcode;
    case IF::U:
      if (i.imm < 0 || i.imm > 0xFFFFF) throw std::out_of_range("20-bit immediate out of range");
      return (uint32_t)i.imm << 12 | (uint32_t)i.rd << 7 | opcode;
    case IF::J:
      return enc_j_imm(i.imm) | (uint32_t)i.rd << 7 | opcode;
    case IF::Sys:
      if (i.mnemonic == Mnemonic::ECALL) return 0x00000073;
      if (i.mnemonic == Mnemonic::EBREAK) return 0x00100073;
      if (i.imm < 0 || i.imm > 0xFFF) throw std::out_of_range("csr out of range");
      return (uint32_t)i.imm << 20 | (uint32_t)i.rs1 << 15 | 2u << 12 | (uint32_t)i.rd << 7 |
             opcode;
  }
  throw std::invalid_argument("unreachable");
}

Instruction decode(uint32_t w) {
  Instruction i;
  const uint32_t opcode = w & 0x7F;
  const uint32_t rd = (w >> 7) & 0x1F;
  const uint32_t f3 = (w >> 12) & 7;
  const uint32_t rs1 = (w >> 15) & 0x1F;
  const uint32_t rs2 = (w >> 20) & 0x1F;
  const uint32_t f7 = w >> 25;
  const int32_t imm_i = (int32_t)w >> 20;

  auto ok = [&](Mnemonic m) {
    i.mnemonic = m;
    return i;
  };
  auto regs_r = [&](Mnemonic m) {
    const MnemonicInfo& info = mnemonic_info(m);
    i.rd = info.rd == RF::None ? 0 : (uint8_t)rd;
    i.rs1 = info.rs1 == RF::None ? 0 : (uint8_t)rs1;
    i.rs2 = (info.rs2 == RF::None || info.rs2sel >= 0) ? 0 : (uint8_t)rs2;
    return ok(m);
  };

  switch (opcode) {
    case OPC_LUI:
      i.rd = rd;
      i.imm = (int32_t)(w >> 12);
      return ok(Mnemonic::LUI);
    case OPC_AUIPC:
      i.rd = rd;
      i.imm = (int32_t)(w >> 12);
      return ok(Mnemonic::AUIPC);
    case OPC_JAL:
      i.rd = rd;
      i.imm = dec_j_imm(w);
      return ok(Mnemonic::JAL);
    case OPC_JALR:
      if (f3 != 0) break;
      i.rd = rd;
      i.rs1 = rs1;
      i.imm = imm_i;
      return ok(Mnemonic::JALR);
    case OPC_BRANCH: {
      Mnemonic m;
      switch (f3) {
        case 0: m = Mnemonic::BEQ; break;
        case 1: m = Mnemonic::BNE; break;
        case 4: m = Mnemonic::BLT; break;
        case 5: m = Mnemonic::BGE; break;
        case 6: m = Mnemonic::BLTU; break;
        case 7: m = Mnemonic::BGEU; break;
        default: m = Mnemonic::ILLEGAL; break;
      }
      if (m == Mnemonic::ILLEGAL) break;
      i.rs1 = rs1;
      i.rs2 = rs2;
      i.imm = dec_b_imm(w);
      return ok(m);
    }
    case OPC_LOAD: {
      Mnemonic m;
      switch (f3) {
        case 0: m = Mnemonic::LB; break;
        case 1: m = Mnemonic::LH; break;
        case 2: m = Mnemonic::LW; break;
        case 4: m = Mnemonic::LBU; break;
        case 5: m = Mnemonic::LHU; break;
        default: m = Mnemonic::ILLEGAL; break;
      }
      if (m == Mnemonic::ILLEGAL) break;
      i.rd = rd;
      i.rs1 = rs1;
      i.imm = imm_i;
      return ok(m);
    }
    case OPC_LOAD_FP: {
      if (f3 != 2 && f3 != (uint32_t)kPositWidthFunct3) break;
      i.rd = rd;
      i.rs1 = rs1;
      i.imm = imm_i;
      return ok(f3 == 2 ? Mnemonic::FLW : Mnemonic::PLW);
    }
    case OPC_STORE:
    case OPC_STORE_FP: {
      Mnemonic m = Mnemonic::ILLEGAL;
      if (opcode == OPC_STORE) {
        if (f3 == 0) m = Mnemonic::SB;
        else if (f3 == 1) m = Mnemonic::SH;
        else if (f3 == 2) m = Mnemonic::SW;
      } else {
        if (f3 == 2) m = Mnemonic::FSW;
        else if (f3 == (uint32_t)kPositWidthFunct3) m = Mnemonic::PSW;
      }
      if (m == Mnemonic::ILLEGAL) break;
      i.rs1 = rs1;
      i.rs2 = rs2;
      i.imm = (int32_t)((f7 << 5 | rd) << 20) >> 20;
      return ok(m);
    }
    case OPC_OP_IMM: {
      i.rd = rd;
      i.rs1 = rs1;
      switch (f3) {
        case 0: i.imm = imm_i; return ok(Mnemonic::ADDI);
        case 2: i.imm = imm_i; return ok(Mnemonic::SLTI);
        case 3: i.imm = imm_i; return ok(Mnemonic::SLTIU);
        case 4: i.imm = imm_i; return ok(Mnemonic::XORI);
        case 6: i.imm = imm_i; return ok(Mnemonic::ORI);
        case 7: i.imm = imm_i; return ok(Mnemonic::ANDI);
        case 1:
          if (f7 != 0) break;
          i.imm = rs2;
          return ok(Mnemonic::SLLI);
        case 5:
          if (f7 == 0x00) {
            i.imm = rs2;
            return ok(Mnemonic::SRLI);
          }
          if (f7 == 0x20) {
            i.imm = rs2;
            return ok(Mnemonic::SRAI);
          }
          break;
      }
      break;
    }
    case OPC_OP: {
      if (f7 != 0x00 && f7 != 0x20 && f7 != 0x01) break;
      static const Mnemonic base[8] = {Mnemonic::ADD, Mnemonic::SLL, Mnemonic::SLT,
                                       Mnemonic::SLTU, Mnemonic::XOR, Mnemonic::SRL,
                                       Mnemonic::OR, Mnemonic::AND};
      static const Mnemonic muldiv[8] = {Mnemonic::MUL, Mnemonic::MULH, Mnemonic::MULHSU,
                                         Mnemonic::MULHU, Mnemonic::DIV, Mnemonic::DIVU,
                                         Mnemonic::REM, Mnemonic::REMU};
      Mnemonic m;
      if (f7 == 0x01) m = muldiv[f3];
      else if (f7 == 0x20) {
        if (f3 == 0) m = Mnemonic::SUB;
        else if (f3 == 5) m = Mnemonic::SRA;
        else break;
      } else m = base[f3];
      i.rd = rd;
      i.rs1 = rs1;
      i.rs2 = rs2;
      return ok(m);
    }
    case OPC_FMADD:
    case OPC_FMSUB: {
      if (((w >> 25) & 3) != 0 || f3 != 0) break;  // fmt = S, rm = RNE only
      i.rd = rd;
      i.rs1 = rs1;
      i.rs2 = rs2;
      i.rs3 = w >> 27;
      return ok(opcode == OPC_FMADD ? Mnemonic::FMADD_S : Mnemonic::FMSUB_S);
    }
    case OPC_OP_FP: {
      for (const MnemonicInfo& info : kTable) {
        if (info.format != IF::R || info.opcode != OPC_OP_FP) continue;
        if ((uint32_t)info.funct7 != f7) continue;
        if ((uint32_t)info.funct3 != f3) continue;
        if (info.rs2sel >= 0 && (uint32_t)info.rs2sel != rs2) continue;
        return regs_r(info.mnemonic);
      }
      break;
    }
    case OPC_SYSTEM: {
      if (w == 0x00000073) return ok(Mnemonic::ECALL);
      if (w == 0x00100073) return ok(Mnemonic::EBREAK);
      if (f3 == 2) {
        i.rd = rd;
        i.rs1 = rs1;
        i.imm = (int32_t)(w >> 20);
        return ok(Mnemonic::CSRRS);
      }
      break;
    }
    default: break;
  }
  return Instruction{};  // ILLEGAL
}

std::string disassemble(const Instruction& i) {
  const MnemonicInfo& info = mnemonic_info(i.mnemonic);
  auto reg = [](RegFile f, uint8_t r) {
    const char* prefix = f == RF::X ? "x" : (f == RF::F ? "f" : "p");
    return std::string(prefix) + std::to_string(r);
  };
  std::ostringstream os;
  os << info.name;
  switch (i.mnemonic) {
    case Mnemonic::ECALL:
    case Mnemonic::EBREAK:
    case Mnemonic::ILLEGAL:
      return os.str();
    case Mnemonic::LUI:
    case Mnemonic::AUIPC:
      os << " " << reg(RF::X, i.rd) << ", 0x" << std::hex << i.imm;
      return os.str();
    case Mnemonic::JAL:
      os << " " << reg(RF::X, i.rd) << ", " << std::dec << i.imm;
      return os.str();
    case Mnemonic::JALR:
      os << " " << reg(RF::X, i.rd) << ", " << reg(RF::X, i.rs1) << ", " << i.imm;
      return os.str();
    case Mnemonic::CSRRS:
      os << " " << reg(RF::X, i.rd) << ", 0x" << std::hex << i.imm << std::dec << ", "
         << reg(RF::X, i.rs1);
      return os.str();
    case Mnemonic::FMADD_S:
    case Mnemonic::FMSUB_S:
      os << " " << reg(RF::F, i.rd) << ", " << reg(RF::F, i.rs1) << ", " << reg(RF::F, i.rs2)
         << ", " << reg(RF::F, i.rs3);
      return os.str();
    default: break;
  }

  switch (info.format) {
    case IF::I:
      if (info.opcode == OPC_LOAD || info.opcode == OPC_LOAD_FP)
        os << " " << reg(info.rd, i.rd) << ", " << i.imm << "(" << reg(info.rs1, i.rs1) << ")";
      else
        os << " " << reg(info.rd, i.rd) << ", " << reg(info.rs1, i.rs1) << ", " << i.imm;
      break;
    case IF::S:
      os << " " << reg(info.rs2, i.rs2) << ", " << i.imm << "(" << reg(info.rs1, i.rs1) << ")";
      break;
    case IF::B:
      os << " " << reg(RF::X, i.rs1) << ", " << reg(RF::X, i.rs2) << ", " << i.imm;
      break;
    case IF::R: {
      bool first = true;
      auto emit = [&](RegFile f, uint8_t r) {
        if (f == RF::None) return;
        os << (first ? " " : ", ") << reg(f, r);
        first = false;
      };
      emit(info.rd, i.rd);
      emit(info.rs1, i.rs1);
      if (info.rs2sel < 0) emit(info.rs2, i.rs2);
      break;
    }
    default: break;
  }
  return os.str();
}

std::string encoding_table_csv() {
  std::ostringstream os;
  os << "mnemonic,format,opcode,funct3,funct7,funct5,fmt,rs2sel\n";
  auto fmt_name = [](InstrFormat f) {
    switch (f) {
      case IF::R: return "R";
      case IF::R4: return "R4";
      case IF::I: return "I";
      case IF::S: return "S";
      case IF::B: return "B";
      case IF::U: return "U";
      case IF::J: return "J";
      default: return "SYS";
    }
  };
  os << std::hex;
  for (const MnemonicInfo& m : kTable) {
    if (m.mnemonic == Mnemonic::ILLEGAL) continue;
    os << m.name << "," << fmt_name(m.format) << ",0x" << (int)m.opcode << ",";
    if (m.funct3 >= 0) os << m.funct3;
    os << ",";
    if (m.funct7 >= 0) os << "0x" << m.funct7;
    os << ",";
    if (m.format == IF::R && m.opcode == OPC_OP_FP && m.funct7 >= 0)
      os << "0x" << (m.funct7 >> 2) << ",0b" << ((m.funct7 >> 1) & 1) << ((m.funct7 >> 0) & 1);
    else
      os << ",";
    os << ",";
    if (m.rs2sel >= 0) os << "0x" << m.rs2sel;
    os << "\n";
  }
  return os.str();
}

}  // namespace clarinet
