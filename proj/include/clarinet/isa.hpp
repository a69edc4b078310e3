#ifndef CLARINET_ISA_HPP
#define CLARINET_ISA_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace clarinet {

// RV32IMF subset plus the posit extension. The posit instructions reuse the
// standard major opcodes; R-format posit instructions carry fmt = 10 in bits
// 26:25, converter sources are selected through rs2 (posit 0x10, quire 0x11)
// and posit loads/stores use width code 110.
enum class Mnemonic : uint8_t {
  LUI, AUIPC, JAL, JALR,
  BEQ, BNE, BLT, BGE, BLTU, BGEU,
  LB, LH, LW, LBU, LHU, SB, SH, SW,
  ADDI, SLTI, SLTIU, XORI, ORI, ANDI, SLLI, SRLI, SRAI,
  ADD, SUB, SLL, SLT, SLTU, XOR, SRL, SRA, OR, AND,
  MUL, MULH, MULHSU, MULHU, DIV, DIVU, REM, REMU,
  FLW, FSW,
  FMADD_S, FMSUB_S,
  FADD_S, FSUB_S, FMUL_S, FDIV_S, FSQRT_S,
  FSGNJ_S, FSGNJN_S, FSGNJX_S,
  FCVT_W_S, FCVT_WU_S, FCVT_S_W, FCVT_S_WU,
  FMV_X_W, FMV_W_X,
  FMA_P, FMS_P, FDA_P, FDS_P,
  FCVT_R_P, FCVT_P_R, FCVT_P_S, FCVT_S_P,
  PLW, PSW, PMV_X_W, PMV_W_X,
  ECALL, EBREAK, CSRRS,
  ILLEGAL,
};

enum class RegFile : uint8_t { X, F, P, None };

enum class InstrFormat : uint8_t { R, R4, I, S, B, U, J, Sys };

struct Instruction {
  Mnemonic mnemonic = Mnemonic::ILLEGAL;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  uint8_t rs3 = 0;
  int32_t imm = 0;

  bool operator==(const Instruction&) const = default;
};

// Static description of one mnemonic: encoding fields and operand files.
struct MnemonicInfo {
  Mnemonic mnemonic;
  const char* name;
  InstrFormat format;
  uint8_t opcode;
  int funct3;   // -1 when the field is an immediate slice
  int funct7;   // R-format function field (funct5<<2 | fmt for the FP space)
  int rs2sel;   // fixed rs2 selector value, or -1 when rs2 is an operand
  RegFile rd, rs1, rs2;
};

const MnemonicInfo& mnemonic_info(Mnemonic m);
const std::vector<MnemonicInfo>& mnemonic_table();

uint32_t encode(const Instruction& i);        // throws on bad registers/imm
Instruction decode(uint32_t word);            // unknown words -> ILLEGAL
std::string disassemble(const Instruction& i);

// CSV encoding table (one row per mnemonic) for golden tests and docs.
std::string encoding_table_csv();

constexpr int kPositFmt = 0b10;       // fmt code introduced for posit operands
constexpr int kRs2SelPosit = 0x10;    // rs2 source selector: posit value
constexpr int kRs2SelQuire = 0x11;    // rs2 source selector: quire value
constexpr int kRs2SelBinary32 = 0x00; // rs2 source selector: binary32 value
constexpr int kPositWidthFunct3 = 0b110;  // load/store width code for the PRF

// Memory image width of one posit element (1, 2 or 4 bytes).
int posit_memory_bytes(int n);

}  // namespace clarinet

#endif
