#include "clarinet/isa.hpp"

#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "test_util.hpp"

using namespace clarinet;

namespace {

std::mt19937_64 rng(41);

uint8_t rnd_reg() { return (uint8_t)(rng() % 32); }

// random instruction with only its live fields populated
Instruction random_instruction(Mnemonic m) {
  const MnemonicInfo& info = mnemonic_info(m);
  Instruction i;
  i.mnemonic = m;
  if (info.rd != RegFile::None) i.rd = rnd_reg();
  if (info.rs1 != RegFile::None) i.rs1 = rnd_reg();
  if (info.rs2 != RegFile::None && info.rs2sel < 0) i.rs2 = rnd_reg();
  switch (info.format) {
    case InstrFormat::I:
      if (m == Mnemonic::SLLI || m == Mnemonic::SRLI || m == Mnemonic::SRAI)
        i.imm = (int32_t)(rng() % 32);
      else
        i.imm = (int32_t)(rng() % 4096) - 2048;
      break;
    case InstrFormat::S: i.imm = (int32_t)(rng() % 4096) - 2048; break;
    case InstrFormat::B: i.imm = ((int32_t)(rng() % 4096) - 2048) * 2; break;
    case InstrFormat::U: i.imm = (int32_t)(rng() % 0x100000); break;
    case InstrFormat::J: i.imm = ((int32_t)(rng() % 0x100000) - 0x80000) * 2; break;
    case InstrFormat::R4:
      i.rs3 = rnd_reg();
      break;
    case InstrFormat::Sys:
      if (m == Mnemonic::CSRRS) {
        i.imm = (int32_t)(rng() % 4096);
        i.rs1 = 0;
        i.rd = rnd_reg();
      }
      break;
    default: break;
  }
  return i;
}

void encode_decode_roundtrip() {
  int count = 0;
  while (count < 100000) {
    const auto& table = mnemonic_table();
    const Mnemonic m = table[rng() % (table.size() - 1)].mnemonic;  // skip ILLEGAL
    if (m == Mnemonic::ILLEGAL) continue;
    const Instruction i = random_instruction(m);
    const uint32_t w = encode(i);
    const Instruction back = decode(w);
    if (!(back == i)) {
      CHECK_MSG(false, "roundtrip failed for %s (word 0x%08x -> %s)",
                mnemonic_info(m).name, w, disassemble(back).c_str());
      return;
    }
    ++count;
  }
  CHECK(true);
}

void paper_encoding_rules() {
  // posit R-format instructions carry fmt bits 26:25 = 10
  for (Mnemonic m : {Mnemonic::FMA_P, Mnemonic::FMS_P, Mnemonic::FDA_P, Mnemonic::FDS_P,
                     Mnemonic::FCVT_R_P, Mnemonic::FCVT_P_R, Mnemonic::FCVT_P_S,
                     Mnemonic::PMV_X_W, Mnemonic::PMV_W_X}) {
    const uint32_t w = encode(random_instruction(m));
    CHECK_MSG(((w >> 25) & 3) == 0b10, "%s fmt != 10", mnemonic_info(m).name);
    CHECK_EQ(w & 0x7F, 0x53u);  // reuses the FP major opcode
  }

  // rs2 selector encodings: posit 0x10, quire 0x11, binary32 0x00
  const uint32_t w_rp = encode({Mnemonic::FCVT_R_P, 0, 3, 0, 0, 0});
  CHECK_EQ((w_rp >> 20) & 0x1F, 0x10u);
  const uint32_t w_pr = encode({Mnemonic::FCVT_P_R, 3, 0, 0, 0, 0});
  CHECK_EQ((w_pr >> 20) & 0x1F, 0x11u);
  const uint32_t w_ps = encode({Mnemonic::FCVT_P_S, 1, 2, 0, 0, 0});
  CHECK_EQ((w_ps >> 20) & 0x1F, 0x00u);
  const uint32_t w_sp = encode({Mnemonic::FCVT_S_P, 1, 2, 0, 0, 0});
  CHECK_EQ((w_sp >> 20) & 0x1F, 0x10u);
  CHECK_EQ((w_sp >> 25) & 3, 0b00u);  // result is binary32

  // fcvt disambiguation: the quire source selector decodes as fcvt.p.r,
  // posit source + posit result decodes as fcvt.r.p
  CHECK(decode(w_pr).mnemonic == Mnemonic::FCVT_P_R);
  CHECK(decode(w_rp).mnemonic == Mnemonic::FCVT_R_P);

  // posit loads/stores use the width code 110 under the FP load/store opcodes
  const uint32_t w_plw = encode({Mnemonic::PLW, 1, 2, 0, 0, 8});
  CHECK_EQ(w_plw & 0x7F, 0x07u);
  CHECK_EQ((w_plw >> 12) & 7, 0b110u);
  const uint32_t w_psw = encode({Mnemonic::PSW, 0, 2, 1, 0, 8});
  CHECK_EQ(w_psw & 0x7F, 0x27u);
  CHECK_EQ((w_psw >> 12) & 7, 0b110u);

  // moves encode the source file in rs2
  const uint32_t w_pxw = encode({Mnemonic::PMV_X_W, 3, 1, 0, 0, 0});
  CHECK_EQ((w_pxw >> 20) & 0x1F, 0x10u);  // source is the PRF
  const uint32_t w_pwx = encode({Mnemonic::PMV_W_X, 3, 1, 0, 0, 0});
  CHECK_EQ((w_pwx >> 20) & 0x1F, 0x00u);  // source is the GPR
}

void no_collision_with_f_extension() {
  // every encodable posit instruction decodes back to itself, never to an F
  // instruction, over randomized fields
  const std::set<Mnemonic> posit = {Mnemonic::FMA_P,    Mnemonic::FMS_P,    Mnemonic::FDA_P,
                                    Mnemonic::FDS_P,    Mnemonic::FCVT_R_P, Mnemonic::FCVT_P_R,
                                    Mnemonic::FCVT_P_S, Mnemonic::FCVT_S_P, Mnemonic::PLW,
                                    Mnemonic::PSW,      Mnemonic::PMV_X_W,  Mnemonic::PMV_W_X};
  for (Mnemonic m : posit)
    for (int i = 0; i < 500; ++i) {
      const Instruction in = random_instruction(m);
      CHECK(decode(encode(in)).mnemonic == m);
    }

  // and the whole function-field table is collision-free: no two mnemonics
  // share (opcode, funct3, funct7, rs2sel)
  std::set<std::tuple<int, int, int, int>> seen;
  for (const MnemonicInfo& info : mnemonic_table()) {
    if (info.mnemonic == Mnemonic::ILLEGAL || info.mnemonic == Mnemonic::ECALL ||
        info.mnemonic == Mnemonic::EBREAK)
      continue;
    const auto key = std::make_tuple((int)info.opcode, info.funct3, info.funct7, info.rs2sel);
    CHECK_MSG(!seen.count(key), "encoding collision for %s", info.name);
    seen.insert(key);
  }
}

void illegal_words() {
  CHECK(decode(0x00000000).mnemonic == Mnemonic::ILLEGAL);
  CHECK(decode(0xFFFFFFFF).mnemonic == Mnemonic::ILLEGAL);
  // OP-FP with fmt=11 (quad) is nothing we implement
  CHECK(decode(0x06000053 | (3u << 25)).mnemonic == Mnemonic::ILLEGAL);
  int illegal = 0;
  for (int i = 0; i < 100000; ++i) (void)decode((uint32_t)rng()), ++illegal;
  CHECK(illegal > 0);  // decode is total: no crash on any word
}

void encoding_table_golden() {
  const std::string csv = encoding_table_csv();
  CHECK(csv.find("fma.p,R,0x53,0,0x2,0x0,0b10,") != std::string::npos);
  CHECK(csv.find("fms.p,R,0x53,0,0x6,0x1,0b10,") != std::string::npos);
  CHECK(csv.find("fda.p,R,0x53,0,0xa,0x2,0b10,") != std::string::npos);
  CHECK(csv.find("fds.p,R,0x53,0,0xe,0x3,0b10,") != std::string::npos);
  CHECK(csv.find("fcvt.r.p,R,0x53,0,0x22,0x8,0b10,0x10") != std::string::npos);
  CHECK(csv.find("fcvt.p.r,R,0x53,0,0x22,0x8,0b10,0x11") != std::string::npos);
  CHECK(csv.find("fcvt.p.s,R,0x53,0,0x22,0x8,0b10,0x0") != std::string::npos);
  CHECK(csv.find("fcvt.s.p,R,0x53,0,0x20,0x8,0b00,0x10") != std::string::npos);
  CHECK(csv.find("plw,I,0x7,6,") != std::string::npos);
  CHECK(csv.find("psw,S,0x27,6,") != std::string::npos);
}

void disassembly_forms() {
  CHECK_EQ(disassemble({Mnemonic::FMA_P, 0, 1, 2, 0, 0}), std::string("fma.p p1, p2"));
  CHECK_EQ(disassemble({Mnemonic::FCVT_R_P, 0, 4, 0, 0, 0}), std::string("fcvt.r.p p4"));
  CHECK_EQ(disassemble({Mnemonic::FCVT_P_R, 5, 0, 0, 0, 0}), std::string("fcvt.p.r p5"));
  CHECK_EQ(disassemble({Mnemonic::FCVT_P_S, 1, 2, 0, 0, 0}), std::string("fcvt.p.s p1, f2"));
  CHECK_EQ(disassemble({Mnemonic::FCVT_S_P, 1, 2, 0, 0, 0}), std::string("fcvt.s.p f1, p2"));
  CHECK_EQ(disassemble({Mnemonic::PLW, 3, 2, 0, 0, 8}), std::string("plw p3, 8(x2)"));
  CHECK_EQ(disassemble({Mnemonic::PSW, 0, 2, 3, 0, -4}), std::string("psw p3, -4(x2)"));
  CHECK_EQ(disassemble({Mnemonic::PMV_X_W, 5, 6, 0, 0, 0}), std::string("pmv.x.w x5, p6"));
  CHECK_EQ(disassemble({Mnemonic::BNE, 0, 1, 2, 0, -12}), std::string("bne x1, x2, -12"));
}

void posit_memory_widths() {
  CHECK_EQ(posit_memory_bytes(8), 1);
  CHECK_EQ(posit_memory_bytes(16), 2);
  CHECK_EQ(posit_memory_bytes(24), 4);  // padded to the next byte-multiple word
  CHECK_EQ(posit_memory_bytes(32), 4);
}

}  // namespace

int main() {
  encode_decode_roundtrip();
  paper_encoding_rules();
  no_collision_with_f_extension();
  illegal_words();
  encoding_table_golden();
  disassembly_forms();
  posit_memory_widths();
  return TEST_MAIN_RESULT();
}
