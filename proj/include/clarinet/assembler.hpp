#ifndef CLARINET_ASSEMBLER_HPP
#define CLARINET_ASSEMBLER_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "clarinet/isa.hpp"

namespace clarinet {

struct AsmError : std::runtime_error {
  int line;
  AsmError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct AssembledProgram {
  std::vector<uint32_t> words;
  std::map<std::string, uint32_t> labels;  // name -> absolute byte address
  uint32_t base = 0;
};

// Line-oriented two-pass assembler.
//
//   [label:] mnemonic operands   # comment ('#', ';' and '//' all start one)
//
// Registers are x0..x31 / f0..f31 / p0..p31 plus the usual ABI names
// (zero, ra, sp, a0.., t0.., s0.., fa0.., ft0.., fs0..). Branch and jump
// targets are labels or signed byte offsets. Pseudo-instructions: nop, mv,
// li, j, jr, ret, beqz, bnez, fmv.s, fneg.s, rdcycle and halt (assembles to
// ebreak). Data directives: .word .half .byte .float .zero.
AssembledProgram assemble(const std::string& source, uint32_t base = 0);

// Canonical text for an assembled word stream (labels are not recovered;
// control flow is shown as numeric offsets, which assemble() accepts back).
std::string disassemble_program(const std::vector<uint32_t>& words);

}  // namespace clarinet

#endif
