#include "clarinet/assembler.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <optional>
#include <sstream>

namespace clarinet {

namespace {

struct Token {
  std::string text;
};

std::string strip_comment(const std::string& line) {
  size_t best = line.size();
  for (const char* c : {"#", ";", "//"}) {
    size_t p = line.find(c);
    if (p != std::string::npos && p < best) best = p;
  }
  return line.substr(0, best);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = (char)std::tolower((unsigned char)c);
  return s;
}

// One source statement, post label-stripping.
struct Statement {
  int line = 0;
  uint32_t addr = 0;
  std::string mnemonic;             // lowercase, or ".word" style directive
  std::vector<std::string> args;    // comma-separated operand strings
};

std::optional<int> parse_reg_name(const std::string& t, RegFile* file) {
  static const std::map<std::string, int> x_alias = {
      {"zero", 0}, {"ra", 1}, {"sp", 2},  {"gp", 3},  {"tp", 4},  {"t0", 5},  {"t1", 6},
      {"t2", 7},   {"s0", 8}, {"fp", 8},  {"s1", 9},  {"a0", 10}, {"a1", 11}, {"a2", 12},
      {"a3", 13},  {"a4", 14}, {"a5", 15}, {"a6", 16}, {"a7", 17}, {"s2", 18}, {"s3", 19},
      {"s4", 20},  {"s5", 21}, {"s6", 22}, {"s7", 23}, {"s8", 24}, {"s9", 25}, {"s10", 26},
      {"s11", 27}, {"t3", 28}, {"t4", 29}, {"t5", 30}, {"t6", 31}};
  static const std::map<std::string, int> f_alias = [] {
    std::map<std::string, int> m;
    for (int i = 0; i < 8; ++i) m["ft" + std::to_string(i)] = i;
    m["fs0"] = 8;
    m["fs1"] = 9;
    for (int i = 0; i < 8; ++i) m["fa" + std::to_string(i)] = 10 + i;
    for (int i = 2; i < 12; ++i) m["fs" + std::to_string(i)] = 16 + i;
    for (int i = 8; i < 12; ++i) m["ft" + std::to_string(i)] = 20 + i;
    return m;
  }();

  const std::string s = lower(t);
  auto numbered = [&](char prefix) -> std::optional<int> {
    if (s.size() < 2 || s[0] != prefix) return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 0 || v > 31) return std::nullopt;
    return v;
  };
  if (auto v = numbered('x')) {
    *file = RegFile::X;
    return v;
  }
  if (auto v = numbered('f')) {
    *file = RegFile::F;
    return v;
  }
  if (auto v = numbered('p')) {
    *file = RegFile::P;
    return v;
  }
  if (auto it = x_alias.find(s); it != x_alias.end()) {
    *file = RegFile::X;
    return it->second;
  }
  if (auto it = f_alias.find(s); it != f_alias.end()) {
    *file = RegFile::F;
    return it->second;
  }
  return std::nullopt;
}

bool is_label_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha((unsigned char)s[0]) && s[0] != '_' && s[0] != '.') return false;
  for (char c : s)
    if (!std::isalnum((unsigned char)c) && c != '_' && c != '.') return false;
  RegFile f;
  return !parse_reg_name(s, &f).has_value();
}

class Assembler {
 public:
  explicit Assembler(uint32_t base) : base_(base) {}

  AssembledProgram run(const std::string& source) {
    parse(source);
    layout();
    emit();
    AssembledProgram out;
    out.base = base_;
    out.labels = labels_;
    while (image_.size() % 4) image_.push_back(0);
    for (size_t i = 0; i < image_.size(); i += 4)
      out.words.push_back((uint32_t)image_[i] | (uint32_t)image_[i + 1] << 8 |
                          (uint32_t)image_[i + 2] << 16 | (uint32_t)image_[i + 3] << 24);
    return out;
  }

 private:
  uint32_t base_;
  std::vector<Statement> stmts_;
  std::vector<std::pair<std::string, int>> pending_labels_;  // name, line
  std::map<std::string, uint32_t> labels_;
  std::vector<uint8_t> image_;

  void parse(const std::string& source) {
    std::istringstream in(source);
    std::string raw;
    int lineno = 0;
    std::vector<std::pair<std::string, int>> waiting;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = trim(strip_comment(raw));
      while (!line.empty()) {
        size_t colon = line.find(':');
        size_t sp = line.find_first_of(" \t");
        if (colon != std::string::npos && (sp == std::string::npos || colon < sp)) {
          std::string name = trim(line.substr(0, colon));
          if (!is_label_name(name)) throw AsmError(lineno, "bad label '" + name + "'");
          waiting.emplace_back(name, lineno);
          line = trim(line.substr(colon + 1));
          continue;
        }
        break;
      }
      if (line.empty()) continue;

      Statement st;
      st.line = lineno;
      size_t sp = line.find_first_of(" \t");
      st.mnemonic = lower(line.substr(0, sp));
      if (sp != std::string::npos) {
        std::string rest = line.substr(sp);
        std::string cur;
        for (char c : rest) {
          if (c == ',') {
            st.args.push_back(trim(cur));
            cur.clear();
          } else {
            cur += c;
          }
        }
        cur = trim(cur);
        if (!cur.empty()) st.args.push_back(cur);
        for (const std::string& a : st.args)
          if (a.empty()) throw AsmError(lineno, "empty operand");
      }
      for (auto& w : waiting) pending_per_stmt_.emplace_back(stmts_.size(), w);
      waiting.clear();
      stmts_.push_back(std::move(st));
    }
    for (auto& w : waiting) pending_per_stmt_.emplace_back(stmts_.size(), w);  // trailing labels
  }

  std::vector<std::pair<size_t, std::pair<std::string, int>>> pending_per_stmt_;

  int64_t parse_int(const Statement& st, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 0);
    if (end != s.c_str() + s.size() || errno != 0)
      throw AsmError(st.line, "bad integer '" + s + "'");
    return v;
  }

  bool is_int(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    (void)std::strtoll(s.c_str(), &end, 0);
    return end == s.c_str() + s.size() && !s.empty() && errno == 0;
  }

  uint32_t size_of(const Statement& st) {
    const std::string& m = st.mnemonic;
    if (m[0] == '.') {
      size_t n = st.args.size();
      if (m == ".word" || m == ".float") return 4 * (uint32_t)n;
      if (m == ".half") return 2 * (uint32_t)n;
      if (m == ".byte") return (uint32_t)n;
      if (m == ".zero") {
        if (n != 1) throw AsmError(st.line, ".zero takes one size");
        return (uint32_t)parse_int(st, st.args[0]);
      }
      throw AsmError(st.line, "unknown directive " + m);
    }
    if (m == "li") {
      if (st.args.size() != 2) throw AsmError(st.line, "li takes rd, value");
      if (!is_int(st.args[1])) return 8;  // label address: lui+addi
      int64_t v = parse_int(st, st.args[1]);
      return (v >= -2048 && v <= 2047) ? 4 : 8;
    }
    return 4;
  }

  void layout() {
    uint32_t addr = base_;
    size_t pi = 0;
    for (size_t i = 0; i < stmts_.size(); ++i) {
      for (; pi < pending_per_stmt_.size() && pending_per_stmt_[pi].first == i; ++pi)
        define_label(pending_per_stmt_[pi].second, addr);
      stmts_[i].addr = addr;
      addr += size_of(stmts_[i]);
    }
    for (; pi < pending_per_stmt_.size(); ++pi) define_label(pending_per_stmt_[pi].second, addr);
  }

  void define_label(const std::pair<std::string, int>& label, uint32_t addr) {
    if (labels_.count(label.first))
      throw AsmError(label.second, "duplicate label '" + label.first + "'");
    labels_[label.first] = addr;
  }

  uint32_t label_addr(const Statement& st, const std::string& name) {
    auto it = labels_.find(name);
    if (it == labels_.end()) throw AsmError(st.line, "undefined label '" + name + "'");
    return it->second;
  }

  int32_t branch_target(const Statement& st, const std::string& arg) {
    if (is_int(arg)) return (int32_t)parse_int(st, arg);
    return (int32_t)(label_addr(st, arg) - st.addr);
  }

  uint8_t want_reg(const Statement& st, const std::string& arg, RegFile want) {
    RegFile got;
    auto v = parse_reg_name(arg, &got);
    if (!v || got != want) {
      const char* names[] = {"integer (x)", "float (f)", "posit (p)"};
      throw AsmError(st.line, "expected " + std::string(names[(int)want]) + " register, got '" +
                                  arg + "'");
    }
    return (uint8_t)*v;
  }

  // "imm(xN)" or "(xN)"
  void parse_mem(const Statement& st, const std::string& arg, int32_t* imm, uint8_t* rs1) {
    size_t open = arg.find('(');
    size_t close = arg.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw AsmError(st.line, "expected imm(reg), got '" + arg + "'");
    std::string off = trim(arg.substr(0, open));
    *imm = off.empty() ? 0 : (int32_t)parse_int(st, off);
    *rs1 = want_reg(st, trim(arg.substr(open + 1, close - open - 1)), RegFile::X);
  }

  void need_args(const Statement& st, size_t n) {
    if (st.args.size() != n)
      throw AsmError(st.line, st.mnemonic + " takes " + std::to_string(n) + " operand(s)");
  }

  void emit_word(uint32_t w) {
    image_.push_back((uint8_t)w);
    image_.push_back((uint8_t)(w >> 8));
    image_.push_back((uint8_t)(w >> 16));
    image_.push_back((uint8_t)(w >> 24));
  }

  void emit_instr(const Statement& st, const Instruction& i) {
    if ((base_ + image_.size()) % 4 != 0)
      throw AsmError(st.line, "instruction at misaligned address (pad data with .zero)");
    try {
      emit_word(encode(i));
    } catch (const std::exception& e) {
      throw AsmError(st.line, e.what());
    }
  }

  void emit() {
    for (const Statement& st : stmts_) emit_one(st);
  }

  Mnemonic find_mnemonic(const std::string& name) {
    for (const MnemonicInfo& mi : mnemonic_table())
      if (name == mi.name && mi.mnemonic != Mnemonic::ILLEGAL) return mi.mnemonic;
    return Mnemonic::ILLEGAL;
  }

  void emit_one(const Statement& st) {
    const std::string& m = st.mnemonic;

    if (m[0] == '.') {
      emit_directive(st);
      return;
    }

    // pseudo-instructions
    if (m == "nop") {
      need_args(st, 0);
      emit_instr(st, {Mnemonic::ADDI, 0, 0, 0, 0, 0});
      return;
    }
    if (m == "mv") {
      need_args(st, 2);
      emit_instr(st, {Mnemonic::ADDI, want_reg(st, st.args[0], RegFile::X),
                      want_reg(st, st.args[1], RegFile::X), 0, 0, 0});
      return;
    }
    if (m == "li") {
      need_args(st, 2);
      uint8_t rd = want_reg(st, st.args[0], RegFile::X);
      int64_t v = is_int(st.args[1]) ? parse_int(st, st.args[1])
                                     : (int64_t)label_addr(st, st.args[1]);
      if (v < INT32_MIN || v > (int64_t)UINT32_MAX) throw AsmError(st.line, "li value out of range");
      int32_t imm = (int32_t)v;
      bool two_words = size_of(st) == 8;
      if (!two_words) {
        emit_instr(st, {Mnemonic::ADDI, rd, 0, 0, 0, imm});
      } else {
        int32_t lo = ((imm & 0xFFF) ^ 0x800) - 0x800;
        uint32_t hi = ((uint32_t)(imm - lo) >> 12) & 0xFFFFF;
        emit_instr(st, {Mnemonic::LUI, rd, 0, 0, 0, (int32_t)hi});
        emit_instr(st, {Mnemonic::ADDI, rd, rd, 0, 0, lo});
      }
      return;
    }
    if (m == "j") {
      need_args(st, 1);
      emit_instr(st, {Mnemonic::JAL, 0, 0, 0, 0, branch_target(st, st.args[0])});
      return;
    }
    if (m == "jr") {
      need_args(st, 1);
      emit_instr(st, {Mnemonic::JALR, 0, want_reg(st, st.args[0], RegFile::X), 0, 0, 0});
      return;
    }
    if (m == "ret") {
      need_args(st, 0);
      emit_instr(st, {Mnemonic::JALR, 0, 1, 0, 0, 0});
      return;
    }
    if (m == "beqz" || m == "bnez") {
      need_args(st, 2);
      emit_instr(st, {m == "beqz" ? Mnemonic::BEQ : Mnemonic::BNE,
                      0, want_reg(st, st.args[0], RegFile::X), 0, 0,
                      branch_target(st, st.args[1])});
      return;
    }
    if (m == "halt") {
      need_args(st, 0);
      emit_instr(st, {Mnemonic::EBREAK, 0, 0, 0, 0, 0});
      return;
    }
    if (m == "fmv.s" || m == "fneg.s" || m == "fabs.s") {
      need_args(st, 2);
      Mnemonic mm = m == "fmv.s" ? Mnemonic::FSGNJ_S
                                 : (m == "fneg.s" ? Mnemonic::FSGNJN_S : Mnemonic::FSGNJX_S);
      uint8_t rd = want_reg(st, st.args[0], RegFile::F);
      uint8_t rs = want_reg(st, st.args[1], RegFile::F);
      emit_instr(st, {mm, rd, rs, rs, 0, 0});
      return;
    }
    if (m == "rdcycle" || m == "rdcycleh") {
      need_args(st, 1);
      emit_instr(st, {Mnemonic::CSRRS, want_reg(st, st.args[0], RegFile::X), 0, 0, 0,
                      m == "rdcycle" ? 0xC00 : 0xC80});
      return;
    }

    Mnemonic mn = find_mnemonic(m);
    if (mn == Mnemonic::ILLEGAL) throw AsmError(st.line, "unknown mnemonic '" + m + "'");
    const MnemonicInfo& info = mnemonic_info(mn);
    Instruction i;
    i.mnemonic = mn;

    switch (mn) {
      case Mnemonic::ECALL:
      case Mnemonic::EBREAK:
        need_args(st, 0);
        break;
      case Mnemonic::LUI:
      case Mnemonic::AUIPC:
        need_args(st, 2);
        i.rd = want_reg(st, st.args[0], RegFile::X);
        i.imm = (int32_t)parse_int(st, st.args[1]);
        break;
      case Mnemonic::JAL:
        if (st.args.size() == 1) {
          i.rd = 1;
          i.imm = branch_target(st, st.args[0]);
        } else {
          need_args(st, 2);
          i.rd = want_reg(st, st.args[0], RegFile::X);
          i.imm = branch_target(st, st.args[1]);
        }
        break;
      case Mnemonic::JALR:
        need_args(st, 3);
        i.rd = want_reg(st, st.args[0], RegFile::X);
        i.rs1 = want_reg(st, st.args[1], RegFile::X);
        i.imm = (int32_t)parse_int(st, st.args[2]);
        break;
      case Mnemonic::CSRRS:
        need_args(st, 3);
        i.rd = want_reg(st, st.args[0], RegFile::X);
        i.imm = (int32_t)parse_int(st, st.args[1]);
        i.rs1 = want_reg(st, st.args[2], RegFile::X);
        break;
      case Mnemonic::FMADD_S:
      case Mnemonic::FMSUB_S:
        need_args(st, 4);
        i.rd = want_reg(st, st.args[0], RegFile::F);
        i.rs1 = want_reg(st, st.args[1], RegFile::F);
        i.rs2 = want_reg(st, st.args[2], RegFile::F);
        i.rs3 = want_reg(st, st.args[3], RegFile::F);
        break;
      default:
        switch (info.format) {
          case InstrFormat::B:
            need_args(st, 3);
            i.rs1 = want_reg(st, st.args[0], RegFile::X);
            i.rs2 = want_reg(st, st.args[1], RegFile::X);
            i.imm = branch_target(st, st.args[2]);
            break;
          case InstrFormat::I:
            if (info.opcode == 0x03 || info.opcode == 0x07) {  // loads
              need_args(st, 2);
              i.rd = want_reg(st, st.args[0], info.rd);
              parse_mem(st, st.args[1], &i.imm, &i.rs1);
            } else {
              need_args(st, 3);
              i.rd = want_reg(st, st.args[0], info.rd);
              i.rs1 = want_reg(st, st.args[1], info.rs1);
              i.imm = (int32_t)parse_int(st, st.args[2]);
            }
            break;
          case InstrFormat::S:
            need_args(st, 2);
            i.rs2 = want_reg(st, st.args[0], info.rs2);
            parse_mem(st, st.args[1], &i.imm, &i.rs1);
            break;
          case InstrFormat::R: {
            std::vector<std::pair<RegFile, uint8_t*>> slots;
            if (info.rd != RegFile::None) slots.emplace_back(info.rd, &i.rd);
            if (info.rs1 != RegFile::None) slots.emplace_back(info.rs1, &i.rs1);
            if (info.rs2 != RegFile::None && info.rs2sel < 0) slots.emplace_back(info.rs2, &i.rs2);
            need_args(st, slots.size());
            for (size_t k = 0; k < slots.size(); ++k)
              *slots[k].second = want_reg(st, st.args[k], slots[k].first);
            break;
          }
          default:
            throw AsmError(st.line, "cannot assemble '" + m + "'");
        }
    }
    emit_instr(st, i);
  }

  void emit_directive(const Statement& st) {
    const std::string& m = st.mnemonic;
    if (m == ".word" || m == ".half" || m == ".byte") {
      for (const std::string& a : st.args) {
        int64_t v = is_int(a) ? parse_int(st, a) : (int64_t)label_addr(st, a);
        if (m == ".word") {
          emit_word((uint32_t)v);
        } else if (m == ".half") {
          image_.push_back((uint8_t)v);
          image_.push_back((uint8_t)(v >> 8));
        } else {
          image_.push_back((uint8_t)v);
        }
      }
      return;
    }
    if (m == ".float") {
      for (const std::string& a : st.args) {
        errno = 0;
        char* end = nullptr;
        float f = std::strtof(a.c_str(), &end);
        if (end != a.c_str() + a.size() || errno != 0)
          throw AsmError(st.line, "bad float '" + a + "'");
        uint32_t w;
        std::memcpy(&w, &f, 4);
        emit_word(w);
      }
      return;
    }
    if (m == ".zero") {
      int64_t n = parse_int(st, st.args[0]);
      for (int64_t k = 0; k < n; ++k) image_.push_back(0);
      return;
    }
    throw AsmError(st.line, "unknown directive " + m);
  }
};

}  // namespace

AssembledProgram assemble(const std::string& source, uint32_t base) {
  return Assembler(base).run(source);
}

std::string disassemble_program(const std::vector<uint32_t>& words) {
  std::ostringstream os;
  for (uint32_t w : words) {
    Instruction i = decode(w);
    if (i.mnemonic == Mnemonic::ILLEGAL) {
      os << ".word 0x" << std::hex << w << std::dec << "\n";
    } else {
      os << disassemble(i) << "\n";
    }
  }
  return os.str();
}

}  // namespace clarinet
