// clarinet: posit/quire arithmetic, a Clarinet-style RV32IMF+posit emulator,
// and the error/cycle study harness behind one command-line entry point.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clarinet/assembler.hpp"
#include "clarinet/emulator.hpp"
#include "clarinet/error_study.hpp"
#include "clarinet/kernels.hpp"
#include "clarinet/pgm.hpp"

using namespace clarinet;

namespace {

constexpr int kExitOk = 0, kExitUsage = 1, kExitTrap = 2, kExitStudyConfig = 3;

struct WidthOptions {
  int n = 32;
  int es = -1;  // -1: default for the width
  bool allow_any = false;

  PositConfig config() const {
    PositConfig cfg = PositConfig::with_default_es(n);
    if (es >= 0) cfg.es = es;
    if (!allow_any && n != 8 && n != 16 && n != 24 && n != 32)
      throw CLI::ValidationError("--n", "width must be 8, 16, 24 or 32 (or pass --allow-any-width)");
    if (!cfg.valid())
      throw CLI::ValidationError("--n/--es", "2 <= n <= 64 and 0 <= es <= 4 required");
    return cfg;
  }
};

void add_width_options(CLI::App* cmd, WidthOptions& w) {
  cmd->add_option("--n", w.n, "posit width")->capture_default_str();
  cmd->add_option("--es", w.es, "exponent field width (default: per-width standard)");
  cmd->add_flag("--allow-any-width", w.allow_any, "accept widths outside {8,16,24,32}");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

uint64_t parse_u64(const std::string& s) {
  return std::stoull(s, nullptr, 0);
}

int cmd_convert(const WidthOptions& w, const std::string& from_bits, const std::string& from_real,
                const std::string& from_f32) {
  const PositConfig cfg = w.config();
  PositBits p{0, cfg};
  if (!from_bits.empty()) {
    p = {parse_u64(from_bits) & cfg.pattern_mask(), cfg};
  } else if (!from_real.empty()) {
    p = posit_from_double(std::stod(from_real), cfg);
  } else if (!from_f32.empty()) {
    p = posit_from_binary32((uint32_t)parse_u64(from_f32), cfg);
  } else {
    std::cerr << "convert: one of --from-bits/--from-real/--from-f32-bits is required\n";
    return kExitUsage;
  }

  const UnpackedPosit u = extract(p);
  std::printf("pattern : 0x%0*llx  (n=%d es=%d)\n", (cfg.n + 3) / 4,
              (unsigned long long)p.pattern, cfg.n, cfg.es);
  if (u.kind == PositKind::Zero) {
    std::printf("value   : 0 (zero)\n");
  } else if (u.kind == PositKind::NaR) {
    std::printf("value   : NaR\n");
  } else {
    const int k = u.scale >> cfg.es;
    const int exp = u.scale - (k << cfg.es);
    std::printf("fields  : s=%d k=%d exp=%d frac=0x%llx/%d\n", u.negative ? 1 : 0, k, exp,
                (unsigned long long)(uint64_t)u.frac, u.frac_width);
    std::printf("scale   : %d\n", u.scale);
    std::printf("value   : %s = %.17g\n", rational_string(value_as_rational(u)).c_str(),
                value_as_double(u));
  }
  std::printf("binary32: 0x%08x\n", binary32_from_posit(p));
  return kExitOk;
}

int cmd_encodings() {
  std::cout << encoding_table_csv();
  return kExitOk;
}

int cmd_asm(const std::string& input, const std::string& out, uint32_t base, bool labels) {
  AssembledProgram prog = assemble(read_file(input), base);
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    for (uint32_t w : prog.words) {
      char b[4] = {(char)w, (char)(w >> 8), (char)(w >> 16), (char)(w >> 24)};
      f.write(b, 4);
    }
    std::printf("wrote %zu words to %s (base 0x%x)\n", prog.words.size(), out.c_str(), prog.base);
  } else {
    uint32_t addr = prog.base;
    for (uint32_t w : prog.words) {
      std::printf("%08x: %08x  %s\n", addr, w, disassemble(decode(w)).c_str());
      addr += 4;
    }
  }
  if (labels)
    for (const auto& [name, addr] : prog.labels) std::printf("%-24s 0x%08x\n", name.c_str(), addr);
  return kExitOk;
}

void apply_set(Machine& m, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw std::runtime_error("--set expects reg=value: " + assignment);
  const std::string reg = assignment.substr(0, eq), val = assignment.substr(eq + 1);
  // reuse the assembler's register names by assembling nothing: parse manually
  auto parse_idx = [&](char prefix) -> int {
    if (reg.size() >= 2 && reg[0] == prefix) return std::stoi(reg.substr(1));
    return -1;
  };
  static const std::map<std::string, int> abi = {
      {"ra", 1},  {"sp", 2},  {"gp", 3},  {"tp", 4},  {"t0", 5},  {"t1", 6},  {"t2", 7},
      {"s0", 8},  {"s1", 9},  {"a0", 10}, {"a1", 11}, {"a2", 12}, {"a3", 13}, {"a4", 14},
      {"a5", 15}, {"a6", 16}, {"a7", 17}, {"s2", 18}, {"s3", 19}, {"s4", 20}, {"s5", 21},
      {"s6", 22}, {"s7", 23}, {"s8", 24}, {"s9", 25}, {"s10", 26}, {"s11", 27}, {"t3", 28},
      {"t4", 29}, {"t5", 30}, {"t6", 31}};
  if (auto it = abi.find(reg); it != abi.end()) {
    m.set_gpr(it->second, (uint32_t)parse_u64(val));
    return;
  }
  int idx;
  if ((idx = parse_idx('x')) >= 0) {
    m.set_gpr(idx, (uint32_t)parse_u64(val));
  } else if ((idx = parse_idx('f')) >= 0) {
    if (val.find_first_of(".eE") != std::string::npos && val.rfind("0x", 0) != 0) {
      float f = std::stof(val);
      uint32_t b;
      std::memcpy(&b, &f, 4);
      m.set_fpr_bits(idx, b);
    } else {
      m.set_fpr_bits(idx, (uint32_t)parse_u64(val));
    }
  } else if ((idx = parse_idx('p')) >= 0) {
    m.set_prf(idx, (uint32_t)parse_u64(val));
  } else {
    throw std::runtime_error("--set: unknown register " + reg);
  }
}

void print_ledger(const Machine& m) {
  const CycleLedger ledger = m.ledger();
  std::printf("cycles  : %llu over %llu instructions\n", (unsigned long long)m.cycles(),
              (unsigned long long)m.instructions());
  std::printf("ledger  :\n");
  for (int c = 0; c < kCategoryCount; ++c) {
    const double pct = m.cycles() ? 100.0 * (double)ledger.cycles[c] / (double)m.cycles() : 0.0;
    std::printf("  %-20s %12llu  (%5.1f%%)\n", category_name((InstrCategory)c),
                (unsigned long long)ledger.cycles[c], pct);
  }
}

int cmd_run(const WidthOptions& w, const std::string& input, uint32_t base, uint64_t steps,
            const std::vector<std::string>& sets, const std::vector<std::string>& loads,
            const std::string& trace_out, const std::vector<std::string>& mem_dumps,
            bool null_timing, size_t mem_size) {
  const PositConfig cfg = w.config();
  Machine m(cfg, mem_size, null_timing ? CostTable::null_model() : CostTable::standard());

  if (input.size() > 4 && input.substr(input.size() - 4) == ".bin") {
    const std::string raw = read_file(input);
    std::vector<uint8_t> bytes(raw.begin(), raw.end());
    m.load_bytes(bytes, base);
  } else {
    m.load_program(assemble(read_file(input), base));
  }
  for (const std::string& l : loads) {
    const size_t at = l.rfind('@');
    if (at == std::string::npos) throw std::runtime_error("--load expects file@addr");
    const std::string raw = read_file(l.substr(0, at));
    m.load_bytes(std::vector<uint8_t>(raw.begin(), raw.end()),
                 (uint32_t)parse_u64(l.substr(at + 1)));
  }
  for (const std::string& s : sets) apply_set(m, s);
  m.set_pc(base);

  const Machine::RunResult r = m.run(steps);

  if (!trace_out.empty()) {
    std::ofstream f(trace_out);
    f << m.format_trace();
  }

  switch (r.halt) {
    case HaltReason::Ebreak: std::printf("halted  : ebreak\n"); break;
    case HaltReason::JumpToSelf: std::printf("halted  : jump-to-self\n"); break;
    case HaltReason::Budget: std::printf("halted  : instruction budget exhausted\n"); break;
    case HaltReason::Trapped: {
      const char* what = r.trap == Trap::IllegalInstruction ? "illegal instruction"
                         : r.trap == Trap::MisalignedAccess ? "misaligned access"
                                                            : "out-of-bounds access";
      std::printf("trap    : %s at pc=0x%08x\n", what, r.trap_pc);
      break;
    }
    default: break;
  }
  print_ledger(m);

  std::printf("registers (nonzero):\n");
  for (int i = 1; i < 32; ++i)
    if (m.gpr(i)) std::printf("  x%-3d = 0x%08x (%d)\n", i, m.gpr(i), (int32_t)m.gpr(i));
  for (int i = 0; i < 32; ++i)
    if (m.fpr_bits(i)) {
      float f;
      uint32_t b = m.fpr_bits(i);
      std::memcpy(&f, &b, 4);
      std::printf("  f%-3d = 0x%08x (%g)\n", i, b, f);
    }
  for (int i = 0; i < 32; ++i)
    if (m.prf(i))
      std::printf("  p%-3d = 0x%0*x (%.9g)\n", i, (cfg.n + 3) / 4, m.prf(i),
                  value_as_double({m.prf(i), cfg}));

  for (const std::string& d : mem_dumps) {
    const size_t colon = d.find(':');
    if (colon == std::string::npos) throw std::runtime_error("--dump-mem expects addr:len");
    uint32_t addr = (uint32_t)parse_u64(d.substr(0, colon));
    uint32_t len = (uint32_t)parse_u64(d.substr(colon + 1));
    std::printf("memory 0x%08x..0x%08x:\n", addr, addr + len - 1);
    for (uint32_t i = 0; i < len; ++i) {
      if (i % 16 == 0) std::printf("  %08x:", addr + i);
      std::printf(" %02x", m.read_byte(addr + i));
      if (i % 16 == 15 || i + 1 == len) std::printf("\n");
    }
  }
  return r.halt == HaltReason::Trapped ? kExitTrap : kExitOk;
}

std::vector<NumericMode> parse_modes(const std::vector<std::string>& names) {
  std::vector<NumericMode> modes;
  for (const std::string& n : names) modes.push_back(NumericMode::parse(n));
  return modes;
}

int cmd_study(const std::string& kernel_name_, const std::vector<std::string>& mode_names,
              const std::vector<int>& sizes, const std::string& range, int trials, uint64_t seed,
              const std::string& out) {
  const Kernel kernel = parse_kernel(kernel_name_);
  const std::vector<NumericMode> modes = parse_modes(mode_names);
  for (const NumericMode& m : modes)
    if (kernel == Kernel::Givens && m.tag == ModeTag::PN)
      throw ModeError(
          "xgivens cannot run in pure posit mode (no posit square-root hardware); "
          "use qN or f32-qN");

  const size_t colon = range.find(':');
  if (colon == std::string::npos) throw ModeError("--range expects lo:hi");
  const double lo = std::stod(range.substr(0, colon)), hi = std::stod(range.substr(colon + 1));
  if (!(lo < hi)) throw ModeError("--range: lo must be < hi");

  const std::vector<ErrorReport> rows = run_error_study(kernel, sizes, lo, hi, trials, modes, seed);
  const std::string csv = study_csv(rows);
  if (!out.empty()) {
    std::ofstream f(out);
    f << csv;
    std::printf("wrote %s\n", out.c_str());
  }
  std::cout << csv;
  return kExitOk;
}

int cmd_audit(const std::string& kernel_name_, const std::string& mode_name, int size,
              uint64_t seed) {
  const Kernel kernel = parse_kernel(kernel_name_);
  const NumericMode mode = NumericMode::parse(mode_name);
  if (mode.tag == ModeTag::F64Ref || mode.tag == ModeTag::F32)
    throw ModeError("audit needs a posit mode (pN, qN or f32-qN)");
  if (kernel == Kernel::Givens && mode.tag == ModeTag::PN)
    throw ModeError("xgivens cannot run in pure posit mode; use qN or f32-qN");
  const KernelAudit a = audit_kernel(kernel, size, mode, seed);
  std::printf("kernel=%s size=%d mode=%s\n", kernel_name(kernel), size, mode.name().c_str());
  std::printf("quire inits            : %llu\n", (unsigned long long)a.inits);
  std::printf("quire reads            : %llu\n", (unsigned long long)a.reads);
  std::printf("quire accumulations    : %llu\n", (unsigned long long)a.accumulates);
  std::printf("accumulations per read : %g\n", a.accums_per_read);
  return kExitOk;
}

Eigen::MatrixXd synthetic_blob(int h, int w, double cx, double cy) {
  Eigen::MatrixXd img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double dx = c - cx, dy = r - cy;
      img(r, c) = 220.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * 6.0 * 6.0)) + 16.0;
    }
  return img;
}

int cmd_flow(const std::string& frame1, const std::string& frame2, const std::string& synthetic,
             int window, const std::vector<std::string>& mode_names, bool normalize,
             const std::string& prefix) {
  Eigen::MatrixXd f1, f2;
  if (!synthetic.empty()) {
    int w = 0, h = 0;
    double dx = 0, dy = 0;
    if (std::sscanf(synthetic.c_str(), "%dx%d:%lf,%lf", &w, &h, &dx, &dy) != 4)
      throw ModeError("--synthetic expects WxH:dx,dy");
    f1 = synthetic_blob(h, w, w / 2.0, h / 2.0);
    f2 = synthetic_blob(h, w, w / 2.0 + dx, h / 2.0 + dy);
  } else {
    if (frame1.empty() || frame2.empty())
      throw ModeError("flow needs --frame1/--frame2 PGMs or --synthetic");
    f1 = read_pgm(frame1);
    f2 = read_pgm(frame2);
  }

  const FlowField ref = lucas_kanade_velocity(f1, f2, window, NumericMode::f64(), normalize);
  std::printf("%-10s %14s %14s\n", "mode", "rms_error", "max_error");
  for (const NumericMode& mode : parse_modes(mode_names)) {
    const FlowField got = lucas_kanade_velocity(f1, f2, window, mode, normalize);
    Eigen::MatrixXd err = Eigen::MatrixXd::Zero(f1.rows(), f1.cols());
    double sq = 0, mx = 0;
    long count = 0;
    for (Eigen::Index r = 0; r < f1.rows(); ++r)
      for (Eigen::Index c = 0; c < f1.cols(); ++c)
        if (ref.valid(r, c) && got.valid(r, c)) {
          const double du = got.u(r, c) - ref.u(r, c), dv = got.v(r, c) - ref.v(r, c);
          const double e = std::sqrt(du * du + dv * dv);
          err(r, c) = e;
          sq += e * e;
          if (e > mx) mx = e;
          ++count;
        }
    const double rms = count ? std::sqrt(sq / count) : 0.0;
    std::printf("%-10s %14.6e %14.6e\n", mode.name().c_str(), rms, mx);
    if (!prefix.empty()) {
      std::ofstream fu(prefix + "_" + mode.name() + "_u.csv");
      fu << csv_matrix(got.u);
      std::ofstream fv(prefix + "_" + mode.name() + "_v.csv");
      fv << csv_matrix(got.v);
      std::ofstream fe(prefix + "_" + mode.name() + "_err.csv");
      fe << csv_matrix(err);
    }
  }
  if (!prefix.empty()) std::printf("heat maps written with prefix %s_\n", prefix.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posit/quire arithmetic, Clarinet-style emulator and study harness"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand("convert", "decode/encode a single posit value");
  WidthOptions conv_w;
  add_width_options(convert, conv_w);
  std::string from_bits, from_real, from_f32;
  convert->add_option("--from-bits", from_bits, "posit bit pattern, e.g. 0x40");
  convert->add_option("--from-real", from_real, "real value, e.g. 1.5");
  convert->add_option("--from-f32-bits", from_f32, "binary32 bit pattern");

  // asm
  auto* asmc = app.add_subcommand("asm", "assemble a program");
  std::string asm_in, asm_out;
  uint32_t asm_base = 0;
  bool asm_labels = false;
  asmc->add_option("input", asm_in, "assembly source")->required();
  asmc->add_option("--out", asm_out, "write raw little-endian words to this file");
  asmc->add_option("--base", asm_base, "load address")->capture_default_str();
  asmc->add_flag("--labels", asm_labels, "print the label table");

  // run
  auto* runc = app.add_subcommand("run", "assemble (or load) and execute a program");
  WidthOptions run_w;
  add_width_options(runc, run_w);
  std::string run_in, run_trace;
  uint32_t run_base = 0;
  uint64_t run_steps = 10'000'000;
  size_t run_mem = 1 << 20;
  bool run_null_timing = false;
  std::vector<std::string> run_sets, run_loads, run_dumps;
  runc->add_option("input", run_in, "assembly source or raw .bin image")->required();
  runc->add_option("--base", run_base, "load address / entry point")->capture_default_str();
  runc->add_option("--steps", run_steps, "instruction budget")->capture_default_str();
  runc->add_option("--mem-size", run_mem, "memory size in bytes")->capture_default_str();
  runc->add_option("--set", run_sets, "preset a register, e.g. a0=0x2000 or f0=1.5");
  runc->add_option("--load", run_loads, "load a binary image, file@addr");
  runc->add_option("--trace", run_trace, "write the retired-instruction trace to a file");
  runc->add_option("--dump-mem", run_dumps, "dump a memory range addr:len after the run");
  runc->add_flag("--null-timing", run_null_timing, "disable the latency model (all costs zero)");

  // study
  auto* study = app.add_subcommand("study", "Monte Carlo error study vs the binary64 reference");
  std::string study_kernel = "dot", study_range = "0:1", study_out;
  std::vector<std::string> study_modes = {"f32", "q32"};
  std::vector<int> study_sizes = {10, 100, 1000, 10000};
  int study_trials = 1000;
  uint64_t study_seed = 42;
  study->add_option("--kernel", study_kernel, "dot|gemv|gemm|givens")->capture_default_str();
  study->add_option("--modes", study_modes, "comma-separated modes")->delimiter(',')->capture_default_str();
  study->add_option("--sizes", study_sizes, "problem sizes")->delimiter(',')->capture_default_str();
  study->add_option("--range", study_range, "input range lo:hi")->capture_default_str();
  study->add_option("--trials", study_trials, "Monte Carlo trials")->capture_default_str();
  study->add_option("--seed", study_seed, "PRNG seed")->capture_default_str();
  study->add_option("--out", study_out, "also write the CSV report here");

  // audit
  auto* audit = app.add_subcommand("audit", "count quire init/read/accumulate ops of one kernel run");
  std::string audit_kernel_name = "dot", audit_mode = "q32";
  int audit_size = 4096;
  uint64_t audit_seed = 42;
  audit->add_option("--kernel", audit_kernel_name, "dot|gemv|gemm|givens")->capture_default_str();
  audit->add_option("--size", audit_size, "problem size")->capture_default_str();
  audit->add_option("--mode", audit_mode, "posit mode (pN, qN, f32-qN)")->capture_default_str();
  audit->add_option("--seed", audit_seed, "PRNG seed")->capture_default_str();

  // flow
  auto* flow = app.add_subcommand("flow", "Lucas-Kanade velocity and error heat maps");
  std::string flow_f1, flow_f2, flow_synth, flow_prefix;
  int flow_window = 5;
  bool flow_norm = false;
  std::vector<std::string> flow_modes = {"f32", "f32-q32", "q32"};
  flow->add_option("--frame1", flow_f1, "first frame (PGM P5)");
  flow->add_option("--frame2", flow_f2, "second frame (PGM P5)");
  flow->add_option("--synthetic", flow_synth, "generate frames, WxH:dx,dy");
  flow->add_option("--window", flow_window, "odd window size")->capture_default_str();
  flow->add_option("--modes", flow_modes, "modes to compare")->delimiter(',')->capture_default_str();
  flow->add_flag("--normalize", flow_norm, "rescale 0..255 pixels to 0..16");
  flow->add_option("--out-prefix", flow_prefix, "write u/v/error CSV matrices with this prefix");

  // encodings
  app.add_subcommand("encodings", "print the instruction encoding table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (convert->parsed()) return cmd_convert(conv_w, from_bits, from_real, from_f32);
    if (asmc->parsed()) return cmd_asm(asm_in, asm_out, asm_base, asm_labels);
    if (runc->parsed())
      return cmd_run(run_w, run_in, run_base, run_steps, run_sets, run_loads, run_trace,
                     run_dumps, run_null_timing, run_mem);
    if (study->parsed())
      return cmd_study(study_kernel, study_modes, study_sizes, study_range, study_trials,
                       study_seed, study_out);
    if (audit->parsed()) return cmd_audit(audit_kernel_name, audit_mode, audit_size, audit_seed);
    if (flow->parsed())
      return cmd_flow(flow_f1, flow_f2, flow_synth, flow_window, flow_modes, flow_norm,
                      flow_prefix);
    return cmd_encodings();
  } catch (const AsmError& e) {
    std::cerr << "assembler error: " << e.what() << "\n";
    return kExitTrap;
  } catch (const ModeError& e) {
    std::cerr << "study configuration error: " << e.what() << "\n";
    return kExitStudyConfig;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
