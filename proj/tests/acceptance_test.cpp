// Acceptance suite: one pass/fail line per criterion, exit code = failures.

#include <chrono>
#include <cstdarg>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "clarinet/emulator.hpp"
#include "clarinet/error_study.hpp"
#include "clarinet/kernels.hpp"
#include "oracle.hpp"

using namespace clarinet;

namespace {

int failures = 0;

void verdict(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- criterion 1: exhaustive round-trip, ordering and oracle equality ----

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;

  for (const PositConfig cfg : {PositConfig{8, 0}, PositConfig{16, 1}}) {
    mpq_class prev;
    bool have_prev = false;
    const int64_t sign_bit = 1ll << (cfg.n - 1);
    for (int64_t s = -(sign_bit - 1); s < sign_bit && pass; ++s) {
      const uint64_t pattern = (uint64_t)s & cfg.pattern_mask();
      // round trip
      if (normalize(extract({pattern, cfg}), cfg).pattern != pattern) {
        pass = false;
        detail = fmt("round-trip failed at 0x%llx n=%d", (unsigned long long)pattern, cfg.n);
        break;
      }
      // exact value, via the independent field parser
      mpq_class v;
      if (oracle::classify(pattern, cfg) == oracle::Class::Zero) {
        v = 0;
      } else {
        v = oracle::posit_value(pattern, cfg);
        const mpq_class lib = oracle::rational(value_as_rational(extract({pattern, cfg})));
        if (!(lib == v)) {
          pass = false;
          detail = fmt("oracle value mismatch at 0x%llx n=%d", (unsigned long long)pattern, cfg.n);
          break;
        }
      }
      // monotone two's-complement order
      if (have_prev && !(prev < v)) {
        pass = false;
        detail = fmt("ordering violated at signed %lld n=%d", (long long)s, cfg.n);
        break;
      }
      prev = v;
      have_prev = true;
    }
  }
  const double secs = seconds_since(t0);
  if (pass && secs >= 10.0) {
    pass = false;
    detail = fmt("runtime %.1fs exceeds 10s", secs);
  }
  if (pass) detail = fmt("2^8 + 2^16 patterns, %.1fs", secs);
  verdict(1, pass, "exhaustive round-trip, value oracle and monotone order for (8,0),(16,1)",
          detail);
}

// ---- criterion 2: single-rounding quire vs exact rational oracle ----

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260810);
  bool pass = true;
  std::string detail;
  int done = 0;

  for (int trial = 0; trial < 10000 && pass; ++trial) {
    const PositConfig cfg = (trial & 1) ? PositConfig{16, 1} : PositConfig{8, 0};
    const int len = 1 + (int)(rng() % 64);
    Quire q(cfg);
    q.init({0, cfg});
    mpq_class sum = 0;
    for (int i = 0; i < len; ++i) {
      uint64_t a, b;
      do a = rng() & cfg.pattern_mask();
      while (oracle::classify(a, cfg) != oracle::Class::Regular);
      do b = rng() & cfg.pattern_mask();
      while (oracle::classify(b, cfg) != oracle::Class::Regular);
      q.accumulate(extract({a, cfg}), extract({b, cfg}), FusedOp::MulAdd);
      sum += oracle::posit_value(a, cfg) * oracle::posit_value(b, cfg);
    }
    const uint64_t want = sum == 0 ? 0 : oracle::round_to_posit(sum, cfg);
    if (q.read_posit().pattern != want) {
      pass = false;
      detail = fmt("mismatch at trial %d (n=%d len=%d)", trial, cfg.n, len);
    }
    ++done;
  }
  const double secs = seconds_since(t0);
  if (pass && secs >= 30.0) {
    pass = false;
    detail = fmt("runtime %.1fs exceeds 30s", secs);
  }
  if (pass) detail = fmt("%d dot products bit-exact, %.1fs", done, secs);
  verdict(2, pass, "quire equals the exact sum rounded once (10k random dots, n=8/16)", detail);
}

// ---- criterion 3: q32 accurate digits at lengths 10 and 10000 ----

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ErrorReport> rows =
      run_error_study(Kernel::Dot, {10, 10000}, 0.0, 1.0, 1000, {NumericMode::qn(32)}, 20260810);
  const double d10 = rows[0].accurate_digits;
  const double d10000 = rows[1].accurate_digits;
  const double secs = seconds_since(t0);

  bool pass = std::fabs(d10 - 8.8) <= 0.5 && std::fabs(d10000 - 8.2) <= 0.5;
  if (secs >= 300.0) pass = false;
  verdict(3, pass, "q32 dot digits on [0,1): 8.8 +/- 0.5 at len 10, 8.2 +/- 0.5 at len 10000",
          fmt("measured %.2f and %.2f over 1000 trials, %.1fs", d10, d10000, secs));
}

// ---- criterion 4: range-shift degradation ordering over [0,10) ----

void criterion4() {
  const std::vector<NumericMode> modes = {NumericMode::qn(32), NumericMode::pn(32),
                                          NumericMode::qn(24), NumericMode::f32()};
  const std::vector<ErrorReport> rows =
      run_error_study(Kernel::Dot, {10, 10000}, 0.0, 10.0, 1000, modes, 20260810);
  // rows: size 10 first, then size 10000, in mode order
  double drop[4];
  for (int m = 0; m < 4; ++m)
    drop[m] = 100.0 * (1.0 - rows[4 + m].accurate_digits / rows[m].accurate_digits);

  const double target[4] = {55.6, 53.94, 36.3, 18.63};
  const bool ordering = drop[0] > drop[1] && drop[1] > drop[2] && drop[2] > drop[3];
  bool magnitudes = true;
  for (int m = 0; m < 4; ++m)
    if (std::fabs(drop[m] - target[m]) > 10.0) magnitudes = false;

  verdict(4, ordering && magnitudes,
          "digit drop 10->10000 on [0,10): order q32>p32>q24>f32, within 10 points of "
          "55.6/53.94/36.3/18.63",
          fmt("measured q32=%.1f%% p32=%.1f%% q24=%.1f%% f32=%.1f%%", drop[0], drop[1], drop[2],
              drop[3]));
}

// ---- criterion 5: Givens hybrid accuracy gap ----

void criterion5() {
  const std::vector<ErrorReport> rows = run_error_study(
      Kernel::Givens, {8}, 0.0, 1.0, 1000, {NumericMode::f32(), NumericMode::qn(32)}, 20260810);
  const double f32_digits = rows[0].accurate_digits;
  const double q32_digits = rows[1].accurate_digits;
  verdict(5, q32_digits >= f32_digits + 1.5,
          "q32-f32 Givens gains >= 1.5 digits over pure f32 on 8x8, 1000 trials",
          fmt("f32 %.2f digits, q32 hybrid %.2f digits, gap %.2f", f32_digits, q32_digits,
              q32_digits - f32_digits));
}

// ---- criterion 6: cycle-model directions ----

struct DotRun {
  uint64_t total;
  CycleLedger ledger;
  uint32_t result_bits;
  uint32_t prf_bits;
};

std::string program_text(const char* name) {
  std::ifstream in(std::string(CLARINET_PROGRAMS_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DotRun run_dot(const char* program, const PositConfig& cfg, const std::vector<double>& a,
               const std::vector<double>& b) {
  Machine m(cfg, 1 << 22);
  m.load_program(assemble(program_text(program)));
  const bool posit_data = std::strcmp(program, "vdp_posits.s") == 0;
  const int elem = posit_data ? posit_memory_bytes(cfg.n) : 4;
  const uint32_t a_at = 0x10000, b_at = 0x30000, r_at = 0x50000;
  for (size_t i = 0; i < a.size(); ++i) {
    if (posit_data) {
      const uint32_t pa = (uint32_t)posit_from_double(a[i], cfg).pattern;
      const uint32_t pb = (uint32_t)posit_from_double(b[i], cfg).pattern;
      for (int k = 0; k < elem; ++k) {
        m.load_bytes({(uint8_t)(pa >> 8 * k)}, a_at + (uint32_t)i * elem + k);
        m.load_bytes({(uint8_t)(pb >> 8 * k)}, b_at + (uint32_t)i * elem + k);
      }
    } else {
      float fa = (float)a[i], fb = (float)b[i];
      uint32_t wa, wb;
      std::memcpy(&wa, &fa, 4);
      std::memcpy(&wb, &fb, 4);
      m.write_u32(a_at + (uint32_t)i * 4, wa);
      m.write_u32(b_at + (uint32_t)i * 4, wb);
    }
  }
  m.set_gpr(10, a_at);
  m.set_gpr(11, b_at);
  m.set_gpr(12, (uint32_t)a.size());
  m.set_gpr(13, r_at);
  m.set_gpr(14, (uint32_t)elem);
  const Machine::RunResult r = m.run(100'000'000);
  if (r.halt != HaltReason::Ebreak) throw std::runtime_error("dot program did not halt cleanly");
  DotRun out;
  out.total = m.cycles();
  out.ledger = m.ledger();
  out.result_bits = m.read_u32(r_at);
  out.prf_bits = m.prf(10);
  return out;
}

std::vector<double> random_vec(size_t len, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(len);
  for (double& x : v) x = rng.uniform();
  return v;
}

void criterion6() {
  // (a) 4096-element p8 dot: posit-compute cycles below the f32 run's
  //     float-compute cycles
  const std::vector<double> a = random_vec(4096, 1), b = random_vec(4096, 2);
  const DotRun p8 = run_dot("vdp_posits.s", {8, 0}, a, b);
  const DotRun f32 = run_dot("vdp_f32.s", {8, 0}, a, b);
  const uint64_t posit_compute = p8.ledger[InstrCategory::PositCompute];
  const uint64_t float_compute = f32.ledger[InstrCategory::FloatCompute];
  verdict(6, posit_compute < float_compute,
          "(a) p8 dot(4096): posit-compute cycles < f32 float-compute cycles",
          fmt("%llu vs %llu", (unsigned long long)posit_compute,
              (unsigned long long)float_compute));

  // (b) f32-p32 interop: conversion overhead dominates the posit compute
  const DotRun interop = run_dot("vdp_floats.s", {32, 2}, a, b);
  verdict(6, interop.ledger[InstrCategory::FloatPositInterop] >
                 interop.ledger[InstrCategory::PositCompute],
          "(b) f32-p32 dot(4096): interop cycles exceed posit-compute cycles",
          fmt("%llu vs %llu",
              (unsigned long long)interop.ledger[InstrCategory::FloatPositInterop],
              (unsigned long long)interop.ledger[InstrCategory::PositCompute]));

  // (c) 25-accumulation dot products: posits cost 0..40% more than floats
  const std::vector<double> a25 = random_vec(25, 3), b25 = random_vec(25, 4);
  const DotRun p25 = run_dot("vdp_floats.s", {32, 2}, a25, b25);
  const DotRun f25 = run_dot("vdp_f32.s", {32, 2}, a25, b25);
  const double ratio25 = (double)p25.total / (double)f25.total;
  verdict(6, ratio25 >= 1.0 && ratio25 <= 1.4,
          "(c) 25-element dot: posit/float total cycle ratio within [1.0, 1.4]",
          fmt("%llu vs %llu cycles, ratio %.3f", (unsigned long long)p25.total,
              (unsigned long long)f25.total, ratio25));

  // (d) length-2 dot products: posits at least twice the float cycles
  const std::vector<double> a2 = random_vec(2, 5), b2 = random_vec(2, 6);
  const DotRun p2 = run_dot("vdp_floats.s", {32, 2}, a2, b2);
  const DotRun f2 = run_dot("vdp_f32.s", {32, 2}, a2, b2);
  const double ratio2 = (double)p2.total / (double)f2.total;
  verdict(6, ratio2 >= 2.0, "(d) 2-element dot: posit cycles >= 2x float cycles",
          fmt("%llu vs %llu cycles, ratio %.2f", (unsigned long long)p2.total,
              (unsigned long long)f2.total, ratio2));
}

// ---- criterion 7: encoding golden rules + decode/encode identity ----

void criterion7() {
  bool pass = true;
  std::string detail = "all rules hold";
  const std::string csv = encoding_table_csv();

  auto require = [&](bool cond, const char* what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  };

  // fmt = 10 on every posit R-format instruction, asserted from the table
  for (const char* row : {"fma.p,R,0x53,0,0x2,0x0,0b10,", "fms.p,R,0x53,0,0x6,0x1,0b10,",
                          "fda.p,R,0x53,0,0xa,0x2,0b10,", "fds.p,R,0x53,0,0xe,0x3,0b10,",
                          "fcvt.r.p,R,0x53,0,0x22,0x8,0b10,0x10",
                          "fcvt.p.r,R,0x53,0,0x22,0x8,0b10,0x11",
                          "fcvt.p.s,R,0x53,0,0x22,0x8,0b10,0x0",
                          "fcvt.s.p,R,0x53,0,0x20,0x8,0b00,0x10",
                          "pmv.x.w,R,0x53,0,0x72,0x1c,0b10,0x10",
                          "pmv.w.x,R,0x53,0,0x7a,0x1e,0b10,0x0", "plw,I,0x7,6,",
                          "psw,S,0x27,6,"})
    require(csv.find(row) != std::string::npos, row);

  // rs2 selectors and width code, asserted from emitted words
  require(((encode({Mnemonic::FCVT_P_R, 3, 0, 0, 0, 0}) >> 20) & 0x1F) == 0x11,
          "fcvt.p.r rs2 selector");
  require(((encode({Mnemonic::FCVT_R_P, 0, 3, 0, 0, 0}) >> 20) & 0x1F) == 0x10,
          "fcvt.r.p rs2 selector");
  require(((encode({Mnemonic::PLW, 1, 2, 0, 0, 0}) >> 12) & 7) == 0b110, "plw width code");
  require(((encode({Mnemonic::PSW, 0, 2, 1, 0, 0}) >> 12) & 7) == 0b110, "psw width code");
  require(decode(encode({Mnemonic::FCVT_P_R, 3, 0, 0, 0, 0})).mnemonic == Mnemonic::FCVT_P_R,
          "quire-source disambiguation");
  require(decode(encode({Mnemonic::FCVT_R_P, 0, 3, 0, 0, 0})).mnemonic == Mnemonic::FCVT_R_P,
          "posit-source disambiguation");

  // decode(encode(i)) identity over 1e5 random instructions
  std::mt19937_64 rng(20260810);
  const auto& table = mnemonic_table();
  int count = 0;
  while (count < 100000 && pass) {
    const MnemonicInfo& info = table[rng() % (table.size() - 1)];
    Instruction i;
    i.mnemonic = info.mnemonic;
    if (info.rd != RegFile::None) i.rd = (uint8_t)(rng() % 32);
    if (info.rs1 != RegFile::None) i.rs1 = (uint8_t)(rng() % 32);
    if (info.rs2 != RegFile::None && info.rs2sel < 0) i.rs2 = (uint8_t)(rng() % 32);
    switch (info.format) {
      case InstrFormat::I:
        i.imm = (info.mnemonic == Mnemonic::SLLI || info.mnemonic == Mnemonic::SRLI ||
                 info.mnemonic == Mnemonic::SRAI)
                    ? (int32_t)(rng() % 32)
                    : (int32_t)(rng() % 4096) - 2048;
        break;
      case InstrFormat::S: i.imm = (int32_t)(rng() % 4096) - 2048; break;
      case InstrFormat::B: i.imm = ((int32_t)(rng() % 4096) - 2048) * 2; break;
      case InstrFormat::U: i.imm = (int32_t)(rng() % 0x100000); break;
      case InstrFormat::J: i.imm = ((int32_t)(rng() % 0x100000) - 0x80000) * 2; break;
      case InstrFormat::R4: i.rs3 = (uint8_t)(rng() % 32); break;
      case InstrFormat::Sys:
        if (info.mnemonic == Mnemonic::CSRRS) {
          i.imm = (int32_t)(rng() % 4096);
          i.rd = (uint8_t)(rng() % 32);
        }
        break;
      default: break;
    }
    if (!(decode(encode(i)) == i)) {
      pass = false;
      detail = fmt("decode(encode) broke for %s", info.name);
    }
    ++count;
  }
  verdict(7, pass, "encoding rules golden-tested; decode(encode) identity over 1e5 instructions",
          detail);
}

// ---- criterion 8: shipped listings bit-identical to the native library ----

void criterion8() {
  const std::vector<double> a = random_vec(16, 7), b = random_vec(16, 8);

  const DotRun posit_run = run_dot("vdp_posits.s", {8, 0}, a, b);
  const ScalarResult posit_native = xdot_full(a, b, NumericMode::qn(8));
  const bool posit_ok = posit_run.prf_bits == posit_native.bits &&
                        (posit_run.result_bits & 0xFF) == posit_native.bits;

  const DotRun interop_run = run_dot("vdp_floats.s", {32, 2}, a, b);
  const ScalarResult interop_native = xdot_full(a, b, NumericMode::f32_qn(32));
  const bool interop_ok = interop_run.result_bits == interop_native.bits;

  verdict(8, posit_ok && interop_ok,
          "dot-product listings run end-to-end, bit-identical to the native kernels",
          fmt("posit listing 0x%02x vs 0x%02x; interop listing 0x%08x vs 0x%08x",
              posit_run.prf_bits, posit_native.bits, interop_run.result_bits,
              interop_native.bits));
}

// ---- criterion 9: Table-4 style audit counts ----

void criterion9() {
  const KernelAudit dot = audit_kernel(Kernel::Dot, 4096, NumericMode::qn(32), 20260810);
  const KernelAudit gemv = audit_kernel(Kernel::Gemv, 64, NumericMode::qn(32), 20260810);
  const KernelAudit gemm = audit_kernel(Kernel::Gemm, 16, NumericMode::qn(32), 20260810);
  const KernelAudit giv = audit_kernel(Kernel::Givens, 8, NumericMode::f32_qn(32), 20260810);

  const bool pass = dot.inits == 1 && dot.reads == 1 && dot.accums_per_read == 4096.0 &&
                    gemv.inits == 64 && gemv.reads == 64 && gemv.accums_per_read == 64.0 &&
                    gemm.inits == 256 && gemm.reads == 256 && gemm.accums_per_read == 16.0 &&
                    giv.inits == 64 && giv.reads == 64 && giv.accums_per_read == 1.0;
  verdict(9, pass,
          "audit: init/read pairs 1/64/256/64 and accumulations-per-read 4096/64/16/1",
          fmt("dot %llu/%.0f gemv %llu/%.0f gemm %llu/%.0f givens %llu/%.0f",
              (unsigned long long)dot.reads, dot.accums_per_read,
              (unsigned long long)gemv.reads, gemv.accums_per_read,
              (unsigned long long)gemm.reads, gemm.accums_per_read,
              (unsigned long long)giv.reads, giv.accums_per_read));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed"
                                    : "acceptance: FAILURES present");
  return failures;
}
