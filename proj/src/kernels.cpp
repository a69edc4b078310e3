#include "clarinet/kernels.hpp"

#include <cmath>
#include <cstring>

namespace clarinet {

namespace {

uint32_t f32_bits(float f) {
  uint32_t b;
  std::memcpy(&b, &f, 4);
  return b;
}

float f32_from_bits(uint32_t b) {
  float f;
  std::memcpy(&f, &b, 4);
  return f;
}

UnpackedPosit unpack(uint32_t pattern, const PositConfig& cfg) {
  return extract({pattern, cfg});
}

}  // namespace

std::string NumericMode::name() const {
  switch (tag) {
    case ModeTag::F64Ref: return "f64";
    case ModeTag::F32: return "f32";
    case ModeTag::PN: return "p" + std::to_string(config.n);
    case ModeTag::QN: return "q" + std::to_string(config.n);
    case ModeTag::F32_QN: return "f32-q" + std::to_string(config.n);
  }
  return "?";
}

NumericMode NumericMode::parse(const std::string& name) {
  auto width = [&](const std::string& s) {
    int n = std::stoi(s);
    return PositConfig::with_default_es(n);
  };
  try {
    if (name == "f64") return f64();
    if (name == "f32") return f32();
    if (name.rfind("f32-q", 0) == 0) return {ModeTag::F32_QN, width(name.substr(5))};
    if (name.rfind("f32-p", 0) == 0) return {ModeTag::F32_QN, width(name.substr(5))};
    if (name.rfind("q", 0) == 0) return {ModeTag::QN, width(name.substr(1))};
    if (name.rfind("p", 0) == 0) return {ModeTag::PN, width(name.substr(1))};
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("unknown numeric mode '" + name +
                              "' (expected f64, f32, pN, qN or f32-qN)");
}

ScalarResult xdot_full(std::span<const double> a, std::span<const double> b,
                       const NumericMode& mode, QuireOpCounters* counters) {
  if (a.size() != b.size()) throw std::invalid_argument("xdot: length mismatch");
  if (a.empty()) throw std::invalid_argument("xdot: empty vectors");

  switch (mode.tag) {
    case ModeTag::F64Ref: {
      double acc = 0;
      for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
      return {acc, 0};
    }
    case ModeTag::F32: {
      float acc = 0;
      for (size_t i = 0; i < a.size(); ++i) acc = std::fmaf((float)a[i], (float)b[i], acc);
      return {(double)acc, f32_bits(acc)};
    }
    case ModeTag::QN:
    case ModeTag::F32_QN: {
      const PositConfig& cfg = mode.config;
      Quire q(cfg);
      q.init({0, cfg});
      for (size_t i = 0; i < a.size(); ++i) {
        PositBits pa, pb;
        if (mode.tag == ModeTag::QN) {
          pa = posit_from_double(a[i], cfg);
          pb = posit_from_double(b[i], cfg);
        } else {
          pa = posit_from_binary32(f32_bits((float)a[i]), cfg);
          pb = posit_from_binary32(f32_bits((float)b[i]), cfg);
        }
        q.accumulate(extract(pa), extract(pb), FusedOp::MulAdd);
      }
      const PositBits r = q.read_posit();
      if (counters) *counters += q.counters();
      if (mode.tag == ModeTag::QN) return {value_as_double(r), (uint32_t)r.pattern};
      const uint32_t fb = binary32_from_posit(r);
      return {(double)f32_from_bits(fb), fb};
    }
    case ModeTag::PN: {
      const PositConfig& cfg = mode.config;
      Quire q(cfg);
      PositBits acc{0, cfg};
      for (size_t i = 0; i < a.size(); ++i) {
        q.init(acc);
        q.accumulate(extract(posit_from_double(a[i], cfg)),
                     extract(posit_from_double(b[i], cfg)), FusedOp::MulAdd);
        acc = q.read_posit();
      }
      if (counters) *counters += q.counters();
      return {value_as_double(acc), (uint32_t)acc.pattern};
    }
  }
  throw std::logic_error("unreachable");
}

double xdot(std::span<const double> a, std::span<const double> b, const NumericMode& mode,
            QuireOpCounters* counters) {
  return xdot_full(a, b, mode, counters).value;
}

Eigen::VectorXd xgemv(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                      const NumericMode& mode, QuireOpCounters* counters) {
  if (A.cols() != x.size()) throw std::invalid_argument("xgemv: shape mismatch");
  Eigen::VectorXd y(A.rows());
  std::vector<double> row(A.cols()), xv(x.data(), x.data() + x.size());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) row[j] = A(i, j);
    y(i) = xdot_full(row, xv, mode, counters).value;
  }
  return y;
}

Eigen::MatrixXd xgemm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const NumericMode& mode, QuireOpCounters* counters) {
  if (A.cols() != B.rows()) throw std::invalid_argument("xgemm: shape mismatch");
  Eigen::MatrixXd C(A.rows(), B.cols());
  std::vector<double> row(A.cols()), col(B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index k = 0; k < A.cols(); ++k) row[k] = A(i, k);
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      for (Eigen::Index k = 0; k < B.rows(); ++k) col[k] = B(k, j);
      C(i, j) = xdot_full(row, col, mode, counters).value;
    }
  }
  return C;
}

namespace {

template <typename T>
Eigen::MatrixXd givens_plain(const Eigen::MatrixXd& A) {
  const Eigen::Index m = A.rows();
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> M = A.cast<T>();
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const T a = M(j, j), b = M(i, j);
      if (b == (T)0) continue;
      const T r = std::sqrt(a * a + b * b);
      const T c = a / r, s = b / r;
      for (Eigen::Index k = j + 1; k < m; ++k) {
        const T x = M(j, k), y = M(i, k);
        M(j, k) = c * x + s * y;
        M(i, k) = c * y - s * x;
      }
      M(j, j) = r;
      M(i, j) = (T)0;
    }
  }
  return M.template cast<double>();
}

// qN Givens: every multiply-accumulate pair lands in the quire, rotation
// coefficients come from fused divides against a square root that is seeded
// in binary32 and sharpened by one Newton step whose residual
// e = a^2 + b^2 - rhat^2 is formed exactly in the quire, so the whole error
// budget stays at posit read-out precision.
Eigen::MatrixXd givens_quire(const Eigen::MatrixXd& A, const PositConfig& cfg,
                             QuireOpCounters* counters) {
  const Eigen::Index m = A.rows();
  std::vector<uint32_t> M(m * m);
  auto at = [&](Eigen::Index r, Eigen::Index c) -> uint32_t& { return M[r * m + c]; };
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) at(r, c) = (uint32_t)posit_from_double(A(r, c), cfg).pattern;

  Quire q(cfg);
  const PositBits zero{0, cfg};
  auto read = [&] { return (uint32_t)q.read_posit().pattern; };

  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const uint32_t a = at(j, j), b = at(i, j);
      if (b == 0) continue;
      const UnpackedPosit ua = unpack(a, cfg), ub = unpack(b, cfg);

      // binary32 seed for the radius (the Newton step below squares its
      // error, so 2^-24 accuracy is plenty)
      const float af = f32_from_bits(binary32_from_posit({a, cfg}));
      const float bf = f32_from_bits(binary32_from_posit({b, cfg}));
      const float rf = std::sqrt(af * af + bf * bf);
      const uint32_t rhat = (uint32_t)posit_from_binary32(f32_bits(rf), cfg).pattern;
      const uint32_t rhat2 = (uint32_t)posit_from_binary32(f32_bits(2.0f * rf), cfg).pattern;
      const UnpackedPosit urh = unpack(rhat, cfg);

      q.init(zero);  // e = a^2 + b^2 - rhat^2, exact until the read
      q.accumulate(ua, ua, FusedOp::MulAdd);
      q.accumulate(ub, ub, FusedOp::MulAdd);
      q.accumulate(urh, urh, FusedOp::MulSub);
      const uint32_t e = read();

      q.init({rhat, cfg});  // r' = rhat + e / (2 rhat)
      q.accumulate(unpack(e, cfg), unpack(rhat2, cfg), FusedOp::DivAdd);
      const uint32_t r = read();
      const UnpackedPosit ur = unpack(r, cfg);

      q.init(zero);
      q.accumulate(ua, ur, FusedOp::DivAdd);
      const uint32_t c = read();
      q.init(zero);
      q.accumulate(ub, ur, FusedOp::DivAdd);
      const uint32_t s = read();
      const UnpackedPosit uc = unpack(c, cfg), us = unpack(s, cfg);

      for (Eigen::Index k = j + 1; k < m; ++k) {
        const UnpackedPosit x = unpack(at(j, k), cfg), y = unpack(at(i, k), cfg);
        q.init(zero);
        q.accumulate(uc, x, FusedOp::MulAdd);
        q.accumulate(us, y, FusedOp::MulAdd);
        const uint32_t nj = read();
        q.init(zero);
        q.accumulate(uc, y, FusedOp::MulAdd);
        q.accumulate(us, x, FusedOp::MulSub);
        at(i, k) = read();
        at(j, k) = nj;
      }
      at(j, j) = r;
      at(i, j) = 0;
    }
  }
  if (counters) *counters += q.counters();

  Eigen::MatrixXd R(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) R(r, c) = value_as_double({at(r, c), cfg});
  return R;
}

// f32-qN Givens, the profile that runs on the CPU: float data and float row
// updates, with the quire reserved for the per-rotation coefficient divides
// and a final pass that materialises the diagonal of R as posit values for
// the PRF. On an m x m input that is m*(m-1) + m single-accumulation quire
// reads.
Eigen::MatrixXd givens_interop(const Eigen::MatrixXd& A, const PositConfig& cfg,
                               QuireOpCounters* counters) {
  const Eigen::Index m = A.rows();
  Eigen::MatrixXf M = A.cast<float>();
  Quire q(cfg);
  const PositBits zero{0, cfg};

  auto fused_div = [&](float num, float den) {
    q.init(zero);
    q.accumulate(unpack((uint32_t)posit_from_binary32(f32_bits(num), cfg).pattern, cfg),
                 unpack((uint32_t)posit_from_binary32(f32_bits(den), cfg).pattern, cfg),
                 FusedOp::DivAdd);
    return f32_from_bits(binary32_from_posit(q.read_posit()));
  };

  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const float a = M(j, j), b = M(i, j);
      if (b == 0.0f) continue;
      const float r = std::sqrt(a * a + b * b);
      const float c = fused_div(a, r);
      const float s = fused_div(b, r);
      for (Eigen::Index k = j + 1; k < m; ++k) {
        const float x = M(j, k), y = M(i, k);
        M(j, k) = c * x + s * y;
        M(i, k) = c * y - s * x;
      }
      M(j, j) = r;
      M(i, j) = 0.0f;
    }
  }
  for (Eigen::Index d = 0; d < m; ++d) {
    q.init(zero);
    q.accumulate(unpack((uint32_t)posit_from_binary32(f32_bits(M(d, d)), cfg).pattern, cfg),
                 unpack((uint32_t)posit_from_binary32(f32_bits(1.0f), cfg).pattern, cfg),
                 FusedOp::MulAdd);
    M(d, d) = f32_from_bits(binary32_from_posit(q.read_posit()));
  }
  if (counters) *counters += q.counters();
  return M.cast<double>();
}

}  // namespace

Eigen::MatrixXd xgivens(const Eigen::MatrixXd& A, const NumericMode& mode,
                        QuireOpCounters* counters) {
  if (A.rows() != A.cols()) throw std::invalid_argument("xgivens: square matrix required");
  switch (mode.tag) {
    case ModeTag::F64Ref: return givens_plain<double>(A);
    case ModeTag::F32: return givens_plain<float>(A);
    case ModeTag::QN: return givens_quire(A, mode.config, counters);
    case ModeTag::F32_QN: return givens_interop(A, mode.config, counters);
    case ModeTag::PN:
      throw ModeError(
          "xgivens cannot run in pure posit mode: rotation coefficients need a square "
          "root and there is no posit square-root unit; use qN or f32-qN");
  }
  throw std::logic_error("unreachable");
}

FlowField lucas_kanade_velocity(const Eigen::MatrixXd& frame1, const Eigen::MatrixXd& frame2,
                                int window, const NumericMode& mode, bool normalize,
                                QuireOpCounters* counters) {
  if (frame1.rows() != frame2.rows() || frame1.cols() != frame2.cols())
    throw std::invalid_argument("lucas_kanade: frame sizes differ");
  if (window < 3 || window % 2 == 0) throw std::invalid_argument("lucas_kanade: window must be odd and >= 3");

  const Eigen::Index h = frame1.rows(), w = frame1.cols();
  const double scale = normalize ? 16.0 / 255.0 : 1.0;

  FlowField out;
  out.u = Eigen::MatrixXd::Zero(h, w);
  out.v = Eigen::MatrixXd::Zero(h, w);
  out.valid = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(h, w);

  const bool ref = mode.tag == ModeTag::F64Ref;
  // posit modes hold the frame data posit-quantised; f32 paths hold binary32
  Eigen::MatrixXf I1f, I2f;
  Eigen::MatrixXd I1d, I2d;
  if (ref) {
    I1d = frame1 * scale;
    I2d = frame2 * scale;
  } else {
    I1f = (frame1 * scale).cast<float>();
    I2f = (frame2 * scale).cast<float>();
    if (mode.tag == ModeTag::QN || mode.tag == ModeTag::PN) {
      for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w; ++c) {
          I1f(r, c) = f32_from_bits(
              binary32_from_posit(posit_from_binary32(f32_bits(I1f(r, c)), mode.config)));
          I2f(r, c) = f32_from_bits(
              binary32_from_posit(posit_from_binary32(f32_bits(I2f(r, c)), mode.config)));
        }
    }
  }

  // central-difference spatial gradients of frame1, temporal difference
  Eigen::MatrixXf Ixf, Iyf, Itf;
  Eigen::MatrixXd Ixd, Iyd, Itd;
  if (ref) {
    Ixd = Eigen::MatrixXd::Zero(h, w);
    Iyd = Eigen::MatrixXd::Zero(h, w);
    Itd = I2d - I1d;
    for (Eigen::Index r = 1; r + 1 < h; ++r)
      for (Eigen::Index c = 1; c + 1 < w; ++c) {
        Ixd(r, c) = (I1d(r, c + 1) - I1d(r, c - 1)) * 0.5;
        Iyd(r, c) = (I1d(r + 1, c) - I1d(r - 1, c)) * 0.5;
      }
  } else {
    Ixf = Eigen::MatrixXf::Zero(h, w);
    Iyf = Eigen::MatrixXf::Zero(h, w);
    Itf = I2f - I1f;
    for (Eigen::Index r = 1; r + 1 < h; ++r)
      for (Eigen::Index c = 1; c + 1 < w; ++c) {
        Ixf(r, c) = (I1f(r, c + 1) - I1f(r, c - 1)) * 0.5f;
        Iyf(r, c) = (I1f(r + 1, c) - I1f(r - 1, c)) * 0.5f;
      }
  }

  const int hw = window / 2;
  const Eigen::Index margin = hw + 1;
  const bool posit_mode =
      mode.tag == ModeTag::QN || mode.tag == ModeTag::F32_QN || mode.tag == ModeTag::PN;
  Quire q(mode.config.valid() && posit_mode ? mode.config : PositConfig{8, 0});
  const PositBits zero{0, posit_mode ? mode.config : PositConfig{8, 0}};

  for (Eigen::Index r = margin; r + margin < h; ++r) {
    for (Eigen::Index c = margin; c + margin < w; ++c) {
      double Sxx, Sxy, Syy, Sxt, Syt;
      if (ref) {
        Sxx = Sxy = Syy = Sxt = Syt = 0;
        for (int dy = -hw; dy <= hw; ++dy)
          for (int dx = -hw; dx <= hw; ++dx) {
            const double ix = Ixd(r + dy, c + dx), iy = Iyd(r + dy, c + dx),
                         it = Itd(r + dy, c + dx);
            Sxx += ix * ix;
            Sxy += ix * iy;
            Syy += iy * iy;
            Sxt += ix * it;
            Syt += iy * it;
          }
      } else if (mode.tag == ModeTag::F32) {
        float xx = 0, xy = 0, yy = 0, xt = 0, yt = 0;
        for (int dy = -hw; dy <= hw; ++dy)
          for (int dx = -hw; dx <= hw; ++dx) {
            const float ix = Ixf(r + dy, c + dx), iy = Iyf(r + dy, c + dx),
                        it = Itf(r + dy, c + dx);
            xx = std::fmaf(ix, ix, xx);
            xy = std::fmaf(ix, iy, xy);
            yy = std::fmaf(iy, iy, yy);
            xt = std::fmaf(ix, it, xt);
            yt = std::fmaf(iy, it, yt);
          }
        Sxx = xx;
        Sxy = xy;
        Syy = yy;
        Sxt = xt;
        Syt = yt;
      } else {
        const PositConfig& cfg = mode.config;
        const bool sequential = mode.tag == ModeTag::PN;
        float sums[5];
        int which = 0;
        static constexpr std::pair<int, int> combos[5] = {{0, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}};
        for (auto [ma, mb] : combos) {
          auto grad = [&](int sel, Eigen::Index rr, Eigen::Index cc) {
            return sel == 0 ? Ixf(rr, cc) : (sel == 1 ? Iyf(rr, cc) : Itf(rr, cc));
          };
          PositBits acc{0, cfg};
          if (!sequential) q.init(zero);
          for (int dy = -hw; dy <= hw; ++dy)
            for (int dx = -hw; dx <= hw; ++dx) {
              const UnpackedPosit pa = unpack(
                  (uint32_t)posit_from_binary32(f32_bits(grad(ma, r + dy, c + dx)), cfg).pattern,
                  cfg);
              const UnpackedPosit pb = unpack(
                  (uint32_t)posit_from_binary32(f32_bits(grad(mb, r + dy, c + dx)), cfg).pattern,
                  cfg);
              if (sequential) {
                q.init(acc);
                q.accumulate(pa, pb, FusedOp::MulAdd);
                acc = q.read_posit();
              } else {
                q.accumulate(pa, pb, FusedOp::MulAdd);
              }
            }
          if (!sequential) acc = q.read_posit();
          sums[which++] = f32_from_bits(binary32_from_posit(acc));
        }
        Sxx = sums[0];
        Sxy = sums[1];
        Syy = sums[2];
        Sxt = sums[3];
        Syt = sums[4];
      }

      // 2x2 solve in binary32 (binary64 for the reference)
      if (ref) {
        const double det = Sxx * Syy - Sxy * Sxy;
        if (det == 0) {
          if (Sxt == 0 && Syt == 0) out.valid(r, c) = 1;  // no gradient, zero flow
          continue;
        }
        out.u(r, c) = (Sxy * Syt - Syy * Sxt) / det;
        out.v(r, c) = (Sxy * Sxt - Sxx * Syt) / det;
        out.valid(r, c) = 1;
      } else {
        const float xx = (float)Sxx, xy = (float)Sxy, yy = (float)Syy, xt = (float)Sxt,
                    yt = (float)Syt;
        const float det = xx * yy - xy * xy;
        if (det == 0.0f) {
          if (xt == 0.0f && yt == 0.0f) out.valid(r, c) = 1;
          continue;
        }
        out.u(r, c) = (xy * yt - yy * xt) / det;
        out.v(r, c) = (xy * xt - xx * yt) / det;
        out.valid(r, c) = 1;
      }
    }
  }
  if (counters && posit_mode) *counters += q.counters();
  return out;
}

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::Dot: return "dot";
    case Kernel::Gemv: return "gemv";
    case Kernel::Gemm: return "gemm";
    case Kernel::Givens: return "givens";
  }
  return "?";
}

Kernel parse_kernel(const std::string& name) {
  if (name == "dot" || name == "xdot") return Kernel::Dot;
  if (name == "gemv" || name == "xgemv") return Kernel::Gemv;
  if (name == "gemm" || name == "xgemm") return Kernel::Gemm;
  if (name == "givens" || name == "xgivens") return Kernel::Givens;
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  SplitMix64 s(seed ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xC2B2AE3D27D4EB4Full) ^
               (c * 0x165667B19E3779F9ull));
  return s.next();
}

KernelAudit audit_kernel(Kernel k, int size, const NumericMode& mode, uint64_t seed) {
  SplitMix64 rng(mix_seed(seed, (uint64_t)k, (uint64_t)size, 0));
  QuireOpCounters counters;
  switch (k) {
    case Kernel::Dot: {
      std::vector<double> a(size), b(size);
      for (double& v : a) v = rng.uniform();
      for (double& v : b) v = rng.uniform();
      xdot_full(a, b, mode, &counters);
      break;
    }
    case Kernel::Gemv: {
      Eigen::MatrixXd A(size, size);
      Eigen::VectorXd x(size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) A(i, j) = rng.uniform();
      for (int i = 0; i < size; ++i) x(i) = rng.uniform();
      xgemv(A, x, mode, &counters);
      break;
    }
    case Kernel::Gemm: {
      Eigen::MatrixXd A(size, size), B(size, size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
          A(i, j) = rng.uniform();
          B(i, j) = rng.uniform();
        }
      xgemm(A, B, mode, &counters);
      break;
    }
    case Kernel::Givens: {
      Eigen::MatrixXd A(size, size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) A(i, j) = rng.uniform();
      xgivens(A, mode, &counters);
      break;
    }
  }
  KernelAudit audit;
  audit.inits = counters.inits;
  audit.reads = counters.reads;
  audit.accumulates = counters.accumulates;
  audit.accums_per_read =
      counters.reads ? (double)counters.accumulates / (double)counters.reads : 0.0;
  return audit;
}

}  // namespace clarinet
