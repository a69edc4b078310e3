#include "clarinet/error_study.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace clarinet {

std::vector<ErrorReport> run_error_study(Kernel kernel, const std::vector<int>& sizes, double lo,
                                         double hi, int trials,
                                         const std::vector<NumericMode>& modes, uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("run_error_study: trials must be >= 1");
  std::vector<ErrorReport> out;

  for (int size : sizes) {
    std::vector<double> sum_err(modes.size(), 0), sum_sq(modes.size(), 0), max_err(modes.size(), 0);

    for (int t = 0; t < trials; ++t) {
      SplitMix64 rng(mix_seed(seed, (uint64_t)kernel, (uint64_t)size, (uint64_t)t));
      switch (kernel) {
        case Kernel::Dot: {
          std::vector<double> a(size), b(size);
          for (double& v : a) v = rng.uniform(lo, hi);
          for (double& v : b) v = rng.uniform(lo, hi);
          const double ref = xdot(a, b, NumericMode::f64());
          for (size_t m = 0; m < modes.size(); ++m) {
            const double got = xdot(a, b, modes[m]);
            const double rel = ref == 0 ? std::fabs(got - ref) : std::fabs(got - ref) / std::fabs(ref);
            sum_err[m] += rel;
            sum_sq[m] += rel * rel;
            if (rel > max_err[m]) max_err[m] = rel;
          }
          break;
        }
        case Kernel::Gemv: {
          Eigen::MatrixXd A(size, size);
          Eigen::VectorXd x(size);
          for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) A(i, j) = rng.uniform(lo, hi);
          for (int i = 0; i < size; ++i) x(i) = rng.uniform(lo, hi);
          const Eigen::VectorXd ref = xgemv(A, x, NumericMode::f64());
          const double refn = ref.norm();
          for (size_t m = 0; m < modes.size(); ++m) {
            const double rel = (xgemv(A, x, modes[m]) - ref).norm() / refn;
            sum_err[m] += rel;
            sum_sq[m] += rel * rel;
            if (rel > max_err[m]) max_err[m] = rel;
          }
          break;
        }
        case Kernel::Gemm: {
          Eigen::MatrixXd A(size, size), B(size, size);
          for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) {
              A(i, j) = rng.uniform(lo, hi);
              B(i, j) = rng.uniform(lo, hi);
            }
          const Eigen::MatrixXd ref = xgemm(A, B, NumericMode::f64());
          const double refn = ref.norm();  // Frobenius
          for (size_t m = 0; m < modes.size(); ++m) {
            const double rel = (xgemm(A, B, modes[m]) - ref).norm() / refn;
            sum_err[m] += rel;
            sum_sq[m] += rel * rel;
            if (rel > max_err[m]) max_err[m] = rel;
          }
          break;
        }
        case Kernel::Givens: {
          Eigen::MatrixXd A(size, size);
          for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) A(i, j) = rng.uniform(lo, hi);
          const Eigen::MatrixXd ref = xgivens(A, NumericMode::f64());
          const double refn = ref.norm();
          for (size_t m = 0; m < modes.size(); ++m) {
            const double rel = (xgivens(A, modes[m]) - ref).norm() / refn;
            sum_err[m] += rel;
            sum_sq[m] += rel * rel;
            if (rel > max_err[m]) max_err[m] = rel;
          }
          break;
        }
      }
    }

    for (size_t m = 0; m < modes.size(); ++m) {
      ErrorReport r;
      r.kernel = kernel;
      r.mode = modes[m];
      r.size = size;
      r.range_lo = lo;
      r.range_hi = hi;
      r.trials = trials;
      r.mean_relative_error = sum_err[m] / trials;
      r.accurate_digits = r.mean_relative_error > 0
                              ? -std::log10(r.mean_relative_error)
                              : std::numeric_limits<double>::infinity();
      r.rms_error = std::sqrt(sum_sq[m] / trials);
      r.max_error = max_err[m];
      out.push_back(r);
    }
  }
  return out;
}

std::string study_csv(const std::vector<ErrorReport>& rows) {
  std::ostringstream os;
  os << "kernel,mode,size,range_lo,range_hi,trials,mean_rel_error,accurate_digits,rms_error,"
        "max_error\n";
  os.precision(10);
  for (const ErrorReport& r : rows) {
    os << kernel_name(r.kernel) << "," << r.mode.name() << "," << r.size << "," << r.range_lo
       << "," << r.range_hi << "," << r.trials << "," << r.mean_relative_error << ","
       << r.accurate_digits << "," << r.rms_error << "," << r.max_error << "\n";
  }
  return os.str();
}

std::string csv_matrix(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os.precision(9);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ",";
      os << m(r, c);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace clarinet
