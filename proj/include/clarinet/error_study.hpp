#ifndef CLARINET_ERROR_STUDY_HPP
#define CLARINET_ERROR_STUDY_HPP

#include <string>
#include <vector>

#include "clarinet/kernels.hpp"

namespace clarinet {

struct ErrorReport {
  Kernel kernel;
  NumericMode mode;
  int size = 0;
  double range_lo = 0, range_hi = 1;
  int trials = 0;
  double mean_relative_error = 0;
  double accurate_digits = 0;  // -log10(mean relative error)
  double rms_error = 0;
  double max_error = 0;
};

// Monte Carlo error study against the binary64 reference. Inputs are uniform
// in [lo, hi); trial t of a given (kernel, size) draws from a splitmix64
// stream seeded by mix_seed(seed, kernel, size, t), so every mode sees the
// same data and reruns reproduce bit-identical reports.
//
// Error metric per trial: |v'-v|/|v| for dot, relative 2-norm for gemv and
// relative Frobenius norm for gemm/givens.
std::vector<ErrorReport> run_error_study(Kernel kernel, const std::vector<int>& sizes,
                                         double lo, double hi, int trials,
                                         const std::vector<NumericMode>& modes, uint64_t seed);

// CSV with the fixed header:
// kernel,mode,size,range_lo,range_hi,trials,mean_rel_error,accurate_digits,rms_error,max_error
std::string study_csv(const std::vector<ErrorReport>& rows);

std::string csv_matrix(const Eigen::MatrixXd& m);  // heat maps and dumps

}  // namespace clarinet

#endif
