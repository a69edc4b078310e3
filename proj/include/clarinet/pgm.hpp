#ifndef CLARINET_PGM_HPP
#define CLARINET_PGM_HPP

#include <Eigen/Dense>
#include <string>

namespace clarinet {

// Binary (P5) 8-bit grayscale PGM. Values come back as doubles in 0..255.
Eigen::MatrixXd read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Eigen::MatrixXd& image);

}  // namespace clarinet

#endif
