#include "clarinet/pgm.hpp"

#include <fstream>
#include <stdexcept>

namespace clarinet {

namespace {

int next_token(std::istream& in) {
  // skips whitespace and '#' comment lines
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw std::runtime_error("pgm: malformed header");
  return v;
}

}  // namespace

Eigen::MatrixXd read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') throw std::runtime_error("pgm: " + path + " is not binary P5");
  const int w = next_token(in);
  const int h = next_token(in);
  const int maxval = next_token(in);
  if (maxval <= 0 || maxval > 255) throw std::runtime_error("pgm: only 8-bit images supported");
  in.get();  // single whitespace before raster
  Eigen::MatrixXd img(h, w);
  std::vector<char> row(w);
  for (int r = 0; r < h; ++r) {
    if (!in.read(row.data(), w)) throw std::runtime_error("pgm: truncated raster");
    for (int c = 0; c < w; ++c) img(r, c) = (double)(uint8_t)row[c];
  }
  return img;
}

void write_pgm(const std::string& path, const Eigen::MatrixXd& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path);
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      double v = image(r, c);
      v = v < 0 ? 0 : (v > 255 ? 255 : v);
      out.put((char)(uint8_t)(v + 0.5));
    }
}

}  // namespace clarinet
