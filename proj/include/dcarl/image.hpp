#pragma once

#include <cctype>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dcarl/error.hpp"

namespace dcarl {

// Row-major grayscale image.
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool same_shape(const Image& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct PgmImage {
  Image image;
  int max_value = 255;
};

namespace detail {

inline std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace detail

// Plain (P2) or binary (P5) PGM, 8- or 16-bit.
inline PgmImage read_pgm(std::istream& in) {
  const std::string magic = detail::pgm_token(in);
  if (magic != "P2" && magic != "P5") throw ParseError("pgm: unsupported magic '" + magic + "'", 0);
  auto number = [&](const char* what) {
    const std::string t = detail::pgm_token(in);
    try {
      std::size_t used = 0;
      long v = std::stol(t, &used);
      if (used != t.size() || v < 0) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("pgm: bad ") + what + " '" + t + "'", 0);
    }
  };
  const long cols = number("width");
  const long rows = number("height");
  const long maxv = number("maxval");
  if (cols <= 0 || rows <= 0 || maxv <= 0 || maxv > 65535) throw ParseError("pgm: bad header", 0);
  PgmImage out{Image(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)),
               static_cast<int>(maxv)};
  auto& data = out.image.data();
  if (magic == "P2") {
    for (auto& v : data) {
      v = static_cast<double>(number("pixel"));
      if (v > static_cast<double>(maxv)) throw ParseError("pgm: pixel exceeds maxval", 0);
    }
  } else {
    const bool wide = maxv > 255;
    for (auto& v : data) {
      int hi = in.get();
      if (hi == EOF) throw ParseError("pgm: truncated pixel data", 0);
      int value = hi;
      if (wide) {
        int lo = in.get();
        if (lo == EOF) throw ParseError("pgm: truncated pixel data", 0);
        value = (hi << 8) | lo;
      }
      v = static_cast<double>(value);
    }
  }
  return out;
}

inline void write_pgm(std::ostream& out, const Image& img, int max_value = 255) {
  out << "P2\n" << img.cols() << ' ' << img.rows() << '\n' << max_value << '\n';
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      if (c) out << ' ';
      out << static_cast<long>(img(r, c) + 0.5);
    }
    out << '\n';
  }
}

}  // namespace dcarl
