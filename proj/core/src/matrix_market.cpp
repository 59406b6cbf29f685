#include "apsolve/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace apsolve {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidMatrix("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidMatrix("cannot write " + path);
  return f;
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidMatrix("matrix market: empty input");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
    throw InvalidMatrix("matrix market: missing %%MatrixMarket matrix banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double") {
    throw InvalidMatrix("matrix market: unsupported field '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw InvalidMatrix("matrix market: unsupported symmetry '" + symmetry + "'");
  }

  std::string line;
  if (!next_data_line(in, line)) throw InvalidMatrix("matrix market: missing size line");
  std::istringstream size_line(line);

  if (format == "coordinate") {
    std::size_t rows = 0, cols = 0, entries = 0;
    if (!(size_line >> rows >> cols >> entries)) throw InvalidMatrix("matrix market: bad size line");
    std::vector<Triplet> t;
    t.reserve(symmetric ? 2 * entries : entries);
    for (std::size_t k = 0; k < entries; ++k) {
      if (!next_data_line(in, line)) throw InvalidMatrix("matrix market: truncated entry list");
      std::istringstream es(line);
      std::size_t i = 0, j = 0;
      double v = 0.0;
      if (!(es >> i >> j >> v) || i == 0 || j == 0 || i > rows || j > cols) {
        throw InvalidMatrix("matrix market: bad entry '" + line + "'");
      }
      t.push_back({i - 1, j - 1, v});
      if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
    }
    return CsrMatrix::from_triplets(rows, cols, std::move(t));
  }

  if (format == "array") {
    std::size_t rows = 0, cols = 0;
    if (!(size_line >> rows >> cols)) throw InvalidMatrix("matrix market: bad size line");
    DenseMatrix d(rows, cols);
    // Array files are column-major; symmetric ones store the lower triangle only.
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(in, line)) throw InvalidMatrix("matrix market: truncated array");
        std::istringstream es(line);
        double v = 0.0;
        if (!(es >> v) || !std::isfinite(v)) throw InvalidMatrix("matrix market: bad value '" + line + "'");
        d(i, j) = v;
        if (symmetric) d(j, i) = v;
      }
    }
    return d;
  }

  throw InvalidMatrix("matrix market: unsupported format '" + format + "'");
}

Matrix read_matrix_market(const std::string& path) {
  auto f = open_in(path);
  return read_matrix_market(f);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
      out << i + 1 << ' ' << m.col_idx()[k] + 1 << ' ' << format_double(m.values()[k]) << '\n';
    }
  }
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
}

void write_matrix_market(const std::string& path, const Matrix& m) {
  auto f = open_out(path);
  if (const auto* csr = m.as_csr()) {
    write_matrix_market(f, *csr);
  } else {
    write_matrix_market(f, *m.as_dense());
  }
}

Vector read_vector(std::istream& in) {
  Vector v;
  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream es(line);
    double x = 0.0;
    if (!(es >> x)) throw InvalidMatrix("vector file: bad value '" + line + "'");
    v.push_back(x);
  }
  if (!all_finite(v)) throw InvalidMatrix("vector file: non-finite value");
  return v;
}

Vector read_vector(const std::string& path) {
  auto f = open_in(path);
  return read_vector(f);
}

void write_vector(std::ostream& out, const Vector& v) {
  for (double x : v) out << format_double(x) << '\n';
}

void write_vector(const std::string& path, const Vector& v) {
  auto f = open_out(path);
  write_vector(f, v);
}

}  // namespace apsolve
