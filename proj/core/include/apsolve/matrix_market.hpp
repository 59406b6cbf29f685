#pragma once

#include <iosfwd>
#include <string>

#include "apsolve/linalg.hpp"

namespace apsolve {

// Matrix Market I/O. Coordinate files load as CsrMatrix, array files as
// DenseMatrix. Only real/integer fields; general and symmetric layouts.
// Indices in files are 1-based. Parse failures throw InvalidMatrix.

Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::string& path);

void write_matrix_market(std::ostream& out, const CsrMatrix& m);
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(const std::string& path, const Matrix& m);

// Plain vectors: one value per line, '%' comment lines ignored.
Vector read_vector(std::istream& in);
Vector read_vector(const std::string& path);
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::string& path, const Vector& v);

}  // namespace apsolve
