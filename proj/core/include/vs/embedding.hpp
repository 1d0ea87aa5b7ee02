#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vs/types.hpp"

namespace vs {

enum class MatrixRole { embedding, unembedding };

const char* matrix_role_name(MatrixRole role);
MatrixRole matrix_role_from_name(const std::string& name);

// Dense row-major f32 matrix, one row per token. The unembedding matrix is
// stored token-major as well.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  MatrixRole role = MatrixRole::embedding;
  std::vector<float> data;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t r, std::size_t c, MatrixRole ro)
      : rows(r), cols(c), role(ro), data(r * c, 0.0f) {}

  std::span<const float> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

// File layout: 8-byte magic "VSEMB01\n", one JSON header line
// {"rows":R,"cols":C,"dtype":"f32le","role":"..."}, then R*C little-endian
// 32-bit floats row-major.
void save_matrix_file(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix load_matrix_file(const std::string& path);

}  // namespace vs
