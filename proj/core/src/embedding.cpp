#include "vs/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vs/corpus.hpp"

static_assert(std::endian::native == std::endian::little,
              "matrix payload is little-endian; big-endian hosts need byte swaps");

namespace vs {

namespace {
constexpr char kMagic[8] = {'V', 'S', 'E', 'M', 'B', '0', '1', '\n'};
}

const char* matrix_role_name(MatrixRole role) {
  return role == MatrixRole::embedding ? "embedding" : "unembedding";
}

MatrixRole matrix_role_from_name(const std::string& name) {
  if (name == "embedding") return MatrixRole::embedding;
  if (name == "unembedding") return MatrixRole::unembedding;
  throw InputError("unknown matrix role: " + name);
}

void save_matrix_file(const EmbeddingMatrix& m, const std::string& path) {
  if (m.data.size() != m.rows * m.cols) {
    throw ValidationError("matrix data size does not match rows*cols");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  nlohmann::ordered_json header;
  header["rows"] = m.rows;
  header["cols"] = m.cols;
  header["dtype"] = "f32le";
  header["role"] = matrix_role_name(m.role);
  std::string line = header.dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.write(reinterpret_cast<const char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(float)));
  if (!out) throw InputError("write failed: " + path);
}

EmbeddingMatrix load_matrix_file(const std::string& path) {
  std::string bytes = read_file_bytes(path);
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw InputError("bad magic, not a matrix file: " + path);
  }
  std::size_t nl = bytes.find('\n', sizeof(kMagic));
  if (nl == std::string::npos) throw InputError("missing matrix header line: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(sizeof(kMagic), nl - sizeof(kMagic)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed matrix header: ") + e.what());
  }
  if (!header.contains("rows") || !header.contains("cols") || !header.contains("dtype") ||
      !header.contains("role")) {
    throw InputError("matrix header missing fields: " + path);
  }
  if (header["dtype"].get<std::string>() != "f32le") {
    throw InputError("unsupported matrix dtype: " + header["dtype"].get<std::string>());
  }
  EmbeddingMatrix m;
  m.rows = header["rows"].get<std::size_t>();
  m.cols = header["cols"].get<std::size_t>();
  m.role = matrix_role_from_name(header["role"].get<std::string>());
  std::size_t payload = m.rows * m.cols * sizeof(float);
  std::size_t offset = nl + 1;
  if (bytes.size() - offset != payload) {
    throw InputError("matrix payload size mismatch: expected " + std::to_string(payload) +
                     " bytes, found " + std::to_string(bytes.size() - offset));
  }
  m.data.resize(m.rows * m.cols);
  std::memcpy(m.data.data(), bytes.data() + offset, payload);
  for (float v : m.data) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value in matrix: " + path);
  }
  return m;
}

}  // namespace vs
