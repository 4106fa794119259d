#include "netreg/adjacency.hpp"

#include <numeric>
#include <string>

#include "netreg/errors.hpp"

namespace netreg {

AdjacencyMatrix AdjacencyMatrix::from_dense(std::size_t n, std::vector<std::uint8_t> bits) {
  if (bits.size() != n * n) {
    throw ValidationError(ValidationKind::DimensionMismatch,
                          "adjacency has " + std::to_string(bits.size()) + " entries, expected " +
                              std::to_string(n * n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (bits[i * n + i] != 0) {
      throw ValidationError(ValidationKind::NonzeroDiagonal,
                            "self-link at agent " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint8_t b = bits[i * n + j];
      if (b > 1) {
        throw ValidationError(ValidationKind::NonBinary,
                              "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") is not 0/1");
      }
      if (b != bits[j * n + i]) {
        throw ValidationError(ValidationKind::Asymmetric,
                              "entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") and its mirror differ");
      }
    }
  }
  AdjacencyMatrix out;
  out.n_ = n;
  out.bits_ = std::move(bits);
  return out;
}

AdjacencyMatrix AdjacencyMatrix::from_edges(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  AdjacencyMatrix out(n);
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw ValidationError(ValidationKind::IndexOutOfRange,
                            "edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") exceeds " + std::to_string(n) + " agents");
    }
    if (i == j) {
      throw ValidationError(ValidationKind::NonzeroDiagonal,
                            "self-link at agent " + std::to_string(i + 1));
    }
    out.set_edge(i, j);
  }
  return out;
}

AdjacencyMatrix AdjacencyMatrix::complete(std::size_t n) {
  AdjacencyMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.set_edge(i, j);
  }
  return out;
}

std::size_t AdjacencyMatrix::degree(std::size_t i) const noexcept {
  const std::uint8_t* r = row(i);
  return std::accumulate(r, r + n_, std::size_t{0});
}

std::size_t AdjacencyMatrix::edge_count() const noexcept {
  return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0}) / 2;
}

double AdjacencyMatrix::density() const noexcept {
  if (n_ < 2) return 0.0;
  return static_cast<double>(edge_count()) / (static_cast<double>(n_) * static_cast<double>(n_ - 1) / 2.0);
}

AdjacencyMatrix AdjacencyMatrix::permuted(const std::vector<std::size_t>& perm) const {
  AdjacencyMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) out.bits_[i * n_ + j] = (*this)(perm[i], perm[j]);
  }
  return out;
}

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::Parse:
      return "parse error";
    case ValidationKind::Asymmetric:
      return "asymmetric adjacency";
    case ValidationKind::NonzeroDiagonal:
      return "nonzero diagonal";
    case ValidationKind::NonBinary:
      return "non-binary adjacency";
    case ValidationKind::DimensionMismatch:
      return "dimension mismatch";
    case ValidationKind::IndexOutOfRange:
      return "index out of range";
  }
  return "validation error";
}

}  // namespace netreg
