#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace netreg {

/// Dense symmetric 0/1 adjacency matrix with zero diagonal, row-major bytes.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  /// Empty graph on n nodes.
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  /// Validates symmetry, binary entries and zero diagonal
  /// (ValidationError otherwise).
  static AdjacencyMatrix from_dense(std::size_t n, std::vector<std::uint8_t> bits);

  /// 0-based undirected edges; self-loops and out-of-range indices throw
  /// ValidationError. Duplicate edges are idempotent.
  static AdjacencyMatrix from_edges(std::size_t n,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  static AdjacencyMatrix complete(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  std::uint8_t operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * n_ + j]; }
  const std::uint8_t* row(std::size_t i) const noexcept { return bits_.data() + i * n_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  /// Sets (i,j) and (j,i); i != j required.
  void set_edge(std::size_t i, std::size_t j, bool linked = true) noexcept {
    bits_[i * n_ + j] = linked;
    bits_[j * n_ + i] = linked;
  }

  std::size_t degree(std::size_t i) const noexcept;
  std::size_t edge_count() const noexcept;
  double density() const noexcept;

  /// Relabels agents: result(i,j) = this(perm[i], perm[j]).
  AdjacencyMatrix permuted(const std::vector<std::size_t>& perm) const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace netreg
