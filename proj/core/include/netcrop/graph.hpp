#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace netcrop {

using NodeId = std::int32_t;

/// Symmetric real matrix used by every fitting routine. Binary adjacency matrices
/// convert to it losslessly; expectation matrices (noiseless P) can be fed directly.
using SparseSym = Eigen::SparseMatrix<double, Eigen::RowMajor, NodeId>;

/// Simple undirected graph in compressed-sparse-row form. Symmetric, hollow, binary,
/// and immutable once built, so it can be shared across worker threads.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  /// Builds the canonical graph on `n` nodes from unordered pairs. Duplicates
  /// (in either orientation) collapse and self-loops are dropped.
  static AdjacencyMatrix from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return col_idx_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const;
  std::size_t degree(NodeId i) const { return degrees_[static_cast<std::size_t>(i)]; }
  std::span<const std::size_t> degrees() const noexcept { return degrees_; }
  double mean_degree() const noexcept;

  bool has_edge(NodeId i, NodeId j) const;

  /// Unordered edge list with i < j, sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  SparseSym to_sparse() const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<NodeId> col_idx_;
  std::vector<std::size_t> degrees_;
};

/// Ordered list of distinct node ids of a parent graph with `parent_size` nodes.
/// The order defines the row order of extracted submatrices and embeddings.
class NodeSubset {
 public:
  NodeSubset() = default;
  NodeSubset(std::vector<NodeId> indices, std::size_t parent_size);

  static NodeSubset all(std::size_t n);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t parent_size() const noexcept { return parent_size_; }
  NodeId operator[](std::size_t a) const { return indices_[a]; }
  std::span<const NodeId> indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  /// Position of every parent node inside this subset, -1 when absent.
  std::vector<NodeId> positions() const;

  friend bool operator==(const NodeSubset&, const NodeSubset&) = default;

 private:
  std::vector<NodeId> indices_;
  std::size_t parent_size_ = 0;
};

/// Rectangular block rows x cols of node pairs, e.g. a test block S_p x S_q.
struct DensePairBlock {
  NodeSubset rows;
  NodeSubset cols;

  bool disjoint() const;
  std::size_t entry_count() const noexcept { return rows.size() * cols.size(); }
};

struct BlockEntry {
  NodeId i;
  NodeId j;
  double value;
  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

/// Row-major view over the |rows| * |cols| entries of a block.
class BlockEntryRange {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = BlockEntry;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = BlockEntry;

    iterator() = default;
    iterator(const BlockEntryRange* range, std::size_t flat) : range_(range), flat_(flat) {}

    BlockEntry operator*() const;
    iterator& operator++() {
      ++flat_;
      return *this;
    }
    iterator operator++(int) {
      auto tmp = *this;
      ++flat_;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.flat_ == b.flat_; }

   private:
    const BlockEntryRange* range_ = nullptr;
    std::size_t flat_ = 0;
  };

  BlockEntryRange(const AdjacencyMatrix& a, const DensePairBlock& block) : a_(&a), block_(&block) {}

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, block_->entry_count()}; }
  std::size_t size() const { return block_->entry_count(); }

 private:
  const AdjacencyMatrix* a_;
  const DensePairBlock* block_;
};

struct EdgeListOptions {
  int index_base = 0;
  /// When false the file must already list both orientations of every edge.
  bool symmetrize = true;
  /// Node count; 0 means max id + 1.
  std::size_t n_override = 0;
};

/// Reads whitespace-separated integer pairs, one per line; `#` starts a comment line.
AdjacencyMatrix load_edge_list(std::istream& in, const EdgeListOptions& options = {});

/// Writes one `i j` line per edge with i < j, using the given index base.
void write_edge_list(std::ostream& out, const AdjacencyMatrix& a, int index_base = 0);

AdjacencyMatrix induced_subnetwork(const AdjacencyMatrix& a, const NodeSubset& s);

/// Iterates the entries of `block`; both `a` and `block` must outlive the range.
BlockEntryRange block_entries(const AdjacencyMatrix& a, const DensePairBlock& block);

SparseSym induced_submatrix(const SparseSym& a, const NodeSubset& s);

/// Dense copy of a[rows, cols].
Eigen::MatrixXd dense_block(const SparseSym& a, const NodeSubset& rows, const NodeSubset& cols);

/// Turns a dense symmetric matrix into the sparse form, dropping exact zeros.
SparseSym sparse_from_dense(const Eigen::MatrixXd& m);

}  // namespace netcrop
