#include "netcrop/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "netcrop/errors.hpp"

namespace netcrop {

AdjacencyMatrix AdjacencyMatrix::from_edges(std::size_t n,
                                            std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> canon;
  canon.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
      throw RangeError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") outside [0, " + std::to_string(n) + ")");
    }
    if (i == j) continue;
    canon.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  AdjacencyMatrix a;
  a.n_ = n;
  a.degrees_.assign(n, 0);
  for (auto [i, j] : canon) {
    ++a.degrees_[static_cast<std::size_t>(i)];
    ++a.degrees_[static_cast<std::size_t>(j)];
  }
  a.row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) a.row_ptr_[i + 1] = a.row_ptr_[i] + a.degrees_[i];
  a.col_idx_.resize(a.row_ptr_[n]);
  std::vector<std::size_t> fill(a.row_ptr_.begin(), a.row_ptr_.end() - 1);
  for (auto [i, j] : canon) {
    a.col_idx_[fill[static_cast<std::size_t>(i)]++] = j;
    a.col_idx_[fill[static_cast<std::size_t>(j)]++] = i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(a.col_idx_.begin() + static_cast<std::ptrdiff_t>(a.row_ptr_[i]),
              a.col_idx_.begin() + static_cast<std::ptrdiff_t>(a.row_ptr_[i + 1]));
  }
  return a;
}

std::span<const NodeId> AdjacencyMatrix::neighbors(NodeId i) const {
  const auto u = static_cast<std::size_t>(i);
  return {col_idx_.data() + row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]};
}

double AdjacencyMatrix::mean_degree() const noexcept {
  return n_ == 0 ? 0.0 : static_cast<double>(col_idx_.size()) / static_cast<double>(n_);
}

bool AdjacencyMatrix::has_edge(NodeId i, NodeId j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<NodeId, NodeId>> AdjacencyMatrix::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < n_; ++i) {
    for (NodeId j : neighbors(static_cast<NodeId>(i))) {
      if (static_cast<std::size_t>(j) > i) out.emplace_back(static_cast<NodeId>(i), j);
    }
  }
  return out;
}

SparseSym AdjacencyMatrix::to_sparse() const {
  SparseSym m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  std::vector<Eigen::Triplet<double, NodeId>> triplets;
  triplets.reserve(col_idx_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (NodeId j : neighbors(static_cast<NodeId>(i))) {
      triplets.emplace_back(static_cast<NodeId>(i), j, 1.0);
    }
  }
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

NodeSubset::NodeSubset(std::vector<NodeId> indices, std::size_t parent_size)
    : indices_(std::move(indices)), parent_size_(parent_size) {
  std::vector<bool> seen(parent_size, false);
  for (NodeId v : indices_) {
    if (v < 0 || static_cast<std::size_t>(v) >= parent_size) {
      throw RangeError("node " + std::to_string(v) + " outside [0, " +
                       std::to_string(parent_size) + ")");
    }
    if (seen[static_cast<std::size_t>(v)]) {
      throw DomainError("node " + std::to_string(v) + " repeated in subset");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

NodeSubset NodeSubset::all(std::size_t n) {
  std::vector<NodeId> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<NodeId>(i);
  return NodeSubset(std::move(idx), n);
}

std::vector<NodeId> NodeSubset::positions() const {
  std::vector<NodeId> pos(parent_size_, -1);
  for (std::size_t a = 0; a < indices_.size(); ++a) {
    pos[static_cast<std::size_t>(indices_[a])] = static_cast<NodeId>(a);
  }
  return pos;
}

bool DensePairBlock::disjoint() const {
  auto pos = rows.positions();
  return std::none_of(cols.begin(), cols.end(),
                      [&](NodeId v) { return pos[static_cast<std::size_t>(v)] >= 0; });
}

BlockEntry BlockEntryRange::iterator::operator*() const {
  const auto ncols = range_->block_->cols.size();
  const NodeId i = range_->block_->rows[flat_ / ncols];
  const NodeId j = range_->block_->cols[flat_ % ncols];
  return {i, j, range_->a_->has_edge(i, j) ? 1.0 : 0.0};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool next_token(std::string_view& rest, std::string_view& token) {
  rest = trim(rest);
  if (rest.empty()) return false;
  const auto end = rest.find_first_of(" \t,");
  token = rest.substr(0, end);
  rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
  return true;
}

long long parse_id(std::string_view token, std::size_t line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected integer node id, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

AdjacencyMatrix load_edge_list(std::istream& in, const EdgeListOptions& options) {
  if (options.index_base != 0 && options.index_base != 1) {
    throw DomainError("index base must be 0 or 1");
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  long long max_id = -1;
  std::size_t header_n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    if (rest.front() == '#') {
      // "# nodes N ..." declares the node count so trailing isolated nodes survive.
      std::string_view body = rest.substr(1), key, value;
      if (next_token(body, key) && key == "nodes" && next_token(body, value)) {
        long long declared = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), declared);
        if (ec == std::errc{} && ptr == value.data() + value.size() && declared > 0) {
          header_n = static_cast<std::size_t>(declared);
        }
      }
      continue;
    }
    std::string_view t1, t2, extra;
    if (!next_token(rest, t1) || !next_token(rest, t2)) {
      throw ParseError(line_no, "expected two node ids");
    }
    if (next_token(rest, extra)) throw ParseError(line_no, "unexpected trailing token");
    const long long i = parse_id(t1, line_no) - options.index_base;
    const long long j = parse_id(t2, line_no) - options.index_base;
    if (i < 0 || j < 0) {
      throw RangeError("line " + std::to_string(line_no) + ": negative node id after applying base " +
                       std::to_string(options.index_base));
    }
    if (i > std::numeric_limits<NodeId>::max() - 1 || j > std::numeric_limits<NodeId>::max() - 1) {
      throw RangeError("line " + std::to_string(line_no) + ": node id too large");
    }
    max_id = std::max({max_id, i, j});
    pairs.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  std::size_t n = static_cast<std::size_t>(max_id + 1);
  if (options.n_override == 0 && header_n > n) n = header_n;
  if (options.n_override != 0) {
    if (static_cast<long long>(options.n_override) <= max_id) {
      throw RangeError("node id " + std::to_string(max_id) + " exceeds declared node count " +
                       std::to_string(options.n_override));
    }
    n = options.n_override;
  }
  if (!options.symmetrize) {
    std::vector<std::pair<NodeId, NodeId>> directed;
    directed.reserve(pairs.size());
    for (auto [i, j] : pairs) {
      if (i != j) directed.emplace_back(i, j);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
    for (auto [i, j] : directed) {
      if (!std::binary_search(directed.begin(), directed.end(), std::make_pair(j, i))) {
        throw DomainError("edge (" + std::to_string(i + options.index_base) + ", " +
                          std::to_string(j + options.index_base) +
                          ") has no reverse entry and symmetrization is off");
      }
    }
  }
  return AdjacencyMatrix::from_edges(n, pairs);
}

void write_edge_list(std::ostream& out, const AdjacencyMatrix& a, int index_base) {
  out << "# nodes " << a.size() << " edges " << a.edge_count() << " base " << index_base << '\n';
  for (auto [i, j] : a.edges()) out << (i + index_base) << ' ' << (j + index_base) << '\n';
}

AdjacencyMatrix induced_subnetwork(const AdjacencyMatrix& a, const NodeSubset& s) {
  if (s.parent_size() != a.size()) {
    throw RangeError("subset parent size " + std::to_string(s.parent_size()) +
                     " does not match graph size " + std::to_string(a.size()));
  }
  auto pos = s.positions();
  std::vector<std::pair<NodeId, NodeId>> sub;
  for (std::size_t ia = 0; ia < s.size(); ++ia) {
    for (NodeId j : a.neighbors(s[ia])) {
      const NodeId jb = pos[static_cast<std::size_t>(j)];
      if (jb > static_cast<NodeId>(ia)) sub.emplace_back(static_cast<NodeId>(ia), jb);
    }
  }
  return AdjacencyMatrix::from_edges(s.size(), sub);
}

BlockEntryRange block_entries(const AdjacencyMatrix& a, const DensePairBlock& block) {
  if (block.rows.parent_size() != a.size() || block.cols.parent_size() != a.size()) {
    throw RangeError("block does not address this graph");
  }
  return BlockEntryRange(a, block);
}

SparseSym induced_submatrix(const SparseSym& a, const NodeSubset& s) {
  if (static_cast<std::size_t>(a.rows()) != s.parent_size()) {
    throw RangeError("subset parent size does not match matrix size");
  }
  auto pos = s.positions();
  std::vector<Eigen::Triplet<double, NodeId>> triplets;
  for (std::size_t ia = 0; ia < s.size(); ++ia) {
    for (SparseSym::InnerIterator it(a, s[ia]); it; ++it) {
      const NodeId jb = pos[static_cast<std::size_t>(it.col())];
      if (jb >= 0) triplets.emplace_back(static_cast<NodeId>(ia), jb, it.value());
    }
  }
  const auto m = static_cast<Eigen::Index>(s.size());
  SparseSym out(m, m);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::MatrixXd dense_block(const SparseSym& a, const NodeSubset& rows, const NodeSubset& cols) {
  auto pos = cols.positions();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (SparseSym::InnerIterator it(a, rows[r]); it; ++it) {
      const NodeId c = pos[static_cast<std::size_t>(it.col())];
      if (c >= 0) out(static_cast<Eigen::Index>(r), c) = it.value();
    }
  }
  return out;
}

SparseSym sparse_from_dense(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Triplet<double, NodeId>> triplets;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) triplets.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j), m(i, j));
    }
  }
  SparseSym out(m.rows(), m.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace netcrop
