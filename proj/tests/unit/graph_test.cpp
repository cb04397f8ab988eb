#include <sstream>

#include <gtest/gtest.h>

#include "netcrop/errors.hpp"
#include "netcrop/graph.hpp"
#include "support.hpp"

namespace netcrop {
namespace {

AdjacencyMatrix parse(const std::string& text, EdgeListOptions options = {}) {
  std::istringstream in(text);
  return load_edge_list(in, options);
}

TEST(EdgeList, PathGraph) {
  const auto a = parse("0 1\n1 2\n");
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a.edge_count(), 2u);
  EXPECT_EQ(a.degree(0), 1u);
  EXPECT_EQ(a.degree(1), 2u);
  EXPECT_EQ(a.degree(2), 1u);
  const std::vector<std::pair<NodeId, NodeId>> expected{{0, 1}, {1, 2}};
  EXPECT_EQ(a.edges(), expected);
}

TEST(EdgeList, DuplicatesCollapseAndLoopsDrop) {
  const auto a = parse("1 2\n2 1\n1 1\n");
  const std::vector<std::pair<NodeId, NodeId>> expected{{1, 2}};
  EXPECT_EQ(a.edges(), expected);
  EXPECT_EQ(a.degree(1), 1u);
  EXPECT_FALSE(a.has_edge(1, 1));
}

TEST(EdgeList, CommentsBlankLinesAndOneBased) {
  const auto a = parse("# a comment\n\n1 2\n  2\t3  \n", {.index_base = 1});
  EXPECT_EQ(a.size(), 3u);
  EXPECT_TRUE(a.has_edge(0, 1));
  EXPECT_TRUE(a.has_edge(2, 1));
}

TEST(EdgeList, HeaderKeepsIsolatedNodes) {
  const auto a = parse("# nodes 10\n0 1\n");
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a.degree(9), 0u);
}

TEST(EdgeList, OverrideNodeCount) {
  EXPECT_EQ(parse("0 1\n", {.n_override = 4057}).size(), 4057u);
  EXPECT_THROW(parse("0 5\n", {.n_override = 5}), RangeError);
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("0 1\n2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("0 x\n"), ParseError);
  EXPECT_THROW(parse("0 1 2\n"), ParseError);
}

TEST(EdgeList, NegativeIdsAreRangeErrors) {
  EXPECT_THROW(parse("-1 2\n"), RangeError);
  EXPECT_THROW(parse("0 1\n", {.index_base = 1}), RangeError);
  EXPECT_THROW(parse("0 1\n", {.index_base = 2}), DomainError);
}

TEST(EdgeList, NoSymmetrizeNeedsBothOrientations) {
  EXPECT_THROW(parse("0 1\n1 2\n2 1\n", {.symmetrize = false}), DomainError);
  const auto a = parse("0 1\n1 0\n", {.symmetrize = false});
  EXPECT_EQ(a.edge_count(), 1u);
}

TEST(EdgeList, WriteRoundTrip) {
  Rng rng(3);
  const auto a = testing::erdos_renyi(30, 0.2, rng);
  for (int base : {0, 1}) {
    std::ostringstream out;
    write_edge_list(out, a, base);
    EXPECT_EQ(parse(out.str(), {.index_base = base}), a);
  }
}

TEST(Adjacency, SparseFormIsSymmetricAndHollow) {
  Rng rng(4);
  const auto a = testing::erdos_renyi(40, 0.3, rng);
  const Eigen::MatrixXd m = Eigen::MatrixXd(a.to_sparse());
  EXPECT_EQ(m, m.transpose());
  EXPECT_EQ(m.diagonal().sum(), 0.0);
  EXPECT_DOUBLE_EQ(m.sum(), 2.0 * static_cast<double>(a.edge_count()));
  EXPECT_NEAR(a.mean_degree(), m.sum() / 40.0, 1e-12);
}

TEST(InducedSubnetwork, CliqueRestriction) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < 4; ++i) {
    for (NodeId j = i + 1; j < 4; ++j) e.emplace_back(i, j);
  }
  const auto k4 = AdjacencyMatrix::from_edges(4, e);
  const auto k2 = induced_subnetwork(k4, NodeSubset({0, 1}, 4));
  EXPECT_EQ(k2.size(), 2u);
  EXPECT_EQ(k2.edge_count(), 1u);
}

TEST(InducedSubnetwork, EdgelessStaysEdgeless) {
  const auto a = AdjacencyMatrix::from_edges(7, {});
  const auto sub = induced_subnetwork(a, NodeSubset({6, 2, 0}, 7));
  EXPECT_EQ(sub.size(), 3u);
  EXPECT_EQ(sub.edge_count(), 0u);
}

TEST(InducedSubnetwork, MatchesPairwiseReindexing) {
  Rng rng(11);
  const auto a = testing::erdos_renyi(10, 0.5, rng);
  const NodeSubset s({7, 2, 9, 4}, 10);
  const auto sub = induced_subnetwork(a, s);
  const SparseSym sparse = induced_submatrix(a.to_sparse(), s);
  for (std::size_t x = 0; x < s.size(); ++x) {
    for (std::size_t y = 0; y < s.size(); ++y) {
      const bool edge = a.has_edge(s[x], s[y]);
      EXPECT_EQ(sub.has_edge(static_cast<NodeId>(x), static_cast<NodeId>(y)), edge);
      EXPECT_EQ(sparse.coeff(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)), edge ? 1.0 : 0.0);
    }
  }
}

TEST(NodeSubsetTest, RejectsBadIndices) {
  EXPECT_THROW(NodeSubset({0, 5}, 5), RangeError);
  EXPECT_THROW(NodeSubset({1, 1}, 5), DomainError);
  const NodeSubset s({3, 0}, 4);
  const std::vector<NodeId> pos{1, -1, -1, 0};
  EXPECT_EQ(s.positions(), pos);
}

TEST(BlockEntries, SingleEdge) {
  const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}};
  const auto a = AdjacencyMatrix::from_edges(2, e);
  const DensePairBlock block{NodeSubset({0}, 2), NodeSubset({1}, 2)};
  std::vector<BlockEntry> got(block_entries(a, block).begin(), block_entries(a, block).end());
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0], (BlockEntry{0, 1, 1.0}));
}

TEST(BlockEntries, EdgelessBlockIsZero) {
  const auto a = AdjacencyMatrix::from_edges(5, {});
  const DensePairBlock block{NodeSubset({0, 1}, 5), NodeSubset({2, 3, 4}, 5)};
  std::size_t count = 0;
  for (const BlockEntry& entry : block_entries(a, block)) {
    EXPECT_EQ(entry.value, 0.0);
    ++count;
  }
  EXPECT_EQ(count, 6u);
}

TEST(BlockEntries, SumMatchesBruteForce) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::erdos_renyi(12, 0.4, rng);
    std::vector<NodeId> order(12);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const DensePairBlock block{NodeSubset({order.begin(), order.begin() + 5}, 12),
                               NodeSubset({order.begin() + 5, order.begin() + 10}, 12)};
    EXPECT_TRUE(block.disjoint());
    double sum = 0.0;
    for (const BlockEntry& entry : block_entries(a, block)) sum += entry.value;
    int brute = 0;
    for (int x = 0; x < 5; ++x) {
      for (int y = 5; y < 10; ++y) brute += a.has_edge(order[x], order[y]);
    }
    EXPECT_EQ(sum, brute);
  }
}

TEST(BlockEntries, ForeignBlockRejected) {
  const auto a = AdjacencyMatrix::from_edges(3, {});
  const DensePairBlock block{NodeSubset({0}, 4), NodeSubset({1}, 4)};
  EXPECT_THROW(block_entries(a, block), RangeError);
}

TEST(DenseHelpers, BlockAndSparseRoundTrip) {
  Rng rng(8);
  const auto a = testing::erdos_renyi(15, 0.3, rng);
  const SparseSym sp = a.to_sparse();
  const Eigen::MatrixXd full = Eigen::MatrixXd(sp);
  const NodeSubset rows({1, 4, 7}, 15), cols({0, 14}, 15);
  const Eigen::MatrixXd block = dense_block(sp, rows, cols);
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 2; ++y) EXPECT_EQ(block(x, y), full(rows[x], cols[y]));
  }
  EXPECT_EQ(Eigen::MatrixXd(sparse_from_dense(full)), full);
}

}  // namespace
}  // namespace netcrop
