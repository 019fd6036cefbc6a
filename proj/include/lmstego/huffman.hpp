#pragma once

// Per-step prefix-free codebooks over a pruned candidate pool.
//
// Branch labels follow a local ordering: at every internal node the subtree
// with the larger total probability hangs on the 0 branch (ties go to the
// subtree containing the smaller token id). Zero-heavy payload bits therefore
// walk toward high-probability tokens, which is what the edge-flipping codec
// optimizes for.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "lmstego/bitstream.hpp"
#include "lmstego/errors.hpp"

namespace lmstego {

struct TokenProb {
  int token = 0;
  double prob = 0.0;

  bool operator==(const TokenProb&) const = default;
};

// Sorted descending by probability, ties by ascending token id.
using TokenDistribution = std::vector<TokenProb>;

struct CandidatePool {
  TokenDistribution entries;  // same ordering as TokenDistribution, renormalized

  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

class HuffmanCodebook {
public:
  struct Node {
    double prob = 0.0;
    int min_token = 0;
    int left = -1;   // 0 branch
    int right = -1;  // 1 branch
    int token = -1;  // leaf payload; -1 for internal nodes
  };

  // Standard Huffman construction with a stable merge order: among equal
  // probabilities the earliest-created node merges first. Leaves are created
  // in pool order, so identical pools give bit-identical codebooks.
  static HuffmanCodebook build(const CandidatePool& pool) {
    if (pool.empty()) throw Error(Errc::empty_pool, "cannot build codebook from empty pool");
    HuffmanCodebook book;
    auto& nodes = book.nodes_;
    nodes.reserve(pool.size() * 2);
    for (const auto& e : pool.entries)
      nodes.push_back({e.prob, e.token, -1, -1, e.token});

    struct HeapKey {
      double prob;
      int order;
    };
    auto cmp = [](const std::pair<HeapKey, int>& a, const std::pair<HeapKey, int>& b) {
      if (a.first.prob != b.first.prob) return a.first.prob > b.first.prob;
      return a.first.order > b.first.order;
    };
    std::priority_queue<std::pair<HeapKey, int>, std::vector<std::pair<HeapKey, int>>,
                        decltype(cmp)>
        heap(cmp);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
      heap.push({{nodes[static_cast<size_t>(i)].prob, i}, i});

    int next_order = static_cast<int>(nodes.size());
    while (heap.size() > 1) {
      int a = heap.top().second;
      heap.pop();
      int b = heap.top().second;
      heap.pop();
      // Larger total probability goes left (the 0 branch); ties by the
      // smaller minimum token id.
      bool a_left = nodes[static_cast<size_t>(a)].prob > nodes[static_cast<size_t>(b)].prob ||
                    (nodes[static_cast<size_t>(a)].prob == nodes[static_cast<size_t>(b)].prob &&
                     nodes[static_cast<size_t>(a)].min_token < nodes[static_cast<size_t>(b)].min_token);
      int left = a_left ? a : b;
      int right = a_left ? b : a;
      Node parent;
      parent.prob = nodes[static_cast<size_t>(a)].prob + nodes[static_cast<size_t>(b)].prob;
      parent.min_token = std::min(nodes[static_cast<size_t>(a)].min_token,
                                  nodes[static_cast<size_t>(b)].min_token);
      parent.left = left;
      parent.right = right;
      nodes.push_back(parent);
      heap.push({{parent.prob, next_order++}, static_cast<int>(nodes.size()) - 1});
    }
    book.root_ = heap.top().second;
    book.collect_codes(book.root_, BitStream{});
    return book;
  }

  size_t size() const { return codes_.size(); }
  int root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  bool contains(int token) const { return codes_.count(token) > 0; }

  // Walks the tree from the root following `bits` starting at `start`.
  // Returns the leaf token and the number of input bits consumed; when bits
  // run out the walk follows 0 branches and those padding bits are not
  // counted as consumed.
  std::pair<int, size_t> match_prefix(const BitStream& bits, size_t start = 0) const {
    int node = root_;
    size_t consumed = 0;
    while (nodes_[static_cast<size_t>(node)].token < 0) {
      int bit = 0;
      if (start + consumed < bits.size()) {
        bit = bits[start + consumed];
        ++consumed;
      }
      node = bit ? nodes_[static_cast<size_t>(node)].right
                 : nodes_[static_cast<size_t>(node)].left;
    }
    return {nodes_[static_cast<size_t>(node)].token, consumed};
  }

  const BitStream& code_of(int token) const {
    auto it = codes_.find(token);
    if (it == codes_.end())
      throw Error(Errc::unknown_token, "token is not part of this codebook");
    return it->second;
  }

  const std::map<int, BitStream>& codes() const { return codes_; }

private:
  void collect_codes(int node, BitStream prefix) {
    const Node& n = nodes_[static_cast<size_t>(node)];
    if (n.token >= 0) {
      codes_.emplace(n.token, std::move(prefix));
      return;
    }
    BitStream left = prefix;
    left.push_back(0);
    collect_codes(n.left, std::move(left));
    prefix.push_back(1);
    collect_codes(n.right, std::move(prefix));
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  std::map<int, BitStream> codes_;
};

inline HuffmanCodebook build_codebook(const CandidatePool& pool) {
  return HuffmanCodebook::build(pool);
}

}  // namespace lmstego
