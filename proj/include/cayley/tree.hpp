#pragma once

// Finite truncations of the Cayley tree. Vertices carry two addresses: the
// canonical root path (VertexId) and a flat breadth-first index used by the
// numerical code. Generation m occupies the contiguous index range
// [generation_offset(m), generation_offset(m) + generation_size(m)), and the
// children of a vertex are contiguous in the next generation.

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cayley {

// full: the root has k+1 successors (every vertex has degree k+1).
// reduced: the root has k successors (a rooted k-ary tree).
enum class RootMode { full, reduced };

const char* to_string(RootMode mode);
RootMode parse_root_mode(std::string_view text);

struct VertexId {
  std::vector<int> path;  // child indices from the root; empty is the root

  bool is_root() const { return path.empty(); }
  std::size_t distance_from_root() const { return path.size(); }
  VertexId child(int i) const;
  VertexId parent() const;

  // "/" for the root, "/0/2/1" otherwise.
  std::string to_string() const;
  static VertexId parse(std::string_view text);

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
  friend bool operator==(const VertexId&, const VertexId&) = default;
};

struct Edge {
  VertexId parent;
  VertexId child;

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class TreeShape {
 public:
  static constexpr std::size_t kMaxVertices = std::size_t{1} << 24;

  TreeShape(int k, int depth, RootMode mode = RootMode::full);

  int k() const { return k_; }
  int depth() const { return depth_; }
  RootMode root_mode() const { return mode_; }

  // Number of direct successors of a generation-m vertex in the infinite tree.
  int branching(int m) const { return (m == 0 && mode_ == RootMode::full) ? k_ + 1 : k_; }

  std::size_t generation_size(int m) const;    // |W_m|
  std::size_t generation_offset(int m) const;  // |V_{m-1}|, first flat index of W_m
  std::size_t ball_size(int m) const;          // |V_m|
  std::size_t size() const { return offsets_.back(); }

  bool contains(const VertexId& x) const;
  std::size_t index_of(const VertexId& x) const;
  VertexId vertex(std::size_t index) const;
  int generation_of(std::size_t index) const;
  std::size_t parent_index(std::size_t index) const;
  std::size_t first_child(std::size_t index) const;
  std::size_t child_count(std::size_t index) const;  // 0 on the outer generation

  std::vector<VertexId> successors(const VertexId& x) const;
  std::vector<VertexId> generation(int m) const;
  std::vector<VertexId> ball(int m) const;
  std::vector<Edge> edges(int m) const;

  // L_depth as (parent, child) flat indices, ordered by child index.
  std::vector<std::pair<std::size_t, std::size_t>> edge_indices() const;

  friend bool operator==(const TreeShape& a, const TreeShape& b) {
    return a.k_ == b.k_ && a.depth_ == b.depth_ && a.mode_ == b.mode_;
  }

 private:
  void check_generation(int m) const;

  int k_;
  int depth_;
  RootMode mode_;
  std::vector<std::size_t> offsets_;  // offsets_[m] = |V_{m-1}|; back() = |V_depth|
};

}  // namespace cayley
