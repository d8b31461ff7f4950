#include "cayley/tree.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "cayley/errors.hpp"

namespace cayley {

const char* to_string(RootMode mode) { return mode == RootMode::full ? "full" : "reduced"; }

RootMode parse_root_mode(std::string_view text) {
  if (text == "full") return RootMode::full;
  if (text == "reduced") return RootMode::reduced;
  throw validation_error("root mode must be 'full' or 'reduced'");
}

VertexId VertexId::child(int i) const {
  VertexId out = *this;
  out.path.push_back(i);
  return out;
}

VertexId VertexId::parent() const {
  if (is_root()) throw std::domain_error("the root has no parent");
  VertexId out = *this;
  out.path.pop_back();
  return out;
}

std::string VertexId::to_string() const {
  if (path.empty()) return "/";
  std::string out;
  for (int p : path) {
    out += '/';
    out += std::to_string(p);
  }
  return out;
}

VertexId VertexId::parse(std::string_view text) {
  if (text.empty() || text.front() != '/') throw validation_error("vertex path must start with '/'");
  VertexId out;
  if (text == "/") return out;
  std::size_t pos = 1;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find('/', pos), text.size());
    int value = 0;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + next;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last || value < 0) {
      throw validation_error("malformed vertex path '" + std::string(text) + "'");
    }
    out.path.push_back(value);
    pos = next + 1;
  }
  return out;
}

TreeShape::TreeShape(int k, int depth, RootMode mode) : k_(k), depth_(depth), mode_(mode) {
  if (k < 1) throw validation_error("branching factor k must be >= 1");
  if (depth < 0) throw validation_error("depth must be >= 0");
  offsets_.reserve(static_cast<std::size_t>(depth) + 2);
  offsets_.push_back(0);
  std::size_t width = 1;
  std::size_t total = 0;
  for (int m = 0; m <= depth; ++m) {
    total += width;
    if (total > kMaxVertices) throw capacity_error("tree exceeds the vertex cap");
    offsets_.push_back(total);
    width *= static_cast<std::size_t>(branching(m));
  }
}

void TreeShape::check_generation(int m) const {
  if (m < 0 || m > depth_) throw std::domain_error("generation outside [0, depth]");
}

std::size_t TreeShape::generation_size(int m) const {
  check_generation(m);
  return offsets_[m + 1] - offsets_[m];
}

std::size_t TreeShape::generation_offset(int m) const {
  check_generation(m);
  return offsets_[m];
}

std::size_t TreeShape::ball_size(int m) const {
  check_generation(m);
  return offsets_[m + 1];
}

bool TreeShape::contains(const VertexId& x) const {
  const auto m = x.path.size();
  if (m > static_cast<std::size_t>(depth_)) return false;
  for (std::size_t i = 0; i < m; ++i) {
    if (x.path[i] < 0 || x.path[i] >= branching(static_cast<int>(i))) return false;
  }
  return true;
}

std::size_t TreeShape::index_of(const VertexId& x) const {
  if (!contains(x)) throw std::domain_error("vertex " + x.to_string() + " is outside the tree");
  std::size_t local = 0;
  for (int p : x.path) local = local * static_cast<std::size_t>(k_) + static_cast<std::size_t>(p);
  return offsets_[x.path.size()] + local;
}

int TreeShape::generation_of(std::size_t index) const {
  if (index >= size()) throw std::domain_error("vertex index outside the tree");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

VertexId TreeShape::vertex(std::size_t index) const {
  const int m = generation_of(index);
  std::size_t local = index - offsets_[m];
  VertexId out;
  out.path.assign(static_cast<std::size_t>(m), 0);
  for (int i = m - 1; i >= 1; --i) {
    out.path[i] = static_cast<int>(local % static_cast<std::size_t>(k_));
    local /= static_cast<std::size_t>(k_);
  }
  if (m > 0) out.path[0] = static_cast<int>(local);
  return out;
}

std::size_t TreeShape::parent_index(std::size_t index) const {
  const int m = generation_of(index);
  if (m == 0) throw std::domain_error("the root has no parent");
  const std::size_t local = index - offsets_[m];
  return offsets_[m - 1] + local / static_cast<std::size_t>(branching(m - 1));
}

std::size_t TreeShape::first_child(std::size_t index) const {
  const int m = generation_of(index);
  if (m == depth_) throw std::domain_error("outer-generation vertices have no children in the tree");
  const std::size_t local = index - offsets_[m];
  return offsets_[m + 1] + local * static_cast<std::size_t>(branching(m));
}

std::size_t TreeShape::child_count(std::size_t index) const {
  const int m = generation_of(index);
  return m == depth_ ? 0 : static_cast<std::size_t>(branching(m));
}

std::vector<VertexId> TreeShape::successors(const VertexId& x) const {
  if (!contains(x) || static_cast<int>(x.path.size()) >= depth_) {
    throw std::domain_error("successors: vertex " + x.to_string() + " is not in V_{depth-1}");
  }
  const int count = branching(static_cast<int>(x.path.size()));
  std::vector<VertexId> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(x.child(i));
  return out;
}

std::vector<VertexId> TreeShape::generation(int m) const {
  check_generation(m);
  std::vector<VertexId> out;
  out.reserve(offsets_[m + 1] - offsets_[m]);
  for (std::size_t i = offsets_[m]; i < offsets_[m + 1]; ++i) out.push_back(vertex(i));
  return out;
}

std::vector<VertexId> TreeShape::ball(int m) const {
  check_generation(m);
  std::vector<VertexId> out;
  out.reserve(offsets_[m + 1]);
  for (std::size_t i = 0; i < offsets_[m + 1]; ++i) out.push_back(vertex(i));
  return out;
}

std::vector<Edge> TreeShape::edges(int m) const {
  check_generation(m);
  std::vector<Edge> out;
  out.reserve(offsets_[m + 1] == 0 ? 0 : offsets_[m + 1] - 1);
  for (std::size_t i = 1; i < offsets_[m + 1]; ++i) {
    VertexId child = vertex(i);
    VertexId parent = child.parent();
    out.push_back(Edge{std::move(parent), std::move(child)});
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> TreeShape::edge_indices() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(size() - 1);
  for (std::size_t i = 1; i < size(); ++i) out.emplace_back(parent_index(i), i);
  return out;
}

}  // namespace cayley
