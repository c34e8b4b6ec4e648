#include "edurec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edurec {

namespace {

constexpr std::uint32_t kDanglingBit = 0x80000000u;
constexpr std::size_t kMaxNodes = std::size_t{1} << 30;

constexpr std::array<std::string_view, kNodeKindCount> kNodeKindNames = {
    "Student", "Course", "Teacher", "School", "Career", "Major", "Category"};
constexpr std::array<std::string_view, kEdgeKindCount> kEdgeKindNames = {
    "Belong", "BelongTo", "Learn", "LearnIn", "MajorIn", "Teach", "TeachIn", "WorkIn"};

bool is_dangling(NodeHandle h) { return (h.value & kDanglingBit) != 0; }

std::size_t slot(EdgeKind k) { return static_cast<std::size_t>(k); }

NodeKind arrival_kind(const PathStep& step) {
  const auto sig = signature(step.kind);
  return step.direction == Direction::Out ? sig.tail : sig.head;
}

NodeKind departure_kind(const PathStep& step) {
  const auto sig = signature(step.kind);
  return step.direction == Direction::Out ? sig.head : sig.tail;
}

}  // namespace

EdgeSignature signature(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Belong: return {NodeKind::Course, NodeKind::Category};
    case EdgeKind::BelongTo: return {NodeKind::Course, NodeKind::School};
    case EdgeKind::Learn: return {NodeKind::Student, NodeKind::Course};
    case EdgeKind::LearnIn: return {NodeKind::Student, NodeKind::School};
    case EdgeKind::MajorIn: return {NodeKind::Student, NodeKind::Major};
    case EdgeKind::Teach: return {NodeKind::Teacher, NodeKind::Course};
    case EdgeKind::TeachIn: return {NodeKind::Teacher, NodeKind::School};
    case EdgeKind::WorkIn: return {NodeKind::Student, NodeKind::Career};
  }
  throw Error(ErrorCode::UnknownKind, "edge kind out of range");
}

std::string_view to_string(NodeKind kind) { return kNodeKindNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(EdgeKind kind) { return kEdgeKindNames[slot(kind)]; }

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (std::size_t i = 0; i < kNodeKindCount; ++i)
    if (kNodeKindNames[i] == text) return kAllNodeKinds[i];
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  for (std::size_t i = 0; i < kEdgeKindCount; ++i)
    if (kEdgeKindNames[i] == text) return kAllEdgeKinds[i];
  return std::nullopt;
}

double NodeRecord::number(std::string_view key) const {
  auto it = attrs.find(key);
  if (it == attrs.end()) return 0.0;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  return 0.0;
}

std::string NodeRecord::text(std::string_view key) const {
  auto it = attrs.find(key);
  if (it == attrs.end()) return {};
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  return {};
}

const AttrSchema& attr_schema(NodeKind kind) {
  static const std::array<AttrSchema, kNodeKindCount> schemas = {
      AttrSchema{{"learning_time", "response", "likes"}, {}, {"name", "id", "url"}},
      AttrSchema{{"num"}, {}, {"name", "id", "url"}},
      AttrSchema{{}, {}, {"name", "id", "career"}},
      AttrSchema{{}, {"name"}, {}},
      AttrSchema{{}, {"name"}, {}},
      AttrSchema{{}, {"name"}, {}},
      AttrSchema{{}, {"name"}, {}},
  };
  return schemas[static_cast<std::size_t>(kind)];
}

void validate_attrs(const NodeRecord& record) {
  const auto& schema = attr_schema(record.kind);
  for (auto key : schema.required_numbers) {
    auto it = record.attrs.find(key);
    if (it == record.attrs.end() || !std::holds_alternative<double>(it->second))
      throw Error(ErrorCode::MissingAttr, record.id + " lacks numeric attr '" + std::string(key) + "'");
    const double v = std::get<double>(it->second);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::NegativeNumericAttr,
                  record.id + " attr '" + std::string(key) + "' must be finite and >= 0");
  }
  for (auto key : schema.required_texts) {
    auto it = record.attrs.find(key);
    if (it == record.attrs.end() || !std::holds_alternative<std::string>(it->second))
      throw Error(ErrorCode::MissingAttr, record.id + " lacks text attr '" + std::string(key) + "'");
  }
}

std::size_t KindCounts::total_nodes() const { return std::accumulate(nodes.begin(), nodes.end(), std::size_t{0}); }
std::size_t KindCounts::total_edges() const { return std::accumulate(edges.begin(), edges.end(), std::size_t{0}); }

void HeteroGraph::require_mutable() const {
  if (frozen_) throw Error(ErrorCode::GraphFrozen, "graph is frozen");
}

std::uint64_t HeteroGraph::triple_key(EdgeKind kind, NodeHandle head, NodeHandle tail) {
  return (static_cast<std::uint64_t>(kind) << 60) | (static_cast<std::uint64_t>(head.value) << 30) |
         static_cast<std::uint64_t>(tail.value);
}

NodeHandle HeteroGraph::add_node(NodeRecord record) {
  require_mutable();
  if (index_.contains(record.id)) throw Error(ErrorCode::DuplicateId, record.id);
  validate_attrs(record);
  if (nodes_.size() >= kMaxNodes) throw Error(ErrorCode::InvalidConfig, "node capacity exceeded");
  NodeHandle h{static_cast<std::uint32_t>(nodes_.size())};
  index_.emplace(record.id, h);
  nodes_.push_back(std::move(record));
  adjacency_.emplace_back();
  return h;
}

EdgeIndex HeteroGraph::add_edge(EdgeKind kind, std::string_view head, std::string_view tail) {
  auto h = find(head);
  if (!h) throw Error(ErrorCode::UnknownEndpoint, std::string(head));
  auto t = find(tail);
  if (!t) throw Error(ErrorCode::UnknownEndpoint, std::string(tail));
  return add_edge(kind, *h, *t);
}

EdgeIndex HeteroGraph::add_edge(EdgeKind kind, NodeHandle head, NodeHandle tail) {
  require_mutable();
  if (head.value >= nodes_.size() || tail.value >= nodes_.size())
    throw Error(ErrorCode::UnknownEndpoint, "edge handle out of range");
  const auto sig = signature(kind);
  if (nodes_[head.value].kind != sig.head || nodes_[tail.value].kind != sig.tail)
    throw Error(ErrorCode::SignatureMismatch,
                std::string(to_string(kind)) + "(" + nodes_[head.value].id + "->" + nodes_[tail.value].id +
                    ") requires " + std::string(to_string(sig.head)) + "->" + std::string(to_string(sig.tail)));
  if (!triples_.insert(triple_key(kind, head, tail)).second)
    throw Error(ErrorCode::DuplicateEdge, std::string(to_string(kind)) + "(" + nodes_[head.value].id + "->" +
                                              nodes_[tail.value].id + ")");
  const auto idx = static_cast<EdgeIndex>(edges_.size());
  edges_.push_back({kind, head, tail});
  adjacency_[head.value].out[slot(kind)].push_back(idx);
  adjacency_[tail.value].in[slot(kind)].push_back(idx);
  return idx;
}

void HeteroGraph::add_edge_unchecked(EdgeKind kind, std::string_view head, std::string_view tail) {
  require_mutable();
  auto resolve = [&](std::string_view id) {
    if (auto h = find(id)) return *h;
    dangling_.emplace_back(id);
    return NodeHandle{kDanglingBit | static_cast<std::uint32_t>(dangling_.size() - 1)};
  };
  const NodeHandle h = resolve(head);
  const NodeHandle t = resolve(tail);
  const auto idx = static_cast<EdgeIndex>(edges_.size());
  edges_.push_back({kind, h, t});
  if (!is_dangling(h)) adjacency_[h.value].out[slot(kind)].push_back(idx);
  if (!is_dangling(t)) adjacency_[t.value].in[slot(kind)].push_back(idx);
  if (!is_dangling(h) && !is_dangling(t)) triples_.insert(triple_key(kind, h, t));
}

std::optional<NodeHandle> HeteroGraph::find(std::string_view id) const {
  // unordered_map<string> lacks heterogeneous lookup on this toolchain
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeHandle HeteroGraph::handle(std::string_view id) const {
  if (auto h = find(id)) return *h;
  throw Error(ErrorCode::UnknownNode, std::string(id));
}

std::span<const EdgeIndex> HeteroGraph::incident(NodeHandle h, EdgeKind kind, Direction dir) const {
  const auto& adj = adjacency_.at(h.value);
  return dir == Direction::In ? std::span<const EdgeIndex>(adj.in[slot(kind)])
                              : std::span<const EdgeIndex>(adj.out[slot(kind)]);
}

std::size_t HeteroGraph::degree(std::string_view id, std::optional<EdgeKind> kind, Direction dir) const {
  return degree(handle(id), kind, dir);
}

std::size_t HeteroGraph::degree(NodeHandle h, std::optional<EdgeKind> kind, Direction dir) const {
  if (h.value >= nodes_.size()) throw Error(ErrorCode::UnknownNode, "handle out of range");
  const auto& adj = adjacency_[h.value];
  std::size_t n = 0;
  for (auto k : kAllEdgeKinds) {
    if (kind && *kind != k) continue;
    if (dir != Direction::In) n += adj.out[slot(k)].size();
    if (dir != Direction::Out) n += adj.in[slot(k)].size();
  }
  return n;
}

TerminalCounts HeteroGraph::dfs_collect(std::string_view start, std::span<const PathStep> path) const {
  const NodeHandle origin = handle(start);
  if (path.empty()) throw Error(ErrorCode::IncompatiblePathSchema, "empty path schema");
  NodeKind at = nodes_[origin.value].kind;
  for (const auto& step : path) {
    if (step.direction == Direction::Both)
      throw Error(ErrorCode::IncompatiblePathSchema, "path steps must be Out or In");
    if (departure_kind(step) != at)
      throw Error(ErrorCode::IncompatiblePathSchema,
                  std::string(to_string(step.kind)) + " step cannot leave a " + std::string(to_string(at)));
    at = arrival_kind(step);
  }

  // Explicit stack of (node, depth); a frame at depth == path.size() is a terminal.
  std::unordered_map<std::uint32_t, std::size_t> counts;
  std::vector<std::pair<NodeHandle, std::size_t>> stack{{origin, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    if (depth == path.size()) {
      ++counts[node.value];
      continue;
    }
    const auto& step = path[depth];
    const auto edges = incident(node, step.kind, step.direction);
    for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
      const Edge& e = edges_[*it];
      const NodeHandle next = step.direction == Direction::Out ? e.tail : e.head;
      if (is_dangling(next)) continue;
      stack.emplace_back(next, depth + 1);
    }
  }
  TerminalCounts out;
  for (const auto& [h, c] : counts) out.emplace(nodes_[h].id, c);
  return out;
}

std::vector<NodeHandle> HeteroGraph::nodes_of_kind(NodeKind kind) const {
  std::vector<NodeHandle> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == kind) out.push_back(NodeHandle{i});
  std::sort(out.begin(), out.end(),
            [&](NodeHandle a, NodeHandle b) { return nodes_[a.value].id < nodes_[b.value].id; });
  return out;
}

KindCounts HeteroGraph::counts_by_kind() const {
  KindCounts c;
  for (const auto& n : nodes_) ++c.nodes[static_cast<std::size_t>(n.kind)];
  for (const auto& e : edges_) ++c.edges[slot(e.kind)];
  return c;
}

std::string HeteroGraph::endpoint_name(NodeHandle h) const {
  if (is_dangling(h)) return dangling_[h.value & ~kDanglingBit];
  return nodes_[h.value].id;
}

std::vector<Violation> HeteroGraph::schema_validate() const {
  std::vector<Violation> out;
  for (const auto& n : nodes_) {
    try {
      validate_attrs(n);
    } catch (const Error& e) {
      out.push_back({e.code(), n.id, e.what()});
    }
  }
  std::unordered_set<std::uint64_t, TripleHash> seen;
  for (const auto& e : edges_) {
    const std::string subject = std::string(to_string(e.kind)) + "(" + endpoint_name(e.head) + "->" +
                                endpoint_name(e.tail) + ")";
    if (is_dangling(e.head) || is_dangling(e.tail)) {
      out.push_back({ErrorCode::UnknownEndpoint, subject, "endpoint does not exist"});
      continue;
    }
    const auto sig = signature(e.kind);
    if (nodes_[e.head.value].kind != sig.head || nodes_[e.tail.value].kind != sig.tail) {
      out.push_back({ErrorCode::SignatureMismatch, subject,
                     "expected " + std::string(to_string(sig.head)) + "->" + std::string(to_string(sig.tail))});
    }
    if (!seen.insert(triple_key(e.kind, e.head, e.tail)).second)
      out.push_back({ErrorCode::DuplicateEdge, subject, "repeated triple"});
  }

  // Index/edge-list agreement: every stored edge appears exactly once per live endpoint.
  std::size_t indexed_out = 0, indexed_in = 0, live_heads = 0, live_tails = 0;
  for (const auto& adj : adjacency_)
    for (std::size_t k = 0; k < kEdgeKindCount; ++k) {
      indexed_out += adj.out[k].size();
      indexed_in += adj.in[k].size();
    }
  for (const auto& e : edges_) {
    live_heads += is_dangling(e.head) ? 0 : 1;
    live_tails += is_dangling(e.tail) ? 0 : 1;
  }
  if (indexed_out != live_heads || indexed_in != live_tails)
    out.push_back({ErrorCode::UnknownEndpoint, "<index>", "adjacency index disagrees with edge list"});
  return out;
}

}  // namespace edurec
