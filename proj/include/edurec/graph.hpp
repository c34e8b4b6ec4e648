#pragma once

// Heterogeneous property graph for the student / course / teacher schema.
//
// Nodes live in a dense vector addressed by NodeHandle; the string id -> handle
// map is the only way in from outside. Edges are typed and each EdgeKind has a
// fixed (head kind, tail kind) signature. Per-node adjacency is partitioned by
// EdgeKind in both directions so typed neighbourhood scans never filter.
//
// Lifecycle: build with add_node/add_edge, then freeze(). A frozen graph rejects
// mutation and may be shared read-only across threads.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "edurec/error.hpp"

namespace edurec {

enum class NodeKind : std::uint8_t { Student, Course, Teacher, School, Career, Major, Category };
inline constexpr std::size_t kNodeKindCount = 7;

enum class EdgeKind : std::uint8_t { Belong, BelongTo, Learn, LearnIn, MajorIn, Teach, TeachIn, WorkIn };
inline constexpr std::size_t kEdgeKindCount = 8;

inline constexpr std::array<NodeKind, kNodeKindCount> kAllNodeKinds = {
    NodeKind::Student, NodeKind::Course, NodeKind::Teacher, NodeKind::School,
    NodeKind::Career,  NodeKind::Major,  NodeKind::Category};
inline constexpr std::array<EdgeKind, kEdgeKindCount> kAllEdgeKinds = {
    EdgeKind::Belong, EdgeKind::BelongTo, EdgeKind::Learn,   EdgeKind::LearnIn,
    EdgeKind::MajorIn, EdgeKind::Teach,   EdgeKind::TeachIn, EdgeKind::WorkIn};

enum class Direction : std::uint8_t { Out, In, Both };

struct EdgeSignature {
  NodeKind head;
  NodeKind tail;
};

EdgeSignature signature(EdgeKind kind);

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

using AttrValue = std::variant<std::string, double>;
using AttrMap = std::map<std::string, AttrValue, std::less<>>;

struct NodeRecord {
  std::string id;
  NodeKind kind = NodeKind::Student;
  AttrMap attrs;

  // 0 when absent or non-numeric.
  double number(std::string_view key) const;
  // Empty when absent or numeric.
  std::string text(std::string_view key) const;
};

// Attribute contract per kind. Numeric attrs must be present and >= 0.
struct AttrSchema {
  std::vector<std::string_view> required_numbers;
  std::vector<std::string_view> required_texts;
  std::vector<std::string_view> optional_texts;
};
const AttrSchema& attr_schema(NodeKind kind);

struct NodeHandle {
  std::uint32_t value = 0;
  friend bool operator==(NodeHandle, NodeHandle) = default;
  friend auto operator<=>(NodeHandle, NodeHandle) = default;
};

inline constexpr std::uint32_t kNoNode = 0xffffffffu;

struct Edge {
  EdgeKind kind;
  NodeHandle head;
  NodeHandle tail;
};

using EdgeIndex = std::uint32_t;

struct PathStep {
  EdgeKind kind;
  Direction direction;  // Out or In
};

// terminal id -> number of distinct paths reaching it
using TerminalCounts = std::map<std::string, std::size_t>;

struct KindCounts {
  std::array<std::size_t, kNodeKindCount> nodes{};
  std::array<std::size_t, kEdgeKindCount> edges{};

  std::size_t of(NodeKind k) const { return nodes[static_cast<std::size_t>(k)]; }
  std::size_t of(EdgeKind k) const { return edges[static_cast<std::size_t>(k)]; }
  std::size_t total_nodes() const;
  std::size_t total_edges() const;
  friend bool operator==(const KindCounts&, const KindCounts&) = default;
};

struct Violation {
  ErrorCode rule;
  std::string subject;  // offending node id or "kind(head->tail)"
  std::string detail;
};

class HeteroGraph {
 public:
  NodeHandle add_node(NodeRecord record);
  EdgeIndex add_edge(EdgeKind kind, std::string_view head, std::string_view tail);
  EdgeIndex add_edge(EdgeKind kind, NodeHandle head, NodeHandle tail);

  // Appends an edge without endpoint, signature or duplicate checks. Unknown
  // ids are stored as dangling endpoints so schema_validate can report them.
  // Only ingestion diagnostics and tests have a reason to call this.
  void add_edge_unchecked(EdgeKind kind, std::string_view head, std::string_view tail);

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<NodeHandle> find(std::string_view id) const;
  NodeHandle handle(std::string_view id) const;  // throws UnknownNode
  const NodeRecord& node(NodeHandle h) const { return nodes_[h.value]; }
  const NodeRecord& node(std::string_view id) const { return node(handle(id)); }

  std::span<const NodeRecord> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  // Edge indices incident to h of one kind in one direction (Out or In).
  std::span<const EdgeIndex> incident(NodeHandle h, EdgeKind kind, Direction dir) const;

  std::size_t degree(std::string_view id, std::optional<EdgeKind> kind = std::nullopt,
                     Direction dir = Direction::Both) const;
  std::size_t degree(NodeHandle h, std::optional<EdgeKind> kind = std::nullopt,
                     Direction dir = Direction::Both) const;

  // Depth-first enumeration of every path following the step sequence from
  // start; each terminal is counted once per distinct path reaching it.
  TerminalCounts dfs_collect(std::string_view start, std::span<const PathStep> path) const;

  // Handles of every node of a kind, ordered by id.
  std::vector<NodeHandle> nodes_of_kind(NodeKind kind) const;

  KindCounts counts_by_kind() const;
  std::vector<Violation> schema_validate() const;

 private:
  struct Adjacency {
    std::array<std::vector<EdgeIndex>, kEdgeKindCount> out;
    std::array<std::vector<EdgeIndex>, kEdgeKindCount> in;
  };

  struct TripleHash {
    std::size_t operator()(std::uint64_t v) const noexcept { return std::hash<std::uint64_t>{}(v); }
  };

  void require_mutable() const;
  static std::uint64_t triple_key(EdgeKind kind, NodeHandle head, NodeHandle tail);
  std::string endpoint_name(NodeHandle h) const;

  std::vector<NodeRecord> nodes_;
  std::vector<Edge> edges_;
  std::vector<Adjacency> adjacency_;
  std::unordered_map<std::string, NodeHandle> index_;
  std::unordered_set<std::uint64_t, TripleHash> triples_;
  std::vector<std::string> dangling_;  // names for unchecked edges with unknown endpoints
  bool frozen_ = false;
};

// Attribute validation shared by add_node and ingestion.
void validate_attrs(const NodeRecord& record);

}  // namespace edurec
