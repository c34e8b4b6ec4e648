#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "edurec/graph.hpp"

namespace edurec {

struct IngestReport {
  std::size_t nodes_read = 0;  // nodes accepted into the graph
  std::size_t edges_read = 0;  // edges accepted into the graph
  std::size_t malformed_lines = 0;
  std::vector<Violation> violations;  // malformed lines and rejected records
  double elapsed_seconds = 0.0;
};

struct LoadOptions {
  // Abort with MalformedLine once more than this many lines fail to parse.
  std::size_t max_malformed = 100;
};

struct LoadResult {
  HeteroGraph graph;  // frozen
  IngestReport report;
};

// Nodes file: {"id": str, "kind": str, "attrs": {...}} per line.
// Edges file: {"kind": str, "head": str, "tail": str} per line.
LoadResult load_jsonl(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                      const LoadOptions& options = {});

// Writes both files in graph insertion order; returns total bytes written.
std::size_t save_jsonl(const HeteroGraph& graph, const std::filesystem::path& nodes_path,
                       const std::filesystem::path& edges_path);

// GraphML 1.0 with a "kind" key on nodes and edges plus one key per attribute.
std::size_t export_graphml(const HeteroGraph& graph, const std::filesystem::path& path);
std::string to_graphml(const HeteroGraph& graph);

}  // namespace edurec
