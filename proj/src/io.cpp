#include "edurec/io.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace edurec {

namespace {

using nlohmann::json;

void record_malformed(IngestReport& report, const LoadOptions& options, const std::filesystem::path& file,
                      std::size_t line_no, const std::string& why) {
  ++report.malformed_lines;
  report.violations.push_back({ErrorCode::MalformedLine, file.filename().string() + ":" + std::to_string(line_no), why});
  if (report.malformed_lines > options.max_malformed)
    throw Error(ErrorCode::MalformedLine, "more than " + std::to_string(options.max_malformed) +
                                              " malformed lines, last at " + file.string() + ":" +
                                              std::to_string(line_no));
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

NodeRecord parse_node(const json& j) {
  NodeRecord r;
  r.id = j.at("id").get<std::string>();
  const auto kind_name = j.at("kind").get<std::string>();
  auto kind = parse_node_kind(kind_name);
  if (!kind) throw Error(ErrorCode::UnknownKind, kind_name);
  r.kind = *kind;
  if (auto it = j.find("attrs"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::MalformedLine, "attrs must be an object");
    for (const auto& [key, value] : it->items()) {
      if (value.is_number()) r.attrs.emplace(key, value.get<double>());
      else if (value.is_string()) r.attrs.emplace(key, value.get<std::string>());
      else throw Error(ErrorCode::MalformedLine, "attr '" + key + "' must be a number or string");
    }
  }
  return r;
}

json node_to_json(const NodeRecord& n) {
  json attrs = json::object();
  for (const auto& [key, value] : n.attrs)
    std::visit([&](const auto& v) { attrs[key] = v; }, value);
  return json{{"id", n.id}, {"kind", to_string(n.kind)}, {"attrs", attrs}};
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

LoadResult load_jsonl(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                      const LoadOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  LoadResult result;
  auto& graph = result.graph;
  auto& report = result.report;

  auto nodes_in = open_input(nodes_path);
  auto edges_in = open_input(edges_path);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(nodes_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    NodeRecord record;
    try {
      record = parse_node(json::parse(line));
    } catch (const json::exception& e) {
      record_malformed(report, options, nodes_path, line_no, e.what());
      continue;
    } catch (const Error& e) {
      record_malformed(report, options, nodes_path, line_no, e.what());
      continue;
    }
    try {
      graph.add_node(std::move(record));
      ++report.nodes_read;
    } catch (const Error& e) {
      report.violations.push_back({e.code(), nodes_path.filename().string() + ":" + std::to_string(line_no), e.what()});
    }
  }

  line_no = 0;
  while (std::getline(edges_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    EdgeKind kind{};
    std::string head, tail;
    try {
      const auto j = json::parse(line);
      const auto kind_name = j.at("kind").get<std::string>();
      auto parsed = parse_edge_kind(kind_name);
      if (!parsed) throw Error(ErrorCode::UnknownKind, kind_name);
      kind = *parsed;
      head = j.at("head").get<std::string>();
      tail = j.at("tail").get<std::string>();
    } catch (const json::exception& e) {
      record_malformed(report, options, edges_path, line_no, e.what());
      continue;
    } catch (const Error& e) {
      record_malformed(report, options, edges_path, line_no, e.what());
      continue;
    }
    try {
      graph.add_edge(kind, head, tail);
      ++report.edges_read;
    } catch (const Error& e) {
      report.violations.push_back({e.code(), edges_path.filename().string() + ":" + std::to_string(line_no), e.what()});
    }
  }

  graph.freeze();
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::size_t save_jsonl(const HeteroGraph& graph, const std::filesystem::path& nodes_path,
                       const std::filesystem::path& edges_path) {
  std::size_t bytes = 0;
  {
    auto out = open_output(nodes_path);
    for (const auto& n : graph.nodes()) {
      const auto text = node_to_json(n).dump() + "\n";
      out << text;
      bytes += text.size();
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + nodes_path.string());
  }
  {
    auto out = open_output(edges_path);
    for (const auto& e : graph.edges()) {
      json j{{"kind", to_string(e.kind)}, {"head", graph.node(e.head).id}, {"tail", graph.node(e.tail).id}};
      const auto text = j.dump() + "\n";
      out << text;
      bytes += text.size();
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + edges_path.string());
  }
  return bytes;
}

std::string to_graphml(const HeteroGraph& graph) {
  // Collect every attribute name with its GraphML type; a name used with both
  // types is declared as string.
  std::map<std::string, std::string> key_types;
  for (const auto& n : graph.nodes())
    for (const auto& [key, value] : n.attrs) {
      const std::string type = std::holds_alternative<double>(value) ? "double" : "string";
      auto [it, inserted] = key_types.emplace(key, type);
      if (!inserted && it->second != type) it->second = "string";
    }

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
        "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
        "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
        "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
  os << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n";
  os << "  <key id=\"ekind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n";
  for (const auto& [key, type] : key_types)
    os << "  <key id=\"a_" << xml_escape(key) << "\" for=\"node\" attr.name=\"" << xml_escape(key)
       << "\" attr.type=\"" << type << "\"/>\n";
  os << "  <graph id=\"G\" edgedefault=\"directed\">\n";
  for (const auto& n : graph.nodes()) {
    os << "    <node id=\"" << xml_escape(n.id) << "\">\n";
    os << "      <data key=\"kind\">" << to_string(n.kind) << "</data>\n";
    for (const auto& [key, value] : n.attrs) {
      os << "      <data key=\"a_" << xml_escape(key) << "\">";
      if (const auto* d = std::get_if<double>(&value)) os << format_double(*d);
      else os << xml_escape(std::get<std::string>(value));
      os << "</data>\n";
    }
    os << "    </node>\n";
  }
  for (const auto& e : graph.edges()) {
    os << "    <edge source=\"" << xml_escape(graph.node(e.head).id) << "\" target=\""
       << xml_escape(graph.node(e.tail).id) << "\">\n"
       << "      <data key=\"ekind\">" << to_string(e.kind) << "</data>\n"
       << "    </edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
  return os.str();
}

std::size_t export_graphml(const HeteroGraph& graph, const std::filesystem::path& path) {
  if (!graph.frozen()) throw Error(ErrorCode::GraphNotFrozen, "export requires a frozen graph");
  const auto text = to_graphml(graph);
  auto out = open_output(path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
  return text.size();
}

}  // namespace edurec
