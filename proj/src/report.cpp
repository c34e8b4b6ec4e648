#include "edurec/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

namespace edurec {

namespace {

constexpr std::array<std::string_view, 8> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                      "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error(ErrorCode::IoError, "sha256 failed");
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(data);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

std::string write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto text = doc.dump(2) + "\n";
  write_text(path, text);
  return text;
}

nlohmann::json association_json(const AssociationResult& r) {
  nlohmann::json pearson = nlohmann::json::object();
  for (const auto& [name, value] : r.pearson) pearson[name] = value ? nlohmann::json(*value) : nlohmann::json(nullptr);
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t i = 0; i < r.chi.table.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < r.chi.table.cols(); ++j) row.push_back(r.chi.table.at(i, j));
    table.push_back(row);
  }
  return {{"schema_version", kReportSchemaVersion},
          {"dimension", to_string(r.dimension)},
          {"scenario", to_string(r.scenario)},
          {"engagement_components", scenario_component_names(r.scenario)},
          {"k", r.k},
          {"n", r.n},
          {"chi2", r.chi.statistic},
          {"dof", r.chi.dof},
          {"p", r.chi.p_value},
          {"low_expected_warning", r.chi.low_expected},
          {"rand", r.rand},
          {"pearson", pearson},
          {"contingency", table}};
}

std::string features_csv(const FeatureMatrix& features, std::span<const int> clusters) {
  std::string out = "student_id,variance,top_share,cluster\n";
  for (std::size_t i = 0; i < features.ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out += features.ids[i] + "," + csv_number(features.values(r, 0)) + "," + csv_number(features.values(r, 1)) + "," +
           std::to_string(i < clusters.size() ? clusters[i] : -1) + "\n";
  }
  return out;
}

std::string scatter_svg(const FeatureMatrix& features, std::span<const int> clusters, std::string_view title) {
  constexpr double W = 640, H = 480, left = 60, right = 20, top = 40, bottom = 50;
  const auto n = features.values.rows();
  double xmin = 0, xmax = 1;
  if (n > 0) {
    xmin = features.values.col(0).minCoeff();
    xmax = features.values.col(0).maxCoeff();
  }
  if (xmax <= xmin) xmax = xmin + 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - y * (H - top - bottom); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << " " << H << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "  <text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">";
  for (char c : title) {
    if (c == '<') os << "&lt;";
    else if (c == '>') os << "&gt;";
    else if (c == '&') os << "&amp;";
    else os << c;
  }
  os << "</text>\n";
  os << "  <line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
     << "\" stroke=\"black\"/>\n";
  os << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
     << "\" stroke=\"black\"/>\n";
  os << "  <text x=\"" << W / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">course count variance</text>\n";
  os << "  <text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">top share</text>\n";
  os << "  <text x=\"" << left << "\" y=\"" << H - bottom + 16 << "\" font-family=\"sans-serif\" font-size=\"10\">"
     << fixed(xmin, 2) << "</text>\n";
  os << "  <text x=\"" << W - right << "\" y=\"" << H - bottom + 16
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fixed(xmax, 2) << "</text>\n";
  os << "  <g id=\"points\">\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<std::size_t>(i) < clusters.size() ? clusters[static_cast<std::size_t>(i)] : 0;
    os << "    <circle cx=\"" << fixed(px(features.values(i, 0)), 2) << "\" cy=\""
       << fixed(py(features.values(i, 1)), 2) << "\" r=\"3\" fill=\"" << kPalette[static_cast<std::size_t>(c) % kPalette.size()]
       << "\" fill-opacity=\"0.7\"/>\n";
  }
  os << "  </g>\n</svg>\n";
  return os.str();
}

nlohmann::json recommendations_json(std::span<const Recommendation> recs, std::size_t top_n) {
  nlohmann::json students = nlohmann::json::array();
  for (const auto& r : recs) {
    nlohmann::json ranked = nlohmann::json::array();
    for (const auto& [course, s] : r.ranked) ranked.push_back({{"course", course}, {"score", s}});
    students.push_back({{"student", r.student}, {"ranked", ranked}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"top_n", top_n}, {"students", students}};
}

nlohmann::json groups_json(const GroupReport& report) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : report.groups)
    groups.push_back({{"cluster", g.cluster}, {"members", g.members}, {"cohesion", g.cohesion}});
  return {{"schema_version", kReportSchemaVersion},
          {"mean_cohesion", report.mean_cohesion},
          {"students", report.students},
          {"groups", groups}};
}

std::string RunManifest::config_hash() const { return sha256_hex(config.dump()); }

nlohmann::json RunManifest::to_json() const {
  auto checksums = [](const std::vector<std::filesystem::path>& paths) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& p : paths) j[p.generic_string()] = sha256_file(p);
    return j;
  };
  return {{"schema_version", kReportSchemaVersion},
          {"command", command},
          {"config", config},
          {"config_hash", config_hash()},
          {"seed", seed},
          {"inputs", checksums(inputs)},
          {"outputs", checksums(outputs)},
          {"timings", timings}};
}

}  // namespace edurec
