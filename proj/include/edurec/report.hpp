#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "edurec/analytics.hpp"
#include "edurec/gcn.hpp"
#include "edurec/groups.hpp"

namespace edurec {

inline constexpr int kReportSchemaVersion = 1;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Pretty-printed with a trailing newline; returns the text written.
std::string write_json(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text(const std::filesystem::path& path, std::string_view text);

// {schema_version, dimension, scenario, k, chi2, dof, p, rand, pearson, n, ...}
nlohmann::json association_json(const AssociationResult& result);

// student_id,variance,top_share,cluster
std::string features_csv(const FeatureMatrix& features, std::span<const int> clusters);

// Scatter of variance (x) against top share (y), one circle per row, coloured by cluster.
std::string scatter_svg(const FeatureMatrix& features, std::span<const int> clusters, std::string_view title);

nlohmann::json recommendations_json(std::span<const Recommendation> recs, std::size_t top_n);
nlohmann::json groups_json(const GroupReport& report);

// One per CLI run. Artifact checksums depend only on the inputs; timings do not
// enter any artifact.
struct RunManifest {
  std::string command;
  nlohmann::json config;  // resolved options
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::map<std::string, double> timings;

  std::string config_hash() const;
  nlohmann::json to_json() const;  // computes checksums of inputs and outputs
};

}  // namespace edurec
