#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpt/channel.hpp"
#include "qpt/keyrate.hpp"
#include "qpt/metrics.hpp"
#include "qpt/mub.hpp"
#include "qpt/tomo.hpp"

namespace qpt::io {

using json = nlohmann::json;

json matrix_to_json(const Matrix& m);  // rows of [re, im]
Matrix matrix_from_json(const json& j);

json to_json(const MubFamily& family);
MubFamily mub_family_from_json(const json& j);

/// {dim, representation: "kraus"|"choi"|"chi_diag", payload, label}.
json channel_to_json(const Channel& channel, const std::string& representation = "choi");
Channel channel_from_json(const json& j);
json chi_to_json(const ProcessMatrix& chi);

/// alpha,m,beta,n,count (1-based labels).
void write_counts_csv(std::ostream& os, const TomographyData& data);
/// Parses rows into `data`, which must already carry dim. Throws
/// Error(ParseError) naming the offending line.
void read_counts_csv(std::istream& is, TomographyData& data);
json counts_sidecar(const TomographyData& data);
TomographyData counts_skeleton_from_sidecar(const json& j);

void write_probabilities_csv(std::ostream& os, const ProbabilityTable& table);

json to_json(const ChannelMetrics& m);
json to_json(const KeyRateReport& r);
json to_json(const MleResult& r);

/// F,Q,K_bb84,K_mub,K_dw.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Simple K-versus-Q line chart.
void write_sweep_svg(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& title);

json read_json_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

}  // namespace qpt::io
