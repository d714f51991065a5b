#include "qpt/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qpt/error.hpp"

namespace qpt::io {

namespace {

json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::ParseError, "complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string csv_optional(const std::optional<double>& x) { return x ? format_double(*x) : std::string("nan"); }

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cplx_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error(Errc::ParseError, "matrix must be nested arrays");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw Error(Errc::ParseError, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json to_json(const MubFamily& family) {
  json bases = json::array();
  for (const auto& basis : family.bases()) {
    json b = json::array();
    for (const auto& s : basis) {
      json v = json::array();
      for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) v.push_back(cplx_to_json(s.amplitudes(i)));
      b.push_back(std::move(v));
    }
    bases.push_back(std::move(b));
  }
  return json{{"dim", family.dim()}, {"bases", bases}};
}

MubFamily mub_family_from_json(const json& j) {
  const int d = j.at("dim").get<int>();
  std::vector<std::vector<PureState>> bases;
  for (const auto& b : j.at("bases")) {
    std::vector<PureState> states;
    for (const auto& v : b) {
      Vector amp(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) amp(static_cast<Eigen::Index>(i)) = cplx_from_json(v[i]);
      states.push_back({amp});
    }
    bases.push_back(std::move(states));
  }
  return MubFamily(d, std::move(bases));
}

json channel_to_json(const Channel& channel, const std::string& representation) {
  json j{{"dim", channel.dim()}, {"representation", representation}, {"label", channel.label()}};
  if (representation == "choi") {
    j["payload"] = matrix_to_json(channel.choi().matrix);
  } else if (representation == "kraus") {
    const KrausSet k = channel.kraus() ? *channel.kraus() : choi_to_kraus(channel.choi());
    json ops = json::array();
    for (const auto& op : k.operators) ops.push_back(matrix_to_json(op));
    j["payload"] = ops;
  } else if (representation == "chi_diag") {
    const ProcessMatrix chi = channel.chi();
    const Matrix off = chi.matrix - Matrix(chi.matrix.diagonal().asDiagonal());
    if (linalg::max_abs(off) > 1e-10) throw Error(Errc::InvalidModel, "χ is not diagonal");
    json w = json::object();
    for (Eigen::Index m = 0; m < chi.matrix.rows(); ++m) {
      const double x = chi.matrix(m, m).real();
      if (std::abs(x) > 1e-15) w[std::to_string(m)] = x;
    }
    j["payload"] = w;
  } else {
    throw Error(Errc::InvalidModel, "unknown representation '" + representation + "'");
  }
  return j;
}

Channel channel_from_json(const json& j) {
  if (!j.contains("dim") || !j.contains("representation") || !j.contains("payload"))
    throw Error(Errc::ParseError, "channel file needs dim, representation and payload");
  const int d = j.at("dim").get<int>();
  const std::string rep = j.at("representation").get<std::string>();
  const std::string label = j.value("label", rep);
  const json& payload = j.at("payload");
  if (rep == "choi") {
    return Channel(ChoiMatrix{d, matrix_from_json(payload)}, label);
  }
  if (rep == "kraus") {
    KrausSet k{d, {}};
    for (const auto& op : payload) k.operators.push_back(matrix_from_json(op));
    return Channel(kraus_to_choi(k), label, k);
  }
  if (rep == "chi_diag") {
    std::map<int, double> w;
    for (const auto& [key, value] : payload.items()) w[std::stoi(key)] = value.get<double>();
    Channel ch = diagonal_chi_channel(d, w);
    return Channel(ch.choi(), label, ch.kraus());
  }
  throw Error(Errc::ParseError, "unknown representation '" + rep + "'");
}

json chi_to_json(const ProcessMatrix& chi) {
  return json{{"dim", chi.dim}, {"basis", chi.basis ? chi.basis->name : ""}, {"matrix", matrix_to_json(chi.matrix)}};
}

void write_counts_csv(std::ostream& os, const TomographyData& data) {
  const int d = data.dim;
  const bool exact = data.model.kind == SamplingModel::Kind::Exact;
  os << "alpha,m,beta,n,count\n";
  for (int a : data.prep_bases)
    for (int m = 1; m <= d; ++m)
      for (int b : data.meas_bases)
        for (int n = 1; n <= d; ++n) {
          const double c = data.at(a, m, b, n);
          os << a << ',' << m << ',' << b << ',' << n << ',';
          if (exact)
            os << format_double(c);
          else
            os << static_cast<long long>(std::llround(c));
          os << '\n';
        }
}

void read_counts_csv(std::istream& is, TomographyData& data) {
  const int d = data.dim;
  if (d < 2) throw Error(Errc::ParseError, "count file needs a dimension >= 2");
  SettingIndex idx{d};
  data.counts.assign(idx.size(), 0.0);
  std::vector<bool> prep(static_cast<std::size_t>(d + 2), false), meas(static_cast<std::size_t>(d + 2), false);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("alpha", 0) == 0) continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    auto fail = [&](const std::string& why) {
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": " + why + " ('" + line + "')");
    };
    if (cells.size() != 5) fail("expected 5 columns");
    int labels[4];
    for (int c = 0; c < 4; ++c) {
      std::size_t used = 0;
      try {
        labels[c] = std::stoi(cells[static_cast<std::size_t>(c)], &used);
      } catch (const std::exception&) {
        fail("bad integer in column " + std::to_string(c + 1));
      }
      if (used != cells[static_cast<std::size_t>(c)].size()) fail("bad integer in column " + std::to_string(c + 1));
    }
    double count = 0.0;
    try {
      std::size_t used = 0;
      count = std::stod(cells[4], &used);
      if (used != cells[4].size()) fail("bad count");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("bad count");
    }
    if (!(count >= 0.0) || !std::isfinite(count)) fail("count must be a nonnegative number");
    const auto [a, m, b, n] = std::array<int, 4>{labels[0], labels[1], labels[2], labels[3]};
    if (a < 1 || a > d + 1 || b < 1 || b > d + 1 || m < 1 || m > d || n < 1 || n > d) fail("label out of range");
    data.counts[idx(a, m, b, n)] = count;
    prep[static_cast<std::size_t>(a)] = true;
    meas[static_cast<std::size_t>(b)] = true;
  }
  data.prep_bases.clear();
  data.meas_bases.clear();
  for (int a = 1; a <= d + 1; ++a) {
    if (prep[static_cast<std::size_t>(a)]) data.prep_bases.push_back(a);
    if (meas[static_cast<std::size_t>(a)]) data.meas_bases.push_back(a);
  }
  if (data.prep_bases.empty()) throw Error(Errc::ParseError, "count file has no rows");
}

json counts_sidecar(const TomographyData& data) {
  json model{{"kind", to_string(data.model.kind)}};
  if (data.model.kind == SamplingModel::Kind::Poisson) model["mean_counts"] = data.model.mean_counts;
  if (data.model.kind == SamplingModel::Kind::Multinomial) model["total"] = data.model.total;
  return json{{"dim", data.dim},
              {"model", model},
              {"seed", data.seed},
              {"integration_seconds", data.integration_seconds},
              {"prep_bases", data.prep_bases},
              {"meas_bases", data.meas_bases}};
}

TomographyData counts_skeleton_from_sidecar(const json& j) {
  TomographyData data;
  data.dim = j.at("dim").get<int>();
  const json& model = j.at("model");
  data.model.kind = sampling_kind_from_string(model.at("kind").get<std::string>());
  data.model.mean_counts = model.value("mean_counts", 0.0);
  data.model.total = model.value("total", std::int64_t{0});
  data.seed = j.value("seed", std::uint64_t{0});
  data.integration_seconds = j.value("integration_seconds", 0.0);
  return data;
}

void write_probabilities_csv(std::ostream& os, const ProbabilityTable& table) {
  os << "alpha,m,beta,n,p\n";
  for (int a : table.prep_bases)
    for (int m = 1; m <= table.dim; ++m)
      for (int b : table.meas_bases)
        for (int n = 1; n <= table.dim; ++n)
          os << a << ',' << m << ',' << b << ',' << n << ',' << format_double(table.at(a, m, b, n)) << '\n';
}

json to_json(const ChannelMetrics& m) {
  return json{{"d", m.dim},          {"F_P", m.process_fidelity}, {"F_avg", m.average_fidelity},
              {"P_avg", m.average_purity}, {"Q_bb84", m.q_bb84},   {"Q_full", m.q_full},
              {"attack_label", m.label}};
}

json to_json(const KeyRateReport& r) {
  return json{{"protocol", to_string(r.protocol)}, {"d", r.dim},
              {"Q", optional_number(r.q)},         {"K", optional_number(r.key_rate)},
              {"detection", to_string(r.detection)}, {"efficiency", r.efficiency}};
}

json to_json(const MleResult& r) {
  return json{{"iterations", r.iterations},
              {"log_likelihood", r.log_likelihood},
              {"log_likelihood_trace", r.log_likelihood_trace},
              {"stop_reason", to_string(r.stop_reason)},
              {"tp_deviation", r.tp_deviation},
              {"last_step", r.last_step},
              {"min_eigenvalue", linalg::min_eigenvalue(r.estimate.matrix)}};
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "F,Q,K_bb84,K_mub,K_dw\n";
  for (const auto& r : rows)
    os << format_double(r.fidelity) << ',' << format_double(r.q_full) << ',' << csv_optional(r.k_bb84) << ','
       << csv_optional(r.k_mub) << ',' << csv_optional(r.k_dw) << '\n';
}

void write_sweep_svg(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& title) {
  constexpr double w = 640, h = 420, left = 60, right = 20, top = 40, bottom = 50;
  double qmax = 1e-9, kmin = 0.0, kmax = 1e-9;
  for (const auto& r : rows) {
    qmax = std::max(qmax, r.q_full);
    for (const auto& k : {r.k_bb84, r.k_mub, r.k_dw})
      if (k) {
        kmin = std::min(kmin, *k);
        kmax = std::max(kmax, *k);
      }
  }
  kmin = std::max(kmin, -kmax);  // keep the positive region readable
  auto sx = [&](double q) { return left + (w - left - right) * q / qmax; };
  auto sy = [&](double k) { return top + (h - top - bottom) * (kmax - std::clamp(k, kmin, kmax)) / (kmax - kmin); };

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].q_full < rows[b].q_full; });

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << w - right << "\" y2=\"" << sy(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">Q (max " << format_double(qmax)
     << ")</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2 << "\" transform=\"rotate(-90 14 " << h / 2 << ")\">K [bits]</text>\n";

  struct Series {
    const char* name;
    const char* color;
    std::optional<double> SweepRow::*field;
  };
  const Series series[] = {{"BB84", "#1f3b73", &SweepRow::k_bb84},
                           {"(d+1)-MUB", "#2e8b57", &SweepRow::k_mub},
                           {"full characterization", "#d4a017", &SweepRow::k_dw}};
  int legend = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    bool any = false;
    for (auto i : order) {
      const auto& k = rows[i].*(s.field);
      if (!k) continue;
      pts << sx(rows[i].q_full) << ',' << sy(*k) << ' ';
      any = true;
    }
    if (!any) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
    os << "<text x=\"" << w - right - 180 << "\" y=\"" << top + 16 * (legend + 1) << "\" fill=\"" << s.color << "\">"
       << s.name << "</text>\n";
    ++legend;
  }
  os << "</svg>\n";
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(Errc::ParseError, "cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, p.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + p.string());
  out << text;
}

}  // namespace qpt::io
