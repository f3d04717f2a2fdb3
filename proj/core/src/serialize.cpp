#include "rootstate/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rootstate {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// short form for map keys like "0.05"
std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

json continuous_basis_to_json(const ContinuousBasis& basis) {
  return json{{"type", "continuous"},
              {"s", basis.size()},
              {"scale", basis.scale()},
              {"quadrature_order", basis.quadrature_order()}};
}

json discrete_basis_to_json(const DiscreteBasis& basis) {
  json j{{"type", "discrete"}, {"s", basis.dimension()}};
  if (basis.is_dft()) {
    j["unitary"] = "dft";
  } else {
    json re = json::array(), im = json::array();
    for (int r = 0; r < basis.dimension(); ++r) {
      json rr = json::array(), ri = json::array();
      for (int c = 0; c < basis.dimension(); ++c) {
        rr.push_back(basis.unitary()(r, c).real());
        ri.push_back(basis.unitary()(r, c).imag());
      }
      re.push_back(rr);
      im.push_back(ri);
    }
    j["unitary"] = json{{"re", re}, {"im", im}};
  }
  return j;
}

json state_to_json(const StateVector& state, const json& basis) {
  json j;
  j["s"] = state.size();
  j["re"] = to_vec(state.coefficients().real());
  j["im"] = to_vec(state.coefficients().imag());
  if (!basis.is_null()) j["basis"] = basis;
  return j;
}

StateVector state_from_json(const json& j) {
  if (!j.contains("s") || !j.contains("re") || !j.contains("im"))
    throw ParseError("state JSON needs fields s, re, im");
  int s = j.at("s").get<int>();
  auto re = j.at("re").get<std::vector<double>>();
  auto im = j.at("im").get<std::vector<double>>();
  if (int(re.size()) != s || int(im.size()) != s)
    throw ParseError("state JSON: re/im length does not match s");
  Eigen::VectorXcd c(s);
  for (int i = 0; i < s; ++i) c[i] = {re[i], im[i]};
  return StateVector(c);
}

json result_to_json(const EstimationResult& result, const json& basis) {
  json j;
  j["estimate"] = state_to_json(result.estimate, basis);
  j["lambda"] = result.lambda;
  j["loglik"] = result.log_likelihood;
  j["iterations"] = result.iterations;
  j["residual"] = result.residual;
  j["converged"] = result.converged;
  j["floor_hits"] = result.floor_hits;
  j["phases_unidentified"] = result.phases_unidentified;
  return j;
}

json counts_to_json(const RegisterCounts& counts) {
  return json{{"direct", std::vector<int>(counts.direct.data(),
                                          counts.direct.data() + counts.direct.size())},
              {"conjugate", std::vector<int>(counts.conjugate.data(),
                                             counts.conjugate.data() + counts.conjugate.size())}};
}

RegisterCounts counts_from_json(const json& j) {
  if (!j.contains("direct") || !j.contains("conjugate"))
    throw ParseError("register counts JSON needs fields direct, conjugate");
  auto direct = j.at("direct").get<std::vector<long>>();
  auto conjugate = j.at("conjugate").get<std::vector<long>>();
  if (direct.size() != conjugate.size())
    throw ParseError("register counts JSON: direct/conjugate length mismatch");
  if (direct.empty()) throw ParseError("register counts JSON: no observations");
  RegisterCounts counts;
  counts.direct.resize(direct.size());
  counts.conjugate.resize(conjugate.size());
  for (size_t i = 0; i < direct.size(); ++i) {
    if (direct[i] < 0)
      throw ParseError("register counts JSON: negative direct count at index " +
                       std::to_string(i));
    if (conjugate[i] < 0)
      throw ParseError("register counts JSON: negative conjugate count at index " +
                       std::to_string(i));
    counts.direct[int(i)] = int(direct[i]);
    counts.conjugate[int(i)] = int(conjugate[i]);
  }
  return counts;
}

RegisterCounts read_counts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return counts_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_counts_file(const std::string& path, const RegisterCounts& counts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << counts_to_json(counts).dump(2) << '\n';
}

json test_report_to_json(const TestReport& report) {
  json reject;
  for (const auto& [alpha, rej] : report.reject_at) reject[fmt_short(alpha)] = rej;
  return json{{"kind", report.kind},
              {"statistic", report.statistic},
              {"dof", report.dof},
              {"p_value", report.p_value},
              {"reject_at", reject}};
}

json cone_to_json(const ConfidenceCone& cone) {
  return json{{"axis", state_to_json(cone.axis)},
              {"half_angle", cone.half_angle},
              {"alpha", cone.alpha},
              {"dof", cone.dof},
              {"n_total", cone.n_total},
              {"degenerate", cone.degenerate}};
}

json ehrenfest_report_to_json(const EhrenfestReport& report) {
  json rows = json::array();
  for (int k = 0; k < report.residual.rows(); ++k) {
    json row = json::array();
    for (int j = 0; j < report.residual.cols(); ++j) row.push_back(report.residual(k, j));
    rows.push_back(row);
  }
  return json{{"max_residual", report.max_residual},
              {"residual_matrix", rows},
              {"hamiltonian_deviation", report.hamiltonian_deviation},
              {"pass", report.pass},
              {"tolerance", report.tolerance}};
}

json order_selection_to_json(const OrderSelection& selection) {
  json cands = json::array();
  for (const auto& c : selection.candidates)
    cands.push_back(json{{"s", c.s},
                         {"loglik", c.log_likelihood},
                         {"score", c.score},
                         {"converged", c.converged}});
  return json{{"chosen", selection.chosen},
              {"penalty", "aic_free_parameters (experimental)"},
              {"candidates", cands}};
}

void write_sample_file(const std::string& path, const SampleFile& sample) {
  if (sample.space != "coordinate" && sample.space != "momentum")
    throw std::invalid_argument("write_sample_file: bad space tag " + sample.space);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# space=" << sample.space << " scale=" << fmt17(sample.scale) << '\n';
  for (long i = 0; i < sample.points.size(); ++i) out << fmt17(sample.points[i]) << '\n';
}

SampleFile read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  SampleFile sample;
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ":1: missing header line");
  {
    std::istringstream header(line);
    std::string hash, token;
    header >> hash;
    bool have_space = false;
    if (hash == "#") {
      while (header >> token) {
        if (token.rfind("space=", 0) == 0) {
          sample.space = token.substr(6);
          have_space = true;
        } else if (token.rfind("scale=", 0) == 0) {
          sample.scale = std::stod(token.substr(6));
        }
      }
    }
    if (!have_space || (sample.space != "coordinate" && sample.space != "momentum"))
      throw ParseError(path + ":1: header must declare space=coordinate|momentum");
    if (!(sample.scale > 0.0) || !std::isfinite(sample.scale))
      throw ParseError(path + ":1: scale must be positive");
  }

  std::vector<double> points;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string body = line.substr(first, last - first + 1);
    if (body[0] == '#') continue;
    size_t used = 0;
    double v;
    try {
      v = std::stod(body, &used);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed value '" + body + "'");
    }
    if (used != body.size())
      throw ParseError(path + ":" + std::to_string(lineno) + ": trailing junk '" + body + "'");
    if (!std::isfinite(v))
      throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite observation");
    points.push_back(v);
  }
  if (points.empty()) throw ParseError(path + ": no observations");
  sample.points = Eigen::Map<Eigen::VectorXd>(points.data(), long(points.size()));
  return sample;
}

}  // namespace rootstate
