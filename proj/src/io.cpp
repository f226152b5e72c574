#include "ordcop/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ordcop/errors.hpp"

namespace ordcop {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: field '") + key + "': " + e.what());
  }
}

Eigen::VectorXd vec_of(const json& j, const char* what) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + what + " must be a list of numbers");
  }
}

BivCopulaFamily family_of(const std::string& name, double nu) {
  try {
    return parse_family(name, nu);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

CovariateKind kind_of(const std::string& s) {
  if (s == "normal") return CovariateKind::Normal;
  if (s == "bernoulli") return CovariateKind::Bernoulli;
  if (s == "constant") return CovariateKind::Constant;
  throw ValidationError("config: covariate kind must be normal, bernoulli or constant");
}

std::string kind_name(CovariateKind k) {
  switch (k) {
    case CovariateKind::Normal:
      return "normal";
    case CovariateKind::Bernoulli:
      return "bernoulli";
    case CovariateKind::Constant:
      return "constant";
  }
  return "normal";
}

}  // namespace

ModelConfig parse_config(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  ModelConfig cfg;
  if (!j.contains("responses") || !j.at("responses").is_array() || j.at("responses").empty())
    throw ValidationError("config: 'responses' must be a non-empty list");
  std::set<std::string> seen;
  for (const auto& r : j.at("responses")) {
    ResponseConfig rc;
    rc.name = get_or<std::string>(r, "name", "");
    if (rc.name.empty()) throw ValidationError("config: every response needs a name");
    if (!seen.insert(rc.name).second) throw ValidationError("config: duplicate response name " + rc.name);
    rc.K = get_or<int>(r, "K", 0);
    if (rc.K < 2) throw ValidationError("config: response " + rc.name + " needs K >= 2");
    try {
      rc.link = parse_link(get_or<std::string>(r, "link", "probit"));
    } catch (const std::exception& e) {
      throw ValidationError(std::string("config: ") + e.what());
    }
    rc.covariates = get_or<std::vector<std::string>>(r, "covariates", {});
    rc.nu_grid = get_or<std::vector<double>>(r, "nu_grid", rc.nu_grid);
    if (rc.nu_grid.empty()) throw ValidationError("config: nu_grid of " + rc.name + " is empty");
    for (double nu : rc.nu_grid)
      if (!(nu > 0.0)) throw ValidationError("config: nu_grid values must be positive");
    rc.family = family_of(get_or<std::string>(r, "family", "bvn"), rc.nu_grid.front());
    cfg.responses.push_back(rc);
  }
  if (j.contains("link_grid")) {
    cfg.link_grid.clear();
    for (const auto& s : j.at("link_grid")) {
      try {
        cfg.link_grid.push_back(parse_link_copula(s.get<std::string>()));
      } catch (const std::exception& e) {
        throw ValidationError(std::string("config: link_grid: ") + e.what());
      }
    }
    if (cfg.link_grid.empty()) throw ValidationError("config: link_grid is empty");
  }
  if (j.contains("qmc")) {
    const auto& q = j.at("qmc");
    cfg.qmc.seed = get_or<std::uint64_t>(q, "seed", cfg.qmc.seed);
    cfg.qmc.shifts = get_or<int>(q, "shifts", cfg.qmc.shifts);
    cfg.qmc.points_per_shift = get_or<int>(q, "points_per_shift", cfg.qmc.points_per_shift);
    cfg.qmc.max_dim = get_or<int>(q, "max_dim", cfg.qmc.max_dim);
  }
  try {
    validate(cfg.qmc);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    cfg.optimizer.tol = get_or<double>(o, "tol", cfg.optimizer.tol);
    cfg.optimizer.max_iter = get_or<int>(o, "max_iter", cfg.optimizer.max_iter);
    cfg.optimizer.step_rel = get_or<double>(o, "step_rel", cfg.optimizer.step_rel);
    cfg.optimizer.step_min = get_or<double>(o, "step_min", cfg.optimizer.step_min);
  }
  cfg.stage = get_or<int>(j, "stage", cfg.stage);
  if (cfg.stage < 1 || cfg.stage > 3) throw ValidationError("config: stage must be 1, 2 or 3");
  if (cfg.stage >= 2 && cfg.d() < 2) throw ValidationError("config: stages 2 and 3 need at least two responses");
  cfg.max_free_params = get_or<int>(j, "max_free_params", cfg.max_free_params);
  cfg.force_step3 = get_or<bool>(j, "force_step3", cfg.force_step3);
  cfg.compute_se = get_or<bool>(j, "compute_se", cfg.compute_se);
  cfg.threads = std::max(1, get_or<int>(j, "threads", cfg.threads));
  cfg.data = get_or<std::string>(j, "data", "");

  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    SimulationConfig sc;
    sc.n = get_or<int>(s, "n", sc.n);
    sc.T = get_or<int>(s, "T", sc.T);
    sc.seed = get_or<std::uint64_t>(s, "seed", sc.seed);
    try {
      sc.link = parse_link_copula(get_or<std::string>(s, "link", "mvn"));
    } catch (const std::exception& e) {
      throw ValidationError(std::string("config: simulation.link: ") + e.what());
    }
    const int d = cfg.d();
    sc.R = Eigen::MatrixXd::Identity(d, d);
    if (s.contains("R")) {
      const auto rows = s.at("R");
      if (!rows.is_array() || static_cast<int>(rows.size()) != d)
        throw ValidationError("config: simulation.R must be a d x d matrix");
      for (int a = 0; a < d; ++a) {
        const Eigen::VectorXd row = vec_of(rows[a], "simulation.R rows");
        if (row.size() != d) throw ValidationError("config: simulation.R must be a d x d matrix");
        sc.R.row(a) = row.transpose();
      }
    }
    if (s.contains("covariates"))
      for (const auto& c : s.at("covariates")) {
        CovariateColumn col;
        col.name = get_or<std::string>(c, "name", "");
        col.kind = kind_of(get_or<std::string>(c, "kind", "normal"));
        col.param = get_or<double>(c, "param", col.kind == CovariateKind::Bernoulli ? 0.5 : 0.0);
        col.time_varying = get_or<bool>(c, "time_varying", true);
        sc.covariates.push_back(col);
      }
    if (!s.contains("truth") || !s.at("truth").is_array() || static_cast<int>(s.at("truth").size()) != d)
      throw ValidationError("config: simulation.truth needs one entry per response");
    for (int a = 0; a < d; ++a) {
      const auto& t = s.at("truth")[a];
      const auto& rc = cfg.responses[a];
      SeriesModel m;
      m.marginal.link = rc.link;
      m.marginal.beta = t.contains("beta") ? vec_of(t.at("beta"), "truth.beta") : Eigen::VectorXd();
      if (!t.contains("cutpoints")) throw ValidationError("config: truth of " + rc.name + " needs cutpoints");
      m.marginal.cutpoints = vec_of(t.at("cutpoints"), "truth.cutpoints");
      if (m.marginal.cutpoints.size() != rc.K - 1)
        throw ValidationError("config: truth cutpoints of " + rc.name + " must have K - 1 entries");
      if (m.marginal.beta.size() != static_cast<Eigen::Index>(rc.covariates.size()))
        throw ValidationError("config: truth beta of " + rc.name + " must match its covariates");
      m.temporal.family = rc.family;
      if (rc.family.tag == Family::BVT) m.temporal.family.nu = get_or<double>(t, "nu", rc.nu_grid.front());
      m.temporal.theta = get_or<double>(t, "theta", 0.0);
      try {
        validate(m);
      } catch (const std::exception& e) {
        throw ValidationError("config: truth of " + rc.name + ": " + e.what());
      }
      sc.truth.push_back(m);
    }
    cfg.simulation = sc;
  }
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

ordered_json config_echo(const ModelConfig& cfg) {
  ordered_json j;
  ordered_json rs = ordered_json::array();
  for (const auto& r : cfg.responses) {
    ordered_json o;
    o["name"] = r.name;
    o["K"] = r.K;
    o["link"] = link_name(r.link);
    o["covariates"] = r.covariates;
    o["family"] = family_name(r.family);
    o["nu_grid"] = r.nu_grid;
    rs.push_back(o);
  }
  j["responses"] = rs;
  ordered_json lg = ordered_json::array();
  for (const auto& l : cfg.link_grid) lg.push_back(l.name());
  j["link_grid"] = lg;
  j["qmc"] = {{"seed", cfg.qmc.seed},
              {"shifts", cfg.qmc.shifts},
              {"points_per_shift", cfg.qmc.points_per_shift},
              {"max_dim", cfg.qmc.max_dim}};
  j["optimizer"] = {{"tol", cfg.optimizer.tol},
                    {"max_iter", cfg.optimizer.max_iter},
                    {"step_rel", cfg.optimizer.step_rel},
                    {"step_min", cfg.optimizer.step_min}};
  j["stage"] = cfg.stage;
  j["max_free_params"] = cfg.max_free_params;
  j["force_step3"] = cfg.force_step3;
  j["compute_se"] = cfg.compute_se;
  j["threads"] = cfg.threads;
  j["data"] = cfg.data;
  if (cfg.simulation) {
    const auto& sc = *cfg.simulation;
    ordered_json s;
    s["n"] = sc.n;
    s["T"] = sc.T;
    s["seed"] = sc.seed;
    s["link"] = sc.link.name();
    ordered_json R = ordered_json::array();
    for (Eigen::Index a = 0; a < sc.R.rows(); ++a) {
      std::vector<double> row(sc.R.cols());
      for (Eigen::Index b = 0; b < sc.R.cols(); ++b) row[b] = sc.R(a, b);
      R.push_back(row);
    }
    s["R"] = R;
    ordered_json cs = ordered_json::array();
    for (const auto& c : sc.covariates)
      cs.push_back({{"name", c.name}, {"kind", kind_name(c.kind)}, {"param", c.param}, {"time_varying", c.time_varying}});
    s["covariates"] = cs;
    ordered_json tr = ordered_json::array();
    for (const auto& m : sc.truth) {
      ordered_json t;
      t["beta"] = std::vector<double>(m.marginal.beta.data(), m.marginal.beta.data() + m.marginal.beta.size());
      t["cutpoints"] =
          std::vector<double>(m.marginal.cutpoints.data(), m.marginal.cutpoints.data() + m.marginal.cutpoints.size());
      t["theta"] = m.temporal.theta;
      if (m.temporal.family.tag == Family::BVT) t["nu"] = m.temporal.family.nu;
      tr.push_back(t);
    }
    s["truth"] = tr;
    j["simulation"] = s;
  }
  return j;
}

std::vector<std::string> covariate_columns(const ModelConfig& cfg) {
  std::vector<std::string> cols;
  for (const auto& r : cfg.responses)
    for (const auto& c : r.covariates)
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  return cols;
}

FitOptions fit_options(const ModelConfig& cfg) {
  FitOptions o;
  o.optimizer = cfg.optimizer;
  o.max_free_params = cfg.max_free_params;
  o.force_step3 = cfg.force_step3;
  o.compute_se = cfg.compute_se;
  o.threads = cfg.threads;
  return o;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool is_integer(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) && s.size() < 18;
}

bool subject_less(const std::string& a, const std::string& b) {
  if (is_integer(a) && is_integer(b)) return std::stoll(a) < std::stoll(b);
  return a < b;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

OrdinalPanel parse_panel_csv(std::istream& in, const ModelConfig& cfg) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("panel CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < header.size(); ++c) col[trim(header[c])] = c;
  auto need = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw ValidationError("panel CSV: missing required column '" + name + "'");
    return it->second;
  };
  const std::size_t c_id = need("subject_id"), c_time = need("time");
  std::vector<std::size_t> c_resp, c_cov;
  for (const auto& r : cfg.responses) c_resp.push_back(need(r.name));
  const auto covs = covariate_columns(cfg);
  for (const auto& c : covs) c_cov.push_back(need(c));

  OrdinalPanel panel;
  for (const auto& r : cfg.responses) {
    panel.responses.push_back(r.name);
    panel.K.push_back(r.K);
    std::vector<int> idx;
    for (const auto& c : r.covariates)
      idx.push_back(static_cast<int>(std::find(covs.begin(), covs.end(), c) - covs.begin()));
    panel.series_columns.push_back(idx);
  }
  panel.covariates = covs;

  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::string, std::vector<std::pair<std::size_t, Record>>>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = "panel CSV row " + std::to_string(lineno);
    if (f.size() != header.size()) throw ValidationError(where + ": expected " + std::to_string(header.size()) + " fields");
    Record rec;
    const std::string id = trim(f[c_id]);
    if (id.empty()) throw ValidationError(where + ": empty subject_id");
    try {
      std::size_t used = 0;
      const std::string t = trim(f[c_time]);
      rec.time = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument("time");
    } catch (const std::exception&) {
      throw ValidationError(where + ": time must be an integer");
    }
    for (std::size_t j = 0; j < c_resp.size(); ++j) {
      const std::string v = trim(f[c_resp[j]]);
      if (v.empty() || v == "NA") {
        rec.y.push_back(kMissing);
        continue;
      }
      int y = 0;
      try {
        std::size_t used = 0;
        y = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("y");
      } catch (const std::exception&) {
        throw ValidationError(where + ": response " + cfg.responses[j].name + " is not an integer");
      }
      if (y < 1 || y > cfg.responses[j].K)
        throw ValidationError(where + ": category " + std::to_string(y) + " of " + cfg.responses[j].name +
                              " outside 1.." + std::to_string(cfg.responses[j].K));
      rec.y.push_back(y);
    }
    rec.z.resize(static_cast<Eigen::Index>(c_cov.size()));
    for (std::size_t c = 0; c < c_cov.size(); ++c) {
      const std::string v = trim(f[c_cov[c]]);
      try {
        std::size_t used = 0;
        rec.z(c) = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("x");
      } catch (const std::exception&) {
        throw ValidationError(where + ": covariate " + covs[c] + " is missing or not numeric");
      }
    }
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, rows.size()).first;
      rows.emplace_back(id, std::vector<std::pair<std::size_t, Record>>{});
    }
    rows[it->second].second.emplace_back(lineno, std::move(rec));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return subject_less(a.first, b.first); });
  for (auto& [id, recs] : rows) {
    std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.second.time < b.second.time; });
    Subject s;
    s.id = id;
    for (std::size_t r = 0; r < recs.size(); ++r) {
      if (r > 0 && recs[r].second.time == recs[r - 1].second.time)
        throw ValidationError("panel CSV row " + std::to_string(recs[r].first) + ": duplicate (subject " + id +
                              ", time " + std::to_string(recs[r].second.time) + ")");
      s.records.push_back(std::move(recs[r].second));
    }
    panel.subjects.push_back(std::move(s));
  }
  if (panel.subjects.empty()) throw ValidationError("panel CSV has no data rows");
  panel.build_design();
  panel.validate();
  return panel;
}

OrdinalPanel load_panel_csv(const std::string& path, const ModelConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open panel CSV " + path);
  return parse_panel_csv(in, cfg);
}

void write_panel_csv(const OrdinalPanel& panel, std::ostream& out) {
  out << "subject_id,time";
  for (const auto& r : panel.responses) out << ',' << r;
  for (const auto& c : panel.covariates) out << ',' << c;
  out << '\n';
  for (const auto& s : panel.subjects) {
    for (const auto& rec : s.records) {
      out << s.id << ',' << rec.time;
      for (int y : rec.y) {
        out << ',';
        if (y != kMissing) out << y;
        else out << "NA";
      }
      for (Eigen::Index c = 0; c < rec.z.size(); ++c) out << ',' << format_double(rec.z(c));
      out << '\n';
    }
  }
}

void write_panel_csv(const OrdinalPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  write_panel_csv(panel, out);
}

SimDesign simulation_design(const ModelConfig& cfg) {
  if (!cfg.simulation) throw ValidationError("config has no 'simulation' section");
  const auto& sc = *cfg.simulation;
  SimDesign d;
  d.n = sc.n;
  d.T = sc.T;
  d.seed = sc.seed;
  d.jp.series = sc.truth;
  d.jp.link = sc.link;
  try {
    d.jp.R = CorrelationMatrix(sc.R);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: simulation.R: ") + e.what());
  }
  const auto cols = covariate_columns(cfg);
  for (const auto& name : cols) {
    auto it = std::find_if(sc.covariates.begin(), sc.covariates.end(), [&](const auto& c) { return c.name == name; });
    if (it == sc.covariates.end()) throw ValidationError("config: simulation has no generator for covariate " + name);
    d.columns.push_back(*it);
  }
  for (const auto& r : cfg.responses) {
    d.responses.push_back(r.name);
    std::vector<int> idx;
    for (const auto& c : r.covariates)
      idx.push_back(static_cast<int>(std::find(cols.begin(), cols.end(), c) - cols.begin()));
    d.series_columns.push_back(idx);
  }
  return d;
}

}  // namespace ordcop
