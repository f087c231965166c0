#include "raf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "raf/version.hpp"

namespace raf::io {

namespace {

json complex_list(const std::vector<Complex>& v) {
  json out = json::array();
  for (const Complex& c : v) out.push_back({c.real(), c.imag()});
  return out;
}

std::vector<Complex> complex_list_from(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string(what) + " must be an array");
  std::vector<Complex> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw IoError(std::string(what) + " entries must be [re, im]");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

void require_version(const json& j, const char* what) {
  if (!j.contains("format_version") ||
      j["format_version"].get<int>() != kFormatVersion)
    throw IoError(std::string(what) + ": unsupported format_version");
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("rename failed: " + target.string() + ": " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

json region_to_json(const PoleRegion& r) {
  json bands = json::array();
  for (const auto& b : r.angle_bands) bands.push_back({b[0], b[1]});
  return {{"rho_min", r.rho_min},
          {"rho_max", r.rho_max},
          {"angle_bands", bands},
          {"include_real_axis", r.include_real_axis},
          {"radial_law", to_string(r.radial_law)}};
}

PoleRegion region_from_json(const json& j) {
  PoleRegion r;
  try {
    r.rho_min = j.at("rho_min").get<double>();
    r.rho_max = j.at("rho_max").get<double>();
    r.angle_bands.clear();
    for (const auto& b : j.at("angle_bands"))
      r.angle_bands.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    if (j.contains("include_real_axis"))
      r.include_real_axis = j["include_real_axis"].get<bool>();
    if (j.contains("radial_law"))
      r.radial_law = radial_law_from_string(j["radial_law"].get<std::string>());
  } catch (const json::exception& e) {
    throw IoError(std::string("bad region: ") + e.what());
  }
  r.validate();
  return r;
}

json poleset_to_json(const PoleSet& ps) {
  return {{"format_version", kFormatVersion},
          {"seed", ps.seed},
          {"region", region_to_json(ps.region)},
          {"poles", complex_list(ps.poles)},
          {"pair_index", ps.pair_index}};
}

PoleSet poleset_from_json(const json& j) {
  require_version(j, "pole set");
  PoleSet ps;
  try {
    ps.seed = j.at("seed").get<std::uint64_t>();
    ps.region = region_from_json(j.at("region"));
    ps.poles = complex_list_from(j.at("poles"), "poles");
    ps.pair_index = j.at("pair_index").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad pole set: ") + e.what());
  }
  if (ps.pair_index.size() != ps.poles.size())
    throw IoError("pole set pair_index length mismatch");
  auto rep = validate_pairing(ps);
  if (!rep.valid()) throw IoError("pole set has unpaired complex poles");
  return ps;
}

void save_poleset(const std::string& path, const PoleSet& ps) {
  write_text_atomic(path, poleset_to_json(ps).dump(2) + "\n");
}

PoleSet load_poleset(const std::string& path) {
  return poleset_from_json(load_json(path));
}

json constraints_to_json(const ConstraintSet& cs) {
  json j = json::object();
  if (cs.time_box) j["time_box"] = {{"eps", cs.time_box->eps}};
  if (!cs.windows.empty()) {
    json ws = json::array();
    for (const auto& w : cs.windows) {
      json jw = {{"lo", w.lo}, {"hi", w.hi}, {"eta", w.eta}};
      if (!w.weights.empty()) jw["weights"] = w.weights;
      ws.push_back(jw);
    }
    j["windows"] = ws;
  }
  if (cs.freq_mask)
    j["freq_mask"] = {{"omega", cs.freq_mask->omega},
                      {"gamma", cs.freq_mask->gamma}};
  if (cs.settling)
    j["settling"] = {{"t_s", cs.settling->t_s}, {"eps_h", cs.settling->eps_h}};
  if (cs.l1_tail)
    j["l1_tail"] = {{"t_s", cs.l1_tail->t_s}, {"budget", cs.l1_tail->budget}};
  if (cs.bibo) j["bibo"] = {{"h_max", cs.bibo->h_max}};
  if (cs.step_tail)
    j["step_tail"] = {{"t", cs.step_tail->t}, {"budget", cs.step_tail->budget}};
  if (cs.relative_degree)
    j["relative_degree"] = {{"r_d", cs.relative_degree->r_d}};
  if (cs.dc_equal) j["dc_equal"] = {{"g0", cs.dc_equal->g0}};
  if (cs.dc_bound) j["dc_bound"] = {{"g_max", cs.dc_bound->g_max}};
  if (cs.monotone) j["monotone"] = true;
  return j;
}

ConstraintSet constraints_from_json(const json& j) {
  ConstraintSet cs;
  try {
    if (j.contains("time_box"))
      cs.time_box = TimeBox{j["time_box"].at("eps").get<std::vector<double>>()};
    if (j.contains("windows")) {
      for (const auto& jw : j["windows"]) {
        WindowRms w;
        w.lo = jw.at("lo").get<int>();
        w.hi = jw.at("hi").get<int>();
        w.eta = jw.at("eta").get<double>();
        if (jw.contains("weights"))
          w.weights = jw["weights"].get<std::vector<double>>();
        cs.windows.push_back(std::move(w));
      }
    }
    if (j.contains("freq_mask"))
      cs.freq_mask =
          FreqMask{j["freq_mask"].at("omega").get<std::vector<double>>(),
                   j["freq_mask"].at("gamma").get<std::vector<double>>()};
    if (j.contains("settling"))
      cs.settling = Settling{j["settling"].at("t_s").get<int>(),
                             j["settling"].at("eps_h").get<double>()};
    if (j.contains("l1_tail"))
      cs.l1_tail = L1Tail{j["l1_tail"].at("t_s").get<int>(),
                          j["l1_tail"].at("budget").get<double>()};
    if (j.contains("bibo")) cs.bibo = Bibo{j["bibo"].at("h_max").get<double>()};
    if (j.contains("step_tail"))
      cs.step_tail = StepTail{j["step_tail"].at("t").get<int>(),
                              j["step_tail"].at("budget").get<double>()};
    if (j.contains("relative_degree"))
      cs.relative_degree =
          RelativeDegree{j["relative_degree"].at("r_d").get<int>()};
    if (j.contains("dc_equal"))
      cs.dc_equal = DcEqual{j["dc_equal"].at("g0").get<double>()};
    if (j.contains("dc_bound"))
      cs.dc_bound = DcBound{j["dc_bound"].at("g_max").get<double>()};
    if (j.contains("monotone")) cs.monotone = j["monotone"].get<bool>();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad priors: ") + e.what());
  }
  return cs;
}

json solve_info_to_json(const SolveInfo& info) {
  return {{"status", info.status},
          {"iterations", info.iterations},
          {"objective", info.objective},
          {"primal_residual", info.primal_residual},
          {"dual_residual", info.dual_residual},
          {"max_violation", info.max_violation},
          {"message", info.message}};
}

json budget_to_json(const BudgetReport& b) {
  return {{"settling", b.settling},
          {"l1_tail", b.l1_tail},
          {"bibo", b.bibo},
          {"step_tail", b.step_tail},
          {"dc_gain", b.dc_gain}};
}

json model_to_json(const RafModel& m) {
  return {{"format_version", kFormatVersion},
          {"poles", complex_list(m.poles.poles)},
          {"pair_index", m.poles.pair_index},
          {"region", region_to_json(m.poles.region)},
          {"seed", m.poles.seed},
          {"group_rep", m.group_rep},
          {"residues", complex_list(m.residues)},
          {"feedthrough", m.feedthrough},
          {"diagnostics",
           {{"status", m.diagnostics.status},
            {"objective", m.diagnostics.objective},
            {"primal_residual", m.diagnostics.primal_residual},
            {"dual_residual", m.diagnostics.dual_residual},
            {"iterations", m.diagnostics.iterations},
            {"warning", m.diagnostics.warning},
            {"message", m.diagnostics.message}}}};
}

RafModel model_from_json(const json& j) {
  require_version(j, "model");
  RafModel m;
  try {
    m.poles.poles = complex_list_from(j.at("poles"), "poles");
    m.poles.pair_index = j.at("pair_index").get<std::vector<int>>();
    if (j.contains("region")) m.poles.region = region_from_json(j["region"]);
    if (j.contains("seed")) m.poles.seed = j["seed"].get<std::uint64_t>();
    m.group_rep = j.at("group_rep").get<std::vector<int>>();
    m.residues = complex_list_from(j.at("residues"), "residues");
    m.feedthrough = j.at("feedthrough").get<double>();
    const json& d = j.at("diagnostics");
    m.diagnostics.status = d.at("status").get<std::string>();
    m.diagnostics.objective = d.at("objective").get<double>();
    m.diagnostics.primal_residual = d.at("primal_residual").get<double>();
    m.diagnostics.dual_residual = d.at("dual_residual").get<double>();
    m.diagnostics.iterations = d.at("iterations").get<int>();
    m.diagnostics.warning = d.at("warning").get<bool>();
    m.diagnostics.message = d.at("message").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad model: ") + e.what());
  }
  m.validate();
  return m;
}

void save_model(const std::string& path, const RafModel& m) {
  write_text_atomic(path, model_to_json(m).dump(2) + "\n");
}

RafModel load_model(const std::string& path) {
  return model_from_json(load_json(path));
}

json pipeline_config_to_json(const PipelineConfig& cfg) {
  return {{"format_version", kFormatVersion},
          {"region", region_to_json(cfg.region)},
          {"m_groups", cfg.m_groups},
          {"seed", cfg.seed},
          {"lambda1_grid", cfg.lambda1_grid},
          {"lambda2", cfg.lambda2},
          {"priors", constraints_to_json(cfg.constraints)},
          {"rounds", cfg.rounds},
          {"local_radius", cfg.local_radius},
          {"m_local", cfg.m_local},
          {"prune_rel_tol", cfg.prune_rel_tol},
          {"cluster_threshold", cfg.cluster_threshold},
          {"validation_fraction", cfg.validation_fraction},
          {"fit_feedthrough", cfg.fit_feedthrough},
          {"reweight", cfg.reweight},
          {"solver",
           {{"rho", cfg.solver.rho},
            {"alpha", cfg.solver.alpha},
            {"eps_rel", cfg.solver.eps_rel},
            {"eps_abs", cfg.solver.eps_abs},
            {"max_iter", cfg.solver.max_iter}}}};
}

PipelineConfig pipeline_config_from_json(const json& j) {
  // hand-written config: the version field is optional, unlike tool output
  if (j.contains("format_version")) require_version(j, "pipeline config");
  PipelineConfig cfg;
  try {
    cfg.region = region_from_json(j.at("region"));
    if (j.contains("m_groups")) cfg.m_groups = j["m_groups"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("lambda1_grid"))
      cfg.lambda1_grid = j["lambda1_grid"].get<std::vector<double>>();
    if (j.contains("lambda2")) cfg.lambda2 = j["lambda2"].get<double>();
    if (j.contains("priors"))
      cfg.constraints = constraints_from_json(j["priors"]);
    if (j.contains("rounds")) cfg.rounds = j["rounds"].get<int>();
    if (j.contains("local_radius"))
      cfg.local_radius = j["local_radius"].get<double>();
    if (j.contains("m_local")) cfg.m_local = j["m_local"].get<int>();
    if (j.contains("prune_rel_tol"))
      cfg.prune_rel_tol = j["prune_rel_tol"].get<double>();
    if (j.contains("cluster_threshold"))
      cfg.cluster_threshold = j["cluster_threshold"].get<double>();
    if (j.contains("validation_fraction"))
      cfg.validation_fraction = j["validation_fraction"].get<double>();
    if (j.contains("fit_feedthrough"))
      cfg.fit_feedthrough = j["fit_feedthrough"].get<bool>();
    if (j.contains("reweight")) cfg.reweight = j["reweight"].get<bool>();
    if (j.contains("solver")) {
      const json& s = j["solver"];
      if (s.contains("rho")) cfg.solver.rho = s["rho"].get<double>();
      if (s.contains("alpha")) cfg.solver.alpha = s["alpha"].get<double>();
      if (s.contains("eps_rel")) cfg.solver.eps_rel = s["eps_rel"].get<double>();
      if (s.contains("eps_abs")) cfg.solver.eps_abs = s["eps_abs"].get<double>();
      if (s.contains("max_iter")) cfg.solver.max_iter = s["max_iter"].get<int>();
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("bad pipeline config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json pipeline_result_to_json(const PipelineResult& res) {
  json rounds = json::array();
  for (const auto& r : res.rounds) {
    rounds.push_back({{"round", r.round},
                      {"dict_groups", r.dict_groups},
                      {"objective", r.objective},
                      {"lambda1", r.lambda1},
                      {"active_groups", r.active_groups},
                      {"cluster_reps", complex_list(r.cluster_reps)},
                      {"budgets", budget_to_json(r.budgets)},
                      {"solve", solve_info_to_json(r.solve)}});
  }
  json j = {{"format_version", kFormatVersion},
            {"feasible", res.feasible},
            {"empty_model", res.empty_model},
            {"chosen_lambda1", res.chosen_lambda1},
            {"active_groups", res.active_groups},
            {"rounds", rounds}};
  if (res.feasible) {
    j["model"] = model_to_json(res.model);
    j["full_model"] = model_to_json(res.full_model);
  }
  return j;
}

void save_csv(const std::string& path, const TimeSeries& ts) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  const bool has_y = ts.y.size() > 0;
  out << (has_y ? "t,u,y\n" : "t,u\n");
  char buf[64];
  for (int t = 0; t < ts.length(); ++t) {
    out << t;
    std::snprintf(buf, sizeof(buf), "%.17g", ts.u(t));
    out << ',' << buf;
    if (has_y) {
      std::snprintf(buf, sizeof(buf), "%.17g", ts.y(t));
      out << ',' << buf;
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

TimeSeries load_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);
  // strip optional BOM / CR
  while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
    line.pop_back();
  bool has_y;
  if (line == "t,u,y")
    has_y = true;
  else if (line == "t,u")
    has_y = false;
  else
    throw IoError("csv header must be `t,u,y` or `t,u`: " + path);

  std::vector<double> u, y;
  int expected_t = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    std::string cell;
    if (!std::getline(row, cell, ',')) throw IoError("bad csv row: " + line);
    if (std::stoi(cell) != expected_t)
      throw IoError("csv time index must be consecutive from 0");
    ++expected_t;
    if (!std::getline(row, cell, ',')) throw IoError("bad csv row: " + line);
    u.push_back(std::stod(cell));
    if (has_y) {
      if (!std::getline(row, cell, ',')) throw IoError("bad csv row: " + line);
      y.push_back(std::stod(cell));
    }
  }
  if (u.empty()) throw IoError("csv has no data rows: " + path);
  TimeSeries ts;
  ts.u = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<int>(u.size()));
  if (has_y)
    ts.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<int>(y.size()));
  ts.validate();
  return ts;
}

json manifest(const std::string& command, std::uint64_t seed,
              const json& config) {
  return {{"format_version", kFormatVersion},
          {"tool", "raf"},
          {"version", kVersion},
          {"rng", kRngId},
          {"command", command},
          {"seed", seed},
          {"config_hash", hash_hex(config.dump())}};
}

void write_manifest(const std::string& artifact_path,
                    const std::string& command, std::uint64_t seed,
                    const json& config) {
  write_text_atomic(artifact_path + ".manifest.json",
                    manifest(command, seed, config).dump(2) + "\n");
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
}

void save_json(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace raf::io
