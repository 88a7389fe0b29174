#include "eulerforge/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace ef {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"n", "dealias_fraction"}},
      {"initial", {"A", "B", "C", "t0", "ramp"}},
      {"stage",
       {"Xi", "N", "L", "eta", "B_lambda", "B_lambda_tau", "b0", "B0", "K", "a_v", "a_R", "c", "time_nodes",
        "steps_per_tau", "min_transport_steps", "parametrix_L", "parametrix_T", "min_projection", "stability_c",
        "axis", "scan_step", "c_min", "level_samples", "plateau", "support"}},
      {"levels", {"e_v", "e_R"}},
      {"schedule", {"delta", "Z", "eta", "C", "A", "Xi0", "e_R0", "k_max", "mode", "search"}},
      {"run", {"samples", "seed", "threads"}},
  };
  return s;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& t) : t_(t) {}

  template <class T>
  void get(const std::string& sec, const std::string& key, T& out) const {
    auto s = t_.get_child_optional(sec);
    if (!s) return;
    auto v = s->get_optional<std::string>(key);
    if (!v) return;
    std::istringstream is(*v);
    T x{};
    is >> x;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError(sec + "." + key + ": cannot parse '" + *v + "'");
    out = x;
  }
  void get_bool(const std::string& sec, const std::string& key, bool& out) const {
    std::string v;
    get(sec, key, v);
    if (v.empty()) return;
    if (v == "true" || v == "1") out = true;
    else if (v == "false" || v == "0") out = false;
    else throw ConfigError(sec + "." + key + ": expected true/false, got '" + v + "'");
  }
  void get_vec(const std::string& sec, const std::string& key, Vector3& out) const {
    auto s = t_.get_child_optional(sec);
    if (!s) return;
    auto v = s->get_optional<std::string>(key);
    if (!v) return;
    std::istringstream is(*v);
    Vector3 x;
    is >> x[0] >> x[1] >> x[2];
    if (is.fail() || !(is >> std::ws).eof())
      throw ConfigError(sec + "." + key + ": expected three numbers, got '" + *v + "'");
    out = x;
  }
  bool has(const std::string& sec, const std::string& key) const {
    auto s = t_.get_child_optional(sec);
    return s && s->get_optional<std::string>(key);
  }

 private:
  const pt::ptree& t_;
};

void check(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError(key + ": " + msg);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [sec, body] : tree) {
    auto it = schema().find(sec);
    if (it == schema().end()) throw ConfigError("unknown section [" + sec + "]");
    if (body.data().size() && body.empty()) throw ConfigError("key '" + sec + "' outside any section");
    for (const auto& [key, _] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key " + sec + "." + key);
  }
  Reader r(tree);
  RunConfig c;
  StageConfig& s = c.stage;
  r.get("grid", "n", s.grid.n);
  r.get("grid", "dealias_fraction", s.grid.dealias_fraction);
  r.get("initial", "A", c.initial.abc.A);
  r.get("initial", "B", c.initial.abc.B);
  r.get("initial", "C", c.initial.abc.C);
  r.get("initial", "t0", c.initial.t0);
  r.get("initial", "ramp", c.initial.ramp);
  r.get("stage", "Xi", s.Xi);
  r.get("stage", "N", s.N);
  r.get("stage", "L", s.L);
  r.get("stage", "eta", s.eta);
  r.get("stage", "B_lambda", s.B_lambda);
  r.get("stage", "B_lambda_tau", s.B_lambda_tau);
  r.get("stage", "b0", s.b0);
  r.get("stage", "B0", s.B0);
  r.get("stage", "K", s.K);
  r.get("stage", "a_v", s.a_v);
  r.get("stage", "a_R", s.a_R);
  r.get("stage", "c", s.c_t);
  r.get("stage", "time_nodes", s.time_nodes);
  r.get("stage", "steps_per_tau", s.steps_per_tau);
  r.get("stage", "min_transport_steps", s.min_transport_steps);
  r.get("stage", "parametrix_L", s.parametrix_L);
  r.get("stage", "parametrix_T", s.parametrix_T);
  r.get("stage", "min_projection", s.min_projection);
  r.get("stage", "stability_c", s.stability_c);
  r.get_vec("stage", "axis", s.axis);
  r.get("stage", "scan_step", s.scan_step);
  r.get("stage", "c_min", s.c_min);
  r.get("stage", "level_samples", s.level_samples);
  double plateau = s.space_shape.plateau, support = s.space_shape.support;
  r.get("stage", "plateau", plateau);
  r.get("stage", "support", support);
  s.space_shape.plateau = s.time_shape.plateau = plateau;
  s.space_shape.support = s.time_shape.support = support;
  if (r.has("levels", "e_v") || r.has("levels", "e_R")) {
    check(r.has("levels", "e_v") && r.has("levels", "e_R"), "levels", "give both e_v and e_R");
    FrequencyEnergyLevels lv;
    lv.Xi = s.Xi;
    lv.L = s.L;
    r.get("levels", "e_v", lv.e_v);
    r.get("levels", "e_R", lv.e_R);
    s.levels = lv;
  }
  std::string mode = to_string(c.schedule.mode);
  r.get("schedule", "mode", mode);
  try {
    c.schedule.mode = parse_mode(mode);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("schedule.mode: ") + e.what());
  }
  r.get("schedule", "delta", c.schedule.delta);
  r.get("schedule", "Z", c.schedule.Z);
  r.get("schedule", "eta", c.schedule.eta);
  r.get("schedule", "C", c.schedule.C);
  r.get("schedule", "A", c.schedule.A);
  r.get("schedule", "Xi0", c.schedule.Xi0);
  r.get("schedule", "e_R0", c.schedule.e_R0);
  r.get("schedule", "k_max", c.schedule.k_max);
  r.get_bool("schedule", "search", c.schedule.search);
  r.get("run", "samples", c.samples);
  r.get("run", "seed", c.seed);
  r.get("run", "threads", c.threads);
  s.seed = c.seed;
  c.validate();
  c.text = c.canonical();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  const StageConfig& s = stage;
  check(s.grid.n >= 8 && s.grid.n <= 128 && (s.grid.n & (s.grid.n - 1)) == 0, "grid.n", "must be a power of two in [8, 128]");
  check(s.grid.dealias_fraction > 0.0 && s.grid.dealias_fraction <= 1.0, "grid.dealias_fraction",
        "must lie in (0, 1]");
  check(initial.ramp > 0.0, "initial.ramp", "must be positive");
  check(s.Xi >= 1.0, "stage.Xi", "must be >= 1");
  check(s.N >= 1.0, "stage.N", "must be >= 1");
  check(s.L >= 2, "stage.L", "must be >= 2");
  check(s.eta > 0.0, "stage.eta", "must be positive");
  check(s.B_lambda > 0.0, "stage.B_lambda", "must be positive");
  check(s.B_lambda_tau >= 0.0, "stage.B_lambda_tau", "must be non-negative");
  check(s.b0 > 0.0, "stage.b0", "must be positive");
  check(s.B0 > 0.0, "stage.B0", "must be positive");
  check(s.K >= 0.0, "stage.K", "must be non-negative (0 = calibrate)");
  check(s.a_v > 0.0 && s.a_R > 0.0, "stage.a_v/a_R", "must be positive");
  check(s.c_t > 0.0, "stage.c", "must be positive");
  check(s.time_nodes >= 1, "stage.time_nodes", "must be >= 1");
  check(s.steps_per_tau >= 4, "stage.steps_per_tau", "must be >= 4");
  check(s.min_transport_steps >= 1, "stage.min_transport_steps", "must be >= 1");
  check(s.parametrix_L >= 0 && s.parametrix_L <= 6, "stage.parametrix_L", "must lie in 0..6");
  check(s.parametrix_T >= 0 && s.parametrix_T <= 6, "stage.parametrix_T", "must lie in 0..6");
  check(s.min_projection > 0.0 && s.min_projection <= 1.0, "stage.min_projection", "must lie in (0, 1]");
  check(s.stability_c > 0.0, "stage.stability_c", "must be positive");
  check(s.axis.norm() > 0.0, "stage.axis", "must be nonzero");
  check(s.scan_step > 0.0, "stage.scan_step", "must be positive");
  check(s.c_min >= 0.0, "stage.c_min", "must be non-negative");
  check(s.level_samples >= 1, "stage.level_samples", "must be >= 1");
  try {
    s.space_shape.validate();
  } catch (const ContractError& e) {
    throw ConfigError(std::string("stage.plateau/support: ") + e.what());
  }
  if (s.levels) {
    check(s.levels->e_v >= 0.0 && s.levels->e_R >= 0.0, "levels", "energies must be non-negative");
    check(s.levels->e_R <= s.levels->e_v, "levels",
          "e_R must not exceed e_v (got e_R = " + std::to_string(s.levels->e_R) +
              ", e_v = " + std::to_string(s.levels->e_v) + ")");
  }
  check(schedule.delta > 0.0, "schedule.delta", "must be positive");
  check(schedule.eta > 0.0, "schedule.eta", "must be positive");
  check(schedule.C > 0.0 && schedule.A > 0.0, "schedule.C/A", "must be positive");
  check(schedule.Xi0 >= 2.0, "schedule.Xi0", "must be >= 2");
  check(schedule.e_R0 > 0.0, "schedule.e_R0", "must be positive");
  check(schedule.k_max >= 1 && schedule.k_max <= 200, "schedule.k_max", "must lie in 1..200");
  check(schedule.search || schedule.mode == ScheduleMode::no_material || schedule.Z == 0.0 ||
            schedule.Z > std::pow(schedule.e_R0, schedule.delta),
        "schedule.Z", "must exceed e_R0^delta so that e_R0 < e_v0");
  check(samples >= 1 && samples <= 64, "run.samples", "must lie in 1..64");
  check(threads >= 1, "run.threads", "must be >= 1");
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17);
  const StageConfig& s = stage;
  os << "[grid]\nn = " << s.grid.n << "\ndealias_fraction = " << s.grid.dealias_fraction << "\n";
  os << "[initial]\nA = " << initial.abc.A << "\nB = " << initial.abc.B << "\nC = " << initial.abc.C
     << "\nt0 = " << initial.t0 << "\nramp = " << initial.ramp << "\n";
  os << "[stage]\nXi = " << s.Xi << "\nN = " << s.N << "\nL = " << s.L << "\neta = " << s.eta
     << "\nB_lambda = " << s.B_lambda << "\nB_lambda_tau = " << s.B_lambda_tau << "\nb0 = " << s.b0
     << "\nB0 = " << s.B0 << "\nK = " << s.K << "\na_v = " << s.a_v << "\na_R = " << s.a_R << "\nc = " << s.c_t
     << "\ntime_nodes = " << s.time_nodes << "\nsteps_per_tau = " << s.steps_per_tau
     << "\nmin_transport_steps = " << s.min_transport_steps << "\nparametrix_L = " << s.parametrix_L
     << "\nparametrix_T = " << s.parametrix_T << "\nmin_projection = " << s.min_projection
     << "\nstability_c = " << s.stability_c << "\naxis = " << s.axis[0] << ' ' << s.axis[1] << ' ' << s.axis[2]
     << "\nscan_step = " << s.scan_step << "\nc_min = " << s.c_min << "\nlevel_samples = " << s.level_samples
     << "\nplateau = " << s.space_shape.plateau << "\nsupport = " << s.space_shape.support << "\n";
  if (s.levels) os << "[levels]\ne_v = " << s.levels->e_v << "\ne_R = " << s.levels->e_R << "\n";
  os << "[schedule]\nmode = " << to_string(schedule.mode) << "\ndelta = " << schedule.delta << "\nZ = " << schedule.Z
     << "\neta = " << schedule.eta << "\nC = " << schedule.C << "\nA = " << schedule.A << "\nXi0 = " << schedule.Xi0
     << "\ne_R0 = " << schedule.e_R0 << "\nk_max = " << schedule.k_max
     << "\nsearch = " << (schedule.search ? "true" : "false") << "\n";
  os << "[run]\nsamples = " << samples << "\nseed = " << seed << "\n";
  return os.str();
}

std::string RunConfig::hash() const { return sha256_hex(canonical()); }

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace ef
