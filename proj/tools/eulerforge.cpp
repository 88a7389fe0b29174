#include <fftw3.h>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "eulerforge/config.hpp"
#include "eulerforge/efld.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace ef;

namespace {

constexpr const char* kVersion = "1.0.0";

// exit codes per failure class
enum Exit { kOk = 0, kCheckFailed = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Tolerances {
  double identity = 1e-12;   // geometry identities
  double residual = 1e-4;    // relative Euler-Reynolds residual
};

Tolerances tolerance_profile(const std::string& name) {
  if (name == "strict") return {1e-13, 1e-6};
  if (name == "default") return {1e-12, 1e-4};
  if (name == "loose") return {1e-10, 1e-2};
  throw ConfigError("--tolerance-profile: expected strict, default or loose, got '" + name + "'");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + p.string());
  out << s;
  if (!s.empty() && s.back() != '\n') out << '\n';
}

json versions() {
  return {{"eulerforge", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000)}};
}

// manifest.json listing every artifact with its digest; no timestamps so reruns match
void write_manifest(const fs::path& out, const std::string& command, const RunConfig* cfg) {
  json m;
  m["command"] = command;
  m["versions"] = versions();
  if (cfg) {
    m["config_hash"] = cfg->hash();
    m["seed"] = cfg->seed;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(out))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json arr = json::array();
  for (const auto& f : files) arr.push_back({{"file", f.filename().string()}, {"sha256", sha256_hex(read_file(f))}});
  m["artifacts"] = arr;
  write_text(out / "manifest.json", m.dump(2));
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw std::ios_base::failure("cannot create output directory " + dir);
  return p;
}

std::shared_ptr<const StateProvider> initial_state(const RunConfig& c) {
  return std::make_shared<CutoffAbcState>(c.stage.grid, c.initial.abc, c.initial.t0, c.initial.ramp);
}

json levels_json(const FrequencyEnergyLevels& lv) {
  return {{"Xi", lv.Xi},         {"L", lv.L},           {"e_v", lv.e_v},          {"e_R", lv.e_R},
          {"from_v", lv.from_v}, {"from_p", lv.from_p}, {"from_R", lv.from_R}, {"from_DtR", lv.from_DtR}};
}

FrequencyEnergyLevels levels_of(const RunConfig& c, const StateProvider& s) {
  if (c.stage.levels) return *c.stage.levels;
  const TimeInterval supp = s.stress_support();
  std::vector<double> ts;
  const int ns = c.stage.level_samples;
  for (int k = 0; k < ns; ++k) ts.push_back(ns == 1 ? supp.lo : supp.lo + supp.length() * k / (ns - 1));
  const Vec3 m = mean_vector(s.velocity(supp.lo));
  ComovingState co(std::shared_ptr<const StateProvider>(&s, [](const StateProvider*) {}), m);
  return measure_levels(co, c.stage.Xi, c.stage.L, ts, 1e-4 * std::max(supp.length(), 1e-3));
}

int cmd_geometry(const Tolerances& tol, const std::string& out_dir) {
  const IcosaFrame frame = build_frame();
  const FrameIdentityReport r = check_frame(frame);
  const RotationFamily fam = build_rotations(frame, Vector3(1, 2, 3));
  const SeparationReport sep = separation(frame, fam);
  std::array<Vector3, 6> g;
  for (int i = 0; i < 6; ++i) g[i] = frame.F[i];
  const Matrix6 A = stress_matrix(g, sigma_partners(frame, g));
  Eigen::SelfAdjointEigenSolver<Matrix6> es(0.5 * (A + A.transpose()));
  double offdiag = 0.0, diag = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      (i == j ? diag : offdiag) = std::max(i == j ? diag : offdiag, std::abs(A(i, j) - (i == j ? 0.0 : 16.0 / 25.0)));
  const double gt = gamma_tilde();
  const double consistency = std::abs(5.0 * 16.0 / 25.0 * gt * gt - 1.0 / 6.0);
  json j;
  j["unit_norm"] = r.unit_norm;
  j["metric_identity"] = r.metric;
  j["dot_squared"] = r.dot_squared;
  j["wedge_squared"] = r.wedge_squared;
  j["sigma_wedge"] = r.sigma_wedge;
  j["sigma_order"] = r.sigma_order;
  j["stress_matrix_offdiag"] = offdiag;
  j["stress_matrix_diag"] = diag;
  auto ev = es.eigenvalues();
  j["stress_matrix_eigenvalues"] = {ev[0], ev[1], ev[2], ev[3], ev[4], ev[5]};
  j["gamma_consistency"] = consistency;
  j["rotation_min_separation"] = sep.min_sep;
  j["rotation_c_sep"] = fam.c_sep;
  const double worst = std::max({r.unit_norm, r.metric, r.dot_squared, r.wedge_squared, r.sigma_wedge,
                                 r.sigma_order, offdiag, diag, consistency});
  j["max_residual"] = worst;
  const bool ok = worst < tol.identity && sep.min_sep >= 0.05;
  j["status"] = ok ? "ok" : "failed";
  std::cout << j.dump(2) << "\n";
  if (!out_dir.empty()) {
    const fs::path out = prepare_out(out_dir);
    write_text(out / "geometry.json", j.dump(2));
    write_manifest(out, "geometry check", nullptr);
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_schedule(PlanInput in, bool have_z, const std::string& out_dir) {
  json j;
  j["mode"] = to_string(in.mode);
  j["delta"] = in.delta;
  j["alpha_velocity"] = holder_exponent(in.mode, in.delta);
  j["alpha_pressure"] = pressure_exponent(in.mode, in.delta);
  if (in.mode == ScheduleMode::no_material) {
    std::cout << j.dump(2) << "\n";
    if (!out_dir.empty()) {
      const fs::path out = prepare_out(out_dir);
      write_text(out / "schedule.json", j.dump(2));
      write_manifest(out, "schedule", nullptr);
    }
    return kOk;
  }
  if (!in.search && !have_z) {
    const Matrix3 T = evolution_matrix(in.mode, in.delta);
    const Vector3 psi = dominant_eigenvector(T, in.delta);
    j["T"] = {{T(0, 0), T(0, 1), T(0, 2)}, {T(1, 0), T(1, 1), T(1, 2)}, {T(2, 0), T(2, 1), T(2, 2)}};
    j["psi_plus"] = {psi[0], psi[1], psi[2]};
    j["time_support"] = time_support_weights().dot(psi);
    j["minimal_polynomial_residual"] = minimal_polynomial_residual(T, in.delta);
    std::cout << j.dump(2) << "\n";
    if (!out_dir.empty()) {
      const fs::path out = prepare_out(out_dir);
      write_text(out / "schedule.json", j.dump(2));
      write_manifest(out, "schedule", nullptr);
    }
    return kOk;
  }
  const IterationPlan plan = plan_parameters(in);
  std::cout << plan.to_json() << "\n";
  if (!out_dir.empty()) {
    const fs::path out = prepare_out(out_dir);
    write_text(out / "schedule.json", plan.to_json());
    write_text(out / "schedule.csv", plan.to_csv());
    write_manifest(out, "schedule", nullptr);
  }
  return plan.all_admissible() ? kOk : kCheckFailed;
}

int cmd_init_data(const RunConfig& c, const std::string& out_dir) {
  const auto s = initial_state(c);
  const fs::path out = prepare_out(out_dir);
  const TimeInterval supp = s->stress_support();
  json j;
  j["state"] = s->name();
  j["support"] = {supp.lo, supp.hi};
  j["levels"] = levels_json(levels_of(c, *s));
  json slices = json::array();
  const double h = 1e-4 * supp.length();
  for (int k = 0; k < 3; ++k) {
    const double t = supp.lo + supp.length() * (k + 1) / 4.0;
    const ResidualReport rr = verify_state(*s, t, h);
    slices.push_back({{"t", t}, {"residual", rr.residual}, {"div_v", rr.div_v}, {"scale", rr.scale}});
    const std::string tag = "_t" + std::to_string(k);
    write_efld((out / ("v0" + tag + ".efld")).string(), s->velocity(t));
    write_efld((out / ("p0" + tag + ".efld")).string(), s->pressure(t));
    write_efld((out / ("R0" + tag + ".efld")).string(), s->stress(t));
  }
  j["slices"] = slices;
  write_text(out / "init.json", j.dump(2));
  write_text(out / "config.ini", c.canonical());
  write_manifest(out, "init-data", &c);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_verify(const RunConfig& c, const Tolerances& tol, const std::string& out_dir) {
  const auto s = initial_state(c);
  const TimeInterval supp = s->stress_support();
  const double h = 1e-4 * supp.length();
  json j;
  json arr = json::array();
  double worst = 0.0;
  for (int k = 0; k <= 4; ++k) {
    const double t = supp.lo - 0.25 * supp.length() + 1.5 * supp.length() * k / 4.0;
    const ResidualReport rr = verify_state(*s, t, h);
    const double rel = rr.residual / std::max(rr.scale, 1.0);
    worst = std::max({worst, rel, rr.div_v});
    arr.push_back({{"t", t}, {"residual", rr.residual}, {"relative", rel}, {"div_v", rr.div_v}});
  }
  j["samples"] = arr;
  j["max_relative_residual"] = worst;
  j["tolerance"] = tol.residual;
  const FrequencyEnergyLevels lv = levels_of(c, *s);
  j["levels"] = levels_json(lv);
  bool admissible = true;
  try {
    derive_parameters(c.stage, lv, supp, c.stage.K > 0.0 ? c.stage.K : 1.0);
  } catch (const NumericalError& e) {
    admissible = false;
    j["parameter_error"] = e.what();
  }
  j["parameters_admissible"] = admissible;
  const bool ok = worst <= tol.residual && admissible;
  j["status"] = ok ? "ok" : "failed";
  std::cout << j.dump(2) << "\n";
  if (!out_dir.empty()) {
    const fs::path out = prepare_out(out_dir);
    write_text(out / "verify.json", j.dump(2));
    write_manifest(out, "verify", &c);
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_iterate(const RunConfig& c, const Tolerances& tol, const std::string& out_dir) {
  const auto s = initial_state(c);
  const fs::path out = prepare_out(out_dir);
  Stage stage(s, c.stage);
  const StageParameters& par = stage.params();
  std::vector<double> times;
  if (!par.trivial) {
    const double lo = stage.energy().support_lo(), hi = stage.energy().support_hi();
    for (int k = 0; k < c.samples; ++k) times.push_back(lo + (hi - lo) * (k + 0.5) / c.samples);
  }
  std::vector<StageSlice> slices;
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "t,e,waves,Q_M,Q_S,Q_L,Q_T,Q_H,R1,V,measured_residual,residual_scale,div_V,beltrami,stress_eq,min_gamma,"
         "int_V2\n";
  std::vector<double> intV2, evals;
  for (double t : times) {
    std::cerr << "evaluating t = " << t << "\n";
    StageSlice sl = stage.evaluate(t);
    const double iv = energy_integral(sl.V);
    intV2.push_back(iv);
    evals.push_back(sl.e);
    csv << t << ',' << sl.e << ',' << sl.waves << ',' << sl.Q_M.max_abs() << ',' << sl.Q_S.max_abs() << ','
        << sl.Q_L.max_abs() << ',' << sl.Q_T.max_abs() << ',' << sl.Q_H.max_abs() << ',' << sl.R1.max_abs() << ','
        << sl.V.max_abs() << ',' << sl.measured_residual << ',' << sl.residual_scale << ',' << sl.div_V << ','
        << sl.beltrami << ',' << sl.stress_eq << ',' << sl.min_gamma << ',' << iv << '\n';
    // keep only what the report and the field dump need
    sl.U_L = sl.U_H = sl.U_T = Field();
    sl.W = sl.S = sl.P0 = Field();
    slices.push_back(std::move(sl));
  }
  StageReport rep = summarize(stage, slices);
  if (times.size() >= 3) rep.energy_gap = energy_increment(times, intV2, evals).sup_gap;
  write_text(out / "report.json", rep.to_json());
  write_text(out / "slices.csv", csv.str());
  if (!slices.empty()) {
    const StageSlice& mid = slices[slices.size() / 2];
    write_efld((out / "v1.efld").string(), stage.to_lab(mid.v1, mid.t));
    write_efld((out / "p1.efld").string(), stage.to_lab(mid.p1, mid.t));
    write_efld((out / "R1.efld").string(), stage.to_lab(mid.R1, mid.t));
    write_efld((out / "V.efld").string(), stage.to_lab(mid.V, mid.t));
    write_energy_csv((out / "energy.csv").string(), energy_increment(times, intV2, evals));
  }
  write_text(out / "config.ini", c.canonical());
  write_manifest(out, "iterate", &c);
  std::cout << rep.to_json() << "\n";
  return rep.max_relative_residual <= tol.residual ? kOk : kCheckFailed;
}

int cmd_dump_info(const RunConfig* c) {
  json j;
  j["versions"] = versions();
  j["fft_threads"] = fft_threads();
  if (c) {
    j["config_hash"] = c->hash();
    j["config"] = c->canonical();
    const auto s = initial_state(*c);
    const FrequencyEnergyLevels lv = levels_of(*c, *s);
    j["levels"] = levels_json(lv);
    const double K = c->stage.K > 0.0 ? c->stage.K : 1.0 / (10.0 * calibrate_newton_basin(10000, c->seed));
    const StageParameters p = derive_parameters(c->stage, lv, s->stress_support(), K);
    j["parameters"] = {{"theta", p.theta}, {"b", p.b},       {"tau", p.tau},     {"lambda", p.lambda},
                       {"eps_v", p.eps_v}, {"eps_x", p.eps_x}, {"eps_t", p.eps_t}, {"tau_s", p.tau_s},
                       {"K", p.K}};
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale convex integration stage for the Euler-Reynolds system"};
  app.require_subcommand(1);
  int threads = 0;
  std::string profile = "default";
  app.add_option("--threads", threads, "FFT threads (default: EULER_FORGE_THREADS or 1)");
  app.add_option("--tolerance-profile", profile, "strict, default or loose");

  auto* geo = app.add_subcommand("geometry", "frame and rotation checks");
  auto* geo_check = geo->add_subcommand("check", "verify the icosahedral identities");
  geo->require_subcommand(1);
  std::string geo_out;
  geo_check->add_option("--out", geo_out, "output directory");

  auto* sch = app.add_subcommand("schedule", "parameter evolution and exponents");
  PlanInput plan;
  std::string mode = "standard";
  double Z = 0.0;
  std::string cfg_path, out_dir;
  sch->add_option("--delta", plan.delta, "delta > 0")->required();
  sch->add_option("--mode", mode, "standard, ideal or no_material");
  sch->add_flag("--search-z", plan.search, "search the smallest admissible Z");
  auto* zopt = sch->add_option("--Z", Z, "fixed Z (otherwise only the matrix data is printed)");
  sch->add_option("--eta", plan.eta, "eta");
  sch->add_option("--C", plan.C, "Main Lemma constant in the Xi law");
  sch->add_option("--Xi0", plan.Xi0, "initial frequency");
  sch->add_option("--eR0", plan.e_R0, "initial stress energy");
  sch->add_option("--k-max", plan.k_max, "number of stages");
  sch->add_option("--out", out_dir, "output directory");

  auto* init = app.add_subcommand("init-data", "build the initial Euler-Reynolds state");
  auto* iter = app.add_subcommand("iterate", "run one stage");
  auto* ver = app.add_subcommand("verify", "check the initial state and parameter admissibility");
  auto* info = app.add_subcommand("dump-info", "versions, config hash and derived parameters");
  for (auto* sc : {init, iter}) {
    sc->add_option("--config", cfg_path, "config file")->required();
    sc->add_option("--out", out_dir, "output directory")->required();
  }
  ver->add_option("--config", cfg_path, "config file")->required();
  ver->add_option("--out", out_dir, "output directory");
  info->add_option("--config", cfg_path, "config file");

  CLI11_PARSE(app, argc, argv);

  try {
    const Tolerances tol = tolerance_profile(profile);
    if (threads <= 0) {
      if (const char* env = std::getenv("EULER_FORGE_THREADS")) threads = std::atoi(env);
    }
    std::optional<RunConfig> cfg;
    if (!cfg_path.empty()) {
      cfg = load_config(cfg_path);
      if (threads <= 0) threads = cfg->threads;
    }
    set_fft_threads(std::max(threads, 1));

    if (geo_check->parsed()) return cmd_geometry(tol, geo_out);
    if (sch->parsed()) {
      plan.mode = parse_mode(mode);
      plan.Z = Z;
      if (plan.search) plan.Z = 0.0;
      return cmd_schedule(plan, zopt->count() > 0, out_dir);
    }
    if (init->parsed()) return cmd_init_data(*cfg, out_dir);
    if (iter->parsed()) return cmd_iterate(*cfg, tol, out_dir);
    if (ver->parsed()) return cmd_verify(*cfg, tol, out_dir);
    if (info->parsed()) return cmd_dump_info(cfg ? &*cfg : nullptr);
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
