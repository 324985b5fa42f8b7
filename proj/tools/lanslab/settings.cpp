#include "settings.hpp"

#include <CLI11.hpp>
#include <numbers>
#include <sstream>

namespace lanslab::cli {

namespace {

template <class T>
T single(const std::vector<T>& v, T fallback, const char* name) {
  if (v.empty()) return fallback;
  if (v.size() > 1) throw UsageError(std::string("--") + name + " takes a list only for sweep");
  return v.front();
}

}  // namespace

double Settings::alpha_value(double fallback) const { return single(alpha, fallback, "alpha"); }
double Settings::nu_value(double fallback) const { return single(nu, fallback, "nu"); }
int Settings::n_value(int fallback) const { return single(n, fallback, "n"); }
double Settings::dt_value(double fallback) const { return single(dt, fallback, "dt"); }
double Settings::box() const { return box_length > 0.0 ? box_length : 2.0 * std::numbers::pi; }

nlohmann::json Settings::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["equation"] = equation;
  j["alpha"] = alpha;
  j["nu"] = nu;
  j["n"] = n;
  j["dt"] = dt;
  j["t_end"] = t_end;
  j["box_length"] = box();
  j["dealias_fraction"] = dealias_fraction;
  j["init_norm"] = init_norm;
  j["init_slope"] = init_slope;
  j["v_norm"] = v_norm;
  j["p"] = p;
  j["p_tilde"] = p_tilde;
  j["q"] = q;
  j["epsilon"] = epsilon;
  j["j_cut"] = j_cut;
  j["j_cut_max"] = j_cut_max;
  j["tolerance_factor"] = tolerance_factor;
  j["picard_tol"] = picard_tol;
  j["picard_max_iters"] = picard_max_iters;
  j["monitors"] = monitors;
  j["members"] = members;
  j["output_every"] = output_every;
  j["checkpoints"] = checkpoints;
  return j;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void add_options(CLI::App& app, Settings& s) {
  app.set_config("--config", "", "flat key = value file; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--out", s.out, "output directory")->capture_default_str();
  app.add_option("--seed", s.seed, "random seed")->capture_default_str();
  app.add_option("--suite", s.suite, "verify: comma list of bernstein, heat, product, embedding, ladyzhenskaya, "
                                     "cancellation or all");
  app.add_option("--equation", s.equation, "lans, ns, mlans or heat")
      ->check(CLI::IsMember({"lans", "ns", "mlans", "heat"}))
      ->capture_default_str();
  app.add_option("--alpha", s.alpha, "filter width (comma list for sweep)")->delimiter(',');
  app.add_option("--nu", s.nu, "viscosity (comma list for sweep)")->delimiter(',');
  app.add_option("--n", s.n, "points per axis (comma list for sweep)")->delimiter(',');
  app.add_option("--dt", s.dt, "time step (comma list for sweep)")->delimiter(',');
  app.add_option("--t-end,--t_end", s.t_end, "final time")->capture_default_str();
  app.add_option("--box-length,--box_length", s.box_length, "box side, 0 for 2 pi");
  app.add_option("--dealias-fraction,--dealias_fraction", s.dealias_fraction)->capture_default_str();
  app.add_option("--init-norm,--init_norm", s.init_norm, "B^{3/2}_{2,q} norm of the initial data")
      ->capture_default_str();
  app.add_option("--init-slope,--init_slope", s.init_slope, "spectral slope of the initial data")
      ->capture_default_str();
  app.add_option("--v-norm,--v_norm", s.v_norm, "mlans: B^{3/2}_{2,q} norm of the v data")->capture_default_str();
  app.add_option("--p", s.p)->capture_default_str();
  app.add_option("--p-tilde,--p_tilde", s.p_tilde)->capture_default_str();
  app.add_option("--q", s.q)->capture_default_str();
  app.add_option("--epsilon", s.epsilon, "split tail target")->capture_default_str();
  app.add_option("--j-cut,--j_cut", s.j_cut, "first split threshold, -1 automatic")->capture_default_str();
  app.add_option("--j-cut-max,--j_cut_max", s.j_cut_max)->capture_default_str();
  app.add_option("--tolerance-factor,--tolerance_factor", s.tolerance_factor)->capture_default_str();
  app.add_option("--picard-tol,--picard_tol", s.picard_tol)->capture_default_str();
  app.add_option("--picard-max-iters,--picard_max_iters", s.picard_max_iters)->capture_default_str();
  app.add_option("--monitors", s.monitors)->capture_default_str();
  app.add_option("--members", s.members, "ensemble size")->capture_default_str();
  app.add_option("--output-every,--output_every", s.output_every)->capture_default_str();
  app.add_option("--jobs", s.jobs, "sweep workers, 0 for all cores")->capture_default_str();
  app.add_option("--checkpoints", s.checkpoints, "write binary field checkpoints")->capture_default_str();
}

std::optional<ExitCode> parse_command_line(int argc, const char* const* argv, Settings& s, std::ostream& out,
                                           std::ostream& err) {
  CLI::App app{"lanslab: LANS-alpha verification harness"};
  app.name("lanslab");
  add_options(app, s);
  const std::pair<const char*, const char*> commands[] = {
      {"verify", "run inequality and cancellation checks"},
      {"solve", "produce one trajectory"},
      {"pipeline", "split, solve and recombine"},
      {"sweep", "fan out over alpha, nu, n and dt"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&s, name = std::string(name)] { s.command = name; });
  }
  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::pass : ExitCode::usage;
  }
  if (auto* opt = app.get_config_ptr(); opt && opt->count() > 0) s.config = opt->as<std::string>();
  return std::nullopt;
}

}  // namespace lanslab::cli
