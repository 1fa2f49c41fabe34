#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "geotrig/harness.hpp"

namespace h = geotrig::harness;
using geotrig::laws::Law;

namespace {

enum Exit { ok = 0, config_error = 1, numerical_failure = 2, partial_sweep = 3 };

struct Flags {
  std::string surface = "plane";
  std::string vertices, apex, dir1, dir2, lengths, scales, laws;
  std::string family = "directions";
  std::string out;
  std::string format;
  double tol_integrator = 0.0, tol_integrator_abs = 0.0, tol_bvp = 0.0, guard_factor = 0.0;
  int threads = 0;
  std::string config;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw h::ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

h::json parse_json(const std::string& text, const std::string& what) {
  try {
    return h::json::parse(text);
  } catch (const h::json::exception& e) {
    throw h::ConfigError(what + ": " + e.what());
  }
}

// Turns command-line flags into the same JSON document a config file holds.
h::json flags_to_json(const Flags& f, std::string_view experiment) {
  h::json j;
  if (std::filesystem::is_regular_file(f.surface))
    j["surface"] = parse_json(slurp(f.surface), f.surface);
  else
    j["surface"] = f.surface;
  j["experiment"] = std::string(experiment);
  auto pair = [](const std::string& s, std::string_view what) {
    const auto v = h::parse_list(s, what);
    if (v.size() != 2) throw h::ConfigError(std::string(what) + " needs two comma-separated numbers");
    return h::json{v[0], v[1]};
  };
  if (!f.vertices.empty()) j["vertices"] = h::parse_list(f.vertices, "vertices");
  if (!f.apex.empty()) j["apex"] = pair(f.apex, "apex");
  if (!f.dir1.empty()) j["dir1"] = pair(f.dir1, "dir1");
  if (!f.dir2.empty()) j["dir2"] = pair(f.dir2, "dir2");
  if (!f.lengths.empty()) j["lengths"] = pair(f.lengths, "lengths");
  j["family"] = f.family;
  if (!f.scales.empty()) {
    const auto v = h::parse_list(f.scales, "scales");
    if (v.size() != 3) throw h::ConfigError("scales needs t0,ratio,count");
    j["scales"] = {{"t0", v[0]}, {"ratio", v[1]}, {"count", static_cast<int>(v[2])}};
  }
  if (!f.laws.empty()) {
    h::json names = h::json::array();
    std::size_t start = 0;
    while (true) {
      const auto comma = f.laws.find(',', start);
      names.push_back(f.laws.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    j["laws"] = names;
  }
  if (!f.out.empty()) j["out"] = f.out;
  if (!f.format.empty()) j["format"] = f.format;
  h::json tol = h::json::object();
  if (f.tol_integrator > 0) tol["integrator"] = f.tol_integrator;
  if (f.tol_integrator_abs > 0) tol["integrator_abs"] = f.tol_integrator_abs;
  if (f.tol_bvp > 0) tol["bvp"] = f.tol_bvp;
  if (f.guard_factor > 0) tol["guard_factor"] = f.guard_factor;
  if (!tol.empty()) j["tolerances"] = tol;
  if (f.threads > 0) j["threads"] = f.threads;
  return j;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
  } else {
    h::write_file(path, content);
  }
}

int run_triangle_like(const h::RunConfig& cfg, const geotrig::SurfaceModel& m) {
  const h::TriangleReport report = h::run_triangle(cfg, m);
  int code = report.all_evaluated() ? ok : numerical_failure;
  for (const auto& o : report.outcomes)
    if (!o.error.empty()) std::cerr << "law " << geotrig::laws::to_string(o.law) << ": " << o.error << "\n";

  if (cfg.experiment == h::Experiment::verify) {
    std::ostringstream ss;
    for (const auto& o : report.outcomes) {
      if (!o.error.empty()) {
        ss << "ERROR " << geotrig::laws::to_string(o.law) << " " << o.error << "\n";
        continue;
      }
      for (const auto& r : o.residuals) {
        const bool pass = r.within_numerics();
        if (!pass) code = numerical_failure;
        ss << (pass ? "PASS " : "FAIL ") << r.label << " residual=" << h::format_double(r.residual)
           << " budget=" << h::format_double(r.error_budget) << "\n";
      }
    }
    write_output(cfg.out, ss.str());
    return code;
  }
  const std::string text =
      cfg.format == h::Format::csv && cfg.format_given ? h::to_csv(report, cfg.laws) : h::to_json(report).dump(2) + "\n";
  write_output(cfg.out, text);
  return code;
}

std::string fits_table(const h::SweepResult& r) {
  std::ostringstream ss;
  for (const auto& f : r.fits) {
    if (!f.error.empty())
      ss << f.column << " refused: " << f.error << "\n";
    else
      ss << f.column << " exponent=" << h::format_double(f.exponent)
         << " coefficient=" << h::format_double(f.sign * std::exp(f.log_coefficient))
         << " r2=" << h::format_double(f.r_squared) << " rows=" << f.rows_used << "\n";
  }
  const auto& s = r.summary;
  if (s.f_hat_smallest) {
    ss << "f_hat smallest=" << h::format_double(*s.f_hat_smallest);
    if (s.f_hat_relative_change) ss << " relative_change=" << h::format_double(*s.f_hat_relative_change);
    ss << " sign_vs_K=" << s.sign_relation << "\n";
  }
  return ss.str();
}

int run_sweep_like(const h::RunConfig& cfg, const geotrig::SurfaceModel& m) {
  const bool stream_csv = cfg.experiment == h::Experiment::sweep && cfg.format == h::Format::csv;
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (stream_csv && !cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary | std::ios::trunc);
    if (!file) throw geotrig::Error("cannot open '" + cfg.out + "' for writing");
    out = &file;
  }
  if (stream_csv) *out << h::csv_header(h::residual_columns(cfg.laws)) << std::flush;

  const h::SweepResult result = h::run_sweep(cfg, m, [&](const h::SweepRow& row) {
    for (const auto& e : row.errors) std::cerr << "t=" << h::format_double(row.t) << " " << e << "\n";
    if (stream_csv) *out << h::csv_line(row) << std::flush;
  });

  if (cfg.experiment == h::Experiment::sweep) {
    if (!stream_csv) write_output(cfg.out, h::to_json(result).dump(2) + "\n");
    std::cerr << fits_table(result);
  } else {
    if (!cfg.out.empty()) h::emit(result, cfg.format, cfg.out);
    std::cout << fits_table(result);
  }
  return result.failed_rows() > 0 ? partial_sweep : ok;
}

int execute(const h::json& doc) {
  const h::RunConfig cfg = h::config_from_json(doc);
  geotrig::SurfaceModel m;
  try {
    m = geotrig::make_surface(cfg.surface);
  } catch (const geotrig::InputError& e) {
    throw h::ConfigError(std::string("surface: ") + e.what());
  }
  h::validate(cfg, m);
  switch (cfg.experiment) {
    case h::Experiment::triangle:
    case h::Experiment::verify: return run_triangle_like(cfg, m);
    case h::Experiment::sweep:
    case h::Experiment::slope: return run_sweep_like(cfg, m);
  }
  return config_error;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--surface", f.surface, "built-in surface name or JSON surface file");
  cmd->add_option("--laws", f.laws, "comma-separated law names (default: all)");
  cmd->add_option("--out", f.out, "output path (default: stdout)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--tol-integrator", f.tol_integrator, "integrator relative tolerance");
  cmd->add_option("--tol-integrator-abs", f.tol_integrator_abs, "integrator absolute tolerance");
  cmd->add_option("--tol-bvp", f.tol_bvp, "shooting tolerance relative to the chord");
  cmd->add_option("--guard-factor", f.guard_factor, "diameter guard multiplier of 1/sqrt(max|K|)");
}

void add_family(CLI::App* cmd, Flags& f) {
  cmd->add_option("--apex", f.apex, "apex u,v");
  cmd->add_option("--dir1", f.dir1, "first direction du,dv");
  cmd->add_option("--dir2", f.dir2, "second direction du,dv");
  cmd->add_option("--lengths", f.lengths, "base lengths L1,L2");
  cmd->add_option("--family", f.family, "directions or equilateral")
      ->check(CLI::IsMember({"directions", "equilateral"}));
  cmd->add_option("--scales", f.scales, "t0,ratio,count");
  cmd->add_option("--threads", f.threads, "worker threads for rows (default: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic triangle trigonometry checks"};
  app.require_subcommand(1);
  Flags f;

  auto* surfaces = app.add_subcommand("surfaces", "list built-in surfaces");
  auto* triangle = app.add_subcommand("triangle", "evaluate laws on one triangle (JSON report)");
  auto* verify = app.add_subcommand("verify", "pass/fail line per law residual against its error budget");
  auto* sweep = app.add_subcommand("sweep", "shrinking-family sweep (CSV rows)");
  auto* slope = app.add_subcommand("slope", "sweep and print fitted residual exponents");
  auto* run = app.add_subcommand("run", "run a JSON config file");
  for (auto* c : {triangle, verify}) {
    add_common(c, f);
    c->add_option("--vertices", f.vertices, "u1,v1,u2,v2,u3,v3")->required();
  }
  for (auto* c : {sweep, slope}) {
    add_common(c, f);
    add_family(c, f);
  }
  run->add_option("--config", f.config, "JSON RunConfig file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (surfaces->parsed()) {
      for (const auto& s : h::kNamedSurfaces) std::cout << s.name << "\t" << s.description << "\n";
      return ok;
    }
    h::json doc;
    if (run->parsed())
      doc = parse_json(slurp(f.config), f.config);
    else if (triangle->parsed())
      doc = flags_to_json(f, "triangle");
    else if (verify->parsed())
      doc = flags_to_json(f, "verify");
    else if (sweep->parsed())
      doc = flags_to_json(f, "sweep");
    else
      doc = flags_to_json(f, "slope");
    return execute(doc);
  } catch (const geotrig::InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const geotrig::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  }
}
