#include <algorithm>
#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "nlslab/cli.hpp"
#include "nlslab/error.hpp"
#include "nlslab/presets.hpp"

namespace nlslab::cli {

namespace {

struct Sweep {
  std::string key;
  std::vector<double> values;
};

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw CLI::ValidationError("--sweep", "expected key=v1,v2,...");
  }
  Sweep s;
  s.key = text.substr(0, eq);
  std::stringstream list(text.substr(eq + 1));
  std::string item;
  while (std::getline(list, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("--sweep", "bad value '" + item + "'");
    s.values.push_back(v);
  }
  return s;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--spec", o.spec_source, "spec file path or preset expression, e.g. cubic(sigma=3,mu=1)")
      ->required();
  sub->add_option("--n,--dim", o.dim, "spatial dimension (overrides the spec file)")->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", o.out_dir, "directory for outputs and manifest.json");
  sub->add_option("--out", o.out, "path of the main output file");
  sub->add_option("--seed", o.seed, "seed for sampled checks");
  sub->add_option("--sweep", o.sweep, "run once per preset parameter value, e.g. kappa=0.4,0.5,0.6");
}

void add_grid(CLI::App* sub, Options& o) {
  sub->add_option("--N,--points", o.points, "grid points per axis (power of two)")->check(CLI::PositiveNumber);
  sub->add_option("--L,--half-length", o.half_length, "box half-width (default 20, 12 or 10 by dimension)")->check(CLI::PositiveNumber);
}

void add_solver(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "ground-state residual tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "ground-state iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--damping", o.damping, "fixed under-relaxation in (0, 1]; 0 selects the automatic schedule")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_flag("--radial", o.radial, "use the radial solver (automatic for n > 3, and for classify in n = 3 unless the data is a file)");
  sub->add_option("--radial-points", o.radial_points, "radial grid cells")->check(CLI::PositiveNumber);
  sub->add_option("--radial-radius", o.radial_radius, "radial grid outer radius")->check(CLI::PositiveNumber);
}

void add_data(CLI::App* sub, Options& o) {
  sub->add_option("--init", o.init, "initial data: gaussian, ground-state or file:PATH");
  sub->add_option("--amplitude", o.amplitude, "amplitude factor of the initial data");
  sub->add_option("--width", o.width, "Gaussian width")->check(CLI::PositiveNumber);
  sub->add_option("--dilation", o.dilation, "spatial dilation of ground-state data")->check(CLI::PositiveNumber);
}

void add_time(CLI::App* sub, Options& o) {
  sub->add_option("--t-end", o.t_end, "final time")->required();
  sub->add_option("--dt", o.dt, "time step")->check(CLI::PositiveNumber);
  sub->add_option("--dt-min", o.dt_min, "smallest adaptive time step")->check(CLI::PositiveNumber);
  sub->add_flag("--adaptive", o.adaptive, "halve dt while the gradient energy grows quickly");
  sub->add_option("--snapshot-stride", o.snapshot_stride, "steps between diagnostics records")
      ->check(CLI::PositiveNumber);
  sub->add_option("--blowup-factor", o.blowup_factor, "stop when K exceeds this multiple of K(0)");
  sub->add_option("--resolution-tol", o.resolution_tol,
                  "stop when the spectral energy fraction above 2/3 of Nyquist exceeds this (0 disables)");
  sub->add_option("--fields-out", o.fields_out, "directory for field snapshots");
}

CommandResult run_sweep(const Options& base) {
  const Sweep sweep = parse_sweep(base.sweep);
  const std::size_t count = sweep.values.size();
  std::vector<CommandResult> results(count);
  std::vector<Options> runs(count, base);
  for (std::size_t i = 0; i < count; ++i) {
    Options& o = runs[i];
    o.sweep.clear();
    o.spec_source = with_preset_parameter(base.spec_source, sweep.key, sweep.values[i]);
    o.out_dir = (std::filesystem::path(base.out_dir) / (sweep.key + "=" + format_number(sweep.values[i]))).string();
    o.out.clear();
    if (!base.fields_out.empty()) o.fields_out = (std::filesystem::path(o.out_dir) / "fields").string();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = run_command(runs[i]);
      } catch (const std::exception& e) {
        results[i].exit_code = kNumericalFailure;
        results[i].error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  CommandResult total;
  std::ostringstream summary;
  for (std::size_t i = 0; i < count; ++i) {
    summary << "[" << sweep.key << "=" << format_number(sweep.values[i]) << "] exit " << results[i].exit_code << "\n"
            << results[i].summary;
    if (results[i].exit_code != kOk) {
      summary << "error: " << results[i].error << "\n";
      if (results[i].exit_code > total.exit_code) {
        total.exit_code = results[i].exit_code;
        total.error = sweep.key + "=" + format_number(sweep.values[i]) + ": " + results[i].error;
      }
    }
  }
  total.summary = summary.str();
  return total;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Coupled nonlinear Schroedinger systems: validation, ground states, evolution, classification"};
  app.set_version_flag("--version", std::string(NLSLAB_VERSION));
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check the structural hypotheses of a system");
  add_common(validate, o);

  auto* gs = app.add_subcommand("ground-state", "compute a ground state and its functionals");
  add_common(gs, o);
  add_grid(gs, o);
  add_solver(gs, o);
  gs->add_option("--omega", o.omega, "frequency of the standing wave")->check(CLI::PositiveNumber);
  gs->add_flag("--keep-beta", o.keep_beta, "include the mass terms beta in the elliptic problem");
  gs->add_option("--fields-out", o.fields_out, "path of the ground-state field file");

  auto* evolve = app.add_subcommand("evolve", "integrate the time-dependent system");
  add_common(evolve, o);
  add_grid(evolve, o);
  add_data(evolve, o);
  add_time(evolve, o);

  auto* classify = app.add_subcommand("classify", "place initial data relative to the ground-state thresholds");
  add_common(classify, o);
  add_grid(classify, o);
  add_solver(classify, o);
  add_data(classify, o);
  classify->get_option("--init")->default_str("ground-state");
  classify->add_option("--assume", o.assume, "radial or finite-variance")
      ->check(CLI::IsMember({"radial", "finite-variance"}));

  auto* pc = app.add_subcommand("pseudo-conformal", "evolve the explicit self-similar solution and compare");
  add_common(pc, o);
  add_grid(pc, o);
  add_time(pc, o);
  pc->add_option("--T", o.blowup_time, "blow-up time of the explicit solution")->check(CLI::PositiveNumber);
  add_solver(pc, o);

  auto* vc = app.add_subcommand("virial-check", "compare the virial identity with finite differences");
  add_common(vc, o);
  add_grid(vc, o);
  add_data(vc, o);
  add_time(vc, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << NLSLAB_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  for (auto* sub : app.get_subcommands()) o.command = sub->get_name();
  if (o.command == "classify" && classify->count("--init") == 0) o.init = "ground-state";

  CommandResult result;
  try {
    result = o.sweep.empty() ? run_command(o) : run_sweep(o);
  } catch (const CLI::ValidationError& e) {
    result.exit_code = kUsageError;
    result.error = e.what();
  } catch (const SpecError& e) {
    result.exit_code = kValidationFailure;
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kNumericalFailure;
    result.error = e.what();
  }
  out << result.summary;
  if (result.exit_code != kOk) {
    std::string line = result.error;
    std::replace(line.begin(), line.end(), '\n', ' ');
    err << "error: " << line << "\n";
  }
  return result.exit_code;
}

}  // namespace nlslab::cli
