// spinorbit: rotation numbers, basins, torus continuation and breakdown
// analysis for the dissipative spin-orbit problem.

#include "spinorbit/analysis/breakdown.hpp"
#include "spinorbit/analysis/observables.hpp"
#include "spinorbit/analysis/rotation.hpp"
#include "spinorbit/bundles/frame.hpp"
#include "spinorbit/cli/config.hpp"
#include "spinorbit/kam/continuation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace spinorbit;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNonConvergence = 2, kStall = 3, kIo = 4 };

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
};

cli::RunConfig build_config(const Common& c) {
  cli::RunConfig cfg;
  if (!c.config_file.empty()) cfg = cli::load_config(c.config_file);
  for (const auto& kv : c.overrides) cli::apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

/// Runs f.template operator()<T>() with T = double up to 17 digits, else Mp.
template <class F>
int dispatch(const cli::RunConfig& cfg, F&& f) {
  numerics::set_precision(cfg.precision_digits);
  if (cfg.precision_digits <= numerics::kDoubleDigits) return f.template operator()<double>();
  return f.template operator()<Mp>();
}

template <class T>
analysis::RotationConfig rotation_config(const cli::RunConfig& c) {
  analysis::RotationConfig r;
  r.n1 = c.n1;
  r.n2 = c.n2;
  r.delta = c.delta;
  if (c.n0 >= 0) r.n0_override = c.n0;
  r.validate();
  return r;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create " + dir + ": " + ec.message());
}

std::string torus_name(long index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "torus_%05ld.txt", index);
  return buf;
}

long torus_index(const std::string& name) {
  long idx = -1;
  if (std::sscanf(fs::path(name).filename().c_str(), "torus_%ld.txt", &idx) != 1)
    throw std::invalid_argument("not a torus checkpoint name: " + name);
  return idx;
}

// ---------------------------------------------------------------- rotation

struct RotationArgs {
  std::string x0 = "0", y0 = "1.38", eps = "0", ecc = "0";
};

int cmd_rotation(const cli::RunConfig& cfg, const RotationArgs& a) {
  return dispatch(cfg, [&]<class T>() {
    using numerics::from_string;
    const auto params = cli::model_params<T>(cfg, from_string<T>(a.eps), from_string<T>(a.ecc));
    const auto r = analysis::rotation_number(from_string<T>(a.x0), from_string<T>(a.y0), params,
                                             rotation_config<T>(cfg), cli::taylor_config<T>(cfg));
    std::cout << numerics::to_string(r.rho) << '\n';
    if (!r.converged) {
      std::cerr << "rotation: weighted averages did not settle up to n2 = " << cfg.n2 << '\n';
      return kNonConvergence;
    }
    return kOk;
  });
}

// ------------------------------------------------------------------- basin

struct BasinArgs {
  double x_lo = 0, x_hi = 6.283185307179586, y_lo = 1, y_hi = 2;
  long nx = 100, ny = 100;
  long begin = 0, end = -1;
  std::string eps = "0", ecc = "0";
  std::string out = "basin.csv";
};

int cmd_basin(const cli::RunConfig& cfg, const BasinArgs& a) {
  return dispatch(cfg, [&]<class T>() {
    using numerics::from_string;
    const auto params = cli::model_params<T>(cfg, from_string<T>(a.eps), from_string<T>(a.ecc));
    const long total = a.nx * a.ny;
    const long end = a.end < 0 ? total : a.end;
    const analysis::Window w{a.x_lo, a.x_hi, a.y_lo, a.y_hi};
    const auto nodes = analysis::basin_grid_range(w, a.nx, a.ny, a.begin, end, params, rotation_config<T>(cfg),
                                                  cli::taylor_config<T>(cfg), cfg.workers);
    const bool append = a.begin > 0 && fs::exists(a.out);
    std::ofstream out(a.out, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + a.out);
    if (!append) {
      out << "# eps=" << a.eps << " ecc=" << a.ecc << " mu=" << cfg.mu << " variant=" << cfg.variant
          << " precision=" << cfg.precision_digits << " window=" << a.x_lo << ',' << a.x_hi << ',' << a.y_lo << ','
          << a.y_hi << " nx=" << a.nx << " ny=" << a.ny << '\n'
          << "x,y,rho,converged\n";
    }
    analysis::write_basin_rows(out, nodes);
    if (!out) throw std::ios_base::failure("write failed: " + a.out);
    long bad = 0;
    for (const auto& n : nodes) bad += n.converged ? 0 : 1;
    std::cerr << "basin: nodes " << a.begin << ".." << end << " written, " << bad << " not converged\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- continue

struct ContinueArgs {
  bool from_integrable = false;
  std::string start;
  bool resume = false;
  std::string eps_target = "0.008";
};

template <class T>
void write_checkpoint(const std::string& dir, const kam::ContinuationState<T>& st, const std::vector<long>& ids) {
  const std::string tmp = dir + "/checkpoint.txt.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::ios_base::failure("cannot write " + tmp);
    out << "step " << numerics::to_string(st.step) << '\n' << "history";
    for (long id : ids) out << ' ' << torus_name(id);
    out << '\n';
    if (!out) throw std::ios_base::failure("write failed: " + tmp);
  }
  fs::rename(tmp, dir + "/checkpoint.txt");
}

int cmd_continue(const cli::RunConfig& cfg, const ContinueArgs& a, const std::string& command) {
  return dispatch(cfg, [&]<class T>() {
    using numerics::from_string;
    const std::string& dir = cfg.output_dir;
    ensure_dir(dir);
    cli::write_manifest(dir + "/manifest.txt", cfg, command);
    const auto cc = cli::continuation_config<T>(cfg);
    const auto tc = cli::taylor_config<T>(cfg);
    kam::EvalOptions opt;
    opt.workers = cfg.workers;
    const T target = from_string<T>(a.eps_target);

    const std::string log_path = dir + "/continuation.csv";
    std::vector<long> ids;  // torus file indices matching the history window
    long next_id = 0;
    std::ofstream log;
    auto open_log = [&](bool append) {
      log.open(log_path, append ? std::ios::app : std::ios::trunc);
      if (!log) throw std::ios_base::failure("cannot write " + log_path);
      if (!append) log << kam::continuation_log_header() << '\n';
    };
    kam::AcceptCallback<T> on_accept = [&](const kam::TorusSolution<T>& sol, const kam::ContinuationRecord<T>& rec,
                                           const kam::ContinuationState<T>& st) {
      kam::save_torus(dir + "/" + torus_name(next_id), sol);
      ids.push_back(next_id++);
      while (ids.size() > st.history.size()) ids.erase(ids.begin());
      kam::write_log_row(log, rec);
      log.flush();
      if (!log) throw std::ios_base::failure("write failed: " + log_path);
      write_checkpoint(dir, st, ids);
      std::cerr << "accepted eps " << numerics::to_string(rec.eps) << " e " << numerics::to_string(rec.ecc) << " L "
                << rec.L << " residual " << numerics::to_double(rec.residual) << '\n';
    };

    kam::ContinuationOutcome<T> outcome;
    if (a.resume) {
      std::ifstream in(dir + "/checkpoint.txt");
      if (!in) throw std::ios_base::failure("no checkpoint in " + dir);
      std::string tag, step, name;
      kam::ContinuationState<T> st;
      if (!(in >> tag >> step) || tag != "step" || !(in >> tag) || tag != "history")
        throw std::runtime_error("malformed checkpoint in " + dir);
      st.step = from_string<T>(step);
      while (in >> name) {
        st.history.push_back(kam::load_torus<T>(dir + "/" + name));
        ids.push_back(torus_index(name));
      }
      if (st.history.empty()) throw std::runtime_error("checkpoint lists no tori");
      next_id = ids.back() + 1;
      open_log(true);
      outcome = kam::continue_from(std::move(st), target, cc, tc, opt, on_accept);
    } else {
      kam::TorusSolution<T> start;
      if (a.from_integrable) {
        auto p = cli::model_params<T>(cfg, T(0), T(0));
        start = kam::integrable_torus(kam::frequency_from_selector<T>(cfg.omega), p, cfg.L_start);
      } else {
        start = kam::load_torus<T>(a.start);
        start.params.variant = model::variant_from_string(cfg.variant);
      }
      open_log(false);
      outcome = kam::continue_family(start, target, cc, tc, opt, on_accept);
    }
    if (outcome.status == kam::ContinuationStatus::Stalled) {
      std::cout << "stalled " << numerics::to_string(outcome.last.params.eps) << ' '
                << numerics::to_string(outcome.last.ecc) << '\n';
      return kStall;
    }
    std::cout << "reached " << numerics::to_string(outcome.last.params.eps) << ' '
              << numerics::to_string(outcome.last.ecc) << '\n';
    return kOk;
  });
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string log;
  std::vector<std::string> tori;
  bool normalized = false;
};

template <class T>
void write_observables(const std::string& path, const std::vector<kam::ContinuationRecord<T>>& log) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  const auto specs = analysis::figure_observables<T>();
  out << "eps";
  for (const auto& s : specs) out << ',' << s.name();
  out << '\n';
  for (const auto& rec : log) {
    std::vector<std::pair<T, T>> H;
    for (int k = 0; k < kam::kSeminormOrders; ++k) H.emplace_back(T(k + 1), rec.H[k]);
    out << numerics::to_string(rec.eps);
    for (const auto& s : specs) out << ',' << numerics::to_string(analysis::scale_invariant_observable(H, s));
    out << '\n';
  }
}

template <class T>
void write_seminorms(const std::string& path, const std::vector<kam::ContinuationRecord<T>>& log) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << "eps";
  for (int k = 1; k <= kam::kSeminormOrders; ++k) out << ",H" << k;
  out << ",width,min_angle\n";
  for (const auto& rec : log) {
    out << numerics::to_string(rec.eps);
    for (const auto& h : rec.H) out << ',' << numerics::to_string(h);
    out << ',' << numerics::to_string(rec.width) << ',' << numerics::to_string(rec.min_angle) << '\n';
  }
}

int cmd_analyze(const cli::RunConfig& cfg, const AnalyzeArgs& a) {
  return dispatch(cfg, [&]<class T>() {
    const std::string& dir = cfg.output_dir;
    ensure_dir(dir);
    if (!a.log.empty()) {
      std::ifstream in(a.log);
      if (!in) throw std::ios_base::failure("cannot read " + a.log);
      const auto records = kam::read_log<T>(in);
      write_seminorms(dir + "/seminorms.csv", records);
      write_observables(dir + "/observables.csv", records);
      if (records.size() >= 4) {
        const auto rep = analysis::breakdown_report(records);
        std::ofstream out(dir + "/report.txt");
        if (!out) throw std::ios_base::failure("cannot write report");
        analysis::write_report(out, records, rep);
        std::cout << "signature " << analysis::to_string(rep.signature) << '\n';
      } else {
        std::cerr << "analyze: " << records.size() << " records, report needs at least 4\n";
      }
    }
    const auto tc = cli::taylor_config<T>(cfg);
    for (const auto& path : a.tori) {
      const auto sol = kam::load_torus<T>(path);
      kam::EvalOptions opt;
      opt.workers = cfg.workers;
      const auto fr = bundles::adapted_frame(sol, tc, opt);
      const auto bp = bundles::reduce_bundles(fr, sol.lambda, sol.omega);
      const std::string out_path = dir + "/bundles_" + fs::path(path).stem().string() + ".txt";
      std::ofstream out(out_path);
      if (!out) throw std::ios_base::failure("cannot write " + out_path);
      bundles::export_bundles(out, bp, a.normalized);
      std::cout << fs::path(path).filename().string() << " min_angle_over_pi "
                << numerics::to_string(bundles::min_angle_over_pi(bp)) << " invariance_defect "
                << numerics::to_string(bundles::bundle_invariance_defect(fr, bp, sol.lambda, sol.omega)) << '\n';
    }
    return kOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant attractors of the dissipative spin-orbit problem"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-c,--config", common.config_file, "key = value configuration file");
  app.add_option("-s,--set", common.overrides, "override key=value (repeatable)");

  RotationArgs ra;
  auto* rot = app.add_subcommand("rotation", "rotation number of one orbit");
  rot->add_option("--x0", ra.x0);
  rot->add_option("--y0", ra.y0);
  rot->add_option("--eps", ra.eps);
  rot->add_option("--ecc", ra.ecc);

  BasinArgs ba;
  auto* basin = app.add_subcommand("basin", "rotation numbers on a grid of initial conditions");
  basin->add_option("--x-lo", ba.x_lo);
  basin->add_option("--x-hi", ba.x_hi);
  basin->add_option("--y-lo", ba.y_lo);
  basin->add_option("--y-hi", ba.y_hi);
  basin->add_option("--nx", ba.nx);
  basin->add_option("--ny", ba.ny);
  basin->add_option("--begin", ba.begin, "first node (row-major); appends when > 0");
  basin->add_option("--end", ba.end, "one past the last node");
  basin->add_option("--eps", ba.eps);
  basin->add_option("--ecc", ba.ecc);
  basin->add_option("-o,--out", ba.out);

  ContinueArgs ca;
  auto* cont = app.add_subcommand("continue", "continue a torus family in eps");
  auto* fi = cont->add_flag("--from-integrable", ca.from_integrable, "start at the averaged eps = 0 torus");
  auto* st = cont->add_option("--start", ca.start, "torus file to start from");
  auto* rs = cont->add_flag("--resume", ca.resume, "resume from output_dir/checkpoint.txt");
  fi->excludes(st)->excludes(rs);
  st->excludes(rs);
  cont->add_option("--eps-target", ca.eps_target);

  AnalyzeArgs aa;
  auto* an = app.add_subcommand("analyze", "breakdown report, observables and bundle exports");
  an->add_option("--log", aa.log, "continuation log");
  an->add_option("--torus", aa.tori, "torus files (repeatable)");
  an->add_flag("--normalized", aa.normalized, "export unit bundle vectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto cfg = build_config(common);
    if (*rot) return cmd_rotation(cfg, ra);
    if (*basin) return cmd_basin(cfg, ba);
    if (*cont) {
      if (!ca.from_integrable && !ca.resume && ca.start.empty()) {
        std::cerr << "continue: need --from-integrable, --start or --resume\n";
        return kUsage;
      }
      return cmd_continue(cfg, ca, command_line(argc, argv));
    }
    if (*an) return cmd_analyze(cfg, aa);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const kam::NonConvergence& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const flow::TaylorError& e) {
    std::cerr << "integration failed: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
