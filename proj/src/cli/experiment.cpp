#include "qsde/cli/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsde/belavkin.hpp"
#include "qsde/canonical.hpp"
#include "qsde/detuning.hpp"
#include "qsde/feedback.hpp"
#include "qsde/filters.hpp"
#include "qsde/gisin.hpp"
#include "qsde/lindblad.hpp"

namespace qsde::cli {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

std::string indexed(const std::string& stem, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%06zu", i);
  return stem + buf + ".tsv";
}

struct Context {
  const ExperimentConfig& config;
  ModelSpec model;
  StateVector psi0;
  TimeGrid grid;
  std::filesystem::path dir;
  RunResult result;

  TrajectoryRecord record() const {
    TrajectoryRecord r;
    r.metadata = {{"mode", mode_name(config.mode)},
                  {"base_seed", std::to_string(config.base_seed)},
                  {"dt", format_double(config.dt)},
                  {"t_max", format_double(config.t_max)},
                  {"n_traj", std::to_string(config.n_traj)},
                  {"config_hash", hex64(config_hash(config))}};
    return r;
  }

  void emit(const TrajectoryRecord& r, const std::string& name) {
    const auto path = dir / name;
    r.write(path);
    result.files.push_back(path);
  }

  void fail_contract(const std::string& what) {
    result.exit_code = kExitContract;
    if (!result.message.empty()) result.message += "; ";
    result.message += what;
  }
};

void append_state(std::vector<double>& row, const StateVector& psi) {
  for (Index i = 0; i < psi.size(); ++i) {
    row.push_back(psi(i).real());
    row.push_back(psi(i).imag());
  }
}

void state_columns(std::vector<std::string>& cols, const std::string& prefix, Index dim) {
  for (Index i = 0; i < dim; ++i) {
    cols.push_back(prefix + "re_" + std::to_string(i));
    cols.push_back(prefix + "im_" + std::to_string(i));
  }
}

void write_summary(Context& ctx, const EnsembleSummary& s) {
  TrajectoryRecord r = ctx.record();
  r.columns = {"t"};
  for (const auto& n : s.names) {
    r.columns.push_back(n + "_mean");
    r.columns.push_back(n + "_se");
  }
  for (std::size_t p = 0; p < s.grid.n_points(); ++p) {
    std::vector<double> row{s.grid.time(p)};
    for (std::size_t o = 0; o < s.names.size(); ++o) {
      row.push_back(s.at(p, o).mean());
      row.push_back(s.at(p, o).standard_error());
    }
    r.add_row(std::move(row));
  }
  ctx.emit(r, "summary.tsv");
}

void run_lindblad(Context& ctx) {
  const auto rhos = lindblad_propagate(ctx.model, DensityMatrix::pure(ctx.psi0), ctx.grid);
  TrajectoryRecord r = ctx.record();
  r.columns = {"t"};
  for (const auto& o : ctx.config.observables) {
    r.columns.push_back(o.name + "_mean");
    r.columns.push_back(o.name + "_se");
  }
  for (std::size_t p = 0; p < rhos.size(); ++p) {
    std::vector<double> row{ctx.grid.time(p)};
    for (const auto& o : ctx.config.observables) {
      row.push_back(rhos[p].expectation(o.op).real());
      row.push_back(0.0);
    }
    r.add_row(std::move(row));
  }
  ctx.emit(r, "summary.tsv");
}

// Per-trajectory dumps re-run the seeded trajectory serially; the noise is
// the same path the ensemble consumed.
void dump_trajectory(Context& ctx, Unravelling kind, std::size_t index) {
  const auto& cfg = ctx.config;
  const std::size_t n_ch = ctx.model.n_channels();
  const RealNoisePath real = ensemble_noise(kind, n_ch, ctx.grid, cfg.base_seed, index);

  std::vector<StateVector> states;
  std::vector<std::vector<double>> noise_rows;
  std::vector<std::string> noise_cols{"step", "t"};
  if (kind == Unravelling::Belavkin) {
    const auto traj = belavkin_run(ctx.model, ctx.psi0, real, ctx.grid);
    states = traj.states;
    for (std::size_t k = 0; k < n_ch; ++k) noise_cols.push_back("dI_" + std::to_string(k + 1));
    for (std::size_t m = 0; m < ctx.grid.n_steps; ++m) {
      std::vector<double> row{static_cast<double>(m), ctx.grid.time(m)};
      for (std::size_t k = 0; k < n_ch; ++k) row.push_back(real(m, k));
      noise_rows.push_back(std::move(row));
    }
  } else {
    const ComplexNoisePath dxi_star = complex_from_real(real).conjugated();
    const auto traj = gisin_run(ctx.model, ctx.psi0, dxi_star, ctx.grid);
    states = traj.states;
    for (std::size_t k = 0; k < n_ch; ++k) {
      noise_cols.push_back("dxi_star_re_" + std::to_string(k + 1));
      noise_cols.push_back("dxi_star_im_" + std::to_string(k + 1));
    }
    for (std::size_t m = 0; m < ctx.grid.n_steps; ++m) {
      std::vector<double> row{static_cast<double>(m), ctx.grid.time(m)};
      for (std::size_t k = 0; k < n_ch; ++k) {
        row.push_back(dxi_star(m, k).real());
        row.push_back(dxi_star(m, k).imag());
      }
      noise_rows.push_back(std::move(row));
    }
  }

  TrajectoryRecord r = ctx.record();
  r.metadata.emplace_back("trajectory", std::to_string(index));
  r.columns = {"t"};
  for (const auto& o : cfg.observables) r.columns.push_back(o.name);
  if (cfg.dump_states) state_columns(r.columns, "psi_", ctx.model.dim());
  for (std::size_t p = 0; p < states.size(); ++p) {
    std::vector<double> row{ctx.grid.time(p)};
    for (const auto& o : cfg.observables) row.push_back(expectation(states[p], o.op).real());
    if (cfg.dump_states) append_state(row, states[p]);
    r.add_row(std::move(row));
  }
  ctx.emit(r, indexed("trajectory", index));

  if (cfg.dump_paths) {
    TrajectoryRecord n = ctx.record();
    n.metadata.emplace_back("trajectory", std::to_string(index));
    n.columns = noise_cols;
    for (auto& row : noise_rows) n.add_row(std::move(row));
    ctx.emit(n, indexed("noise", index));
  }
}

void run_unravelling(Context& ctx, Unravelling kind) {
  const auto& cfg = ctx.config;
  EnsembleOptions opts;
  opts.n_traj = cfg.n_traj;
  opts.base_seed = cfg.base_seed;
  opts.parallel = cfg.parallel;
  write_summary(ctx, unravelling_ensemble(kind, ctx.model, ctx.psi0, ctx.grid, cfg.observables, opts));
  if (cfg.dump_paths || cfg.dump_states) {
    for (std::size_t i = 0; i < cfg.n_traj; ++i) dump_trajectory(ctx, kind, i);
  }
}

void write_residual_summary(Context& ctx, const std::vector<std::vector<double>>& per_traj, const std::string& name,
                            std::vector<std::pair<std::string, std::string>> extra) {
  TrajectoryRecord r = ctx.record();
  for (auto& kv : extra) r.metadata.push_back(std::move(kv));
  r.columns = {"t", name + "_mean", name + "_se"};
  for (std::size_t p = 0; p < ctx.grid.n_points(); ++p) {
    RunningStats s;
    for (const auto& v : per_traj) s.push(v[p]);
    r.add_row({ctx.grid.time(p), s.mean(), s.standard_error()});
  }
  ctx.emit(r, "summary.tsv");
}

void run_canonical_pair(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto z = canonical_coefficients(cfg.canonical_n, cfg.canonical_phi, cfg.canonical_sign);
  std::vector<std::vector<double>> residuals;
  double worst = 0.0;
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    const RealNoisePath path = real_increments(static_cast<std::size_t>(z.n), ctx.grid.n_steps, ctx.grid.dt, {cfg.base_seed, i});
    const CoupledRun run = coupled_pair_run(ctx.model, z, path, ctx.psi0, ctx.grid);
    const PhaseItoReport ito = phase_ito_cross_check(run);
    worst = std::max(worst, run.max_residual());

    TrajectoryRecord r = ctx.record();
    r.metadata.emplace_back("trajectory", std::to_string(i));
    r.metadata.emplace_back("canonical_n", std::to_string(z.n));
    r.metadata.emplace_back("max_residual", format_double(run.max_residual()));
    r.metadata.emplace_back("realized_qv", format_double(ito.realized_qv));
    r.metadata.emplace_back("expected_qv", format_double(ito.expected_qv));
    r.columns = {"t", "theta", "qv", "residual", "infidelity"};
    for (const auto& o : cfg.observables) {
      r.columns.push_back(o.name + "_filter");
      r.columns.push_back(o.name + "_diffusion");
    }
    if (cfg.dump_states) {
      state_columns(r.columns, "psi_", ctx.model.dim());
      state_columns(r.columns, "psi_tilde_", ctx.model.dim());
    }
    for (std::size_t p = 0; p < ctx.grid.n_points(); ++p) {
      const auto& psi = run.belavkin.states[p];
      const auto& tilde = run.gisin.states[p];
      std::vector<double> row{ctx.grid.time(p), run.theta[p], run.quadratic_variation[p], run.residual[p],
                              run.infidelity[p]};
      for (const auto& o : cfg.observables) {
        row.push_back(expectation(psi, o.op).real());
        row.push_back(expectation(tilde, o.op).real());
      }
      if (cfg.dump_states) {
        append_state(row, psi);
        append_state(row, tilde);
      }
      r.add_row(std::move(row));
    }
    ctx.emit(r, indexed("canonical_pair", i));

    if (cfg.dump_paths) {
      TrajectoryRecord n = ctx.record();
      n.metadata.emplace_back("trajectory", std::to_string(i));
      n.columns = {"step", "t"};
      for (int k = 0; k < z.n; ++k) n.columns.push_back("dI_" + std::to_string(k + 1));
      n.columns.push_back("dxi_star_re");
      n.columns.push_back("dxi_star_im");
      n.columns.push_back("d_theta");
      for (std::size_t m = 0; m < ctx.grid.n_steps; ++m) {
        std::vector<double> row{static_cast<double>(m), ctx.grid.time(m)};
        for (int k = 0; k < z.n; ++k) row.push_back(path(m, static_cast<std::size_t>(k)));
        row.push_back(run.dxi_star(m, 0).real());
        row.push_back(run.dxi_star(m, 0).imag());
        row.push_back(run.d_theta[m]);
        n.add_row(std::move(row));
      }
      ctx.emit(n, indexed("noise", i));
    }
    residuals.push_back(run.residual);
  }
  write_residual_summary(ctx, residuals, "residual", {{"max_residual", format_double(worst)}});
  if (worst >= cfg.residual_tolerance) {
    ctx.fail_contract("max residual " + format_double(worst) + " reached tolerance " +
                      format_double(cfg.residual_tolerance));
  }
}

void run_prop2(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto z = canonical_coefficients(cfg.canonical_n, cfg.canonical_phi, cfg.canonical_sign);
  std::vector<std::vector<double>> deviations;
  double worst = 0.0;
  double immunity = 0.0;
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    const RealNoisePath path = real_increments(static_cast<std::size_t>(z.n), ctx.grid.n_steps, ctx.grid.dt, {cfg.base_seed, i});
    const CoupledRun run = coupled_pair_run(ctx.model, z, path, ctx.psi0, ctx.grid);

    TrajectoryRecord r = ctx.record();
    r.metadata.emplace_back("trajectory", std::to_string(i));
    r.columns = {"t"};
    std::vector<double> combined(ctx.grid.n_points(), 0.0);
    std::vector<Prop2Report> reports;
    for (const auto& o : cfg.observables) {
      reports.push_back(proposition2_check(run, o.op));
      const auto& rep = reports.back();
      worst = std::max(worst, rep.max_deviation);
      immunity = std::max(immunity, rep.phase_immunity_error);
      r.metadata.emplace_back(o.name + "_max_deviation", format_double(rep.max_deviation));
      r.metadata.emplace_back(o.name + "_phase_immunity_error", format_double(rep.phase_immunity_error));
      r.columns.push_back(o.name + "_filter");
      r.columns.push_back(o.name + "_diffusion");
      r.columns.push_back(o.name + "_deviation");
      for (std::size_t p = 0; p < combined.size(); ++p) combined[p] = std::max(combined[p], rep.deviation[p]);
    }
    for (std::size_t p = 0; p < ctx.grid.n_points(); ++p) {
      std::vector<double> row{ctx.grid.time(p)};
      for (std::size_t o = 0; o < cfg.observables.size(); ++o) {
        const auto& op = cfg.observables[o].op;
        row.push_back(expectation(run.belavkin.states[p], op).real());
        row.push_back(expectation(run.gisin.states[p], op).real());
        row.push_back(reports[o].deviation[p]);
      }
      r.add_row(std::move(row));
    }
    ctx.emit(r, indexed("prop2", i));
    deviations.push_back(std::move(combined));
  }
  write_residual_summary(ctx, deviations, "deviation",
                         {{"max_deviation", format_double(worst)}, {"phase_immunity_error", format_double(immunity)}});
  if (worst >= cfg.residual_tolerance) {
    ctx.fail_contract("max filter deviation " + format_double(worst) + " reached tolerance " +
                      format_double(cfg.residual_tolerance));
  }
}

void run_feedback(Context& ctx) {
  const auto& cfg = ctx.config;
  if (ctx.model.is_time_dependent()) throw ConfigError("model", "feedback mode needs a time-independent model");
  const Coefficients co = ctx.model.at(ctx.grid.t0);
  const Operator& r_op = co.couplings.front();
  std::vector<std::vector<double>> residuals;
  double worst = 0.0;
  double worst_real_alpha = 0.0;
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    const RealNoisePath path = real_increments(2, ctx.grid.n_steps, ctx.grid.dt, {cfg.base_seed, i});
    const ClosedLoopRun run = closed_loop_run(r_op, co.hamiltonian, path, ctx.psi0, ctx.grid);
    worst = std::max(worst, run.max_residual());
    worst_real_alpha = std::max(worst_real_alpha, run.max_real_alpha);

    TrajectoryRecord r = ctx.record();
    r.metadata.emplace_back("trajectory", std::to_string(i));
    r.metadata.emplace_back("max_residual", format_double(run.max_residual()));
    r.metadata.emplace_back("max_real_alpha", format_double(run.max_real_alpha));
    r.columns = {"t", "residual", "alpha1_im", "alpha2_im", "Y1", "Y2"};
    for (const auto& o : cfg.observables) {
      r.columns.push_back(o.name + "_filter");
      r.columns.push_back(o.name + "_diffusion");
    }
    if (cfg.dump_states) state_columns(r.columns, "psi_", ctx.model.dim());
    for (std::size_t p = 0; p < ctx.grid.n_points(); ++p) {
      const auto& psi = run.states[p];
      // alpha at the final point is the value the loop would apply next.
      const FeedbackAlphas a = p < run.alphas.size() ? run.alphas[p] : feedback_alpha(psi, r_op);
      std::vector<double> row{ctx.grid.time(p), run.residual[p], a[0].imag(), a[1].imag(),
                              run.records[p](0), run.records[p](1)};
      for (const auto& o : cfg.observables) {
        row.push_back(expectation(psi, o.op).real());
        row.push_back(expectation(run.reference.states[p], o.op).real());
      }
      if (cfg.dump_states) append_state(row, psi);
      r.add_row(std::move(row));
    }
    ctx.emit(r, indexed("feedback", i));

    if (cfg.dump_paths) {
      TrajectoryRecord n = ctx.record();
      n.metadata.emplace_back("trajectory", std::to_string(i));
      n.columns = {"step", "t", "dI_1", "dI_2"};
      for (std::size_t m = 0; m < ctx.grid.n_steps; ++m) n.add_row({static_cast<double>(m), ctx.grid.time(m), path(m, 0), path(m, 1)});
      ctx.emit(n, indexed("noise", i));
    }
    residuals.push_back(run.residual);
  }
  write_residual_summary(ctx, residuals, "residual",
                         {{"max_residual", format_double(worst)}, {"max_real_alpha", format_double(worst_real_alpha)}});
  if (worst >= cfg.residual_tolerance) {
    ctx.fail_contract("max residual " + format_double(worst) + " reached tolerance " +
                      format_double(cfg.residual_tolerance));
  }
  if (worst_real_alpha > 1e-12) ctx.fail_contract("feedback amplitude has a real part " + format_double(worst_real_alpha));
}

void run_detuning(Context& ctx) {
  const auto& cfg = ctx.config;
  if (ctx.model.is_time_dependent()) throw ConfigError("model", "detuning-sweep needs a time-independent model");
  const Coefficients co = ctx.model.at(ctx.grid.t0);
  std::vector<RealNoisePath> paths;
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    paths.push_back(real_increments(1, ctx.grid.n_steps, ctx.grid.dt, {cfg.base_seed, i}));
  }
  TrajectoryRecord r = ctx.record();
  r.metadata.emplace_back("phi", format_double(cfg.detuning_phi));
  r.columns = {"omega", "mean_max_distance", "se"};
  for (const double omega : cfg.omegas) {
    RunningStats s;
    for (const auto& path : paths) {
      // The configured coupling plays the role of sqrt(gamma) a, so gamma = 1.
      const auto cmp =
          detuning_comparison(1.0, cfg.detuning_phi, omega, co.couplings.front(), co.hamiltonian, path, ctx.psi0, ctx.grid);
      s.push(cmp.max_distance);
    }
    r.add_row({omega, s.mean(), s.standard_error()});
  }
  ctx.emit(r, "detuning.tsv");
}

}  // namespace

void TrajectoryRecord::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw Error("record row has " + std::to_string(row.size()) + " values for " + std::to_string(columns.size()) +
                " columns");
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i])) throw Error("record column '" + columns[i] + "' has a non-finite value");
  }
  rows.push_back(std::move(row));
}

std::string TrajectoryRecord::to_tsv() const {
  std::ostringstream out;
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "\t" : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw Error("record row width does not match its columns");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isfinite(row[i])) throw Error("record column '" + columns[i] + "' has a non-finite value");
      out << (i ? "\t" : "") << format_double(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

void TrajectoryRecord::write(const std::filesystem::path& path) const {
  const std::string text = to_tsv();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

RunResult run_experiment(const ExperimentConfig& config) {
  const ModelSpec model = effective_model(config);
  const TimeGrid grid = [&] {
    try {
      return TimeGrid::over(config.t_max, config.dt);
    } catch (const DomainError& e) {
      throw ConfigError("dt", e.what());
    }
  }();
  if (config.model.psi0.size() != model.dim()) throw ConfigError("model.psi0", "dimension does not match the model");
  Context ctx{config, model, normalized(config.model.psi0), grid, config.output_path, {}};

  try {
    std::error_code ec;
    std::filesystem::create_directories(ctx.dir, ec);
    if (ec) throw IoError("cannot create " + ctx.dir.string() + ": " + ec.message());

    switch (config.mode) {
      case Mode::Lindblad: run_lindblad(ctx); break;
      case Mode::Belavkin: run_unravelling(ctx, Unravelling::Belavkin); break;
      case Mode::Gisin: run_unravelling(ctx, Unravelling::Gisin); break;
      case Mode::CanonicalPair: run_canonical_pair(ctx); break;
      case Mode::Prop2Check: run_prop2(ctx); break;
      case Mode::Feedback: run_feedback(ctx); break;
      case Mode::DetuningSweep: run_detuning(ctx); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError& e) {
    ctx.result.exit_code = kExitIo;
    ctx.result.message = e.what();
  } catch (const Error& e) {
    ctx.result.exit_code = kExitRuntime;
    ctx.result.message = e.what();
  }
  return ctx.result;
}

}  // namespace qsde::cli
