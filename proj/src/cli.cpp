#include "cadmm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cadmm/apps.hpp"
#include "cadmm/instance_io.hpp"

namespace cadmm::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string db4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct GenOptions {
  Index n = 20;
  Index m = 32;
  Index l = 0;
  double tau = 1.0;
  double eta = 1.0;
  std::string noise = "none";
  double eps = 0.5;
  double snr_db = 20.0;
  bool uniform = false;
};

struct SolveOptions {
  std::optional<double> rho;
  std::optional<Index> max_iter;
  Index max_iter_phase1 = 1000;
  double tol = 1e-8;
  std::string root_method = "bisection";
  Index restarts = 10;
  int threads = 1;
  Index trials = 1;
  std::uint64_t seed = 0;
  std::string trace;
  std::string out;
  std::string init = "spectral";
  std::string prior = "none";
  Index prior_k = 0;
  double prior_lambda = 0.0;
};

NoiseModel parse_noise(const std::string& s) {
  if (s == "none") return NoiseModel::Noiseless;
  if (s == "bounded") return NoiseModel::Bounded;
  if (s == "gaussian") return NoiseModel::Gaussian;
  throw InvalidInputError("unknown noise model '" + s + "'");
}

Instance generate(const std::string& kind, const GenOptions& g, std::uint64_t seed) {
  if (kind == "fpp") return gen_fpp(g.n, g.m, seed);
  if (kind == "mb") return gen_mb(g.n, g.m, g.l, g.tau, g.eta, seed);
  if (kind == "pr") {
    return gen_pr(g.n, g.m, parse_noise(g.noise), seed, g.eps, g.snr_db, !g.uniform);
  }
  throw InvalidInputError("unknown instance kind '" + kind + "'");
}

SolverConfig make_config(const SolveOptions& o, bool phase_retrieval) {
  SolverConfig cfg;
  if (o.rho) cfg.rho = *o.rho;
  cfg.max_iter_phase1 = o.max_iter_phase1;
  cfg.max_iter_phase2 = o.max_iter.value_or(phase_retrieval ? kPhaseRetrievalMaxIter : 10000);
  cfg.tol_successive = o.tol;
  cfg.restarts_phase1 = o.restarts;
  cfg.threads = o.threads;
  if (o.root_method == "bisection") {
    cfg.root_method = RootMethod::Bisection;
  } else if (o.root_method == "newton") {
    cfg.root_method = RootMethod::Newton;
  } else {
    throw InvalidInputError("unknown root method '" + o.root_method + "'");
  }
  cfg.validate();
  return cfg;
}

PriorSpec make_prior(const SolveOptions& o) {
  if (o.prior == "none") return PriorSpec::none();
  if (o.prior == "real") return PriorSpec::real_part();
  if (o.prior == "nonneg") return PriorSpec::real_nonnegative();
  if (o.prior == "hard") return PriorSpec::hard_threshold(o.prior_k);
  if (o.prior == "soft") return PriorSpec::soft_threshold(o.prior_lambda);
  throw InvalidInputError("unknown prior '" + o.prior + "'");
}

SolveReport solve_one(const Instance& inst, SolverConfig cfg, const SolveOptions& o) {
  if (const auto* p = std::get_if<QcqpProblem>(&inst)) return run(*p, cfg);
  if (const auto* f = std::get_if<FppInstance>(&inst)) return fpp_solve(*f, cfg);
  if (const auto* b = std::get_if<BeamformingInstance>(&inst)) {
    return mb_secondary(*b, cfg, o.rho);
  }
  const auto& pr = std::get<PhaseRetrievalInstance>(inst);
  if (o.init != "spectral" && o.init != "random") {
    throw InvalidInputError("unknown init '" + o.init + "'");
  }
  return pr_solve(pr, cfg, make_prior(o), o.init == "spectral" ? PrInit::Spectral : PrInit::Random,
                  o.rho);
}

// Appends to path (writing the header first if the file is new or empty), or to out.
class CsvSink {
 public:
  CsvSink(const std::string& path, const char* header, std::ostream& fallback)
      : stream_(&fallback) {
    if (!path.empty()) {
      const bool fresh =
          !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
      file_ = std::make_unique<std::ofstream>(path, std::ios::app);
      if (!*file_) throw IoError("cannot open '" + path + "' for appending");
      stream_ = file_.get();
      if (fresh) *stream_ << header << '\n';
    } else {
      *stream_ << header << '\n';
    }
  }
  void row(const std::string& line) {
    *stream_ << line << '\n';
    stream_->flush();
    if (!*stream_) throw IoError("failed writing CSV output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void add_solver_flags(CLI::App& cmd, SolveOptions& o) {
  cmd.add_option("--rho", o.rho, "penalty parameter (default: per-application rule)");
  cmd.add_option("--max-iter", o.max_iter,
                 "iteration cap of the main phase (default 10000, 100000 for pr)");
  cmd.add_option("--max-iter-phase1", o.max_iter_phase1, "feasibility iterations per restart");
  cmd.add_option("--tol", o.tol, "successive-difference tolerance");
  cmd.add_option("--root-method", o.root_method, "bisection or newton");
  cmd.add_option("--restarts", o.restarts, "feasibility-phase re-initializations");
  cmd.add_option("--threads", o.threads, "OpenMP threads for constraint updates");
  cmd.add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "base seed");
  cmd.add_option("--init", o.init, "pr initialization: spectral or random");
  cmd.add_option("--prior", o.prior, "pr prior: none, real, nonneg, hard, soft");
  cmd.add_option("--prior-k", o.prior_k, "cardinality for --prior hard");
  cmd.add_option("--prior-lambda", o.prior_lambda, "threshold for --prior soft");
}

void add_generator_flags(CLI::App& cmd, GenOptions& g) {
  cmd.add_option("--n", g.n, "dimension");
  cmd.add_option("--m", g.m, "number of constraints / users / measurements");
  cmd.add_option("--l", g.l, "mb: number of protected primary users");
  cmd.add_option("--tau", g.tau, "mb: SNR target");
  cmd.add_option("--eta", g.eta, "mb: interference cap");
  cmd.add_option("--noise", g.noise, "pr: none, bounded or gaussian");
  cmd.add_option("--eps", g.eps, "pr: bounded-noise half width");
  cmd.add_option("--snr-db", g.snr_db, "pr: Gaussian-noise SNR in dB");
  cmd.add_flag("--uniform", g.uniform, "pr bounded: uniform noise instead of integer rounding");
}

std::vector<Index> parse_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const long long v = std::stoll(item, &used);
    if (used != item.size() || v < 1) throw InvalidInputError("bad list entry '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw InvalidInputError("empty list");
  return out;
}

}  // namespace

std::string report_row(std::uint64_t seed, const SolveReport& r) {
  std::ostringstream row;
  row << seed << ',' << r.iterations_phase1 << ',' << r.iterations_phase2 << ','
      << num(r.objective) << ',' << num(r.max_violation) << ',' << num(r.kkt_stationarity) << ','
      << (r.mse_db ? num(*r.mse_db) : "") << ',' << num(r.wall_time) << ',' << r.violations
      << ',' << r.restarts;
  return row.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consensus-ADMM solver for non-convex QCQPs"};
  app.require_subcommand(1);

  GenOptions gen;
  std::string gen_kind;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  auto* generate_cmd = app.add_subcommand("generate", "write a random instance file");
  generate_cmd->add_option("kind", gen_kind, "fpp, mb or pr")->required();
  add_generator_flags(*generate_cmd, gen);
  generate_cmd->add_option("--seed", gen_seed, "generator seed");
  generate_cmd->add_option("-o,--out", gen_out, "output instance file")->required();

  SolveOptions solve_opts;
  std::string solve_file;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  solve_cmd->add_option("file", solve_file, "instance file")->required();
  add_solver_flags(*solve_cmd, solve_opts);
  solve_cmd->add_option("--trace", solve_opts.trace, "per-iteration CSV of the first trial");
  solve_cmd->add_option("--out", solve_opts.out, "report CSV (appended; default stdout)");

  SolveOptions camp_opts;
  GenOptions camp_gen;
  std::string camp_kind;
  std::string m_list = "32";
  auto* campaign_cmd =
      app.add_subcommand("campaign", "generate and solve many instances, aggregate per m");
  campaign_cmd->add_option("kind", camp_kind, "fpp, mb or pr")->required();
  add_generator_flags(*campaign_cmd, camp_gen);
  add_solver_flags(*campaign_cmd, camp_opts);
  campaign_cmd->add_option("--m-list", m_list, "comma-separated m values");
  campaign_cmd->add_option("--out", camp_opts.out, "aggregate CSV (appended; default stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate_cmd) {
      const Instance inst = generate(gen_kind, gen, gen_seed);
      write_instance(gen_out, inst);
      if (const auto* f = std::get_if<FppInstance>(&inst)) {
        err << "x_feas_norm2 " << num(f->x_feas.squaredNorm()) << '\n';
      } else if (const auto* p = std::get_if<PhaseRetrievalInstance>(&inst)) {
        err << "s_energy " << num(p->s->squaredNorm()) << '\n';
      } else {
        err << "channels " << gen.n << " x " << gen.m << ", protected users " << gen.l << '\n';
      }
      return kExitOk;
    }

    if (*solve_cmd) {
      const Instance inst = read_instance(solve_file);
      const bool pr = std::holds_alternative<PhaseRetrievalInstance>(inst);
      SolverConfig base = make_config(solve_opts, pr);
      CsvSink sink(solve_opts.out, kReportHeader, out);
      std::unique_ptr<std::ofstream> trace;
      if (!solve_opts.trace.empty()) {
        trace = std::make_unique<std::ofstream>(solve_opts.trace);
        if (!*trace) throw IoError("cannot open '" + solve_opts.trace + "'");
        *trace << kTraceHeader << '\n';
      }
      bool infeasible = false;
      Index feasible = 0;
      double mse_sum = 0.0;
      Index mse_count = 0;
      for (Index t = 0; t < solve_opts.trials; ++t) {
        SolverConfig cfg = base;
        cfg.seed = solve_opts.seed + static_cast<std::uint64_t>(t);
        if (trace && t == 0) {
          std::ofstream* tr = trace.get();
          cfg.trace = [tr](const TraceRow& r) {
            *tr << r.iteration << ',' << r.phase << ',' << num(r.consensus) << ','
                << num(r.successive) << ',' << num(r.objective) << '\n';
          };
        }
        const SolveReport r = solve_one(inst, cfg, solve_opts);
        sink.row(report_row(cfg.seed, r));
        infeasible = infeasible || r.probably_infeasible;
        feasible += r.feasible ? 1 : 0;
        if (r.mse_db) {
          mse_sum += *r.mse_db;
          ++mse_count;
        }
      }
      err << "trials " << solve_opts.trials << ", feasible " << feasible;
      if (mse_count > 0) err << ", mean mse " << db4(mse_sum / mse_count) << " dB";
      err << '\n';
      return infeasible ? kExitInfeasible : kExitOk;
    }

    if (*campaign_cmd) {
      const bool pr = camp_kind == "pr";
      const SolverConfig base = make_config(camp_opts, pr);
      CsvSink sink(camp_opts.out, kCampaignHeader, out);
      for (const Index m : parse_list(m_list)) {
        GenOptions g = camp_gen;
        g.m = m;
        Index feasible = 0;
        Index resolved_count = 0;
        double obj = 0.0;
        double viol = 0.0;
        double mse = 0.0;
        double wall = 0.0;
        Index mse_count = 0;
        for (Index t = 0; t < camp_opts.trials; ++t) {
          const std::uint64_t seed = camp_opts.seed + static_cast<std::uint64_t>(t);
          const Instance inst = generate(camp_kind, g, seed);
          SolverConfig cfg = base;
          cfg.seed = seed;
          const SolveReport r = solve_one(inst, cfg, camp_opts);
          feasible += r.feasible ? 1 : 0;
          obj += r.objective;
          viol += static_cast<double>(r.violations);
          wall += r.wall_time;
          if (const auto* p = std::get_if<PhaseRetrievalInstance>(&inst); p && p->s) {
            resolved_count += resolved(r.x, *p->s) ? 1 : 0;
          }
          if (r.mse_db) {
            mse += *r.mse_db;
            ++mse_count;
          }
        }
        const double trials = static_cast<double>(camp_opts.trials);
        std::ostringstream row;
        row << camp_kind << ',' << g.n << ',' << m << ',' << camp_opts.trials << ','
            << num(feasible / trials) << ',' << (pr ? num(resolved_count / trials) : "") << ','
            << num(obj / trials) << ',' << num(viol / trials) << ','
            << (mse_count > 0 ? num(mse / mse_count) : "") << ',' << num(wall / trials);
        sink.row(row.str());
        err << camp_kind << " m=" << m << ": feasible " << feasible << '/' << camp_opts.trials;
        if (pr) err << ", resolved " << resolved_count << '/' << camp_opts.trials;
        if (mse_count > 0) err << ", mean mse " << db4(mse / mse_count) << " dB";
        err << '\n';
      }
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleConstraintError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return kExitUsage;
}

}  // namespace cadmm::cli
