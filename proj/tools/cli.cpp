#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "foq/analytic.hpp"
#include "foq/config.hpp"
#include "foq/experiment.hpp"

namespace foq::cli {

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct AnalyzeArgs {
  double k = 0.0;
  double ki = 0.5;
  double lambda = 1.0;
  double ropt = 0.5;
  double sc = 1.28;
  std::size_t horizon = 200;
  bool recurrence = false;
  bool poles_only = false;
};

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

int analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  StepScenario s;
  s.gain_p = a.k;
  s.gain_i = a.ki;
  s.arrival_rate = a.lambda;
  s.desired_rate = a.ropt;
  s.fabric_capacity = a.sc;
  try {
    s.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (a.k < 0.0) {
    err << "error: K must be >= 0\n";
    return kConfigError;
  }
  const Poles z = poles(a.k, a.ki);
  if (a.poles_only) {
    out << num(z.z1) << ',' << num(z.z2) << '\n';
    return kOk;
  }
  const bool stable = is_stable(a.k, a.ki) && a.k < 1.0;
  if (!stable && !a.recurrence) {
    err << "error: gains outside stability region 0 < K_I < 2(1-K)"
        << " (pass --recurrence to iterate anyway)\n";
    return kConfigError;
  }

  std::vector<double> queue;
  const auto rec = step_response_recurrence(s, a.horizon, &queue);
  std::optional<StepResponse> closed;
  if (stable) closed = step_response_closed_form(s, a.horizon);

  const InitialPeriod init = initial_period(s);
  out << "# z1 = " << num(z.z1) << '\n';
  out << "# z2 = " << num(z.z2) << '\n';
  out << "# N0 = " << init.n0 << '\n';
  out << "# A1 = " << (closed ? num(closed->coeff1) : "") << '\n';
  out << "# A2 = " << (closed ? num(closed->coeff2) : "") << '\n';
  out << "n,rho_closed,rho_recurrence,q_n\n";
  for (std::size_t n = 0; n < a.horizon; ++n) {
    out << n << ',' << (closed ? num(closed->drop_sequence[n]) : "") << ',' << num(rec[n])
        << ',' << num(queue[n]) << '\n';
  }
  return kOk;
}

void print_summary(const ExperimentResult& r, std::ostream& out) {
  for (const auto& f : r.flows) {
    out << "port " << f.port << " flow " << f.flow << ": injected " << f.totals.injected
        << " B, delivered " << f.totals.delivered << " B, ingress drop "
        << f.totals.ingress_dropped << " B, fabric drop " << f.totals.fabric_dropped
        << " B, egress drop " << f.totals.egress_dropped << " B, resident " << f.resident
        << " B\n";
  }
  if (r.tcp.sources > 0) {
    out << "tcp: " << r.tcp.sources << " sources, " << r.tcp.sent << " sent, "
        << r.tcp.retransmitted << " retransmitted, " << r.tcp.timeouts << " timeouts, "
        << r.tcp.fast_retransmits << " fast retransmits\n";
  }
  out << "events: " << r.events << '\n';
}

void print_errors(const ConfigError& e, std::ostream& err) {
  for (const auto& msg : e.errors()) err << "error: " << msg << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback output queuing switch simulator", "foqsim"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment and write its time series as CSV");
  run_cmd->add_option("config", run_config, "Experiment config file")->required();
  run_cmd->add_option("--seed", seed, "Override experiment.seed");
  run_cmd->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

  AnalyzeArgs a;
  auto* an = app.add_subcommand("analyze", "Step response of the PI loop, closed form and recurrence");
  an->add_option("--k", a.k, "Proportional gain K")->required();
  an->add_option("--ki", a.ki, "Integral gain K_I")->required();
  an->add_option("--lambda", a.lambda, "Step arrival rate")->required();
  an->add_option("--ropt", a.ropt, "Desired fabric output rate")->required();
  an->add_option("--sc", a.sc, "Fabric interface capacity s*c")->required();
  an->add_option("--horizon", a.horizon, "Number of intervals")->check(CLI::PositiveNumber);
  an->add_flag("--recurrence", a.recurrence, "Allow unstable gains; closed form column left empty");
  an->add_flag("--poles-only", a.poles_only, "Print z1,z2 and exit");

  std::string validate_config;
  auto* val = app.add_subcommand("validate", "Check a config file and report every problem");
  val->add_option("config", validate_config, "Experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (*an) return analyze(a, out, err);

  if (*val) {
    try {
      const ExperimentConfig cfg = load_config(validate_config);
      out << "ok: " << cfg.cbr.size() << " cbr sources, " << cfg.tcp.groups.size()
          << " tcp groups, feedback " << to_string(cfg.switch_config.feedback.mode) << '\n';
      return kOk;
    } catch (const ConfigError& e) {
      print_errors(e, err);
      return kConfigError;
    }
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(run_config);
  } catch (const ConfigError& e) {
    print_errors(e, err);
    return kConfigError;
  }
  if (seed) cfg.seed = *seed;
  if (!out_path.empty()) cfg.output_path = out_path;

  try {
    const ExperimentResult r = run_experiment(cfg);
    const std::string csv = r.series.to_csv();
    if (cfg.output_path.empty() || cfg.output_path == "-") {
      out << csv;
    } else {
      std::ofstream f(cfg.output_path, std::ios::binary);
      if (!f) {
        err << "error: cannot write " << cfg.output_path << '\n';
        return kRuntimeError;
      }
      f << csv;
      print_summary(r, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace foq::cli
