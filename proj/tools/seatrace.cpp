// Command-line front end: run, validate, rerun-rejected, gen-synthetic.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "seatrace/config.hpp"
#include "seatrace/errors.hpp"
#include "seatrace/outputs.hpp"
#include "seatrace/pipeline.hpp"
#include "seatrace/synthetic.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string input;
  std::string out;
  std::string cases;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "JSON run configuration");
  cmd->add_option("--input", a.input, "line-JSON AIS records (overrides the config)");
  cmd->add_option("--out", a.out, "output directory (overrides the config)");
  cmd->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
}

seatrace::config::RunConfig resolve(const CommonArgs& a) {
  auto c = a.config.empty() ? seatrace::config::RunConfig{} : seatrace::config::load(a.config);
  if (!a.input.empty()) c.input = a.input;
  if (!a.out.empty()) c.output_dir = a.out;
  if (!a.cases.empty()) c.cases = seatrace::config::parse_cases(a.cases);
  if (a.threads > 0) c.threads = a.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vessel counts, traffic rasters and port areas from AIS records"};
  app.set_version_flag("--version", seatrace::outputs::kVersion);
  app.require_subcommand(1);

  CommonArgs run_args, validate_args, rerun_args;
  auto* run = app.add_subcommand("run", "full pipeline");
  add_common(run, run_args);
  run->add_option("--case", run_args.cases, "low, df, hi or all (comma-separated list allowed)");

  auto* validate = app.add_subcommand("validate", "trajectory model accuracy report");
  add_common(validate, validate_args);

  auto* rerun = app.add_subcommand("rerun-rejected", "rerun on the records rejected by a previous run");
  add_common(rerun, rerun_args);

  seatrace::synthetic::SyntheticParams gen;
  std::string gen_out = "synthetic";
  auto* synth = app.add_subcommand("gen-synthetic", "write a synthetic scene with ground truth");
  synth->add_option("--out", gen_out, "scene directory");
  synth->add_option("--vessels", gen.vessels, "vessel count")->check(CLI::PositiveNumber);
  synth->add_option("--days", gen.days, "period length in days");
  synth->add_option("--jitter", gen.jitter_m, "position noise radius in metres")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", gen.seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto c = resolve(run_args);
      seatrace::pipeline::cmd_run(c);
      fmt::print("outputs written to {}\n", c.output_dir.string());
    } else if (*validate) {
      const auto c = resolve(validate_args);
      const auto r = seatrace::pipeline::cmd_validate(c);
      fmt::print("position error median {:.1f} m, p90 {:.1f} m over {} records\n", r.position_error_m.median,
                 r.position_error_m.p90, r.position_error_m.count);
      fmt::print("time error median {:.1f} s, p90 {:.1f} s\n", r.time_error_s.median, r.time_error_s.p90);
    } else if (*rerun) {
      const auto c = resolve(rerun_args);
      const auto r = seatrace::pipeline::cmd_rerun_rejected(c);
      fmt::print("{} rejected records, travel time {:.3f} days ({:.4g} of the main run)\n", r.rejected_records,
                 r.travel_time_days, r.ratio);
    } else if (*synth) {
      const auto data = seatrace::synthetic::generate(gen);
      seatrace::synthetic::write_scene(data, gen, gen_out);
      fmt::print("{} records for {} vessels written to {}\n", data.records.size(), gen.vessels, gen_out);
    }
  } catch (const seatrace::Error& e) {
    fmt::print(stderr, "seatrace: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "seatrace: unexpected failure: {}\n", e.what());
    return 2;
  }
  return 0;
}
