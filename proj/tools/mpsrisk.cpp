// mpsrisk: batteries, geometry, simulation, analysis and the session server.

#include "mpsrisk/agents.hpp"
#include "mpsrisk/analysis.hpp"
#include "mpsrisk/json_io.hpp"
#include "mpsrisk/kernels.hpp"
#include "mpsrisk/report.hpp"
#include "mpsrisk/server.hpp"
#include "mpsrisk/tasks.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;
using namespace mpsrisk;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return json::parse(in);
}

template <typename Writer>
void write_csv_file(const std::filesystem::path& path, Writer writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

struct GenOptions {
  std::string out;
  std::string custom;
};

int run_gen(const GenOptions& o) {
  const auto cases = o.custom.empty() ? paper_battery() : custom_battery(base_lotteries_from_json(read_json_file(o.custom)));
  write_text(o.out, battery_json(cases, hl_battery()).dump(2) + "\n");
  return 0;
}

struct RegionsOptions {
  std::string out;
  std::string curve_csv;
  double r_min = -2.0;
  double r_max = 3.0;
  double r_step = 0.01;
};

int run_regions(const RegionsOptions& o) {
  write_text(o.out, geometry_json().dump(2) + "\n");
  if (!o.curve_csv.empty()) {
    write_csv_file(o.curve_csv, [&](std::ostream& out) { write_crra_curve_csv(out, crra_curve(o.r_min, o.r_max, o.r_step)); });
  }
  return 0;
}

struct SimulateOptions {
  std::vector<std::string> agents;
  std::size_t n = 100;
  double tremble = 0.0;
  std::uint64_t seed = 1;
  std::string session_id = "sim";
  std::string battery;
  std::string out = "records.jsonl";
};

int run_simulate(const SimulateOptions& o) {
  std::vector<AgentSpec> specs;
  for (const auto& text : o.agents) {
    const UtilityFamily family = parse_utility_family(text);
    for (std::size_t i = 0; i < o.n; ++i) specs.emplace_back(family, o.tremble, o.seed);
  }
  const auto cases =
      o.battery.empty() ? paper_battery() : custom_battery(base_lotteries_from_json(read_json_file(o.battery)));
  PopulationConfig config;
  config.session_id = o.session_id;
  config.session_seed = o.seed;
  const auto records = simulate_population(specs, cases, hl_battery(), config);
  if (o.out == "-") {
    write_jsonl(std::cout, records);
  } else {
    write_records_file(o.out, records);
  }
  std::cerr << "simulated " << specs.size() << " agents, " << records.size() << " records\n";
  return 0;
}

struct AnalyzeOptions {
  std::vector<std::string> inputs;
  bool reference = false;
  std::string out;
  std::string csv_dir;
};

int run_analyze(const AnalyzeOptions& o) {
  if (o.inputs.empty() && !o.reference) throw CLI::ValidationError("analyze", "give record files or --reference");
  json report = json::object();
  int status = 0;
  if (!o.inputs.empty()) {
    std::vector<ChoiceRecord> records;
    for (const auto& path : o.inputs) {
      auto part = read_records_file(path);
      std::move(part.begin(), part.end(), std::back_inserter(records));
    }
    const AnalysisReport r = analyze(records);
    report["data"] = analysis_report_json(r);
    if (!o.csv_dir.empty()) {
      std::filesystem::create_directories(o.csv_dir);
      const std::filesystem::path dir = o.csv_dir;
      write_csv_file(dir / "patterns.csv", [&](std::ostream& out) { write_pattern_csv(out, r.patterns); });
      write_csv_file(dir / "hl_histogram.csv",
                     [&](std::ostream& out) { write_hl_histogram_csv(out, r.cross_tab.hl_histogram); });
      write_csv_file(dir / "hl_cross_tab.csv", [&](std::ostream& out) { write_cross_tab_csv(out, r.cross_tab.groups); });
    }
  }
  if (o.reference) {
    const ReferenceData& data = load_reference_dataset();
    const ReferenceReport r = reference_report(data);
    report["reference"] = reference_report_json(r);
    for (const auto& c : r.checks) {
      std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      if (!c.pass) status = 2;
    }
    if (!o.csv_dir.empty()) {
      std::filesystem::create_directories(o.csv_dir);
      const std::filesystem::path dir = o.csv_dir;
      std::vector<long long> histogram(data.hl_histogram.begin(), data.hl_histogram.end());
      write_csv_file(dir / "reference_patterns.csv", [&](std::ostream& out) { write_pattern_csv(out, r.table); });
      write_csv_file(dir / "reference_hl_histogram.csv",
                     [&](std::ostream& out) { write_hl_histogram_csv(out, histogram); });
      write_csv_file(dir / "reference_hl_cross_tab.csv", [&](std::ostream& out) { write_cross_tab_csv(out, r.aa_by_safe_count); });
    }
  }
  write_text(o.out, report.dump(2) + "\n");
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-preserving-spread risk elicitation toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write the task batteries as JSON");
  gen_cmd->add_option("-o,--out", gen.out, "Output file (stdout if omitted)");
  gen_cmd->add_option("--custom", gen.custom, "JSON array of four-prize base lotteries")->check(CLI::ExistingFile);

  RegionsOptions regions;
  auto* regions_cmd = app.add_subcommand("regions", "Write region and Holt-Laury triangle polygons as JSON");
  regions_cmd->add_option("-o,--out", regions.out, "Output file (stdout if omitted)");
  regions_cmd->add_option("--crra-csv", regions.curve_csv, "Also write the CRRA curve to this CSV");
  regions_cmd->add_option("--r-min", regions.r_min, "Curve grid start")->capture_default_str();
  regions_cmd->add_option("--r-max", regions.r_max, "Curve grid end")->capture_default_str();
  regions_cmd->add_option("--r-step", regions.r_step, "Curve grid step")->check(CLI::PositiveNumber)->capture_default_str();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate expected-utility agents through both task parts");
  sim_cmd->add_option("--agent", sim.agents, "crra:R | cara:A | powerexpo:R,ALPHA | table:U0,U1,U2,U3 (repeatable)")
      ->required();
  sim_cmd->add_option("--n", sim.n, "Agents per --agent")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--tremble", sim.tremble, "Probability of a random pick, in [0,1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--session-id", sim.session_id, "session_id written on records")->capture_default_str();
  sim_cmd->add_option("--battery", sim.battery, "Custom base lotteries (JSON)")->check(CLI::ExistingFile);
  sim_cmd->add_option("-o,--out", sim.out, "Records file: .jsonl, .csv, or - for stdout")->capture_default_str();

  AnalyzeOptions an;
  auto* an_cmd = app.add_subcommand("analyze", "Pattern tables and tests over choice records");
  an_cmd->add_option("inputs", an.inputs, "JSONL or CSV record files")->check(CLI::ExistingFile);
  an_cmd->add_flag("--reference", an.reference, "Run the bundled aggregate data through the published checks");
  an_cmd->add_option("-o,--out", an.out, "JSON report file (stdout if omitted)");
  an_cmd->add_option("--csv-dir", an.csv_dir, "Directory for CSV tables");

  ServerConfig server;
  auto* serve_cmd = app.add_subcommand("serve", "Run the session HTTP service");
  serve_cmd->add_option("--host", server.host, "Bind address")->envname("MPSRISK_HOST")->capture_default_str();
  serve_cmd->add_option("--port", server.port, "Port")->envname("MPSRISK_PORT")->capture_default_str();
  serve_cmd->add_option("--data-dir", server.data_dir, "Event log directory")->envname("MPSRISK_DATA_DIR")->capture_default_str();
  serve_cmd->add_option("--seed", server.seed, "Default session seed")->envname("MPSRISK_SEED")->capture_default_str();
  bool no_fsync = false;
  serve_cmd->add_flag("--no-fsync", no_fsync, "Skip fsync after each appended event");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*regions_cmd) return run_regions(regions);
    if (*sim_cmd) {
      if (sim.tremble >= 1.0) throw CLI::ValidationError("--tremble", "must be below 1");
      return run_simulate(sim);
    }
    if (*an_cmd) return run_analyze(an);
    if (*serve_cmd) {
      server.fsync = !no_fsync;
      return run_server(server);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "mpsrisk: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
