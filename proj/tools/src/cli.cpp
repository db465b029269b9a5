#include "loel_cli/cli.hpp"

#include "loel/baselines.hpp"
#include "loel/config.hpp"
#include "loel/errors.hpp"
#include "loel/evaluation.hpp"
#include "loel/io.hpp"
#include "loel/locate.hpp"
#include "loel/signal.hpp"
#include "loel/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace loel::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, bool stochastic) {
  sub->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  if (stochastic) sub->add_option("--seed", c.seed, "seed for every random stream (campaign and optimiser)");
}

AppConfig effective_config(const Common& c, const std::function<void(AppConfig&)>& overrides = {}) {
  AppConfig config = c.config_path.empty() ? AppConfig{} : load_config(c.config_path);
  if (c.seed) {
    config.campaign.seed = *c.seed;
    config.qpso.seed = *c.seed;
  }
  if (overrides) overrides(config);
  try {
    config.validate();
  } catch (const ContractViolation& e) {
    throw DataError(c.config_path.empty() ? "command line" : c.config_path, 0, e.what());
  }
  return config;
}

// Runs `write` against a file, or against `out` when path is empty or "-".
void with_output(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(path, 0, "cannot open file for writing");
  write(f);
}

locate::PredictiveGrid grid_for(const AppConfig& config) {
  return locate::make_predictive_grid(config.geometry, config.locate.grid_spacing);
}

locate::ModelBank read_bank(const std::string& path) {
  const nlohmann::json j = io::read_json_file(path);
  try {
    return locate::bank_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path, 0, e.what());
  } catch (const ContractViolation& e) {
    throw DataError(path, 0, e.what());
  }
}

void require_pairs(const EventTable& table, const signal::PairIndex& pairs, const std::string& source) {
  if (!(table.pairs == pairs)) throw DataError(source, 1, "dTOA columns do not match the model's sensor pairs");
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

AEEvent pick_event(const fs::path& dir, std::vector<int>& sensor_ids) {
  std::map<int, signal::OnsetEstimate> onsets;
  for (const fs::path& file : csv_files(dir)) {
    const signal::Waveform w = io::read_waveform(file);
    if (onsets.count(w.sensor_id)) throw DataError(file.string(), 2, "duplicate sensor_id in event directory");
    try {
      onsets.emplace(w.sensor_id, signal::pick_onset(w));
    } catch (const DegenerateSignal& e) {
      throw DataError(file.string(), 0, e.what());
    }
  }
  std::vector<int> ids;
  for (const auto& [id, _] : onsets) ids.push_back(id);
  if (sensor_ids.empty()) sensor_ids = ids;
  if (ids != sensor_ids) throw DataError(dir.string(), 0, "event directories must hold the same set of sensors");
  AEEvent e;
  e.id = dir.filename().string();
  e.dtoa = signal::dtoa_vector(onsets, signal::PairIndex::all(ids));
  return e;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LoEL acoustic emission source localisation"};
  app.name("loel");
  app.require_subcommand(1, 1);
  std::function<void()> action;

  // synth
  Common synth_c;
  std::string synth_dir, wave_dir;
  std::optional<double> synth_spacing, synth_noise;
  std::optional<std::size_t> synth_tests;
  double sample_rate = 5e6, snr_db = 40.0;
  std::size_t wave_length = 2048;
  auto* synth = app.add_subcommand("synth", "generate a training grid and a labelled test set");
  add_common(synth, synth_c, true);
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--spacing", synth_spacing, "training grid spacing, mm");
  synth->add_option("--noise", synth_noise, "arrival-time noise std, s");
  synth->add_option("--test-events", synth_tests, "number of test events");
  synth->add_option("--waveforms", wave_dir, "also write per-sensor waveforms for each test event");
  synth->add_option("--sample-rate", sample_rate, "waveform sample rate, Hz")->check(CLI::PositiveNumber);
  synth->add_option("--snr", snr_db, "waveform peak SNR, dB");
  synth->add_option("--length", wave_length, "waveform length, samples")->check(CLI::Range(16, 1 << 24));
  synth->callback([&] {
    action = [&] {
      const AppConfig config = effective_config(synth_c, [&](AppConfig& c) {
        if (synth_spacing) c.campaign.grid_spacing = *synth_spacing;
        if (synth_noise) c.campaign.dtoa_noise_std = *synth_noise;
        if (synth_tests) c.campaign.test_events = *synth_tests;
      });
      fs::create_directories(synth_dir);
      const EventTable training = synthetic::generate_grid(config.synthetic_campaign());
      const EventTable tests = eval::test_set(config, 0, config.campaign.test_events);
      io::write_event_table(fs::path(synth_dir) / "training.csv", training);
      io::write_event_table(fs::path(synth_dir) / "test.csv", tests);
      io::write_json_file(fs::path(synth_dir) / "config.json", to_json(config));
      if (!wave_dir.empty()) {
        const synthetic::PathSolver solver(config.geometry);
        synthetic::WaveformOptions opt;
        opt.length = wave_length;
        opt.pretrigger = 20e-6;
        opt.noise_std = synthetic::noise_for_snr(opt.amplitude, snr_db);
        Rng rng(derive_seed(config.campaign.seed, {tag_of("waveforms")}));
        for (const AEEvent& e : tests.events) {
          const fs::path dir = fs::path(wave_dir) / e.id;
          fs::create_directories(dir);
          for (std::size_t s = 0; s < config.sensors.count(); ++s) {
            const auto w = synthetic::synth_waveform(solver, config.sensors, *e.origin, static_cast<int>(s),
                                                     sample_rate, rng, opt);
            io::write_waveform(dir / ("sensor_" + std::to_string(s) + ".csv"), w.waveform);
          }
        }
      }
      out << "training events: " << training.events.size() << "\ntest events: " << tests.events.size() << '\n';
    };
  });

  // pick
  std::string pick_in, pick_out;
  auto* pick = app.add_subcommand("pick", "AIC onset picking: waveform directories to an event table");
  pick->add_option("--input", pick_in, "event directory, or a directory of event directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  pick->add_option("--out", pick_out, "event table CSV (default stdout)");
  pick->callback([&] {
    action = [&] {
      std::vector<fs::path> dirs;
      if (!csv_files(pick_in).empty()) {
        dirs.push_back(pick_in);
      } else {
        for (const auto& entry : fs::directory_iterator(pick_in)) {
          if (entry.is_directory()) dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
      }
      if (dirs.empty()) throw DataError(pick_in, 0, "no waveform files found");
      EventTable table;
      std::vector<int> ids;
      for (const fs::path& d : dirs) table.events.push_back(pick_event(d, ids));
      table.pairs = signal::PairIndex::all(ids);
      with_output(pick_out, out, [&](std::ostream& os) { io::write_event_table(os, table); });
    };
  });

  // train
  Common train_c;
  std::string train_events, train_out;
  auto* train = app.add_subcommand("train", "train one forward GP per sensor pair");
  add_common(train, train_c, true);
  train->add_option("--events", train_events, "labelled training event table")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "model bank JSON")->required();
  train->callback([&] {
    action = [&] {
      const AppConfig config = effective_config(train_c);
      const EventTable training = io::read_event_table(fs::path(train_events));
      for (const AEEvent& e : training.events) {
        if (!e.origin) throw DataError(train_events, 0, "training event '" + e.id + "' has no x_mm,y_mm");
      }
      const locate::ModelBank bank = locate::train_bank(training, config.bank_training());
      io::write_json_file(train_out, locate::to_json(bank));
      out << "trained " << bank.size() << " models on " << training.events.size() << " points\n";
    };
  });

  // locate
  Common loc_c;
  std::string loc_model, loc_events, loc_training, loc_out, loc_method = "loel";
  std::optional<double> loc_grid;
  auto* loc = app.add_subcommand("locate", "predict source locations for an event table");
  add_common(loc, loc_c, true);
  loc->add_option("--events", loc_events, "event table")->required()->check(CLI::ExistingFile);
  loc->add_option("--method", loc_method, "localisation method")->check(CLI::IsMember({"loel", "deltat", "directgp"}));
  loc->add_option("--model", loc_model, "model bank JSON (loel)")->check(CLI::ExistingFile);
  loc->add_option("--training", loc_training, "labelled training table (deltat, directgp)")->check(CLI::ExistingFile);
  loc->add_option("--grid-spacing", loc_grid, "predictive grid spacing, mm");
  loc->add_option("--out", loc_out, "predictions, JSON Lines (default stdout)");
  loc->callback([&] {
    action = [&] {
      const AppConfig config = effective_config(loc_c, [&](AppConfig& c) {
        if (loc_grid) c.locate.grid_spacing = *loc_grid;
      });
      const EventTable events = io::read_event_table(fs::path(loc_events));
      const locate::PredictiveGrid grid = grid_for(config);
      std::vector<io::PredictionRecord> records;
      if (loc_method == "loel") {
        if (loc_model.empty()) throw CLI::RequiredError("--model");
        const locate::ModelBank bank = read_bank(loc_model);
        require_pairs(events, bank.pairs(), loc_events);
        const locate::GridPrediction pred = locate::predict_on_grid(bank, grid, config.gp.variance_mode);
        const std::vector<double> weights = config.weights(bank.size());
        for (const AEEvent& e : events.events) {
          const auto est = locate::locate_event(pred, grid, e.dtoa, weights);
          records.push_back({e.id, est.location, est.log_likelihood});
        }
      } else {
        if (loc_training.empty()) throw CLI::RequiredError("--training");
        const EventTable training = io::read_event_table(fs::path(loc_training));
        require_pairs(events, training.pairs, loc_events);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (loc_method == "deltat") {
          const auto table = baselines::tabulate(baselines::deltaT_fit(training), grid);
          for (const AEEvent& e : events.events) records.push_back({e.id, baselines::deltaT_locate(table, grid, e.dtoa), nan});
        } else {
          qpso::TrainingOptions options;
          options.kernel = {gp::KernelKind::Rbf, gp::Distance::L2Scaled};
          options.bounds = baselines::directgp_default_bounds();
          options.max_points = config.gp.max_training_points;
          const auto model = baselines::directgp_fit(training, config.swarm(), options);
          for (const AEEvent& e : events.events) {
            records.push_back({e.id, baselines::directgp_locate(model, e.dtoa).location, nan});
          }
        }
      }
      with_output(loc_out, out, [&](std::ostream& os) {
        for (const auto& r : records) io::write_prediction_line(os, r);
      });
    };
  });

  // map
  Common map_c;
  std::string map_model, map_events, map_id, map_out, map_pgm;
  std::optional<double> map_grid;
  auto* map = app.add_subcommand("map", "export the likelihood map of one event");
  add_common(map, map_c, false);
  map->add_option("--model", map_model, "model bank JSON")->required()->check(CLI::ExistingFile);
  map->add_option("--events", map_events, "event table")->required()->check(CLI::ExistingFile);
  map->add_option("--event-id", map_id, "event to map (default: first row)");
  map->add_option("--grid-spacing", map_grid, "predictive grid spacing, mm");
  map->add_option("--out", map_out, "map CSV (default stdout)");
  map->add_option("--pgm", map_pgm, "also write an 8-bit PGM rendering");
  map->callback([&] {
    action = [&] {
      const AppConfig config = effective_config(map_c, [&](AppConfig& c) {
        if (map_grid) c.locate.grid_spacing = *map_grid;
      });
      const EventTable events = io::read_event_table(fs::path(map_events));
      if (events.events.empty()) throw DataError(map_events, 0, "event table is empty");
      const locate::ModelBank bank = read_bank(map_model);
      require_pairs(events, bank.pairs(), map_events);
      const AEEvent* event = &events.events.front();
      if (!map_id.empty()) {
        const auto it = std::find_if(events.events.begin(), events.events.end(),
                                     [&](const AEEvent& e) { return e.id == map_id; });
        if (it == events.events.end()) throw DataError(map_events, 0, "no event with id '" + map_id + "'");
        event = &*it;
      }
      const std::vector<double> weights = config.weights(bank.size());
      const locate::LikelihoodMap m = locate::build_map(bank, grid_for(config), event->dtoa, weights, config.gp.variance_mode);
      with_output(map_out, out, [&](std::ostream& os) { io::write_map_csv(os, m, bank.pairs()); });
      if (!map_pgm.empty()) with_output(map_pgm, out, [&](std::ostream& os) { io::write_map_pgm(os, m); });
    };
  });

  // eval
  std::string eval_pred, eval_truth;
  auto* ev = app.add_subcommand("eval", "RMSE of predictions against labelled events");
  ev->add_option("--predictions", eval_pred, "predictions, JSON Lines")->required()->check(CLI::ExistingFile);
  ev->add_option("--truth", eval_truth, "labelled event table")->required()->check(CLI::ExistingFile);
  ev->callback([&] {
    action = [&] {
      std::ifstream pin(eval_pred, std::ios::binary);
      const auto preds = io::read_predictions(pin, eval_pred);
      const EventTable truth = io::read_event_table(fs::path(eval_truth));
      std::map<std::string, Point2> origin;
      for (const AEEvent& e : truth.events) {
        if (e.origin) origin.emplace(e.id, *e.origin);
      }
      std::vector<Point2> p, t;
      for (const auto& r : preds) {
        const auto it = origin.find(r.event_id);
        if (it == origin.end()) throw DataError(eval_truth, 0, "no labelled event '" + r.event_id + "'");
        p.push_back(r.location);
        t.push_back(it->second);
      }
      if (p.empty()) throw DataError(eval_pred, 0, "no predictions");
      out << "rmse_mm,events\n" << io::format_real(eval::rmse(p, t)) << ',' << p.size() << '\n';
    };
  });

  // sweep
  Common sweep_c;
  std::string sweep_out;
  bool timings = false;
  std::vector<double> spacings;
  std::vector<std::string> methods;
  std::optional<std::size_t> sets, per_set, workers;
  auto* sw = app.add_subcommand("sweep", "grid-spacing sweep over methods; writes the report CSV");
  add_common(sw, sweep_c, true);
  sw->add_option("--out", sweep_out, "report CSV (default stdout)");
  sw->add_option("--spacings", spacings, "training spacings, mm")->delimiter(',');
  sw->add_option("--methods", methods, "methods")->delimiter(',')->check(CLI::IsMember({"loel", "deltat", "directgp", "truth"}));
  sw->add_option("--test-sets", sets, "test sets per cell");
  sw->add_option("--events-per-set", per_set, "events per test set");
  sw->add_option("--workers", workers, "concurrent cells (0 = automatic)");
  sw->add_flag("--timings", timings, "append a wall_seconds column");
  sw->callback([&] {
    action = [&] {
      const AppConfig config = effective_config(sweep_c, [&](AppConfig& c) {
        if (!spacings.empty()) c.sweep.spacings = spacings;
        if (!methods.empty()) c.sweep.methods = methods;
        if (sets) c.sweep.test_sets = *sets;
        if (per_set) c.sweep.events_per_set = *per_set;
        if (workers) c.sweep.workers = *workers;
      });
      const eval::EvaluationReport report = eval::run_sweep(config);
      with_output(sweep_out, out, [&](std::ostream& os) { eval::write_report_csv(os, report, timings); });
    };
  });

  if (argc > 1 && argv[1][0] != '-') {
    const std::string name = argv[1];
    const auto subs = app.get_subcommands([&](const CLI::App* a) { return a->get_name() == name; });
    if (subs.empty()) {
      err << "loel: unknown subcommand '" << name << "'\n\n" << app.help();
      return kUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "loel: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "loel: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "loel: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace loel::cli
