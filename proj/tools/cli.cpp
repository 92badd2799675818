#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <unordered_set>

#include "uwbnlos/classifier.hpp"
#include "uwbnlos/dataset.hpp"
#include "uwbnlos/error.hpp"
#include "uwbnlos/evaluation.hpp"
#include "uwbnlos/experiments.hpp"
#include "uwbnlos/features.hpp"
#include "uwbnlos/localization.hpp"
#include "uwbnlos/synth.hpp"

namespace uwbnlos::cli {

namespace fs = std::filesystem;

namespace {

struct Config {
  std::string input;
  std::string output;
  std::string model;
  std::string anchors;
  std::string scene;
  std::string family = "ggd";
  double lambda = 0.95;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  std::vector<double> ratios{0.1, 0.2, 0.5, 0.8, 1.0};
  int trials = 10;
  std::size_t n_los = 1000;
  std::size_t n_nlos = 100;
  bool raw = false;
  double prf = 16.0;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path() && !fs::is_directory(path.parent_path())) {
    throw IoError("output directory '" + path.parent_path().string() + "' does not exist");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Encodes feature rows as raw records that carry a measured distance instead
// of timestamps.
std::vector<RangingRecord> encode_rows(const std::vector<LabeledFeatureRow>& rows,
                                       const RadioConstants& consts, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RangingRecord> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    RangingRecord r;
    r.record_id = row.record_id;
    r.label = row.label;
    r.anchor_id = 0;
    r.measured_distance_m = std::max(0.0, row.features.distance_m);
    const auto n = 980u + static_cast<std::uint32_t>(rng.below(45));
    encode_power_registers(row.features.fp_level_dbm, row.features.rx_level_dbm, n, consts, rng, r);
    r.noise_std = rng.uniform(10.0, 60.0);
    out.push_back(r);
  }
  return out;
}

void cmd_synth(const Config& c) {
  const RadioConstants consts = radio_constants_for_prf(c.prf);
  if (!c.scene.empty()) {
    SceneConfig scene = read_scene(c.scene);
    scene.radio = consts;
    write_records(generate_ranging_log(scene), fs::path(c.output));
    return;
  }
  const auto rows = generate_feature_dataset(default_los_profile(), default_nlos_profile(),
                                             c.n_los, c.n_nlos, c.seed);
  if (c.raw) {
    write_records(encode_rows(rows, consts, Rng::derive(c.seed, 1)), fs::path(c.output));
  } else {
    write_feature_rows(rows, fs::path(c.output));
  }
}

void cmd_extract(const Config& c) {
  const RadioConstants consts = radio_constants_for_prf(c.prf);
  const auto records = read_records(c.input);
  std::vector<LabeledFeatureRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(extract_row(r, consts));
  write_feature_rows(rows, fs::path(c.output));
}

PipelineOptions pipeline_options(const Config& c) {
  PipelineOptions o;
  o.family = parse_family(c.family);
  o.lambda = c.lambda;
  o.train_fraction = c.train_fraction;
  return o;
}

void cmd_train(const Config& c) {
  const auto rows = read_feature_rows(c.input);
  const auto opts = pipeline_options(c);
  const auto split = split_train_validate(rows, opts.train_fraction, c.seed);
  auto model = train(std::span<const LabeledFeatureRow>(split.train), opts.family, opts.lambda,
                     opts.train);
  tune_threshold(model, split.validate);
  save_model(model, fs::path(c.output));
}

void cmd_evaluate(const Config& c) {
  const auto model = load_model(fs::path(c.model));
  const auto rows = read_feature_rows(c.input);
  const auto report = evaluate_model(model, rows);
  const fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory '" + dir.string() + "'");
  {
    const fs::path p = dir / "summary.txt";
    auto out = open_output(p);
    write_summary(report, out);
    finish(out, p);
  }
  {
    const fs::path p = dir / "roc.csv";
    auto out = open_output(p);
    write_roc_csv(report.roc, out);
    finish(out, p);
  }
}

void cmd_ratio_sweep(const Config& c) {
  const auto rows = read_feature_rows(c.input);
  std::vector<LabeledFeatureRow> los;
  std::vector<LabeledFeatureRow> nlos;
  for (const auto& r : rows) {
    if (r.label == Label::LoS) los.push_back(r);
    if (r.label == Label::NLoS) nlos.push_back(r);
  }
  const auto table = ratio_sweep(los, nlos, c.ratios, c.trials, c.seed, pipeline_options(c));
  const fs::path p(c.output);
  auto out = open_output(p);
  out << "ratio,nlos_count,mean_accuracy\n";
  for (const auto& pt : table) {
    out << fmt("%.9g", pt.ratio) << ',' << pt.nlos_count << ',' << fmt("%.6f", pt.mean_accuracy)
        << '\n';
  }
  finish(out, p);
}

// Consecutive records form one epoch until an anchor id repeats.
std::vector<std::vector<RangingRecord>> group_epochs(const std::vector<RangingRecord>& records) {
  std::vector<std::vector<RangingRecord>> epochs;
  std::unordered_set<std::uint32_t> seen;
  for (const auto& r : records) {
    if (epochs.empty() || seen.count(r.anchor_id) != 0) {
      epochs.emplace_back();
      seen.clear();
    }
    seen.insert(r.anchor_id);
    epochs.back().push_back(r);
  }
  return epochs;
}

void cmd_locate(const Config& c) {
  const auto model = load_model(fs::path(c.model));
  const auto anchors = read_anchors(c.anchors);
  const auto records = read_records(c.input);
  const RadioConstants consts = radio_constants_for_prf(c.prf);
  const auto epochs = group_epochs(records);
  const fs::path p(c.output);
  auto out = open_output(p);
  out << "epoch,x_m,y_m,residual_rms_m,used_anchor_count,degraded\n";
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    ClassifiedFix fix;
    try {
      fix = locate_with_classifier(model, anchors, epochs[e], consts);
    } catch (const Error& err) {
      throw Error("epoch " + std::to_string(e) + ": " + err.what());
    }
    const auto& est = fix.estimate;
    out << e << ',' << fmt("%.6f", est.position.x()) << ',' << fmt("%.6f", est.position.y()) << ','
        << fmt("%.6f", est.residual_rms_m) << ',' << est.used_anchor_count << ','
        << (est.degraded ? 1 : 0) << '\n';
  }
  finish(out, p);
}

void cmd_compare_thresholds(const Config& c) {
  const auto model = load_model(fs::path(c.model));
  const auto stream = read_feature_rows(c.input);
  const auto cmp = compare_static_dynamic(model, stream, c.lambda);
  const fs::path p(c.output);
  auto out = open_output(p);
  out << "lambda=" << fmt("%.6f", c.lambda) << '\n'
      << "static_accuracy=" << fmt("%.6f", cmp.static_accuracy) << '\n'
      << "dynamic_accuracy=" << fmt("%.6f", cmp.dynamic_accuracy) << '\n'
      << "final_epsilon=" << fmt("%.9g", cmp.final_epsilon) << '\n';
  finish(out, p);
}

const auto kOpenUnit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v < 1.0)) {
        return "value must lie strictly between 0 and 1";
      }
      return {};
    },
    "(0,1)");

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"UWB NLoS identification and positioning toolkit", "uwbnlos"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  std::function<void(const Config&)> action;
  auto add = [&](const char* name, const char* help, void (*fn)(const Config&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  auto input = [&](CLI::App* s, const char* help) {
    s->add_option("--input", c.input, help)->required()->check(CLI::ExistingFile);
  };
  auto output = [&](CLI::App* s, const char* help) {
    s->add_option("--output", c.output, help)->required();
  };
  auto model = [&](CLI::App* s) {
    s->add_option("--model", c.model, "Model file written by `train`")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto family = [&](CLI::App* s) {
    s->add_option("--family", c.family, "Density family")->check(CLI::IsMember({"gd", "ggd"}));
  };
  auto lambda = [&](CLI::App* s) {
    s->add_option("--lambda", c.lambda, "Forgetting factor of the threshold update")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "Random seed"); };
  auto prf = [&](CLI::App* s) {
    s->add_option("--prf", c.prf, "Pulse repetition frequency in MHz")
        ->check(CLI::IsMember({16.0, 64.0}));
  };
  auto fraction = [&](CLI::App* s) {
    s->add_option("--train-fraction", c.train_fraction, "Share of LoS rows used for training")
        ->check(kOpenUnit);
  };

  auto* synth = add("synth", "Generate a seeded synthetic dataset", cmd_synth);
  output(synth, "Feature CSV, or raw ranging CSV with --raw or --scene");
  synth->add_option("--los", c.n_los, "Number of LoS rows");
  synth->add_option("--nlos", c.n_nlos, "Number of NLoS rows");
  seed(synth);
  synth->add_flag("--raw", c.raw, "Write raw ranging records instead of features");
  synth->add_option("--scene", c.scene, "JSON scene; writes a two-way-ranging log over it")
      ->check(CLI::ExistingFile);
  prf(synth);

  auto* extract = add("extract", "Compute features from raw ranging records", cmd_extract);
  input(extract, "Raw ranging CSV");
  output(extract, "Feature CSV");
  prf(extract);

  auto* tr = add("train", "Fit a classifier on LoS rows and tune its threshold", cmd_train);
  input(tr, "Labeled feature CSV");
  output(tr, "Model file");
  family(tr);
  lambda(tr);
  seed(tr);
  fraction(tr);

  auto* ev = add("evaluate", "Write summary.txt and roc.csv for a labeled feature file",
                 cmd_evaluate);
  input(ev, "Labeled feature CSV");
  model(ev);
  output(ev, "Report directory");

  auto* rs = add("ratio-sweep", "Mean accuracy against the NLoS:LoS ratio", cmd_ratio_sweep);
  input(rs, "Labeled feature CSV; its LoS and NLoS rows form the two pools");
  output(rs, "CSV table");
  rs->add_option("--ratios", c.ratios, "Comma-separated NLoS:LoS ratios in (0, 1]")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  rs->add_option("--trials", c.trials, "Trials per ratio")->check(CLI::PositiveNumber);
  family(rs);
  lambda(rs);
  seed(rs);
  fraction(rs);

  auto* lo = add("locate", "Trilaterate each epoch after dropping NLoS ranges", cmd_locate);
  input(lo, "Raw ranging CSV; an epoch ends when an anchor id repeats");
  output(lo, "Position CSV");
  model(lo);
  lo->add_option("--anchors", c.anchors, "Anchor CSV (anchor_id,x_m,y_m)")
      ->required()
      ->check(CLI::ExistingFile);
  prf(lo);

  auto* ct = add("compare-thresholds", "Static against dynamic threshold on an ordered stream",
                 cmd_compare_thresholds);
  input(ct, "Labeled feature CSV in time order");
  output(ct, "Result file");
  model(ct);
  lambda(ct);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return 2;
  }

  try {
    action(c);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace uwbnlos::cli
