#include "geoaffect/cli.hpp"

#include "geoaffect/features.hpp"
#include "geoaffect/frontalization.hpp"
#include "geoaffect/interpret.hpp"
#include "geoaffect/io.hpp"
#include "geoaffect/modelsel.hpp"
#include "geoaffect/pipeline.hpp"
#include "geoaffect/serialize.hpp"
#include "geoaffect/simgen.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace geoaffect {
namespace {

std::string to_text(auto&& writer) {
  std::ostringstream buf;
  writer(buf);
  return buf.str();
}

std::vector<MethodSpec> parse_methods(const std::vector<std::string>& texts) {
  std::vector<MethodSpec> methods;
  for (const auto& t : texts) methods.push_back(parse_method_spec(t));
  return methods;
}

GeneratorConfig load_generator_config(const std::string& path) {
  if (path.empty()) return GeneratorConfig{};
  return generator_config_from_json(load_json_file(path, ErrorKind::ConfigInvalid));
}

FrontalizerModel load_frontalizer(const std::string& path) { return frontalizer_from_json(load_json_file(path)); }

PipelineBundle load_bundle(const std::string& path) { return bundle_from_json(load_json_file(path)); }

Json mse_report(const Eigen::VectorXd& values, size_t n_samples) {
  Json mse = Json::object();
  for (size_t c = 0; c < kOutputNames.size(); ++c) mse[std::string(kOutputNames[c])] = values(static_cast<Eigen::Index>(c));
  return Json{{"n_samples", n_samples}, {"mse", mse}};
}

struct SplitFlags {
  std::uint64_t seed = 0;
  double fraction = kDefaultValidationFraction;
  std::vector<std::string> subjects;

  void attach(CLI::App* cmd) {
    cmd->add_option("--split-seed", seed, "Seed for choosing validation subjects");
    cmd->add_option("--fraction", fraction, "Target validation fraction of subjects")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--validation-subjects", subjects, "Explicit validation subject ids")->delimiter(',');
  }
  SplitSpec spec() const { return {subjects, seed, fraction}; }
};

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::ConfigInvalid:
    case ErrorKind::CountExceedsFeatures:
      return kExitUsage;
    case ErrorKind::SchemaViolation:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::DegenerateLandmarks:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::InsufficientSubjects:
      return kExitData;
    case ErrorKind::SingularSystem:
    case ErrorKind::RankExhausted:
    case ErrorKind::NonFinite:
      return kExitNumerical;
  }
  return kExitUnexpected;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric facial affect estimation: frontalization, pairwise distances and PLS regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "geoaffect 1.0");

  // gen
  std::string gen_config, gen_out, gen_pairs, gen_template;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic labelled landmark dataset");
  gen->add_option("--config", gen_config, "Generator config JSON (defaults when omitted)");
  gen->add_option("--out", gen_out, "Landmark CSV for the frontal samples")->required();
  gen->add_option("--pairs-out", gen_pairs, "Pairs CSV of posed views with frontal truth");
  gen->add_option("--dump-template", gen_template, "Write the face template and mode matrices as JSON");

  // frontalize-fit
  std::string ff_pairs, ff_out;
  double ff_lambda = kDefaultFrontalizerLambda;
  auto* ffit = app.add_subcommand("frontalize-fit", "Fit the landmark frontalizer from posed/frontal pairs");
  ffit->add_option("--pairs", ff_pairs, "Pairs CSV")->required();
  ffit->add_option("--out", ff_out, "Frontalizer JSON")->required();
  ffit->add_option("--lambda", ff_lambda, "Ridge penalty")->check(CLI::NonNegativeNumber);

  // train
  std::string tr_data, tr_frontalizer, tr_method = "pls:" + std::to_string(kDefaultPlsComponents), tr_out;
  auto* train = app.add_subcommand("train", "Train the regressor on frontalized distance features");
  train->add_option("--data", tr_data, "Labelled landmark CSV")->required();
  train->add_option("--frontalizer", tr_frontalizer, "Frontalizer JSON")->required();
  train->add_option("--method", tr_method, "pls:k | ridge:alpha | pcr:k | ols")->capture_default_str();
  train->add_option("--out", tr_out, "Bundle JSON")->required();

  // predict
  std::string pr_bundle, pr_data, pr_out;
  auto* pred = app.add_subcommand("predict", "Predict arousal, valence and intensity");
  pred->add_option("--bundle", pr_bundle, "Bundle JSON")->required();
  pred->add_option("--data", pr_data, "Landmark CSV")->required();
  pred->add_option("--out", pr_out, "Prediction CSV")->required();

  // eval
  std::string ev_bundle, ev_data, ev_out;
  auto* eval = app.add_subcommand("eval", "Per-output MSE of a bundle on labelled data");
  eval->add_option("--bundle", ev_bundle, "Bundle JSON")->required();
  eval->add_option("--data", ev_data, "Labelled landmark CSV")->required();
  eval->add_option("--out", ev_out, "Report JSON");

  // sweep
  std::string sw_data, sw_frontalizer, sw_out, sw_csv;
  Eigen::Index sw_kmax = 60;
  double sw_epsilon = kDefaultSelectionEpsilon;
  SplitFlags sw_split;
  auto* sweep = app.add_subcommand("sweep", "Validation MSE against the number of PLS components");
  sweep->add_option("--data", sw_data, "Labelled landmark CSV")->required();
  sweep->add_option("--frontalizer", sw_frontalizer, "Frontalizer JSON")->required();
  sweep->add_option("--k-max", sw_kmax, "Largest component count")->check(CLI::PositiveNumber);
  sweep->add_option("--epsilon", sw_epsilon, "Selection tolerance")->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", sw_out, "Report JSON")->required();
  sweep->add_option("--csv", sw_csv, "Curves CSV");
  sw_split.attach(sweep);

  // compare
  std::string cmp_data, cmp_frontalizer, cmp_out;
  std::vector<std::string> cmp_methods = {"pls:29", "pls:100", "pcr:29", "pcr:100", "ridge:0.1", "ridge:0.5"};
  SplitFlags cmp_split;
  auto* compare = app.add_subcommand("compare", "Baseline comparison table on a subject-disjoint split");
  compare->add_option("--data", cmp_data, "Labelled landmark CSV")->required();
  compare->add_option("--frontalizer", cmp_frontalizer, "Frontalizer JSON")->required();
  compare->add_option("--methods", cmp_methods, "Comma-separated method specs")->delimiter(',')->capture_default_str();
  compare->add_option("--out", cmp_out, "Report JSON");
  cmp_split.attach(compare);

  // shift
  std::string sh_config, sh_frontalizer, sh_out;
  std::vector<std::string> sh_methods = {"pls:29", "pcr:29", "ridge:0.1"};
  ShiftSpec sh_spec;
  SplitFlags sh_split;
  auto* shift = app.add_subcommand("shift", "Degradation of trained models under a perturbed generator");
  shift->add_option("--config", sh_config, "Nominal generator config JSON (defaults when omitted)");
  shift->add_option("--frontalizer", sh_frontalizer, "Frontalizer JSON")->required();
  shift->add_option("--methods", sh_methods, "Comma-separated method specs")->delimiter(',')->capture_default_str();
  shift->add_option("--identity-scale", sh_spec.identity_variance_scale, "Identity variance multiplier");
  shift->add_option("--noise", sh_spec.noise_std, "Generator noise of the shifted set");
  shift->add_option("--jitter", sh_spec.landmark_jitter, "Extra 2D landmark jitter of the shifted set");
  shift->add_option("--shift-seed", sh_spec.seed, "Seed of the shifted set");
  shift->add_option("--out", sh_out, "Report JSON");
  sh_split.attach(shift);

  // interpret
  std::string in_bundle, in_output = "valence", in_out;
  Eigen::Index in_count = 500;
  bool in_layout = false;
  auto* interp = app.add_subcommand("interpret", "Top positive and negative distance weights for one output");
  interp->add_option("--bundle", in_bundle, "Bundle JSON")->required();
  interp->add_option("--output", in_output, "arousal | valence | intensity")->capture_default_str();
  interp->add_option("--count", in_count, "Edges per sign")->capture_default_str();
  interp->add_option("--out", in_out, "Edge JSON")->required();
  interp->add_flag("--with-template", in_layout, "Include the synthetic template as reference coordinates");

  // features
  std::string fe_data, fe_frontalizer, fe_out;
  auto* feats = app.add_subcommand("features", "Write the distance features of a landmark file");
  feats->add_option("--data", fe_data, "Landmark CSV")->required();
  feats->add_option("--frontalizer", fe_frontalizer, "Frontalizer JSON")->required();
  feats->add_option("--out", fe_out, "Feature CSV")->required();

  // pairs
  Eigen::Index pa_points = kDefaultLandmarks;
  std::string pa_out;
  auto* pairs_cmd = app.add_subcommand("pairs", "Dump the feature index to landmark pair mapping");
  pairs_cmd->add_option("--n-points", pa_points, "Landmark count")->check(CLI::Range(3, 100000));
  pairs_cmd->add_option("--out", pa_out, "CSV path (stdout when omitted)");

  auto report_error = [&](std::string_view kind, const std::string& message, int code) {
    err << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
  };

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error("Usage", e.what(), kExitUsage);
  }

  try {
    if (*gen) {
      const GeneratorConfig config = load_generator_config(gen_config);
      const Dataset data = gen_dataset(config);
      write_text_file(gen_out, to_text([&](std::ostream& s) { write_landmark_csv(s, data.frontal); }));
      if (!gen_pairs.empty()) {
        const auto pairs = frontal_pairs(data);
        write_text_file(gen_pairs, to_text([&](std::ostream& s) { write_pairs_csv(s, pairs); }));
      }
      if (!gen_template.empty()) {
        auto as_json = [](const Points3& m) { return matrix_to_json(Eigen::MatrixXd(m)); };
        Json modes = Json::array();
        for (const auto& mode : identity_modes()) modes.push_back(as_json(mode));
        write_text_file(gen_template, dump(Json{{"template", as_json(neutral_template())},
                                                {"arousal_mode", as_json(arousal_mode())},
                                                {"valence_mode", as_json(valence_mode())},
                                                {"cross_mode", as_json(cross_mode())},
                                                {"identity_modes", modes}}));
      }
      out << "wrote " << data.frontal.size() << " samples";
      if (!gen_pairs.empty()) out << " and " << data.posed.size() << " pairs";
      out << '\n';
    } else if (*ffit) {
      const auto pairs = load_pairs_csv(ff_pairs);
      const FrontalizerModel model = fit_frontalizer(pairs, ff_lambda);
      write_text_file(ff_out, dump(to_json(model)));
      out << "fitted frontalizer on " << pairs.size() << " pairs (N=" << model.n_points << ")\n";
    } else if (*train) {
      const MethodSpec method = parse_method_spec(tr_method);
      const auto samples = load_landmark_csv(tr_data);
      const PipelineBundle bundle = train_pipeline(load_frontalizer(tr_frontalizer), samples, method);
      write_text_file(tr_out, dump(to_json(bundle)));
      out << "trained " << to_string(method) << " on " << samples.size() << " samples\n";
    } else if (*pred) {
      const PipelineBundle bundle = load_bundle(pr_bundle);
      const auto samples = load_landmark_csv(pr_data);
      const Eigen::MatrixXd y_hat = predict(bundle, samples);
      const auto ids = sample_ids(samples);
      write_text_file(pr_out, to_text([&](std::ostream& s) { write_prediction_csv(s, ids, y_hat); }));
      out << "predicted " << samples.size() << " samples\n";
    } else if (*eval) {
      const PipelineBundle bundle = load_bundle(ev_bundle);
      const auto samples = load_landmark_csv(ev_data);
      const Eigen::MatrixXd y = label_matrix(samples);
      const Eigen::VectorXd values = mse(y, predict(bundle, samples));
      const Json report = mse_report(values, samples.size());
      if (!ev_out.empty()) write_text_file(ev_out, dump(report));
      for (size_t c = 0; c < kOutputNames.size(); ++c) {
        out << kOutputNames[c] << " MSE " << format_double(values(static_cast<Eigen::Index>(c))) << '\n';
      }
    } else if (*sweep) {
      const auto samples = load_landmark_csv(sw_data);
      const Split split = split_by_subject(samples, sw_split.spec());
      const SweepResult result = sweep_components(make_problem(load_frontalizer(sw_frontalizer), split), sw_kmax, sw_epsilon);
      Json report = to_json(result);
      report["validation_subjects"] = split.validation_subjects;
      report["validation_fraction"] = split.achieved_fraction;
      write_text_file(sw_out, dump(report));
      if (!sw_csv.empty()) write_text_file(sw_csv, sweep_csv(result));
      out << format_table(result);
    } else if (*compare) {
      const auto methods = parse_methods(cmp_methods);
      const auto samples = load_landmark_csv(cmp_data);
      const Split split = split_by_subject(samples, cmp_split.spec());
      const BaselineTable table = compare_baselines(make_problem(load_frontalizer(cmp_frontalizer), split), methods);
      if (!cmp_out.empty()) write_text_file(cmp_out, dump(to_json(table)));
      out << format_table(table);
    } else if (*shift) {
      const auto methods = parse_methods(sh_methods);
      const GeneratorConfig config = load_generator_config(sh_config);
      const FrontalizerModel frontalizer = load_frontalizer(sh_frontalizer);
      const Dataset nominal = gen_dataset(config);
      const Split split = split_by_subject(nominal.frontal, sh_split.spec());
      const Problem problem = make_problem(frontalizer, split);

      GeneratorConfig shifted = shifted_config(config, sh_spec);
      shifted.n_subjects = static_cast<int>(split.validation_subjects.size());
      const auto shifted_samples = jitter_samples(gen_dataset(shifted).frontal, sh_spec.landmark_jitter, sh_spec.seed);

      std::vector<NamedRegressor> models;
      for (const auto& m : methods) models.push_back({display_name(m), fit_regressor(m, problem.x_train, problem.y_train)});
      const ShiftReport report = shift_eval(models, problem.x_val, problem.y_val,
                                            feature_matrix(frontalizer, shifted_samples), label_matrix(shifted_samples));
      if (!sh_out.empty()) write_text_file(sh_out, dump(to_json(report)));
      out << format_table(report);
    } else if (*interp) {
      const AffectOutput output = parse_output(in_output);
      const PipelineBundle bundle = load_bundle(in_bundle);
      const EdgeLists lists = top_weights(bundle.regressor, output, in_count);
      Json doc{{"output", std::string(to_string(output))},
               {"count", in_count},
               {"positive", export_edges(lists.positive)},
               {"negative", export_edges(lists.negative)}};
      if (in_layout) {
        if (bundle.n_points != kDefaultLandmarks) fail(ErrorKind::Usage, "--with-template needs a 49-point bundle");
        const LandmarkSet layout{Points(neutral_template().leftCols(2))};
        doc["landmarks"] = export_edges({}, &layout)["landmarks"];
      }
      write_text_file(in_out, dump(doc));
      out << lists.positive.size() << " positive and " << lists.negative.size() << " negative edges for "
          << to_string(output) << '\n';
    } else if (*feats) {
      const auto samples = load_landmark_csv(fe_data);
      const Eigen::MatrixXd x = feature_matrix(load_frontalizer(fe_frontalizer), samples);
      const auto ids = sample_ids(samples);
      write_text_file(fe_out, to_text([&](std::ostream& s) { write_feature_csv(s, ids, x); }));
      out << "wrote " << x.rows() << " x " << x.cols() << " features\n";
    } else if (*pairs_cmd) {
      const std::string table = to_text([&](std::ostream& s) {
        s << "flat,i,j\n";
        for (Eigen::Index f = 0; f < pair_count(pa_points); ++f) {
          const PairIndex p = flat_to_pair(f, pa_points);
          s << f << ',' << p.i << ',' << p.j << '\n';
        }
      });
      if (pa_out.empty()) {
        out << table;
      } else {
        write_text_file(pa_out, table);
      }
    }
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return report_error("Unexpected", e.what(), kExitUnexpected);
  }
  return kExitOk;
}

}  // namespace geoaffect
