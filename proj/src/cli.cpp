#include "xqs/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "xqs/distributions.hpp"
#include "xqs/error.hpp"
#include "xqs/ingest.hpp"
#include "xqs/report.hpp"
#include "xqs/rng.hpp"
#include "xqs/simbench.hpp"

namespace xqs::cli {
namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<double> parse_p0(const std::string& s) {
  if (s == "auto") return std::nullopt;
  const auto v = parse_reals(s);
  if (v.size() != 1) throw ParseError("--p0 expects a number or 'auto'");
  return v.front();
}

struct NamedModel {
  std::string label;
  DataModel model;
};

NamedModel resolve_model(const std::string& text) {
  const auto& ids = reference_model_ids();
  if (std::find(ids.begin(), ids.end(), text) != ids.end()) return {text, reference_model(text)};
  DataModel m = parse_model(text);
  return {m.describe(), m};
}

/// Writes files and removes them all again unless commit() is called.
class OutputSet {
public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::exists(dir_)) {
      std::filesystem::create_directories(dir_);
      created_dir_ = true;
    }
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
    if (created_dir_) std::filesystem::remove(dir_, ec);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("error writing '" + path.string() + "'");
  }

  void commit() { committed_ = true; }

private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

std::string fmt(double v) { return format_double(v); }

void run_assess(const RunConfig& config, OutputSet& out, std::ostream& log) {
  Sample y;
  json source;
  if (config.input) {
    IngestResult ing = ingest_csv(*config.input, config.zero_filter);
    source = {{"input", config.input->string()},
              {"dropped_invalid", ing.dropped_invalid},
              {"dropped_zero", ing.dropped_zero}};
    log << "read " << ing.values.size() << " values from " << config.input->string() << " ("
        << ing.dropped_invalid << " invalid";
    if (config.zero_filter) log << ", " << ing.dropped_zero << " zeros";
    log << " dropped)\n";
    y = std::move(ing.values);
  } else {
    const NamedModel m = resolve_model(config.models.front());
    RandomStream rng(derive_seed(config.seed, 0));
    y = sample(m.model, config.n, rng);
    source = {{"model", m.label}, {"seed", config.seed}};
  }

  const std::size_t n = y.size();
  const double p0 = config.p0 ? *config.p0 : resolve_p0(0.0, n);
  const std::vector<double> alphas2 =
      config.alphas_method2.empty() ? matching_method2_alphas(n, p0, config.alphas) : config.alphas_method2;

  std::ostringstream summary;
  summary << "n = " << n << ", p0 = " << fmt(p0) << "\n";
  for (PredictorSet set : config.sets) {
    const auto specs = make_predictor_set(set);
    const std::vector<Prediction> preds = predict_all(specs, y, p0);
    for (AssessMethod method : config.methods) {
      ScoreReport report;
      switch (method) {
        case AssessMethod::Conventional: report = conventional_report(specs, p0, y); break;
        case AssessMethod::Method1:
          report = cross_validated_score(CvMethod::Method1, specs, p0, config.alphas, y,
                                         derive_seed(config.seed, 1), preds);
          break;
        case AssessMethod::Method2:
          report = cross_validated_score(CvMethod::Method2, specs, p0, alphas2, y,
                                         derive_seed(config.seed, 2), preds);
          break;
      }
      json doc = to_json(report);
      doc["set"] = std::string(predictor_set_name(set));
      doc["n"] = n;
      doc["seed"] = config.seed;
      doc["source"] = source;
      const std::string name = config.sets.size() == 1
                                   ? "report_" + std::string(assess_method_name(method)) + ".json"
                                   : "report_" + std::string(predictor_set_name(set)) + "_" +
                                         std::string(assess_method_name(method)) + ".json";
      out.write(name, doc.dump(2) + "\n");

      const auto& spec = report.specs[report.selected];
      summary << std::left << std::setw(5) << predictor_set_name(set) << std::setw(6)
              << assess_method_name(method) << "selected " << std::setw(12) << spec.label()
              << " (index " << spec.index << ")  prediction " << fmt(report.selected_prediction().value)
              << "\n";
    }
  }
  out.write("summary.txt", summary.str());
  log << summary.str();
}

void run_simulate(const RunConfig& config, OutputSet& out, std::ostream& log) {
  std::vector<RmseRow> rows;
  json doc = json::array();
  std::ostringstream summary;
  for (const auto& text : config.models) {
    const NamedModel m = resolve_model(text);
    RmseRow row;
    row.model = m.label;
    row.n = config.n;
    row.replicates = config.replicates;
    row.sets = config.sets;
    for (PredictorSet set : config.sets) {
      SimulationConfig sc{.model = m.model};
      sc.n = config.n;
      sc.replicates = config.replicates;
      sc.p0 = config.p0.value_or(0.0);
      sc.alphas_method1 = config.alphas;
      sc.alphas_method2 = config.alphas_method2;
      sc.predictor_set = set;
      sc.master_seed = config.seed;
      sc.threads = config.threads;
      log << "simulating " << m.label << " set " << predictor_set_name(set) << " (" << config.replicates
          << " replicates)\n";
      SimulationResult res = run_simulation(sc);

      json entry = {{"model", m.label},
                    {"set", std::string(predictor_set_name(set))},
                    {"n", config.n},
                    {"replicates", config.replicates},
                    {"seed", config.seed},
                    {"p0", res.p0},
                    {"true_quantile", res.true_quantile}};
      json plans = json::array();
      for (double a : res.alphas_method1) plans.push_back(to_json(derive_cv_params(config.n, res.p0, a, CvMethod::Method1)));
      for (double a : res.alphas_method2) plans.push_back(to_json(derive_cv_params(config.n, res.p0, a, CvMethod::Method2)));
      entry["plans"] = plans;
      for (SimMethod sm : kAllSimMethods) entry["rmse"][std::string(sim_method_name(sm))] = res.rmse.at(sm);
      doc.push_back(entry);

      summary << m.label << " [" << predictor_set_name(set) << "] true quantile " << fmt(res.true_quantile)
              << "\n";
      for (SimMethod sm : kAllSimMethods) {
        summary << "  " << std::left << std::setw(7) << sim_method_name(sm) << " RMSE "
                << fmt(res.rmse.at(sm)) << "\n";
      }
      row.results.push_back(std::move(res));
    }
    rows.push_back(std::move(row));
  }
  out.write("rmse_table.csv", rmse_table_csv(rows));
  out.write("selection_freq.csv", selection_freq_csv(rows));
  out.write("simulation.json", doc.dump(2) + "\n");
  out.write("summary.txt", summary.str());
  log << summary.str();
}

}  // namespace

std::vector<double> parse_reals(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_csv(csv)) {
    // Fractions like 1/4 are accepted for Method-2 alphas.
    const auto slash = item.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        std::size_t u1 = 0, u2 = 0;
        const std::string num = item.substr(0, slash), den = item.substr(slash + 1);
        const double a = std::stod(num, &u1), b = std::stod(den, &u2);
        if (u1 != num.size() || u2 != den.size()) throw std::invalid_argument(item);
        out.push_back(a / b);
      }
    } catch (const std::logic_error&) {
      throw ParseError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<AssessMethod> parse_methods(const std::string& csv) {
  std::vector<AssessMethod> out;
  for (const auto& item : split_csv(csv)) {
    if (item == "qs") out.push_back(AssessMethod::Conventional);
    else if (item == "scv1") out.push_back(AssessMethod::Method1);
    else if (item == "scv2") out.push_back(AssessMethod::Method2);
    else throw ParseError("unknown method '" + item + "' (expected qs, scv1, scv2)");
  }
  return out;
}

void validate(const RunConfig& config) {
  if (config.alphas.empty()) throw DomainError("at least one alpha is required");
  if (config.sets.empty()) throw DomainError("at least one predictor set is required");
  if (config.p0 && !(*config.p0 > 0.0 && *config.p0 < 1.0)) throw DomainError("p0 must lie in (0, 1)");
  if (config.command == Command::Assess) {
    const bool has_model = !config.models.empty();
    if (has_model == config.input.has_value()) {
      throw DomainError("assess needs exactly one of --model or --input");
    }
    if (config.models.size() > 1) throw DomainError("assess takes a single --model");
    if (config.methods.empty()) throw DomainError("at least one method is required");
  } else {
    if (config.input) throw DomainError("simulate draws from --model; --input is not accepted");
    if (config.models.empty()) throw DomainError("simulate needs at least one --model");
    if (config.replicates == 0) throw DomainError("--replicates must be at least 1");
  }
  if (config.n < 2) throw DomainError("--n must be at least 2");
}

void apply_json(RunConfig& config, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config file must hold a JSON object");
  const auto list_or_string = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += ',';
      s += e.is_string() ? e.get<std::string>() : e.dump();
    }
    return s;
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "model") {
        config.models.clear();
        if (v.is_string()) config.models.push_back(v.get<std::string>());
        else for (const auto& e : v) config.models.push_back(e.get<std::string>());
      } else if (key == "input") {
        config.input = v.get<std::string>();
      } else if (key == "p0") {
        config.p0 = v.is_string() ? parse_p0(v.get<std::string>()) : std::optional<double>(v.get<double>());
      } else if (key == "alphas") {
        config.alphas = parse_reals(list_or_string(v));
      } else if (key == "alphas2") {
        config.alphas_method2 = parse_reals(list_or_string(v));
      } else if (key == "methods") {
        config.methods = parse_methods(list_or_string(v));
      } else if (key == "set") {
        config.sets.clear();
        for (const auto& s : split_csv(list_or_string(v))) config.sets.push_back(parse_predictor_set(s));
      } else if (key == "replicates") {
        config.replicates = v.get<std::size_t>();
      } else if (key == "n") {
        config.n = v.get<std::size_t>();
      } else if (key == "seed") {
        config.seed = v.get<std::uint64_t>();
      } else if (key == "zero-filter" || key == "zero_filter") {
        config.zero_filter = v.get<bool>();
      } else if (key == "out") {
        config.out = v.get<std::string>();
      } else if (key == "threads") {
        config.threads = v.get<unsigned>();
      } else {
        throw ParseError("config file: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config file: ") + e.what());
  }
}

void run(const RunConfig& config, std::ostream& log) {
  validate(config);
  OutputSet out(config.out);
  if (config.command == Command::Assess) {
    run_assess(config, out, log);
  } else {
    run_simulate(config, out, log);
  }
  out.commit();
}

int main(int argc, char** argv) {
  CLI::App app{"Score and select extreme quantile predictors by cross-validated quantile scores"};
  app.require_subcommand(1);

  struct Flags {
    std::string config_file;
    std::vector<std::string> models;
    std::string input, p0, alphas, alphas2, methods, set, out;
    std::size_t replicates = 0, n = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool zero_filter = false;
  } f;

  const auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config_file, "JSON config file; flags override it");
    sub->add_option("--model", f.models, "Model grammar string or reference id (i:a ... iv)");
    sub->add_option("--p0", f.p0, "Target level, or 'auto' for 1 - 1/(2n)");
    sub->add_option("--alphas", f.alphas, "Method-1 tuning values, e.g. 1,2,4,8");
    sub->add_option("--alphas2", f.alphas2, "Method-2 tuning values (default: same fold counts)");
    sub->add_option("--set", f.set, "Predictor set(s): zero-ab, a, b, ab");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--n", f.n, "Sample size drawn from --model");
    sub->add_option("--out", f.out, "Output directory");
  };
  CLI::App* assess = app.add_subcommand("assess", "Select a predictor for one sample");
  add_common(assess);
  assess->add_option("--input", f.input, "CSV with a 'value' column or a single column");
  assess->add_option("--methods", f.methods, "Assessment methods: qs,scv1,scv2");
  assess->add_flag("--zero-filter", f.zero_filter, "Drop zero values from the input");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo RMSE comparison");
  add_common(simulate);
  simulate->add_option("--replicates", f.replicates, "Number of replicates L");
  simulate->add_option("--threads", f.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  RunConfig config;
  CLI::App* sub = assess->parsed() ? assess : simulate;
  config.command = assess->parsed() ? Command::Assess : Command::Simulate;
  const auto given = [sub](const char* flag) { return sub->count(flag) > 0; };
  try {
    if (given("--config")) {
      std::ifstream in(f.config_file);
      if (!in) throw IoError("cannot open config file '" + f.config_file + "'");
      std::ostringstream text;
      text << in.rdbuf();
      apply_json(config, text.str());
    }
    if (given("--model")) config.models = f.models;
    if (config.command == Command::Assess && given("--input")) config.input = f.input;
    if (given("--p0")) config.p0 = parse_p0(f.p0);
    if (given("--alphas")) config.alphas = parse_reals(f.alphas);
    if (given("--alphas2")) config.alphas_method2 = parse_reals(f.alphas2);
    if (config.command == Command::Assess && given("--methods")) config.methods = parse_methods(f.methods);
    if (given("--set")) {
      config.sets.clear();
      for (const auto& s : split_csv(f.set)) config.sets.push_back(parse_predictor_set(s));
    }
    if (given("--seed")) config.seed = f.seed;
    if (given("--n")) config.n = f.n;
    if (given("--out")) config.out = f.out;
    if (config.command == Command::Assess && given("--zero-filter")) config.zero_filter = true;
    if (config.command == Command::Simulate) {
      if (given("--replicates")) config.replicates = f.replicates;
      if (given("--threads")) config.threads = f.threads;
    }
    run(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace xqs::cli
