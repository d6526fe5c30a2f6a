// Command-line front end: generate data, train the base tagger, build and
// prune constraint sets, learn penalties, predict, evaluate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"
#include "softdd/corpus.hpp"
#include "softdd/dd.hpp"
#include "softdd/eval.hpp"
#include "softdd/oracle.hpp"
#include "softdd/penalties.hpp"
#include "softdd/synthetic.hpp"

namespace {

using namespace softdd;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

struct GenArgs {
  std::string out_dir;
  std::uint64_t seed = 7;
  std::size_t train = 600, dev = 300, test = 500;
  std::string schema_template = "hierarchical";
  double confusion = 0.0;
  double editor_probability = 0.6;
  std::size_t min_len = 1, max_len = 64;
};

int cmd_gen(const GenArgs& args) {
  GeneratorConfig config;
  config.seed = args.seed;
  config.schema_template = args.schema_template == "flat" ? GeneratorConfig::Template::Flat
                                                          : GeneratorConfig::Template::Hierarchical;
  config.confusion_rate = args.confusion;
  config.editor_probability = args.editor_probability;
  config.min_length = args.min_len;
  config.max_length = args.max_len;

  std::filesystem::create_directories(args.out_dir);
  const std::pair<const char*, std::size_t> splits[] = {
      {"train.tsv", args.train}, {"dev.tsv", args.dev}, {"test.tsv", args.test}};
  std::uint64_t split_seed = config.seed;
  for (const auto& [name, count] : splits) {
    GeneratorConfig split_config = config;
    split_config.seed = split_seed++;
    split_config.num_sequences = count;
    write_corpus(std::filesystem::path(args.out_dir) / name, generate(split_config));
  }
  std::cout << "wrote " << args.train << "/" << args.dev << "/" << args.test
            << " sequences to " << args.out_dir << "\n";
  return 0;
}

struct TrainArgs {
  std::string train_path, dev_path, model_path;
  int epochs = 5;
  double rate = 1.0;
  bool no_average = false;
};

int cmd_train(const TrainArgs& args) {
  Corpus train = read_corpus(args.train_path);
  auto schema = std::make_shared<const LabelSchema>(induce_schema(train));
  ChainModel model = train_base_perceptron(train, schema, args.epochs, args.rate, !args.no_average);
  model.save(args.model_path);
  std::cout << "labels: " << schema->size() << ", features: " << model.num_features() << "\n";
  if (!args.dev_path.empty()) {
    Corpus dev = read_corpus(args.dev_path);
    std::cout << "dev token accuracy: " << token_accuracy(model, dev) << "\n";
  }
  return 0;
}

struct ConstraintsArgs {
  std::string model_path, dev_path, out_path;
  double cutoff = 2.75;
  std::vector<std::string> templates = {"all"};
};

int cmd_constraints(const ConstraintsArgs& args) {
  ChainModel model = ChainModel::load(args.model_path);
  Corpus dev = read_corpus(args.dev_path);

  ConstraintSet set(model.schema_ptr());
  bool all = false;
  for (const std::string& t : args.templates) all = all || t == "all";
  auto wants = [&](const char* name) {
    if (all) return true;
    for (const std::string& t : args.templates)
      if (t == name) return true;
    return false;
  };
  if (wants("singleton")) set.add_singleton();
  if (wants("pairwise")) set.add_pairwise();
  if (wants("hierarchical")) set.add_hierarchical();

  std::vector<double> imp = importance_scores(set, dev, model);
  ConstraintSet kept = prune(set, imp, args.cutoff);
  std::vector<double> kept_imp;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (imp[i] >= args.cutoff) kept_imp.push_back(imp[i]);
  kept.save(args.out_path, kept_imp);
  std::cout << "instantiated " << set.size() << " constraints, kept " << kept.size()
            << " at cutoff " << args.cutoff << "\n";
  return 0;
}

struct LearnArgs {
  std::string model_path, dev_path, constraints_path, out_path;
  PenaltyLearnerConfig config;
  bool no_average = false;
};

int cmd_learn(const LearnArgs& args) {
  ChainModel model = ChainModel::load(args.model_path);
  Corpus dev = read_corpus(args.dev_path);
  ConstraintSet set = ConstraintSet::load(args.constraints_path, model.schema_ptr());

  PenaltyLearnerConfig config = args.config;
  config.average = !args.no_average;
  std::vector<double> penalties = learn_penalties(dev, set, model, config);
  set.set_penalties(penalties);
  set.save(args.out_path);

  ActiveSelection active = active_constraints(set, penalties);
  std::cout << "constraints: " << set.size() << ", active: " << active.set.size()
            << ", sparsity: " << active.sparsity << "\n";
  return 0;
}

struct PredictArgs {
  std::string model_path, input_path, out_path, constraints_path, trace_path;
  std::string mode = "soft-dd";
  int max_iters = 100;
  double step0 = 1.0;
};

int cmd_predict(const PredictArgs& args) {
  ChainModel model = ChainModel::load(args.model_path);
  Corpus input = read_corpus(args.input_path);

  std::unique_ptr<ConstraintSet> set;
  if (args.mode != "unconstrained") {
    if (args.constraints_path.empty())
      throw std::runtime_error("mode " + args.mode + " needs --constraints");
    set = std::make_unique<ConstraintSet>(
        ConstraintSet::load(args.constraints_path, model.schema_ptr()));
  }

  std::ofstream trace_out;
  if (!args.trace_path.empty()) trace_out = open_out(args.trace_path);

  Corpus output = input;
  long long converged = 0, iterations = 0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    ScoreTable scores = model.score_tokens(input.sequences[i].tokens);
    std::vector<int> labels;
    if (args.mode == "unconstrained") {
      labels = viterbi(scores).labels;
    } else {
      DDOptions options;
      options.max_iters = args.max_iters;
      options.step0 = args.step0;
      std::vector<TraceRow> trace;
      if (trace_out.is_open()) options.trace = &trace;
      PredictionResult res = args.mode == "hard-dd" ? hard_dd(scores, *set, options)
                                                    : soft_dd(scores, *set, options);
      converged += res.certificate == Certificate::Converged;
      iterations += res.iterations;
      labels = std::move(res.labels);
      if (trace_out.is_open()) {
        trace_out << "# sequence " << i << "\n";
        write_trace(trace_out, trace);
      }
    }
    for (std::size_t k = 0; k < labels.size(); ++k)
      output.sequences[i].labels[k] = model.schema().label(labels[k]);
  }
  write_corpus(args.out_path, output);
  if (args.mode != "unconstrained" && !input.empty()) {
    std::cout << "converged: " << static_cast<double>(converged) / static_cast<double>(input.size())
              << ", mean iterations: "
              << static_cast<double>(iterations) / static_cast<double>(input.size()) << "\n";
  }
  return 0;
}

struct EvalArgs {
  std::string gold_path, pred_path, report_path, json_path;
  std::string model_path, constraints_path;
  std::vector<int> caps;
  double step0 = 1.0;
};

int cmd_eval(const EvalArgs& args) {
  Corpus gold = read_corpus(args.gold_path);

  if (!args.caps.empty()) {
    if (args.model_path.empty() || args.constraints_path.empty())
      throw std::runtime_error("--caps needs --model and --constraints");
    ChainModel model = ChainModel::load(args.model_path);
    ConstraintSet set = ConstraintSet::load(args.constraints_path, model.schema_ptr());
    ConvergenceReport report =
        convergence_report(gold, model, set, set.penalties(), args.caps, args.step0);
    if (!args.report_path.empty()) {
      auto out = open_out(args.report_path);
      report.write_tsv(out);
    } else {
      report.write_tsv(std::cout);
    }
    if (!args.json_path.empty()) {
      auto out = open_out(args.json_path);
      report.write_json(out);
    }
    return 0;
  }

  if (args.pred_path.empty()) throw std::runtime_error("eval needs --pred (or --caps)");
  Corpus pred = read_corpus(args.pred_path);
  if (pred.size() != gold.size())
    throw std::runtime_error("gold and prediction corpora differ in sequence count");

  F1Accumulator acc;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (pred.sequences[i].size() != gold.sequences[i].size())
      throw std::runtime_error("sequence " + std::to_string(i) + " differs in length");
    auto parse_all = [](const Sequence& seq) {
      std::vector<ParsedLabel> parsed;
      parsed.reserve(seq.labels.size());
      for (const std::string& raw : seq.labels) parsed.push_back(parse_label(raw));
      return parsed;
    };
    std::vector<ParsedLabel> gold_parsed = parse_all(gold.sequences[i]);
    std::vector<ParsedLabel> pred_parsed = parse_all(pred.sequences[i]);
    acc.add(extract_segments(gold_parsed), extract_segments(pred_parsed));
  }
  EvalReport report = acc.report();
  if (!args.report_path.empty()) {
    auto out = open_out(args.report_path);
    report.write_tsv(out);
  } else {
    report.write_tsv(std::cout);
  }
  if (!args.json_path.empty()) {
    auto out = open_out(args.json_path);
    report.write_json(out);
  }
  std::cout << "micro F1: " << report.micro.f1() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence labeling with soft global constraints via dual decomposition"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file; flags win");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic citation-like corpus");
  gen->configurable();
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--seed", gen_args.seed, "Random seed");
  gen->add_option("--train-size", gen_args.train, "Training sequences");
  gen->add_option("--dev-size", gen_args.dev, "Development sequences");
  gen->add_option("--test-size", gen_args.test, "Test sequences");
  gen->add_option("--template", gen_args.schema_template, "Schema template: hierarchical|flat")
      ->check(CLI::IsMember({"hierarchical", "flat"}));
  gen->add_option("--confusion", gen_args.confusion, "Editor/author token confusion rate [0,1]");
  gen->add_option("--editor-prob", gen_args.editor_probability, "Editor block probability");
  gen->add_option("--min-len", gen_args.min_len, "Minimum sequence length");
  gen->add_option("--max-len", gen_args.max_len, "Maximum sequence length (soft)");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train the base chain model (averaged perceptron)");
  train->configurable();
  train->add_option("--train", train_args.train_path, "Training corpus")->required();
  train->add_option("--dev", train_args.dev_path, "Development corpus (accuracy report)");
  train->add_option("--model", train_args.model_path, "Output model file")->required();
  train->add_option("--epochs", train_args.epochs, "Perceptron epochs");
  train->add_option("--rate", train_args.rate, "Learning rate");
  train->add_flag("--no-average", train_args.no_average, "Disable weight averaging");

  ConstraintsArgs cons_args;
  CLI::App* cons = app.add_subcommand("constraints",
                                      "Instantiate constraint templates, score, and prune");
  cons->configurable();
  cons->add_option("--model", cons_args.model_path, "Base model file")->required();
  cons->add_option("--dev", cons_args.dev_path, "Development corpus")->required();
  cons->add_option("--out", cons_args.out_path, "Output constraint file")->required();
  cons->add_option("--cutoff", cons_args.cutoff, "Importance-score pruning cutoff");
  cons->add_option("--templates", cons_args.templates,
                   "Families: all | singleton pairwise hierarchical");

  LearnArgs learn_args;
  CLI::App* learn = app.add_subcommand("learn", "Learn constraint penalties on held-out data");
  learn->configurable();
  learn->add_option("--model", learn_args.model_path, "Base model file")->required();
  learn->add_option("--dev", learn_args.dev_path, "Development corpus")->required();
  learn->add_option("--constraints", learn_args.constraints_path, "Input constraint file")
      ->required();
  learn->add_option("--out", learn_args.out_path, "Output constraint file with penalties")
      ->required();
  learn->add_option("--epochs", learn_args.config.epochs, "Perceptron epochs");
  learn->add_option("--rate", learn_args.config.learning_rate, "Learning rate");
  learn->add_option("--inner-iters", learn_args.config.inner_max_iters,
                    "Soft-DD iteration budget per example");
  learn->add_option("--step0", learn_args.config.inner_step0, "Soft-DD initial step size");
  learn->add_option("--initial", learn_args.config.initial_penalty, "Initial penalty value");
  learn->add_flag("--no-average", learn_args.no_average, "Disable penalty averaging");

  PredictArgs pred_args;
  CLI::App* pred = app.add_subcommand("predict", "Decode a corpus");
  pred->configurable();
  pred->add_option("--model", pred_args.model_path, "Base model file")->required();
  pred->add_option("--input", pred_args.input_path, "Input corpus")->required();
  pred->add_option("--out", pred_args.out_path, "Output predictions file")->required();
  pred->add_option("--mode", pred_args.mode, "unconstrained | hard-dd | soft-dd")
      ->check(CLI::IsMember({"unconstrained", "hard-dd", "soft-dd"}));
  pred->add_option("--constraints", pred_args.constraints_path, "Constraint file (dd modes)");
  pred->add_option("--max-iters", pred_args.max_iters, "Iteration budget per example");
  pred->add_option("--step0", pred_args.step0, "Initial step size");
  pred->add_option("--trace", pred_args.trace_path, "Write per-iteration trace to this file");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Segment F1 or convergence report");
  eval->configurable();
  eval->add_option("--gold", eval_args.gold_path, "Gold corpus")->required();
  eval->add_option("--pred", eval_args.pred_path, "Predictions file (F1 mode)");
  eval->add_option("--report", eval_args.report_path, "Write TSV report here (default stdout)");
  eval->add_option("--json", eval_args.json_path, "Also write a JSON report");
  eval->add_option("--caps", eval_args.caps, "Iteration caps: switches to convergence mode");
  eval->add_option("--model", eval_args.model_path, "Base model (convergence mode)");
  eval->add_option("--constraints", eval_args.constraints_path, "Constraints (convergence mode)");
  eval->add_option("--step0", eval_args.step0, "Initial step size (convergence mode)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (train->parsed()) return cmd_train(train_args);
    if (cons->parsed()) return cmd_constraints(cons_args);
    if (learn->parsed()) return cmd_learn(learn_args);
    if (pred->parsed()) return cmd_predict(pred_args);
    if (eval->parsed()) return cmd_eval(eval_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
