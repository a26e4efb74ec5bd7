// Copyright 2026 The qrw Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qrw/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "qrw/cli/run_config.hpp"
#include "qrw/dataset_io.hpp"
#include "qrw/errors.hpp"
#include "qrw/eval/evaluate.hpp"
#include "qrw/eval/latency.hpp"
#include "qrw/eval/sweep.hpp"
#include "qrw/model/checkpoint.hpp"
#include "qrw/model/trainer.hpp"
#include "qrw/stats.hpp"

namespace qrw {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json = false;
  bool trace = false;
  bool force = false;
  std::string gold_program;
  std::vector<std::string> set;
  std::string checkpoint;
  std::string context;
  std::optional<std::string> followup;
  std::vector<std::string> files;
};

RunConfig EffectiveConfig(const Flags &f) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::Load(f.config);
  for (const auto &kv : f.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInputError("--set expects key=value, got " + kv);
    c.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) c.model.seed = *f.seed;
  if (!f.checkpoint.empty()) c.checkpoint = f.checkpoint;
  c.model.Validate();
  return c;
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  out << text;
}

// Creates `dir`; an existing non-empty directory needs --force (or a resume).
fs::path PrepareOut(const std::string &dir, const Flags &f, const RunConfig &c,
                    bool allow_existing = false) {
  if (dir.empty()) throw InvalidInputError("missing --out directory");
  const fs::path p(dir);
  if (fs::exists(p) && !fs::is_directory(p)) {
    throw InvalidInputError(dir + " exists and is not a directory");
  }
  if (fs::exists(p) && !fs::is_empty(p) && !f.force && !allow_existing) {
    throw InvalidInputError("output directory " + dir +
                            " is not empty; pass --force to overwrite");
  }
  fs::create_directories(p);
  WriteText(p / "config.txt", c.ToText());
  return p;
}

fs::path SingleFile(const RunConfig &c, UseCase u) {
  return fs::path(c.data_dir) / (std::string(UseCaseName(u)) + ".jsonl");
}

fs::path CompFile(const RunConfig &c) { return fs::path(c.data_dir) / "compositional.jsonl"; }

std::vector<LabeledExample> ReadExisting(const fs::path &p) {
  if (!fs::exists(p)) {
    throw InvalidInputError("missing dataset " + p.string() + "; run datagen first");
  }
  return ReadDataset(p);
}

std::vector<LabeledExample> FilterSplit(std::vector<LabeledExample> all, Split s) {
  std::erase_if(all, [s](const LabeledExample &ex) { return ex.split != s; });
  return all;
}

std::vector<LabeledExample> LoadSingle(const RunConfig &c, Split s) {
  std::vector<LabeledExample> out;
  for (UseCase u : kAllUseCases) {
    auto part = FilterSplit(ReadExisting(SingleFile(c, u)), s);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<LabeledExample> LoadComp(const RunConfig &c, Split s) {
  return FilterSplit(ReadExisting(CompFile(c)), s);
}

Model LoadModel(const RunConfig &c) {
  if (c.checkpoint.empty()) throw InvalidInputError("no checkpoint given (--checkpoint)");
  return LoadCheckpoint(c.checkpoint);
}

int CmdDatagen(const Flags &f, RunConfig c, std::ostream &out) {
  if (!f.out.empty()) c.data_dir = f.out;
  const auto dir = PrepareOut(c.data_dir, f, c);
  const auto gen = DataGenerator::FromDirectory(c.data_root);
  nlohmann::json stats = nlohmann::json::object();
  std::string text;
  auto record = [&](const std::string &name, const std::vector<LabeledExample> &data) {
    const auto s = ComputeStats(data);
    stats[name] = StatsToJson(s);
    text += name + " " + FormatStats(s) + "\n";
  };
  for (UseCase u : kAllUseCases) {
    const auto data = gen.GenerateSingleTask(u, c.examples_per_use_case, c.model.seed);
    WriteDataset(SingleFile(c, u), data);
    record(std::string(UseCaseName(u)), data);
  }
  if (c.compositional_examples > 0) {
    const auto data = gen.GenerateCompositional(c.compositional_examples, c.model.seed);
    WriteDataset(CompFile(c), data);
    record("compositional", data);
  }
  WriteText(dir / "stats.json", stats.dump(2) + "\n");
  WriteText(dir / "stats.txt", text);
  if (f.json) {
    out << stats.dump() << '\n';
  } else {
    out << text << "wrote " << dir.string() << '\n';
  }
  return 0;
}

int CmdTrain(const Flags &f, const RunConfig &c, std::ostream &out, std::ostream &err) {
  const auto dir = PrepareOut(f.out, f, c, c.resume);
  auto train = LoadSingle(c, Split::kTrain);
  const auto valid = LoadSingle(c, Split::kValid);
  if (c.compositional_train_size > 0) {
    const auto comp = LoadComp(c, Split::kTrain);
    if (comp.size() < c.compositional_train_size) {
      throw InvalidInputError("compositional_train_size exceeds the " +
                              std::to_string(comp.size()) + " compositional training examples");
    }
    train.insert(train.end(), comp.begin(),
                 comp.begin() + static_cast<std::ptrdiff_t>(c.compositional_train_size));
  }
  if (!f.json) {
    out << "learning_rate = " << c.model.learning_rate << "\nbatch_size = "
        << c.model.batch_size << "\ndropout = " << c.model.dropout << "\ntrain examples "
        << train.size() << ", valid examples " << valid.size() << '\n';
  }
  TrainOptions o;
  o.state_path = dir / "train_state.bin";
  o.resume = c.resume;
  o.on_epoch = [&](const EpochRecord &r) {
    if (f.json) {
      out << r.ToJson().dump() << '\n';
    } else {
      err << "epoch " << r.epoch << " L " << r.loss.total << " (RD " << r.loss.rd << ", RR "
          << r.loss.rr << ", Del " << r.loss.del << ") valid exact match "
          << r.valid_exact_match << " in " << r.seconds << " s\n";
    }
  };
  const auto res = Train(train, valid, c.model, o);
  std::string log;
  for (const auto &r : res.log) log += r.ToJson().dump() + "\n";
  WriteText(dir / "train_log.jsonl", log);
  SaveCheckpoint(res.best, dir / "best.ckpt");
  SaveCheckpoint(res.last, dir / "last.ckpt");
  if (!f.json) {
    out << "best epoch " << res.best_epoch << " valid exact match " << res.best_exact_match
        << "\nwrote " << (dir / "best.ckpt").string() << '\n';
  }
  return 0;
}

std::vector<LabeledExample> EvalData(const RunConfig &c) {
  const auto split = *ParseSplit(c.eval_split);
  std::vector<LabeledExample> data;
  if (c.eval_sets != "compositional") data = LoadSingle(c, split);
  if (c.eval_sets != "single") {
    const auto comp = LoadComp(c, split);
    data.insert(data.end(), comp.begin(), comp.end());
  }
  return data;
}

int CmdEval(const Flags &f, const RunConfig &c, std::ostream &out) {
  const auto data = EvalData(c);
  std::optional<Model> model;
  if (!c.oracle) model = LoadModel(c);
  const auto report = Evaluate(c.oracle ? OraclePredictor() : ModelPredictor(*model), data);
  if (!f.out.empty()) {
    const auto dir = PrepareOut(f.out, f, c);
    WriteText(dir / "report.json", ReportToJson(report).dump() + "\n");
    WriteText(dir / "report.txt", FormatReport(report));
  }
  out << (f.json ? ReportToJson(report).dump() + "\n" : FormatReport(report));
  return 0;
}

int CmdSweep(const Flags &f, const RunConfig &c, std::ostream &out, std::ostream &err) {
  const auto sizes = c.SweepSizes();
  std::optional<fs::path> dir;
  if (!f.out.empty()) dir = PrepareOut(f.out, f, c);
  const auto single_train = LoadSingle(c, Split::kTrain);
  const auto single_valid = LoadSingle(c, Split::kValid);
  const auto comp_train = LoadComp(c, Split::kTrain);
  const auto comp_test = LoadComp(c, Split::kTest);
  const auto base = TrainingFactory(c.model);
  const ModelFactory factory = [&](std::span<const LabeledExample> train,
                                   std::span<const LabeledExample> valid) {
    err << "training on " << train.size() << " examples\n";
    return base(train, valid);
  };
  const auto points =
      CompositionSweep({single_train, single_valid, comp_train, comp_test}, sizes, factory);
  std::string lines;
  for (const auto &p : SweepToJson(points)) lines += p.dump() + "\n";
  if (dir) {
    WriteText(*dir / "sweep.jsonl", lines);
    WriteText(*dir / "sweep.tsv", SweepPlotTable(points));
  }
  if (f.json) {
    out << SweepToJson(points).dump() << '\n';
  } else {
    out << "size  exact_match  oracle  epochs\n";
    for (const auto &p : points) {
      out << p.size << "  " << p.exact_match << "  " << p.oracle_exact_match << "  "
          << p.epochs << '\n';
    }
  }
  return 0;
}

int CmdBench(const Flags &f, const RunConfig &c, std::ostream &out) {
  if (c.bench_reps < 100) {
    throw InvalidInputError("bench needs bench_reps >= 100, got " +
                            std::to_string(c.bench_reps));
  }
  const auto model = LoadModel(c);
  auto data = LoadSingle(c, Split::kTest);
  if (fs::exists(CompFile(c))) {
    const auto comp = LoadComp(c, Split::kTest);
    data.insert(data.end(), comp.begin(), comp.end());
  }
  std::map<std::size_t, int> taken;
  std::vector<TokenSequence> inputs;
  for (const auto &ex : data) {
    const auto len = ex.rewrite.size();
    if (len < 2 || len > 15 || taken[len] >= c.bench_per_length) continue;
    ++taken[len];
    inputs.push_back(ex.Sequence());
  }
  const auto report = LatencyBench(model, inputs, c.bench_warmup, c.bench_reps);
  std::vector<int> lengths;
  for (int T = 8; T <= model.config.max_len; T *= 2) lengths.push_back(T);
  const auto scaling = EncoderScaling(model, lengths, 50);
  auto j = LatencyToJson(report);
  j["scaling"] = nlohmann::json::array();
  std::string text = FormatLatency(report) + "input_len  median_us\n";
  for (const auto &r : scaling) {
    j["scaling"].push_back({{"input_length", r.input_length}, {"median_us", r.median_us}});
    text += std::to_string(r.input_length) + "  " + std::to_string(r.median_us) + "\n";
  }
  if (!f.out.empty()) {
    const auto dir = PrepareOut(f.out, f, c);
    WriteText(dir / "latency.json", j.dump() + "\n");
    WriteText(dir / "latency.txt", text);
  }
  out << (f.json ? j.dump() + "\n" : text);
  return 0;
}

int CmdRewrite(const Flags &f, const RunConfig &c, std::ostream &out) {
  if (!f.followup || Tokenize(*f.followup).empty()) {
    throw InvalidInputError("the follow-up must not be empty");
  }
  const auto seq = ConcatTurns(Tokenize(f.context), Tokenize(*f.followup));
  EditProgram program;
  if (!f.gold_program.empty()) {
    std::ifstream in(f.gold_program);
    if (!in) throw InvalidInputError("cannot open " + f.gold_program);
    try {
      program = ProgramFromJson(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception &e) {
      throw InvalidInputError(std::string("bad program file: ") + e.what());
    }
  } else {
    program = LoadModel(c).Predict(seq);
  }
  const auto result = ApplyProgram(seq, program);
  const auto rewrite = JoinTokens(result.tokens);
  if (f.json) {
    nlohmann::json trace = nlohmann::json::array();
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      trace.push_back({{"use_case", UseCaseName(result.applied_order[i])},
                       {"text", result.trace[i]}});
    }
    nlohmann::json dropped = nlohmann::json::array();
    for (const auto &v : result.dropped) {
      dropped.push_back({{"use_case", UseCaseName(v.use_case)},
                         {"reason", ViolationName(v.kind)}});
    }
    out << nlohmann::json{{"input", JoinTokens(seq.Texts())},
                          {"rewrite", rewrite},
                          {"tokens", result.tokens},
                          {"program", ProgramToJson(program)},
                          {"trace", trace},
                          {"dropped", dropped}}
               .dump()
        << '\n';
    return 0;
  }
  if (f.trace) {
    out << "input: " << JoinTokens(seq.Texts()) << '\n';
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      out << "step " << i + 1 << " " << UseCaseName(result.applied_order[i]) << ": "
          << result.trace[i] << '\n';
    }
    for (const auto &v : result.dropped) {
      out << "dropped " << UseCaseName(v.use_case) << ": " << ViolationName(v.kind) << '\n';
    }
    out << "program: " << ProgramToJson(program).dump() << '\n';
  }
  out << rewrite << '\n';
  return 0;
}

int CmdOracleVerify(const Flags &f, const RunConfig &c, std::ostream &out) {
  std::vector<fs::path> files(f.files.begin(), f.files.end());
  if (files.empty()) {
    for (UseCase u : kAllUseCases) files.push_back(SingleFile(c, u));
    if (fs::exists(CompFile(c))) files.push_back(CompFile(c));
  }
  std::size_t checked = 0;
  nlohmann::json mismatches = nlohmann::json::array();
  for (const auto &file : files) {
    for (const auto &ex : ReadExisting(file)) {
      ++checked;
      if (auto why = CheckExample(ex)) {
        mismatches.push_back({{"file", file.string()}, {"id", ex.id}, {"reason", *why}});
      }
    }
  }
  const bool pass = mismatches.empty();
  if (f.json) {
    out << nlohmann::json{{"checked", checked}, {"mismatches", mismatches}, {"pass", pass}}
               .dump()
        << '\n';
  } else {
    for (const auto &m : mismatches) {
      out << "MISMATCH " << m["id"].get<std::string>() << " ("
          << m["file"].get<std::string>() << "): " << m["reason"].get<std::string>() << '\n';
    }
    out << (pass ? "PASS" : "FAIL") << ": checked " << checked << " examples, "
        << mismatches.size() << " mismatches\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Conversational query rewriting: data generation, training, evaluation"};
  app.name("qrw");
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "overrides the seed key");
  app.add_option("--out", f.out, "output directory");
  app.add_flag("--json", f.json, "machine-readable output");
  app.add_flag("--trace", f.trace, "rewrite: print every substitution step");
  app.add_flag("--force", f.force, "allow writing into a non-empty directory");
  app.add_option("--gold-program", f.gold_program,
                 "rewrite: apply this JSON edit program instead of the model");
  app.add_option("--set", f.set, "key=value config override (repeatable)");

  auto *datagen = app.add_subcommand("datagen", "generate single-task and compositional data");
  auto *train = app.add_subcommand("train", "train a model, keep the best checkpoint");
  auto *eval = app.add_subcommand("eval", "exact match per use case");
  auto *sweep = app.add_subcommand("sweep", "few-shot composition curve");
  auto *bench = app.add_subcommand("bench", "single-threaded inference latency");
  auto *rewrite = app.add_subcommand("rewrite", "rewrite one context and follow-up");
  auto *verify = app.add_subcommand("oracle-verify", "re-apply every gold program");
  for (auto *sub : {eval, bench, rewrite}) {
    sub->add_option("--checkpoint", f.checkpoint, "model checkpoint");
  }
  rewrite->add_option("--context", f.context, "previous turn (may be empty)");
  rewrite->add_option("--followup", f.followup, "current turn")->required();
  verify->add_option("files", f.files, "dataset files (default: every file in data_dir)");

  std::vector<std::string> argv_store{"qrw"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err);
  }

  try {
    const auto c = EffectiveConfig(f);
    if (*datagen) return CmdDatagen(f, c, out);
    if (*train) return CmdTrain(f, c, out, err);
    if (*eval) return CmdEval(f, c, out);
    if (*sweep) return CmdSweep(f, c, out, err);
    if (*bench) return CmdBench(f, c, out);
    if (*rewrite) return CmdRewrite(f, c, out);
    if (*verify) return CmdOracleVerify(f, c, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qrw
