// Copyright 2026 The factorscan Authors.
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


#include "factorscan/harness/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "factorscan/datagen/corpus.hpp"
#include "factorscan/error.hpp"
#include "factorscan/fusion/features.hpp"
#include "factorscan/fusion/rank.hpp"
#include "factorscan/harness/analysis.hpp"
#include "factorscan/harness/config.hpp"
#include "factorscan/harness/experiment.hpp"
#include "factorscan/harness/metrics.hpp"
#include "factorscan/ir/ir_record.hpp"

namespace factorscan::harness {

namespace {

namespace fsys = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("MissingPath", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("MissingPath", "cannot write " + path);
  f << j.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error("InvalidParams", "not a number list: '" + s + "'");
    }
  }
  return v;
}

fusion::Simplex<double> four(const std::string& s, const char* what) {
  const auto v = parse_list(s);
  if (v.size() != fusion::kBranches) throw Error("InvalidParams", std::string(what) + " needs 4 comma-separated values");
  return fusion::Simplex<double>(v[0], v[1], v[2], v[3]);
}

/// "1:2" or "0.5:0.95"
std::pair<double, double> parse_ratio(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error("InvalidParams", "ratio must look like POS:NEG");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("InvalidParams", "ratio must look like POS:NEG");
  }
}

/// Generated samples (with "source") are featurized; feature rows are read as is.
std::vector<fusion::Sample<double>> load_training_data(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string first;
  while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  const json probe = json::parse(first, nullptr, false);
  if (probe.is_discarded()) throw Error("InvalidDataset", "first line of " + path + " is not JSON");
  if (probe.contains("source")) {
    std::vector<datagen::LabeledSample> samples;
    std::istringstream all(text);
    for (std::string line; std::getline(all, line);)
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        samples.push_back(datagen::sample_from_json(json::parse(line)));
    return featurize(samples);
  }
  std::istringstream all(text);
  std::vector<fusion::Sample<double>> out;
  for (auto& s : fusion::read_dataset_jsonl(all)) out.push_back(std::move(s.sample));
  return out;
}

std::optional<minisol::CallKind> call_kind_from(const std::string& s) {
  return ir::parse_opcode(s);
}

/// Options every subcommand accepts.
struct Common {
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file (FACTORSCAN_* variables override it)");
  sub->add_option("-o,--out", c.out, "Write the report here instead of stdout");
}

RunConfig config_for(const Common& c) { return load_config(c.config); }

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Factor-based reentrancy analysis, scoring, data generation and fusion training"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // analyze / score ---------------------------------------------------------
  Common c_an;
  std::vector<std::string> an_paths;
  unsigned an_workers = 0;
  bool an_no_findings = false;
  auto* an = app.add_subcommand("analyze", "Factors and verdicts for contract sources");
  add_common(an, c_an);
  an->add_option("paths", an_paths, "Files or directories (.sol)");
  an->add_option("--workers", an_workers, "Worker threads (0 = hardware count)");
  an->add_flag("--no-findings-exit", an_no_findings, "Exit 0 even when a file is flagged");

  Common c_sc;
  std::vector<std::string> sc_paths;
  std::optional<double> sc_alpha, sc_tau;
  std::string sc_mode;
  auto* sc = app.add_subcommand("score", "Relaxed compositional scores");
  add_common(sc, c_sc);
  sc->add_option("paths", sc_paths, "Files or directories (.sol)")->required();
  sc->add_option("--alpha", sc_alpha, "Order sharpness");
  sc->add_option("--tau", sc_tau, "Decision offset");
  sc->add_option("--sum-mode", sc_mode, "candidate | full_grid")->check(CLI::IsMember({"candidate", "full_grid"}));

  // ingest-ir ---------------------------------------------------------------
  Common c_ir;
  std::string ir_path;
  bool ir_strict = false, ir_no_findings = false;
  std::vector<std::string> ir_weights;
  auto* ir = app.add_subcommand("ingest-ir", "Block-level factors from compiler-aware JSON records");
  add_common(ir, c_ir);
  ir->add_option("file", ir_path, "JSON record, array or JSONL")->required();
  ir->add_flag("--strict", ir_strict, "Reject unknown opcodes");
  ir->add_option("--opcode-weight", ir_weights, "OPCODE=W; W=0 drops the opcode from call detection");
  ir->add_flag("--no-findings-exit", ir_no_findings, "Exit 0 even when a record is flagged");

  // gen ---------------------------------------------------------------------
  Common c_gen;
  std::string gen_task = "FULL", gen_ratio = "1:1";
  std::size_t gen_count = 200;
  std::uint64_t gen_seed = 0;
  bool gen_factorial = false;
  auto* gen = app.add_subcommand("gen", "Generate a validated labelled corpus");
  add_common(gen, c_gen);
  gen->add_option("--task", gen_task, "E | D | O | FULL")->check(CLI::IsMember({"E", "D", "O", "FULL"}));
  gen->add_option("--count", gen_count, "Number of samples");
  gen->add_option("--ratio", gen_ratio, "Positive:negative ratio, e.g. 1:2");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_flag("--factorial", gen_factorial, "FULL only: all 16 factor patterns in equal shares");

  // train -------------------------------------------------------------------
  Common c_tr;
  std::string tr_data, tr_mask, tr_fixed, tr_prior, tr_history;
  std::optional<int> tr_steps, tr_batch;
  std::optional<double> tr_lr, tr_lambda, tr_tau_gate, tr_warmup, tr_delta;
  std::optional<std::uint64_t> tr_seed;
  bool tr_mixing = false, tr_fusion_only = false, tr_detached = false;
  auto* tr = app.add_subcommand("train", "Train the gated fusion model");
  add_common(tr, c_tr);
  tr->add_option("--data", tr_data, "Corpus JSONL (generated samples or feature rows)")->required();
  tr->add_option("--steps", tr_steps, "Total optimizer steps");
  tr->add_option("--batch", tr_batch, "Batch size");
  tr->add_option("--lr", tr_lr, "Learning rate");
  tr->add_option("--seed", tr_seed, "Seed");
  tr->add_option("--lambda", tr_lambda, "Alignment weight");
  tr->add_option("--tau-gate", tr_tau_gate, "Gate temperature");
  tr->add_option("--warmup", tr_warmup, "Warm-up ratio");
  tr->add_option("--mask", tr_mask, "Branch mask, e.g. 1,1,0,1");
  tr->add_option("--fixed-alpha", tr_fixed, "Fixed gate weights, 4 values");
  tr->add_option("--prior", tr_prior, "Branch prior, 4 values");
  tr->add_flag("--prior-mixing", tr_mixing, "Mix the prior into masked branches");
  tr->add_flag("--fusion-only", tr_fusion_only, "Sensitivities through the fusion path only");
  tr->add_flag("--detached", tr_detached, "Treat the alignment target as a constant");
  tr->add_option("--delta", tr_delta, "Accepted and ignored");
  tr->add_option("--history", tr_history, "Write per-step losses here");

  // infer / eval ------------------------------------------------------------
  Common c_inf;
  std::string inf_model, inf_data;
  auto* inf = app.add_subcommand("infer", "Predict with a trained model");
  add_common(inf, c_inf);
  inf->add_option("--model", inf_model, "Checkpoint JSON")->required();
  inf->add_option("--data", inf_data, "Corpus JSONL")->required();

  Common c_ev;
  std::string ev_preds, ev_model, ev_data, ev_confusion;
  std::optional<double> ev_threshold;
  bool ev_recall_only = false, ev_csv = false;
  auto* ev = app.add_subcommand("eval", "Confusion metrics and AUROC");
  add_common(ev, c_ev);
  ev->add_option("--predictions", ev_preds, "Output of infer");
  ev->add_option("--model", ev_model, "Checkpoint JSON (with --data)");
  ev->add_option("--data", ev_data, "Corpus JSONL (with --model)");
  ev->add_option("--confusion", ev_confusion, "TP,FP,FN,TN counts instead of predictions");
  ev->add_option("--threshold", ev_threshold, "Decision threshold (default 0.5)");
  ev->add_flag("--recall-only", ev_recall_only, "Report recall only (all-positive benchmarks)");
  ev->add_flag("--csv", ev_csv, "CSV row instead of JSON");

  // verify-rank -------------------------------------------------------------
  Common c_vr;
  std::string vr_data, vr_model;
  std::size_t vr_count = 160;
  std::uint64_t vr_seed = 0;
  auto* vr = app.add_subcommand("verify-rank", "Design-matrix and Jacobian rank certificates");
  add_common(vr, c_vr);
  vr->add_option("--data", vr_data, "FULL corpus JSONL (default: generate a factorial corpus)");
  vr->add_option("--count", vr_count, "Size of the generated corpus");
  vr->add_option("--seed", vr_seed, "Seed");
  vr->add_option("--model", vr_model, "Checkpoint for the Jacobian check (default: random parameters)");

  // prior-shift -------------------------------------------------------------
  Common c_ps;
  std::optional<std::size_t> ps_count;
  std::optional<int> ps_steps;
  std::string ps_seeds;
  auto* ps = app.add_subcommand("prior-shift", "AUROC trajectories under class-prior shift");
  add_common(ps, c_ps);
  ps->add_option("--train-count", ps_count, "Training corpus size per run");
  ps->add_option("--steps", ps_steps, "Steps per run");
  ps->add_option("--seeds", ps_seeds, "Comma-separated seeds");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitError;
  }

  try {
    if (an->parsed() || sc->parsed()) {
      const bool is_an = an->parsed();
      const Common& cm = is_an ? c_an : c_sc;
      RunConfig cfg = config_for(cm);
      if (sc_alpha) cfg.scoring.alpha = *sc_alpha;
      if (sc_tau) cfg.scoring.tau = *sc_tau;
      if (!sc_mode.empty()) cfg.scoring.sum_mode = sc_mode == "full_grid" ? SumMode::FullGrid : SumMode::CandidateRestricted;
      cfg.scoring.validate();
      auto paths = is_an ? an_paths : sc_paths;
      if (paths.empty()) paths = cfg.inputs;
      const auto files = collect_sources(paths);
      const auto reports = analyze_files(files, cfg.scoring, is_an ? an_workers : 0);
      json arr = json::array();
      std::size_t flagged = 0, failed = 0;
      for (const auto& r : reports) {
        if (!r.ok) ++failed;
        else if (r.verdict.vulnerable) ++flagged;
        if (is_an) {
          arr.push_back(to_json(r));
        } else {
          json j = {{"path", r.path}, {"ok", r.ok}};
          if (r.ok)
            j["score"] = {{"raw_f", r.score.raw_f}, {"centered_f", r.score.centered_f},
                          {"f_used", r.score.f_used()}, {"candidates", r.score.candidates},
                          {"probability", r.probability}};
          else
            j["error"] = {{"code", r.error_code}, {"msg", r.error}};
          arr.push_back(j);
        }
      }
      emit({{"files", arr}, {"summary", {{"files", reports.size()}, {"vulnerable", flagged}, {"errors", failed}}}},
           cm.out, out);
      if (failed) return kExitError;
      const bool findings_exit = cfg.findings_exit && !(is_an && an_no_findings);
      return is_an && findings_exit && flagged ? kExitFindings : kExitOk;
    }

    if (ir->parsed()) {
      RunConfig cfg = config_for(c_ir);
      ir::IngestOptions opt;
      opt.strict = ir_strict;
      for (const auto& w : ir_weights) {
        const auto eq = w.find('=');
        const auto kind = eq == std::string::npos ? std::nullopt : call_kind_from(w.substr(0, eq));
        if (!kind) throw Error("InvalidParams", "--opcode-weight expects OPCODE=W with a known opcode, got '" + w + "'");
        opt.opcode_weight[*kind] = std::stod(w.substr(eq + 1));
      }
      const auto records = ir::parse_ir_stream(read_file(ir_path), opt);
      json arr = json::array();
      std::size_t flagged = 0;
      for (const auto& rec : records) {
        const auto f = ir::record_to_factors(rec, opt);
        const auto v = boolean_rule(f.factors);
        if (v.vulnerable) ++flagged;
        json w = json::array();
        for (const auto& [cu, uu] : v.witnesses)
          w.push_back({{"c", f.unit_ids[static_cast<std::size_t>(cu)]}, {"u", f.unit_ids[static_cast<std::size_t>(uu)]}});
        json r = {{"units", f.unit_ids},
                  {"unit_kind", f.from_blocks ? "block" : "call_entry"},
                  {"factors", json::parse(factorscan::to_json(f.factors))},
                  {"verdict", {{"vulnerable", v.vulnerable}, {"witnesses", w}}},
                  {"warnings", rec.warnings}};
        if (rec.id) r["id"] = *rec.id;
        if (rec.sol_name) r["sol_name"] = *rec.sol_name;
        arr.push_back(r);
      }
      emit({{"records", arr}, {"summary", {{"records", records.size()}, {"vulnerable", flagged}}}}, c_ir.out, out);
      return cfg.findings_exit && !ir_no_findings && flagged ? kExitFindings : kExitOk;
    }

    if (gen->parsed()) {
      (void)config_for(c_gen);
      datagen::CorpusConfig cc;
      cc.task = datagen::parse_task(gen_task);
      cc.count = gen_count;
      std::tie(cc.pos_ratio, cc.neg_ratio) = parse_ratio(gen_ratio);
      cc.seed = gen_seed;
      cc.factorial = gen_factorial;
      if (gen_factorial && cc.task != datagen::Task::Full)
        throw Error("InvalidParams", "--factorial applies to the FULL task only");
      const auto corpus = datagen::gen_corpus(cc);
      if (c_gen.out.empty() || c_gen.out == "-") {
        for (const auto& s : corpus.samples) out << datagen::to_json(s).dump() << '\n';
        err << datagen::to_json(corpus.manifest).dump() << '\n';
      } else {
        fsys::create_directories(c_gen.out);
        std::ofstream f(fsys::path(c_gen.out) / "corpus.jsonl");
        for (const auto& s : corpus.samples) f << datagen::to_json(s).dump() << '\n';
        std::ofstream m(fsys::path(c_gen.out) / "manifest.json");
        m << datagen::to_json(corpus.manifest).dump(2) << '\n';
      }
      return kExitOk;
    }

    if (tr->parsed()) {
      RunConfig cfg = config_for(c_tr);
      if (tr_steps) cfg.train.total_steps = *tr_steps;
      if (tr_batch) cfg.train.batch_size = *tr_batch;
      if (tr_lr) cfg.train.learning_rate = *tr_lr;
      if (tr_seed) cfg.train.seed = *tr_seed;
      if (tr_lambda) cfg.gate.lambda_jaco = *tr_lambda;
      if (tr_tau_gate) cfg.gate.tau_gate = *tr_tau_gate;
      if (tr_warmup) cfg.gate.warmup_ratio = *tr_warmup;
      if (!tr_mask.empty()) cfg.gate.mask = four(tr_mask, "--mask").cast<int>();
      if (!tr_fixed.empty()) cfg.gate.fixed_alpha = four(tr_fixed, "--fixed-alpha");
      if (!tr_prior.empty()) cfg.gate.prior = four(tr_prior, "--prior");
      if (tr_mixing) cfg.gate.prior_mixing = true;
      if (tr_fusion_only) cfg.train.jaco.sensitivity = fusion::Sensitivity::FusionOnly;
      if (tr_detached) cfg.train.jaco.target = fusion::KlTarget::Detached;
      if (tr_delta) cfg.delta = tr_delta;
      if (cfg.delta) err << "warning: delta is accepted but not used by training\n";
      const auto data = load_training_data(tr_data);
      auto model = fusion::initialize(cfg.gate, cfg.hidden, cfg.train.seed);
      const auto res = fusion::train(data, std::move(model), cfg.train);
      emit(fusion::checkpoint_to_json(res.model, cfg.train), c_tr.out, out);
      if (!tr_history.empty()) {
        json h = json::array();
        for (const auto& l : res.history) h.push_back({{"ce", l.ce}, {"jaco", l.jaco}, {"total", l.total}});
        emit({{"warmup_steps", res.warmup_steps}, {"history", h}}, tr_history, out);
      }
      return kExitOk;
    }

    if (inf->parsed()) {
      (void)config_for(c_inf);
      const auto model = fusion::checkpoint_from_json(json::parse(read_file(inf_model)));
      const auto data = load_training_data(inf_data);
      json arr = json::array();
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto f = fusion::evaluate(data[i].x, model.gate, model.head);
        arr.push_back({{"index", i},
                       {"score", f.prob},
                       {"label", data[i].label},
                       {"gate", {f.omega(0), f.omega(1), f.omega(2), f.omega(3)}}});
      }
      emit({{"predictions", arr}}, c_inf.out, out);
      return kExitOk;
    }

    if (ev->parsed()) {
      RunConfig cfg = config_for(c_ev);
      const double thr = ev_threshold.value_or(cfg.threshold);
      const ReportMode mode = ev_recall_only ? ReportMode::RecallOnly : ReportMode::Auto;
      MetricsReport m;
      if (!ev_confusion.empty()) {
        const auto v = parse_list(ev_confusion);
        if (v.size() != 4) throw Error("InvalidParams", "--confusion needs TP,FP,FN,TN");
        m = metrics_from_confusion(static_cast<long long>(v[0]), static_cast<long long>(v[1]),
                                   static_cast<long long>(v[2]), static_cast<long long>(v[3]), mode);
      } else {
        std::vector<Prediction> preds;
        if (!ev_preds.empty()) {
          const json doc = json::parse(read_file(ev_preds));
          for (const auto& p : doc.at("predictions"))
            preds.push_back({p.at("score").get<double>(), p.at("label").get<int>()});
        } else if (!ev_model.empty() && !ev_data.empty()) {
          const auto model = fusion::checkpoint_from_json(json::parse(read_file(ev_model)));
          preds = predict_all(model, load_training_data(ev_data));
        } else {
          throw Error("InvalidParams", "eval needs --predictions, --confusion, or --model with --data");
        }
        m = compute_metrics(preds, thr, mode);
      }
      if (ev_csv) {
        std::ostringstream os;
        os << csv_header() << '\n' << to_csv_row(m) << '\n';
        if (c_ev.out.empty() || c_ev.out == "-") out << os.str();
        else std::ofstream(c_ev.out) << os.str();
      } else {
        emit(to_json(m), c_ev.out, out);
      }
      return kExitOk;
    }

    if (vr->parsed()) {
      RunConfig cfg = config_for(c_vr);
      std::vector<datagen::LabeledSample> samples;
      std::vector<std::size_t> certificate;
      if (!vr_data.empty()) {
        std::istringstream in(read_file(vr_data));
        for (std::string line; std::getline(in, line);)
          if (line.find_first_not_of(" \t\r") != std::string::npos)
            samples.push_back(datagen::sample_from_json(json::parse(line)));
      } else {
        datagen::CorpusConfig cc;
        cc.task = datagen::Task::Full;
        cc.count = vr_count;
        cc.seed = vr_seed;
        cc.factorial = true;
        auto corpus = datagen::gen_corpus(cc);
        samples = std::move(corpus.samples);
      }
      Eigen::MatrixXi bits(static_cast<Eigen::Index>(samples.size()), 4);
      const std::vector<datagen::FactorBits> anchor = {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
      std::vector<bool> have(anchor.size(), false);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].labels.factor_bits) throw Error("InvalidDataset", "verify-rank needs FULL samples with factor bits");
        const auto& b = *samples[i].labels.factor_bits;
        for (int k = 0; k < 4; ++k) bits(static_cast<Eigen::Index>(i), k) = b[static_cast<std::size_t>(k)];
        for (std::size_t a = 0; a < anchor.size(); ++a)
          if (!have[a] && b == anchor[a]) {
            have[a] = true;
            certificate.push_back(i);
          }
      }
      auto report_json = [](const fusion::RankReport& r) {
        return json{{"rank", r.rank},
                    {"min_eigenvalue_second_moment", r.min_eigenvalue_second_moment},
                    {"balance_epsilon", r.balance_epsilon},
                    {"min_eigenvalue_covariance", r.min_eigenvalue_covariance},
                    {"covariance_bound_holds", r.covariance_bound_holds}};
      };
      const auto full = fusion::design_matrix_rank(bits);
      json cert = nullptr;
      int cert_rank = 0;
      if (!certificate.empty()) {
        Eigen::MatrixXi sub(static_cast<Eigen::Index>(certificate.size()), 4);
        for (std::size_t i = 0; i < certificate.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = bits.row(static_cast<Eigen::Index>(certificate[i]));
        const auto r = fusion::design_matrix_rank(sub);
        cert_rank = r.rank;
        cert = report_json(r);
        cert["indices"] = certificate;
      }
      // Jacobian columns at a real sample, full mask and two branches masked.
      fusion::Model<double> model;
      if (!vr_model.empty()) {
        model = fusion::checkpoint_from_json(json::parse(read_file(vr_model)));
      } else {
        std::mt19937_64 rng(vr_seed);
        std::normal_distribution<double> g(0.0, 1.0);
        model = fusion::initialize(cfg.gate, cfg.hidden, vr_seed);
        for (Eigen::Index i = 0; i < model.gate.U.size(); ++i) model.gate.U.data()[i] = g(rng);
        for (Eigen::Index i = 0; i < model.head.w.size(); ++i) model.head.w(i) = g(rng);
        for (int k = 0; k < 4; ++k) model.gate.c(k) = g(rng);
      }
      fusion::BranchFeatures<double> x;
      x.Z = fusion::BranchMatrix<double>::Zero(model.dim(), fusion::kBranches);
      {
        std::mt19937_64 rng(vr_seed + 1);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (Eigen::Index i = 0; i < x.Z.size(); ++i) x.Z.data()[i] = u(rng);
      }
      auto masked = model.gate;
      masked.mask << 1, 1, 0, 0;
      masked.fixed_alpha.reset();
      const int jr_full = fusion::jacobian_column_rank(model.gate, model.head, x);
      const int jr_masked = fusion::jacobian_column_rank(masked, model.head, x);
      const bool ok = cert_rank == 4 && full.covariance_bound_holds && jr_full == 4 && jr_masked <= 2;
      emit({{"samples", samples.size()},
            {"design", report_json(full)},
            {"certificate", cert},
            {"jacobian_rank_full_mask", jr_full},
            {"jacobian_rank_two_masked", jr_masked},
            {"certified", ok}},
           c_vr.out, out);
      return ok ? kExitOk : kExitFindings;
    }

    if (ps->parsed()) {
      RunConfig cfg = config_for(c_ps);
      if (ps_count) cfg.prior_shift.train_count = *ps_count;
      if (ps_steps) cfg.train.total_steps = *ps_steps;
      if (!ps_seeds.empty()) {
        cfg.seeds.clear();
        for (double s : parse_list(ps_seeds)) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
      }
      cfg.validate();
      emit(to_json(run_prior_shift(cfg)), c_ps.out, out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error [" << e.code() << "]: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace factorscan::harness
