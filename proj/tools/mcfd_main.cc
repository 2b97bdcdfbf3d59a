// tools/mcfd_main.cc
//
// Copyright 2025  The mcfd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front door: one subcommand per pipeline stage plus the full
// runner, the optimizer, and plot-data export. Exit codes: 0 ok, 1 internal
// error, 2 bad input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcfd/chanclust.h"
#include "mcfd/common.h"
#include "mcfd/config.h"
#include "mcfd/embedding.h"
#include "mcfd/frontend.h"
#include "mcfd/hyperopt.h"
#include "mcfd/manifest.h"
#include "mcfd/pipeline.h"
#include "mcfd/scoring.h"
#include "mcfd/vad.h"
#include "mcfd/wav.h"
#include "mcfd/wpe.h"

namespace {

using nlohmann::json;

mcfd::PipelineConfig LoadConfig(const std::string& path) {
  if (path.empty()) {
    mcfd::PipelineConfig cfg;
    cfg.ApplyEnvOverrides();
    return cfg;
  }
  return mcfd::PipelineConfig::Load(path);
}

int ExitKind(const mcfd::PipelineResult& result) {
  bool any_internal = false, any_input = false;
  for (const auto& s : result.sessions) {
    if (s.failure == mcfd::FailureKind::kInternal) any_internal = true;
    if (s.failure == mcfd::FailureKind::kInput) any_input = true;
  }
  if (any_internal) return 1;
  if (any_input) return 2;
  return 0;
}

int CmdRun(const std::string& manifest_path, const std::string& config_path,
           const std::string& out_dir, int session_workers) {
  mcfd::SessionManifest manifest = mcfd::ReadSessionManifest(manifest_path);
  mcfd::PipelineConfig cfg = LoadConfig(config_path);
  mcfd::PipelineOptions opts;
  opts.run_dir = out_dir;
  opts.session_workers = session_workers;
  mcfd::PipelineResult result = mcfd::RunPipeline(manifest, cfg, opts);
  for (const auto& s : result.sessions) {
    if (s.failure == mcfd::FailureKind::kNone) {
      std::cout << s.session_id << ": ok, " << s.segments.size()
                << " segments";
      if (s.scored) std::cout << ", DER " << 100.0 * s.report.der << "%";
      std::cout << "\n";
    } else {
      std::cout << s.session_id << ": FAILED: " << s.error << "\n";
    }
  }
  if (result.any_scored)
    std::cout << "report: " << result.run_dir << "/report.json\n";
  return ExitKind(result);
}

int CmdClusterChannels(const std::string& in_path,
                       const std::string& config_path,
                       const std::string& out_path,
                       const std::string& labels_path) {
  mcfd::AudioSession audio = mcfd::ReadWav(in_path);
  mcfd::ChannelClusterResult result =
      mcfd::ClusterChannels(audio, LoadConfig(config_path)
                                       .MakeChanclustOptions());
  mcfd::WriteWav(out_path, result.clustered);
  json j;
  j["labels"] = result.assignment.labels;
  j["num_clusters"] = result.assignment.num_clusters;
  j["channels"] = audio.channel_ids;
  if (labels_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(labels_path);
    if (!out)
      throw mcfd::Error(mcfd::StrCat("cannot open ", labels_path));
    out << j.dump(2) << "\n";
  }
  return 0;
}

int CmdDereverb(const std::string& in_path, const std::string& config_path,
                const std::string& out_path) {
  mcfd::AudioSession audio = mcfd::ReadWav(in_path);
  mcfd::WriteWav(out_path,
                 mcfd::WpeDereverberate(
                     audio, LoadConfig(config_path).MakeWpeConfig()));
  return 0;
}

int CmdVad(const std::string& in_path, const std::string& config_path,
           const std::string& out_path, const std::string& spans_path) {
  mcfd::AudioSession audio = mcfd::ReadWav(in_path);
  mcfd::PipelineConfig cfg = LoadConfig(config_path);
  mcfd::EnergyVadOptions opts = cfg.MakeVadOptions();
  std::vector<mcfd::FrameVadTrack> tracks;
  for (int c = 0; c < audio.num_channels(); ++c) {
    mcfd::AudioSession ch;
    ch.sample_rate = audio.sample_rate;
    ch.samples = {audio.samples[c]};
    ch.channel_ids = {audio.channel_ids[c]};
    tracks.push_back(mcfd::EnergyVad(ch, opts));
  }
  mcfd::FrameVadTrack pooled = mcfd::PoolMultichannelVad(
      tracks, cfg.GetNumber("vad.drop_threshold"));
  mcfd::WriteFvad(out_path, pooled.probs);
  if (!spans_path.empty()) {
    json spans = json::array();
    for (const auto& span :
         mcfd::TrackToSpans(pooled, cfg.GetNumber("vad.threshold")))
      spans.push_back({span.begin_s, span.end_s});
    std::ofstream out(spans_path);
    if (!out) throw mcfd::Error(mcfd::StrCat("cannot open ", spans_path));
    out << json{{"speech_spans", spans}}.dump(2) << "\n";
  }
  return 0;
}

std::unique_ptr<mcfd::EmbeddingProvider> MakeEmbedder(
    const mcfd::PipelineConfig& cfg, const std::string& session_id) {
  std::string kind = cfg.GetString("diarizer.embedding");
  if (kind == "filterbank")
    return std::make_unique<mcfd::FilterbankEmbeddingProvider>();
  if (kind == "sidecar")
    return std::make_unique<mcfd::SidecarEmbeddingProvider>(
        cfg.GetString("diarizer.embedding_sidecar_dir"), session_id,
        static_cast<int>(
            cfg.GetNumber("diarizer.embedding_sidecar_dimension")));
  throw mcfd::InputError(
      mcfd::StrCat("unknown diarizer.embedding ", kind));
}

std::unique_ptr<mcfd::VadProvider> MakeVad(const mcfd::PipelineConfig& cfg,
                                           const std::string& session_id) {
  std::string provider = cfg.GetString("vad.provider");
  if (provider == "energy")
    return std::make_unique<mcfd::EnergyVadProvider>(cfg.MakeVadOptions());
  if (provider == "sidecar")
    return std::make_unique<mcfd::SidecarVadProvider>(
        cfg.GetString("vad.sidecar_dir"), session_id,
        cfg.GetNumber("vad.frame_length_ms"));
  throw mcfd::InputError(mcfd::StrCat("unknown vad.provider ", provider));
}

int CmdDiarize(const std::string& in_path, const std::string& config_path,
               const std::string& session_id, const std::string& out_path) {
  mcfd::AudioSession audio = mcfd::ReadWav(in_path);
  mcfd::PipelineConfig cfg = LoadConfig(config_path);
  auto embedder = MakeEmbedder(cfg, session_id);
  auto vad = MakeVad(cfg, session_id);
  mcfd::DiarizationResult result = mcfd::Diarize(
      audio, *embedder, *vad, cfg.MakeDiarizerOptions(session_id));
  mcfd::WriteRttmFile(out_path, session_id, result.segments);
  std::cout << result.num_speakers << " speakers, "
            << result.segments.size() << " segments\n";
  return 0;
}

int CmdGss(const std::string& in_path, const std::string& rttm_path,
           const std::string& config_path, const std::string& session_id,
           const std::string& out_dir) {
  mcfd::AudioSession audio = mcfd::ReadWav(in_path);
  mcfd::PipelineConfig cfg = LoadConfig(config_path);
  auto all = mcfd::ReadRttm(rttm_path);
  auto it = all.find(session_id);
  if (it == all.end())
    throw mcfd::InputError(
        mcfd::StrCat("RTTM ", rttm_path, " has no session ", session_id));
  std::filesystem::create_directories(out_dir);
  mcfd::FrontendConfig fe = cfg.MakeFrontendConfig();
  double context_s = cfg.GetNumber("gssfe.context_s");
  for (const auto& seg : it->second) {
    mcfd::UtteranceRequest req;
    req.begin_s = seg.begin_s;
    req.end_s = seg.end_s;
    req.speaker = seg.speaker;
    req.context_s = context_s;
    req.all_segments = it->second;
    mcfd::AudioSession utt = mcfd::ExtractUtterance(audio, req, fe);
    std::string path = mcfd::StrCat(
        out_dir, "/",
        mcfd::UtteranceFileName(session_id, seg.speaker, seg.begin_s,
                                seg.end_s));
    mcfd::WriteWav(path, utt);
    std::cout << path << "\n";
  }
  return 0;
}

int CmdScore(const std::string& ref_path, const std::string& hyp_path,
             const std::string& ref_tx, const std::string& hyp_tx,
             const std::string& config_path, const std::string& out_path,
             const std::string& table_path) {
  mcfd::PipelineConfig cfg = LoadConfig(config_path);
  auto refs = mcfd::ReadRttm(ref_path);
  auto hyps = mcfd::ReadRttm(hyp_path);
  std::map<std::string, mcfd::SpeakerTranscripts> ref_tx_all, hyp_tx_all;
  if (!ref_tx.empty()) ref_tx_all = mcfd::ReadTranscriptManifest(ref_tx);
  if (!hyp_tx.empty()) hyp_tx_all = mcfd::ReadTranscriptManifest(hyp_tx);

  std::map<std::string, mcfd::ScoreReport> reports;
  for (const auto& [session, ref_segs] : refs) {
    mcfd::DiarSegments hyp_segs;
    auto hit = hyps.find(session);
    if (hit != hyps.end()) hyp_segs = hit->second;
    mcfd::DerResult der =
        mcfd::ComputeDer(ref_segs, hyp_segs, cfg.MakeDerOptions());
    mcfd::JerResult jer = mcfd::ComputeJer(ref_segs, hyp_segs);
    mcfd::ScoreReport rep;
    rep.der = der.der;
    rep.jer = jer.jer;
    rep.miss_s = der.miss_s;
    rep.fa_s = der.fa_s;
    rep.confusion_s = der.confusion_s;
    rep.ref_speech_s = der.ref_speech_s;
    auto rtx = ref_tx_all.find(session);
    if (rtx != ref_tx_all.end()) {
      mcfd::SpeakerTranscripts hyp_words;
      auto htx = hyp_tx_all.find(session);
      if (htx != hyp_tx_all.end()) hyp_words = htx->second;
      mcfd::SaWerResult wer = mcfd::ComputeSaWer(rtx->second, hyp_words);
      rep.wer = wer.wer();
      rep.substitutions = wer.counts.substitutions;
      rep.insertions = wer.counts.insertions;
      rep.deletions = wer.counts.deletions;
      rep.ref_words = wer.counts.ref_words;
      rep.has_wer = true;
    }
    reports[session] = rep;
  }
  if (reports.empty()) throw mcfd::InputError("no sessions to score");
  mcfd::WriteScoreReportJson(out_path, reports);
  if (!table_path.empty()) mcfd::WriteScoreTable(table_path, reports);
  for (const auto& [session, rep] : reports) {
    std::cout << session << ": DER " << 100.0 * rep.der << "% JER "
              << 100.0 * rep.jer << "%";
    if (rep.has_wer) std::cout << " WER " << 100.0 * rep.wer << "%";
    std::cout << "\n";
  }
  return 0;
}

int CmdOptimize(const std::string& manifest_path,
                const std::string& config_path, const std::string& space_path,
                const std::string& metric, const std::string& strategy,
                int trials, int parallel, const std::string& sampler,
                const std::string& resume_path, const std::string& out_dir) {
  mcfd::SessionManifest manifest = mcfd::ReadSessionManifest(manifest_path);
  mcfd::PipelineConfig cfg = LoadConfig(config_path);

  mcfd::SpaceFile sf;
  if (space_path.empty())
    sf.space = mcfd::DefaultParamSpace();
  else
    sf = mcfd::ReadSpaceFile(space_path);

  std::filesystem::create_directories(out_dir);
  mcfd::ObjectiveSpec ospec;
  ospec.manifest = std::move(manifest);
  ospec.config = cfg;
  ospec.metric = metric;
  ospec.work_dir = out_dir + "/evals";
  ospec.space = sf.space;

  mcfd::StudyConfig study;
  if (strategy == "e2e") {
    study.strategy = mcfd::StudyStrategy::kEndToEnd;
  } else if (strategy == "cascaded") {
    study.strategy = mcfd::StudyStrategy::kCascaded;
    if (sf.stages.empty())
      throw mcfd::InputError("cascaded strategy needs stages in the space file");
    study.stages = sf.stages;
  } else {
    throw mcfd::InputError(mcfd::StrCat("unknown strategy ", strategy));
  }
  study.n_trials = trials;
  study.parallelism = parallel;
  study.seed = cfg.seed();
  study.sampler = sampler;
  study.store_path =
      resume_path.empty() ? out_dir + "/trials.jsonl" : resume_path;
  // Cascaded stages freeze to the template's values until their own stage.
  for (const auto& p : ospec.space.params) {
    if (p.kind == mcfd::ParamKind::kCategorical)
      study.defaults[p.name] =
          mcfd::CategoryValue(ospec.config.GetString(p.name));
    else
      study.defaults[p.name] =
          mcfd::NumberValue(ospec.config.GetNumber(p.name));
  }

  mcfd::StudyResult result =
      mcfd::RunStudy(study, ospec.space, mcfd::MakeObjective(ospec));

  std::cout << "best trial " << result.best.trial_id << ": " << metric << " "
            << result.best.objective << "\n";
  for (const auto& [name, v] : result.best.params) {
    std::cout << "  " << name << " = ";
    if (v.is_number) std::cout << v.number;
    else std::cout << v.category;
    std::cout << "\n";
  }
  mcfd::ExportParallelCoordinates(out_dir + "/parcoords.csv", ospec.space,
                                  result.history);
  int complete = 0;
  for (const auto& t : result.history)
    if (t.status == mcfd::TrialStatus::kComplete) ++complete;
  std::cout << complete << "/" << result.history.size()
            << " trials complete, store: " << study.store_path << "\n";
  return 0;
}

int CmdExportPlots(const std::vector<std::string>& run_dirs,
                   const std::string& out_dir, const std::string& store_path,
                   const std::string& space_path, double band_lo,
                   double band_hi) {
  std::filesystem::create_directories(out_dir);
  std::vector<mcfd::RunSummaryRow> rows =
      mcfd::CollectRunSummaries(run_dirs);
  mcfd::ExportScatterCsv(out_dir + "/scatter.csv", rows);
  std::cout << out_dir << "/scatter.csv: " << rows.size() << " rows\n";
  if (!store_path.empty()) {
    mcfd::ParamSpace space = space_path.empty()
                                 ? mcfd::DefaultParamSpace()
                                 : mcfd::ReadSpaceFile(space_path).space;
    mcfd::ExportParallelCoordinates(out_dir + "/parcoords.csv", space,
                                    mcfd::ReadTrialStore(store_path), band_lo,
                                    band_hi);
    std::cout << out_dir << "/parcoords.csv written\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-channel far-field diarization and separation pipeline"};
  app.require_subcommand(1);

  std::string manifest_path, config_path, out_dir, in_path, out_path;
  std::string session_id = "session", rttm_path, labels_path, spans_path;
  std::string ref_path, hyp_path, ref_tx, hyp_tx, table_path;
  std::string metric = "der", strategy = "e2e", sampler = "tpe";
  std::string space_path, resume_path, store_path;
  std::vector<std::string> run_dirs;
  int session_workers = 1, trials = 100, parallel = 1;
  double band_lo = 33.2, band_hi = 34.5;

  CLI::App* run = app.add_subcommand("run", "run the full pipeline");
  run->add_option("--manifest", manifest_path)->required();
  run->add_option("--config", config_path);
  run->add_option("--out", out_dir)->required();
  run->add_option("--session-workers", session_workers);

  CLI::App* cc = app.add_subcommand("cluster-channels",
                                    "group coherent channels and average");
  cc->add_option("--in", in_path)->required();
  cc->add_option("--config", config_path);
  cc->add_option("--out", out_path)->required();
  cc->add_option("--labels", labels_path);

  CLI::App* drv = app.add_subcommand("dereverb",
                                     "multi-channel dereverberation");
  drv->add_option("--in", in_path)->required();
  drv->add_option("--config", config_path);
  drv->add_option("--out", out_path)->required();

  CLI::App* vad = app.add_subcommand("vad", "voice activity probabilities");
  vad->add_option("--in", in_path)->required();
  vad->add_option("--config", config_path);
  vad->add_option("--out", out_path)->required();
  vad->add_option("--spans", spans_path);

  CLI::App* dia = app.add_subcommand("diarize", "who spoke when");
  dia->add_option("--in", in_path)->required();
  dia->add_option("--config", config_path);
  dia->add_option("--session-id", session_id);
  dia->add_option("--out", out_path)->required();

  CLI::App* gss = app.add_subcommand("gss",
                                     "guided separation per utterance");
  gss->add_option("--in", in_path)->required();
  gss->add_option("--rttm", rttm_path)->required();
  gss->add_option("--config", config_path);
  gss->add_option("--session-id", session_id);
  gss->add_option("--out-dir", out_dir)->required();

  CLI::App* score = app.add_subcommand("score", "diarization + word metrics");
  score->add_option("--ref", ref_path)->required();
  score->add_option("--hyp", hyp_path)->required();
  score->add_option("--ref-transcripts", ref_tx);
  score->add_option("--hyp-transcripts", hyp_tx);
  score->add_option("--config", config_path);
  score->add_option("--out", out_path)->required();
  score->add_option("--table", table_path);

  CLI::App* opt = app.add_subcommand("optimize",
                                     "black-box parameter search");
  opt->add_option("--manifest", manifest_path)->required();
  opt->add_option("--config", config_path);
  opt->add_option("--space", space_path);
  opt->add_option("--metric", metric);
  opt->add_option("--strategy", strategy);
  opt->add_option("--trials", trials);
  opt->add_option("--parallel", parallel);
  opt->add_option("--sampler", sampler);
  opt->add_option("--resume", resume_path);
  opt->add_option("--out-dir", out_dir)->required();

  CLI::App* plots = app.add_subcommand("export-plots",
                                       "CSV data for run scatter plots");
  plots->add_option("--runs", run_dirs)->required();
  plots->add_option("--out-dir", out_dir)->required();
  plots->add_option("--store", store_path);
  plots->add_option("--space", space_path);
  plots->add_option("--band-lo", band_lo);
  plots->add_option("--band-hi", band_hi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return CmdRun(manifest_path, config_path, out_dir, session_workers);
    if (cc->parsed())
      return CmdClusterChannels(in_path, config_path, out_path, labels_path);
    if (drv->parsed()) return CmdDereverb(in_path, config_path, out_path);
    if (vad->parsed())
      return CmdVad(in_path, config_path, out_path, spans_path);
    if (dia->parsed())
      return CmdDiarize(in_path, config_path, session_id, out_path);
    if (gss->parsed())
      return CmdGss(in_path, rttm_path, config_path, session_id, out_dir);
    if (score->parsed())
      return CmdScore(ref_path, hyp_path, ref_tx, hyp_tx, config_path,
                      out_path, table_path);
    if (opt->parsed())
      return CmdOptimize(manifest_path, config_path, space_path, metric,
                         strategy, trials, parallel, sampler, resume_path,
                         out_dir);
    if (plots->parsed())
      return CmdExportPlots(run_dirs, out_dir, store_path, space_path,
                            band_lo, band_hi);
  } catch (const mcfd::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
