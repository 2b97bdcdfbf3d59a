// pipeline/pipeline.cc
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

#include "mcfd/pipeline.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>

#include "json.hpp"
#include "mcfd/chanclust.h"
#include "mcfd/common.h"
#include "mcfd/embedding.h"
#include "mcfd/frontend.h"
#include "mcfd/threading.h"
#include "mcfd/wav.h"
#include "mcfd/wpe.h"

namespace mcfd {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

void CheckSessionId(const std::string& id) {
  if (id.empty() ||
      id.find('/') != std::string::npos ||
      id.find('\\') != std::string::npos ||
      id.find("..") != std::string::npos)
    throw InputError(StrCat("bad session_id for a directory name: ", id));
}

// Runs one stage, prefixing any error with "[session/stage]" while keeping
// its input-vs-internal class.
template <typename Fn>
void RunStage(const std::string& session_id, const std::string& stage,
              Fn&& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    throw InputError(StrCat("[", session_id, "/", stage, "] ", e.what()));
  } catch (const std::exception& e) {
    throw Error(StrCat("[", session_id, "/", stage, "] ", e.what()));
  }
}

AudioSession LoadSessionAudio(const SessionEntry& entry) {
  AudioSession out;
  bool first = true;
  size_t min_len = 0;
  for (size_t i = 0; i < entry.wav_paths.size(); ++i) {
    const std::string& path = entry.wav_paths[i];
    if (!fs::exists(path))
      throw InputError(StrCat("missing WAV ", path));
    AudioSession wav = ReadWav(path);
    if (first) {
      out.sample_rate = wav.sample_rate;
      min_len = wav.num_samples();
      first = false;
    } else {
      if (wav.sample_rate != out.sample_rate)
        throw InputError(StrCat("sample rate mismatch in ", path));
      min_len = std::min(min_len, wav.num_samples());
    }
    const std::string& label = entry.channel_labels[i];
    for (int c = 0; c < wav.num_channels(); ++c) {
      out.samples.push_back(std::move(wav.samples[c]));
      out.channel_ids.push_back(wav.num_channels() == 1
                                    ? label
                                    : StrCat(label, ".ch", c));
    }
  }
  bool trimmed = false;
  for (auto& ch : out.samples) {
    if (ch.size() != min_len) trimmed = true;
    ch.resize(min_len);
  }
  if (trimmed)
    Warn(StrCat("session ", entry.session_id,
                ": channel lengths differ, trimmed to the shortest"));
  out.Validate();
  return out;
}

ScoreReport ScoreSession(const SessionEntry& entry, const DiarSegments& hyp,
                         const PipelineConfig& cfg) {
  auto refs = ReadRttm(entry.rttm_path);
  auto it = refs.find(entry.session_id);
  if (it == refs.end())
    throw InputError(StrCat("reference RTTM ", entry.rttm_path,
                            " has no session ", entry.session_id));
  DerResult der = ComputeDer(it->second, hyp, cfg.MakeDerOptions());
  JerResult jer = ComputeJer(it->second, hyp);

  ScoreReport rep;
  rep.der = der.der;
  rep.jer = jer.jer;
  rep.miss_s = der.miss_s;
  rep.fa_s = der.fa_s;
  rep.confusion_s = der.confusion_s;
  rep.ref_speech_s = der.ref_speech_s;

  if (!entry.ref_transcripts_path.empty() &&
      !entry.hyp_transcripts_path.empty()) {
    auto ref_all = ReadTranscriptManifest(entry.ref_transcripts_path);
    auto hyp_all = ReadTranscriptManifest(entry.hyp_transcripts_path);
    auto rit = ref_all.find(entry.session_id);
    if (rit == ref_all.end())
      throw InputError(StrCat("transcripts ", entry.ref_transcripts_path,
                              " have no session ", entry.session_id));
    SpeakerTranscripts hyp_tx;  // absent hypothesis scores as all deletions
    auto hit = hyp_all.find(entry.session_id);
    if (hit != hyp_all.end()) hyp_tx = hit->second;
    SaWerResult wer = ComputeSaWer(rit->second, hyp_tx);
    rep.wer = wer.wer();
    rep.substitutions = wer.counts.substitutions;
    rep.insertions = wer.counts.insertions;
    rep.deletions = wer.counts.deletions;
    rep.ref_words = wer.counts.ref_words;
    rep.has_wer = true;
  }
  return rep;
}

SessionResult RunSession(const SessionEntry& entry,
                         const PipelineConfig& cfg,
                         const std::string& session_dir) {
  SessionResult res;
  res.session_id = entry.session_id;
  res.subset = entry.subset;

  const bool keep = cfg.GetBool("pipeline.write_intermediate");
  fs::create_directories(session_dir);

  AudioSession audio;
  RunStage(entry.session_id, "load",
           [&] { audio = LoadSessionAudio(entry); });

  RunStage(entry.session_id, "dereverb", [&] {
    if (!cfg.GetBool("dereverb.enabled")) return;
    WpeConfig wpe = cfg.MakeWpeConfig();
    if (wpe.iterations <= 0) return;
    audio = WpeDereverberate(audio, wpe);
    if (keep)
      WriteWav(session_dir + "/dereverbed.wav", audio);
  });

  RunStage(entry.session_id, "chanclust", [&] {
    if (!cfg.GetBool("chanclust.enabled") || audio.num_channels() < 2)
      return;
    ChannelClusterResult cc =
        ClusterChannels(audio, cfg.MakeChanclustOptions());
    json j;
    j["labels"] = cc.assignment.labels;
    j["num_clusters"] = cc.assignment.num_clusters;
    j["channels"] = audio.channel_ids;
    std::ofstream out(session_dir + "/chanclust.json");
    out << j.dump(2) << "\n";
    audio = std::move(cc.clustered);
  });

  std::unique_ptr<VadProvider> vad;
  RunStage(entry.session_id, "vad", [&] {
    std::string provider = cfg.GetString("vad.provider");
    if (provider == "energy") {
      vad = std::make_unique<EnergyVadProvider>(cfg.MakeVadOptions());
    } else if (provider == "sidecar") {
      vad = std::make_unique<SidecarVadProvider>(
          cfg.GetString("vad.sidecar_dir"), entry.session_id,
          cfg.GetNumber("vad.frame_length_ms"));
    } else {
      throw InputError(StrCat("unknown vad.provider ", provider));
    }
  });

  RunStage(entry.session_id, "diarize", [&] {
    std::unique_ptr<EmbeddingProvider> embedder;
    std::string kind = cfg.GetString("diarizer.embedding");
    if (kind == "filterbank") {
      embedder = std::make_unique<FilterbankEmbeddingProvider>();
    } else if (kind == "sidecar") {
      embedder = std::make_unique<SidecarEmbeddingProvider>(
          cfg.GetString("diarizer.embedding_sidecar_dir"), entry.session_id,
          static_cast<int>(
              cfg.GetNumber("diarizer.embedding_sidecar_dimension")));
    } else {
      throw InputError(StrCat("unknown diarizer.embedding ", kind));
    }
    DiarizationResult diar = Diarize(
        audio, *embedder, *vad, cfg.MakeDiarizerOptions(entry.session_id));
    res.segments = std::move(diar.segments);
    WriteRttmFile(session_dir + "/diarization.rttm", entry.session_id,
                  res.segments);
    if (keep) {
      json j;
      json spans = json::array();
      for (const auto& span :
           TrackToSpans(diar.pooled_vad, cfg.GetNumber("vad.threshold")))
        spans.push_back({span.begin_s, span.end_s});
      j["speech_spans"] = std::move(spans);
      j["num_speakers"] = diar.num_speakers;
      std::ofstream out(session_dir + "/vad.json");
      out << j.dump(2) << "\n";
    }
  });

  RunStage(entry.session_id, "gss", [&] {
    if (!cfg.GetBool("gssfe.enabled") || res.segments.empty()) return;
    fs::create_directories(session_dir + "/utterances");
    FrontendConfig fe = cfg.MakeFrontendConfig();
    double context_s = cfg.GetNumber("gssfe.context_s");
    for (const auto& seg : res.segments) {
      UtteranceRequest req;
      req.begin_s = seg.begin_s;
      req.end_s = seg.end_s;
      req.speaker = seg.speaker;
      req.context_s = context_s;
      req.all_segments = res.segments;
      AudioSession utt = ExtractUtterance(audio, req, fe);
      std::string path =
          StrCat(session_dir, "/utterances/",
                 UtteranceFileName(entry.session_id, seg.speaker, seg.begin_s,
                                   seg.end_s));
      WriteWav(path, utt);
      res.utterance_wavs.push_back(path);
    }
  });

  RunStage(entry.session_id, "score", [&] {
    if (entry.rttm_path.empty()) return;
    res.report = ScoreSession(entry, res.segments, cfg);
    res.scored = true;
    std::map<std::string, ScoreReport> one{{entry.session_id, res.report}};
    WriteScoreReportJson(session_dir + "/score.json", one);
  });

  return res;
}

// Micro-aggregate per subset: error seconds and word counts pool across
// sessions; jer averages.
std::map<std::string, ScoreReport> AggregateSubsets(
    const std::vector<SessionResult>& sessions) {
  std::map<std::string, std::vector<const SessionResult*>> by_subset;
  for (const auto& s : sessions)
    if (s.scored) by_subset[s.subset].push_back(&s);

  std::map<std::string, ScoreReport> out;
  for (const auto& [subset, list] : by_subset) {
    ScoreReport agg;
    double jer_sum = 0.0;
    bool all_wer = true;
    for (const SessionResult* s : list) {
      agg.miss_s += s->report.miss_s;
      agg.fa_s += s->report.fa_s;
      agg.confusion_s += s->report.confusion_s;
      agg.ref_speech_s += s->report.ref_speech_s;
      jer_sum += s->report.jer;
      if (s->report.has_wer) {
        agg.substitutions += s->report.substitutions;
        agg.insertions += s->report.insertions;
        agg.deletions += s->report.deletions;
        agg.ref_words += s->report.ref_words;
      } else {
        all_wer = false;
      }
    }
    agg.der = agg.ref_speech_s > 0.0
                  ? (agg.miss_s + agg.fa_s + agg.confusion_s) /
                        agg.ref_speech_s
                  : 0.0;
    agg.jer = jer_sum / list.size();
    if (all_wer && agg.ref_words > 0) {
      agg.has_wer = true;
      agg.wer = static_cast<double>(agg.substitutions + agg.insertions +
                                    agg.deletions) /
                agg.ref_words;
    }
    out[subset] = agg;
  }
  return out;
}

void WriteChecksums(const std::string& run_dir) {
  std::vector<std::string> files;
  for (const auto& it : fs::recursive_directory_iterator(run_dir)) {
    if (!it.is_regular_file()) continue;
    std::string rel = fs::relative(it.path(), run_dir).generic_string();
    if (rel == "checksums.txt") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  std::ofstream out(run_dir + "/checksums.txt");
  if (!out) throw Error(StrCat("cannot open ", run_dir, "/checksums.txt"));
  char buf[32];
  for (const auto& rel : files) {
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(
                      Fnv1a64File(StrCat(run_dir, "/", rel))));
    out << buf << "  " << rel << "\n";
  }
}

}  // namespace

std::uint64_t Fnv1a64File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(StrCat("Fnv1a64File: cannot open ", path));
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (n < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  return hash;
}

PipelineResult RunPipeline(const SessionManifest& manifest,
                           const PipelineConfig& config,
                           const PipelineOptions& opts) {
  if (manifest.empty()) throw InputError("RunPipeline: empty manifest");
  if (opts.run_dir.empty()) throw InputError("RunPipeline: no run directory");
  if (opts.session_workers < 1)
    throw InputError("RunPipeline: session_workers must be at least 1");
  for (const auto& e : manifest) CheckSessionId(e.session_id);

  fs::create_directories(opts.run_dir);
  fs::create_directories(opts.run_dir + "/sessions");
  {
    std::ofstream out(opts.run_dir + "/config.json");
    if (!out)
      throw Error(StrCat("RunPipeline: cannot write config snapshot in ",
                         opts.run_dir));
    out << config.ToJsonText();
  }
  WriteSessionManifest(opts.run_dir + "/manifest.jsonl", manifest);

  PipelineResult result;
  result.run_dir = opts.run_dir;
  result.sessions.resize(manifest.size());

  auto run_one = [&](std::size_t i) {
    const SessionEntry& entry = manifest[i];
    std::string session_dir =
        StrCat(opts.run_dir, "/sessions/", entry.session_id);
    try {
      result.sessions[i] = RunSession(entry, config, session_dir);
    } catch (const InputError& e) {
      result.sessions[i].session_id = entry.session_id;
      result.sessions[i].subset = entry.subset;
      result.sessions[i].failure = FailureKind::kInput;
      result.sessions[i].error = e.what();
      Warn(StrCat("session failed: ", e.what()));
    } catch (const std::exception& e) {
      result.sessions[i].session_id = entry.session_id;
      result.sessions[i].subset = entry.subset;
      result.sessions[i].failure = FailureKind::kInternal;
      result.sessions[i].error = e.what();
      Warn(StrCat("session failed: ", e.what()));
    }
  };

  if (opts.session_workers == 1 || manifest.size() == 1) {
    for (std::size_t i = 0; i < manifest.size(); ++i) run_one(i);
  } else {
    ThreadPool pool(opts.session_workers);
    std::vector<std::future<void>> futs;
    futs.reserve(manifest.size());
    for (std::size_t i = 0; i < manifest.size(); ++i)
      futs.push_back(pool.Submit([&run_one, i] { run_one(i); }));
    for (auto& f : futs) f.get();
  }

  result.subset_reports = AggregateSubsets(result.sessions);
  result.any_scored = !result.subset_reports.empty();
  if (result.any_scored) {
    WriteScoreReportJson(opts.run_dir + "/report.json",
                         result.subset_reports);
    WriteScoreTable(opts.run_dir + "/report.txt", result.subset_reports);
  }
  WriteChecksums(opts.run_dir);
  return result;
}

Objective MakeObjective(const ObjectiveSpec& spec) {
  if (spec.manifest.empty()) throw InputError("MakeObjective: empty manifest");
  if (spec.work_dir.empty())
    throw InputError("MakeObjective: no work directory");
  if (spec.metric != "der" && spec.metric != "jer" &&
      spec.metric != "sa_wer" && spec.metric != "macro")
    throw InputError(StrCat("MakeObjective: unknown metric ", spec.metric));
  spec.space.Validate();
  for (const auto& p : spec.space.params)
    if (!spec.config.HasPath(p.name))
      throw InputError(StrCat("MakeObjective: unknown config path ", p.name));

  auto counter = std::make_shared<std::atomic<int>>(0);
  ObjectiveSpec captured = spec;
  return [captured, counter](const Assignment& a) -> double {
    PipelineConfig cfg = captured.config;
    for (const auto& [name, v] : a) {
      if (!cfg.HasPath(name))
        throw InputError(StrCat("objective: unknown config path ", name));
      if (v.is_number)
        cfg.SetNumber(name, v.number);
      else
        cfg.SetString(name, v.category);
    }
    PipelineOptions popts;
    popts.run_dir =
        StrCat(captured.work_dir, "/eval_", counter->fetch_add(1));
    PipelineResult res = RunPipeline(captured.manifest, cfg, popts);
    for (const auto& s : res.sessions)
      if (s.failure != FailureKind::kNone)
        throw Error(StrCat("objective: ", s.error));
    if (res.subset_reports.empty())
      throw InputError("objective: no scored sessions");

    std::vector<double> values;
    bool all_wer = true;
    for (const auto& [subset, rep] : res.subset_reports)
      if (!rep.has_wer) all_wer = false;
    for (const auto& [subset, rep] : res.subset_reports) {
      if (captured.metric == "der") {
        values.push_back(rep.der);
      } else if (captured.metric == "jer") {
        values.push_back(rep.jer);
      } else if (captured.metric == "sa_wer") {
        if (!rep.has_wer)
          throw InputError(
              StrCat("objective: subset ", subset, " has no word scores"));
        values.push_back(rep.wer);
      } else {  // macro: word error when fully scored, else der
        values.push_back(all_wer ? rep.wer : rep.der);
      }
    }
    return MacroAverage(values);
  };
}

std::vector<RunSummaryRow> CollectRunSummaries(
    const std::vector<std::string>& run_dirs) {
  std::vector<RunSummaryRow> rows;
  for (const auto& dir : run_dirs) {
    std::string report_path = dir + "/report.json";
    std::ifstream in(report_path);
    if (!in) {
      Warn(StrCat("run ", dir, " has no score report, skipped"));
      continue;
    }
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError(StrCat("bad report ", report_path, ": ", e.what()));
    }
    if (!j.contains("subsets")) {
      Warn(StrCat("run ", dir, " has no score report, skipped"));
      continue;
    }
    std::string run_id = fs::path(dir).filename().string();
    if (run_id.empty()) run_id = dir;
    for (const auto& [subset, rep] : j["subsets"].items()) {
      RunSummaryRow row;
      row.run_id = run_id;
      row.subset = subset;
      row.der = rep.value("der", 0.0);
      if (rep.contains("wer")) {
        row.has_wer = true;
        row.wer = rep["wer"].get<double>();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void ExportScatterCsv(const std::string& path,
                      const std::vector<RunSummaryRow>& rows) {
  if (rows.empty()) throw InputError("ExportScatterCsv: no scored runs");
  std::ofstream out(path);
  if (!out) throw Error(StrCat("ExportScatterCsv: cannot open ", path));
  out << "run_id,der,wer,subset\n";
  for (const auto& r : rows) {
    out << r.run_id << "," << r.der << ",";
    if (r.has_wer) out << r.wer;
    out << "," << r.subset << "\n";
  }
  if (!out) throw Error(StrCat("ExportScatterCsv: write failed: ", path));
}

}  // namespace mcfd
