// hyperopt/study.cc
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

#include "mcfd/hyperopt.h"

#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "mcfd/common.h"
#include "mcfd/threading.h"

namespace mcfd {

namespace {

using nlohmann::json;

const char* StatusName(TrialStatus s) {
  switch (s) {
    case TrialStatus::kComplete: return "complete";
    case TrialStatus::kFailed: return "failed";
    case TrialStatus::kPruned: return "pruned";
  }
  return "failed";
}

TrialStatus StatusFromName(const std::string& s) {
  if (s == "complete") return TrialStatus::kComplete;
  if (s == "failed") return TrialStatus::kFailed;
  if (s == "pruned") return TrialStatus::kPruned;
  throw InputError(StrCat("trial store: unknown status ", s));
}

}  // namespace

void AppendTrial(const std::string& path, const TrialRecord& record) {
  json j;
  j["trial_id"] = record.trial_id;
  j["status"] = StatusName(record.status);
  if (record.status == TrialStatus::kComplete) {
    if (!std::isfinite(record.objective))
      throw InputError("AppendTrial: complete trial with non-finite objective");
    j["objective"] = record.objective;
  }
  j["wall_time_s"] = record.wall_time_s;
  json params = json::object();
  for (const auto& [name, v] : record.params) {
    if (v.is_number) params[name] = v.number;
    else params[name] = v.category;
  }
  j["params"] = params;

  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(StrCat("AppendTrial: cannot open ", path));
  out << j.dump() << "\n";
  out.flush();
  if (!out) throw Error(StrCat("AppendTrial: write failed: ", path));
}

std::vector<TrialRecord> ReadTrialStore(const std::string& path) {
  std::vector<TrialRecord> out;
  std::ifstream in(path);
  if (!in) return out;  // no store yet
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(StrCat("trial store ", path, " line ", lineno, ": ",
                              e.what()));
    }
    TrialRecord r;
    if (!j.contains("trial_id") || !j.contains("status") ||
        !j.contains("params"))
      throw InputError(StrCat("trial store ", path, " line ", lineno,
                              ": missing field"));
    r.trial_id = j["trial_id"].get<int>();
    r.status = StatusFromName(j["status"].get<std::string>());
    r.objective = j.contains("objective")
                      ? j["objective"].get<double>()
                      : std::numeric_limits<double>::quiet_NaN();
    r.wall_time_s = j.value("wall_time_s", 0.0);
    for (const auto& [name, v] : j["params"].items()) {
      if (v.is_number())
        r.params[name] = NumberValue(v.get<double>());
      else if (v.is_string())
        r.params[name] = CategoryValue(v.get<std::string>());
      else
        throw InputError(StrCat("trial store ", path, " line ", lineno,
                                ": bad value for ", name));
    }
    out.push_back(std::move(r));
  }
  return out;
}

SpaceFile ReadSpaceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(StrCat("ReadSpaceFile: cannot open ", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(StrCat("ReadSpaceFile: ", path, ": ", e.what()));
  }
  SpaceFile sf;
  if (!j.contains("params") || !j["params"].is_array())
    throw InputError(StrCat("ReadSpaceFile: ", path, ": missing params"));
  for (const auto& pj : j["params"]) {
    ParamSpec p;
    p.name = pj.value("name", "");
    std::string kind = pj.value("kind", "float");
    if (kind == "float") p.kind = ParamKind::kFloat;
    else if (kind == "int") p.kind = ParamKind::kInt;
    else if (kind == "categorical") p.kind = ParamKind::kCategorical;
    else throw InputError(StrCat("ReadSpaceFile: unknown kind ", kind));
    if (p.kind == ParamKind::kCategorical) {
      if (!pj.contains("choices"))
        throw InputError(StrCat("ReadSpaceFile: no choices for ", p.name));
      for (const auto& c : pj["choices"])
        p.choices.push_back(c.get<std::string>());
    } else {
      if (!pj.contains("low") || !pj.contains("high"))
        throw InputError(StrCat("ReadSpaceFile: no bounds for ", p.name));
      p.low = pj["low"].get<double>();
      p.high = pj["high"].get<double>();
      p.log_scale = pj.value("log", false);
    }
    sf.space.params.push_back(std::move(p));
  }
  sf.space.Validate();
  if (j.contains("stages")) {
    for (const auto& sj : j["stages"]) {
      StageConfig st;
      st.name = sj.value("name", StrCat("stage", sf.stages.size()));
      st.n_trials = sj.value("trials", 0);
      if (!sj.contains("active"))
        throw InputError(
            StrCat("ReadSpaceFile: stage ", st.name, " has no active list"));
      for (const auto& a : sj["active"])
        st.active.push_back(a.get<std::string>());
      sf.stages.push_back(std::move(st));
    }
  }
  return sf;
}

namespace {

struct EvalOutcome {
  double value = 0.0;
  bool ok = false;
  double wall_s = 0.0;
};

EvalOutcome Evaluate(const Objective& objective, const Assignment& a) {
  EvalOutcome out;
  auto t0 = std::chrono::steady_clock::now();
  try {
    out.value = objective(a);
    out.ok = std::isfinite(out.value);
  } catch (const std::exception&) {
    out.ok = false;
  } catch (...) {
    out.ok = false;
  }
  out.wall_s = std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return out;
}

const TrialRecord* BestOf(const std::vector<TrialRecord>& trials) {
  const TrialRecord* best = nullptr;
  for (const auto& t : trials) {
    if (t.status != TrialStatus::kComplete || !std::isfinite(t.objective))
      continue;
    if (!best || t.objective < best->objective ||
        (t.objective == best->objective && t.trial_id < best->trial_id))
      best = &t;
  }
  return best;
}

}  // namespace

StudyResult RunStudy(const StudyConfig& cfg, const ParamSpace& space,
                     const Objective& objective) {
  space.Validate();
  if (!objective) throw InputError("RunStudy: null objective");
  if (cfg.parallelism < 1)
    throw InputError("RunStudy: parallelism must be at least 1");
  if (cfg.sampler != "tpe" && cfg.sampler != "random")
    throw InputError(StrCat("RunStudy: unknown sampler ", cfg.sampler));

  // One stage over the full space for end-to-end; caller stages otherwise.
  std::vector<StageConfig> stages;
  if (cfg.strategy == StudyStrategy::kEndToEnd) {
    StageConfig st;
    st.name = "e2e";
    for (const auto& p : space.params) st.active.push_back(p.name);
    st.n_trials = cfg.n_trials;
    stages.push_back(std::move(st));
  } else {
    if (cfg.stages.empty())
      throw InputError("RunStudy: cascaded strategy needs stages");
    stages = cfg.stages;
  }
  for (const auto& st : stages) {
    if (st.n_trials < 1)
      throw InputError(StrCat("RunStudy: stage ", st.name,
                              " needs a positive trial count"));
    if (st.active.empty())
      throw InputError(StrCat("RunStudy: stage ", st.name,
                              " has no active parameters"));
    for (const auto& name : st.active)
      if (space.Find(name) == nullptr)
        throw InputError(StrCat("RunStudy: unknown parameter ", name,
                                " in stage ", st.name));
  }

  StudyResult res;
  if (!cfg.store_path.empty()) res.history = ReadTrialStore(cfg.store_path);
  int next_id = static_cast<int>(res.history.size());

  ThreadPool pool(cfg.parallelism);

  Assignment frozen = cfg.defaults;
  int stage_begin = 0;
  for (const auto& st : stages) {
    int stage_end = stage_begin + st.n_trials;

    ParamSpace sub;
    for (const auto& name : st.active) sub.params.push_back(*space.Find(name));
    for (const auto& p : space.params) {
      bool active = sub.Find(p.name) != nullptr;
      if (!active && frozen.find(p.name) == frozen.end())
        throw InputError(StrCat("RunStudy: frozen parameter ", p.name,
                                " has no value in stage ", st.name));
    }

    // Trials of this stage only; resumed records keep their slots.
    std::vector<TrialRecord> stage_history;
    for (const auto& t : res.history)
      if (t.trial_id >= stage_begin && t.trial_id < stage_end)
        stage_history.push_back(t);

    auto suggest = [&](int id) {
      if (cfg.sampler == "random")
        return SuggestRandom(sub, cfg.seed, static_cast<std::size_t>(id));
      return SuggestTpe(sub, stage_history, cfg.tpe, cfg.seed,
                        static_cast<std::size_t>(id));
    };

    std::deque<std::pair<std::pair<int, Assignment>,
                         std::future<EvalOutcome>>> pending;
    while (next_id < stage_end || !pending.empty()) {
      while (next_id < stage_end &&
             static_cast<int>(pending.size()) < cfg.parallelism) {
        int id = next_id++;
        Assignment full = frozen;
        for (auto& [name, v] : suggest(id)) full[name] = v;
        auto fut = pool.Submit(
            [&objective, full] { return Evaluate(objective, full); });
        pending.push_back({{id, std::move(full)}, std::move(fut)});
      }
      if (pending.empty()) break;
      auto [meta, fut] = std::move(pending.front());
      pending.pop_front();
      EvalOutcome out = fut.get();
      TrialRecord rec;
      rec.trial_id = meta.first;
      rec.params = std::move(meta.second);
      rec.status = out.ok ? TrialStatus::kComplete : TrialStatus::kFailed;
      rec.objective = out.ok ? out.value
                             : std::numeric_limits<double>::quiet_NaN();
      rec.wall_time_s = out.wall_s;
      if (!cfg.store_path.empty()) AppendTrial(cfg.store_path, rec);
      stage_history.push_back(rec);
      res.history.push_back(std::move(rec));
    }

    const TrialRecord* stage_best = BestOf(stage_history);
    if (stage_best != nullptr) {
      for (const auto& [name, v] : stage_best->params) frozen[name] = v;
    } else {
      Warn(StrCat("RunStudy: stage ", st.name,
                  " produced no complete trials"));
    }
    stage_begin = stage_end;
  }

  const TrialRecord* best = BestOf(res.history);
  if (best == nullptr) throw Error("RunStudy: all trials failed");
  res.best = *best;
  return res;
}

}  // namespace mcfd
