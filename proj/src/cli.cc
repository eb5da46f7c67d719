//
// Copyright 2026 The FreD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "fred/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <variant>
#include "absl/strings/string_view.h"

#include "CLI11.hpp"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "fred/bench.h"
#include "fred/embedding_io.h"
#include "fred/fred_protocol.h"
#include "fred/partition.h"
#include "fred/report.h"
#include "fred/status.h"

namespace fred::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kEmbeddingExtension[] = ".fredemb";

// A failure tagged with the exit code and the stage that produced it.
struct Failure {
  int exit_code;
  std::string stage;
  absl::Status status;
};

template <typename T>
using Result = std::variant<T, Failure>;

Failure ConfigFailure(absl::Status s) {
  return {kExitConfig, "config", std::move(s)};
}
Failure DataFailure(absl::Status s) { return {kExitData, "data", std::move(s)}; }
Failure ProtocolFailure(absl::Status s) {
  return {kExitProtocol, "protocol", std::move(s)};
}

int Report(const Failure& f, std::ostream& err) {
  err << "error [" << f.stage << "]: " << f.status.message() << "\n";
  return f.exit_code;
}

// Key/value settings merged from an optional config file and flags. Flags
// win over the file. Keys use underscores; flags use dashes.
class Settings {
 public:
  void Set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
  }
  bool Has(const std::string& key) const { return values_.contains(key); }

  std::optional<std::string> String(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  absl::StatusOr<std::optional<double>> Double(const std::string& key) const {
    auto s = String(key);
    if (!s) return std::optional<double>();
    double v;
    if (!absl::SimpleAtod(*s, &v)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat(key, ": '", *s, "' is not a number"));
    }
    return std::optional<double>(v);
  }

  template <typename Int>
  absl::StatusOr<std::optional<Int>> Integer(const std::string& key) const {
    auto s = String(key);
    if (!s) return std::optional<Int>();
    Int v;
    if (!absl::SimpleAtoi(*s, &v)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat(key, ": '", *s, "' is not an integer"));
    }
    return std::optional<Int>(v);
  }

  absl::StatusOr<bool> Bool(const std::string& key) const {
    auto s = String(key);
    if (!s) return false;
    bool v;
    if (!absl::SimpleAtob(*s, &v)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat(key, ": '", *s, "' is not a boolean"));
    }
    return v;
  }

 private:
  std::map<std::string, std::string> values_;
};

absl::Status LoadConfigFile(const fs::path& path,
                            const std::set<std::string>& allowed,
                            Settings& settings) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open config ", path.string()));
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text.front() == '#') continue;
    std::pair<absl::string_view, absl::string_view> kv =
        absl::StrSplit(text, absl::MaxSplits('=', 1));
    const std::string key(absl::StripAsciiWhitespace(kv.first));
    if (text.find('=') == absl::string_view::npos || key.empty()) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat(path.string(), ":", line_no,
                                    ": expected key = value"));
    }
    if (!allowed.contains(key)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat(path.string(), ":", line_no,
                                    ": unknown key '", key, "'"));
    }
    settings.Set(key, std::string(absl::StripAsciiWhitespace(kv.second)));
  }
  return absl::OkStatus();
}

std::string FlagFor(const std::string& key) {
  std::string flag = "--" + key;
  for (char& ch : flag) {
    if (ch == '_') ch = '-';
  }
  return flag;
}

// Registers one string option per key and resolves them, together with an
// optional --config file, into Settings after parsing.
class OptionSet {
 public:
  OptionSet(CLI::App* app, std::vector<std::pair<std::string, std::string>> keys,
            std::vector<std::pair<std::string, std::string>> flags = {})
      : app_(app) {
    app_->add_option("--config", config_path_,
                     "key = value file supplying any of the options below");
    for (auto& [key, help] : keys) {
      allowed_.insert(key);
      options_[key] = app_->add_option(FlagFor(key), storage_[key], help);
    }
    for (auto& [key, help] : flags) {
      allowed_.insert(key);
      flag_options_[key] = app_->add_flag(FlagFor(key))->description(help);
    }
  }

  absl::StatusOr<Settings> Resolve() const {
    Settings settings;
    if (!config_path_.empty()) {
      FRED_RETURN_IF_ERROR(LoadConfigFile(config_path_, allowed_, settings));
    }
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) settings.Set(key, storage_.at(key));
    }
    for (const auto& [key, opt] : flag_options_) {
      if (opt->count() > 0) settings.Set(key, "true");
    }
    return settings;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::set<std::string> allowed_;
  std::map<std::string, std::string> storage_;
  std::map<std::string, CLI::Option*> options_;
  std::map<std::string, CLI::Option*> flag_options_;
};

absl::StatusOr<uint64_t> ResolveSeed(const Settings& settings) {
  FRED_ASSIGN_OR_RETURN(auto seed, settings.Integer<uint64_t>("seed"));
  if (seed) return *seed;
  if (const char* env = std::getenv("FRED_SEED"); env != nullptr) {
    uint64_t v;
    if (!absl::SimpleAtoi(env, &v)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("FRED_SEED='", env,
                                    "' is not an unsigned integer"));
    }
    return v;
  }
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) | rd();
}

// Builds and validates the protocol configuration. Reads no data.
absl::StatusOr<ProtocolConfig> ResolveProtocolConfig(const Settings& settings) {
  ProtocolConfig config;
  FRED_ASSIGN_OR_RETURN(config.mode,
                        ParseNoiseMode(settings.String("mode").value_or(
                            std::string(NoiseModeName(config.mode)))));
  FRED_ASSIGN_OR_RETURN(auto epsilon, settings.Double("epsilon"));
  FRED_ASSIGN_OR_RETURN(auto delta, settings.Double("delta"));
  if (epsilon.has_value() != delta.has_value() &&
      config.mode != NoiseMode::kAudit) {
    return MakeError(ErrorKind::kInvalidBudget,
                     absl::StrCat("--", epsilon ? "delta" : "epsilon",
                                  " is required in ",
                                  NoiseModeName(config.mode), " mode"));
  }
  if (epsilon && delta) {
    FRED_ASSIGN_OR_RETURN(config.total_budget,
                          PrivacyBudget::Create(*epsilon, *delta));
  }
  FRED_ASSIGN_OR_RETURN(auto clip, settings.Double("clip"));
  if (clip) config.clip_norm = *clip;
  FRED_ASSIGN_OR_RETURN(auto split, settings.Double("budget_split"));
  if (split) config.mean_budget_fraction = *split;
  FRED_ASSIGN_OR_RETURN(auto scale_bits, settings.Integer<int>("scale_bits"));
  if (scale_bits) config.scale_bits = *scale_bits;
  FRED_ASSIGN_OR_RETURN(config.declared_n2, settings.Integer<int64_t>("n2"));
  FRED_ASSIGN_OR_RETURN(config.parallel_clients, settings.Bool("parallel"));
  FRED_ASSIGN_OR_RETURN(config.seed, ResolveSeed(settings));
  FRED_RETURN_IF_ERROR(ValidateConfig(config));
  return config;
}

std::vector<fs::path> EmbeddingFilesIn(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == kEmbeddingExtension) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// A file, or a directory whose embedding files are stacked in name order.
absl::StatusOr<EmbeddingMatrix> LoadPooled(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) return ReadEmbeddings(path);
  const std::vector<fs::path> files = EmbeddingFilesIn(path);
  if (files.empty()) {
    return MakeError(ErrorKind::kEmptyInput,
                     absl::StrCat("no *", kEmbeddingExtension, " files in ",
                                  path.string()));
  }
  std::vector<EmbeddingMatrix> parts;
  Eigen::Index rows = 0;
  for (const fs::path& f : files) {
    FRED_ASSIGN_OR_RETURN(EmbeddingMatrix m, ReadEmbeddings(f));
    if (!parts.empty() && m.cols() != parts.front().cols()) {
      return MakeError(ErrorKind::kDimMismatch,
                       absl::StrCat(f.string(), " has dim ", m.cols(),
                                    ", expected ", parts.front().cols()));
    }
    rows += m.rows();
    parts.push_back(std::move(m));
  }
  EmbeddingMatrix out(rows, parts.front().cols());
  Eigen::Index at = 0;
  for (const EmbeddingMatrix& m : parts) {
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

absl::StatusOr<std::vector<int64_t>> ReadLabels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open labels ", path.string()));
  }
  std::vector<int64_t> labels;
  std::string line;
  while (std::getline(in, line)) {
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty()) continue;
    int64_t v;
    if (!absl::SimpleAtoi(text, &v)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("label '", text, "' is not an integer"));
    }
    labels.push_back(v);
  }
  return labels;
}

// DIR                              one client per *.fredemb file (id = stem)
// FILE@round_robin:K
// FILE@dirichlet:K:ALPHA
// FILE@by_label:K:LABELS_FILE      one integer label per row
absl::StatusOr<std::vector<ClientDataset>> LoadClients(absl::string_view spec,
                                                       uint64_t seed) {
  const size_t at = spec.rfind('@');
  if (at == absl::string_view::npos) {
    const fs::path dir{std::string(spec)};
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      return MakeError(ErrorKind::kIoError,
                       absl::StrCat("--clients ", spec,
                                    " is neither a directory nor FILE@SPEC"));
    }
    std::vector<ClientDataset> clients;
    for (const fs::path& f : EmbeddingFilesIn(dir)) {
      FRED_ASSIGN_OR_RETURN(EmbeddingMatrix m, ReadEmbeddings(f));
      FRED_ASSIGN_OR_RETURN(ClientDataset c,
                            ClientDataset::Create(f.stem().string(),
                                                  std::move(m)));
      clients.push_back(std::move(c));
    }
    if (clients.empty()) {
      return MakeError(ErrorKind::kEmptyInput,
                       absl::StrCat("no *", kEmbeddingExtension, " files in ",
                                    spec));
    }
    return clients;
  }
  FRED_ASSIGN_OR_RETURN(EmbeddingMatrix pooled,
                        ReadEmbeddings(fs::path(std::string(spec.substr(0, at)))));
  std::vector<absl::string_view> parts =
      absl::StrSplit(spec.substr(at + 1), ':');
  PartitionSpec partition;
  partition.seed = seed;
  size_t k = 0;
  if (parts.size() < 2 || !absl::SimpleAtoi(parts[1], &k)) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("bad partition spec '", spec.substr(at + 1),
                                  "'"));
  }
  partition.client_count = k;
  std::vector<int64_t> labels;
  if (parts[0] == "round_robin" && parts.size() == 2) {
    partition.strategy = PartitionStrategy::kRoundRobin;
  } else if (parts[0] == "dirichlet" && parts.size() == 3 &&
             absl::SimpleAtod(parts[2], &partition.alpha)) {
    partition.strategy = PartitionStrategy::kDirichlet;
  } else if (parts[0] == "by_label" && parts.size() == 3) {
    partition.strategy = PartitionStrategy::kByLabel;
    FRED_ASSIGN_OR_RETURN(labels, ReadLabels(fs::path(std::string(parts[2]))));
  } else {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("bad partition spec '", spec.substr(at + 1),
                                  "'"));
  }
  return Partition(pooled, partition, labels);
}

std::string BudgetLine(const PrivateRelease& release) {
  if (!release.spent) return "spent_budget\tnone (audit mode, not private)";
  return absl::StrFormat("spent_budget\tepsilon=%g delta=%g",
                         release.spent->epsilon(), release.spent->delta());
}

Result<PrivateRelease> ProduceRelease(const Settings& settings,
                                      const ProtocolConfig& config) {
  auto clients_spec = settings.String("clients");
  if (!clients_spec) {
    return ConfigFailure(MakeError(ErrorKind::kInvalidArgument,
                                   "--clients is required"));
  }
  auto clients = LoadClients(*clients_spec, config.seed);
  if (!clients.ok()) return DataFailure(clients.status());
  auto release = ReleasePrivateSummary(*clients, config);
  if (!release.ok()) return ProtocolFailure(release.status());
  return *std::move(release);
}

int RunCompute(const Settings& settings, std::ostream& out,
               std::ostream& err) {
  auto config = ResolveProtocolConfig(settings);
  if (!config.ok()) return Report(ConfigFailure(config.status()), err);
  auto public_path = settings.String("public");
  if (!public_path) {
    return Report(ConfigFailure(MakeError(ErrorKind::kInvalidArgument,
                                          "--public is required")),
                  err);
  }
  auto out_path = settings.String("out");
  if (!out_path) {
    return Report(
        ConfigFailure(MakeError(ErrorKind::kInvalidArgument,
                                "--out is required")),
        err);
  }
  auto public_data = LoadPooled(*public_path);
  if (!public_data.ok()) return Report(DataFailure(public_data.status()), err);
  auto clients_spec = settings.String("clients");
  if (!clients_spec) {
    return Report(ConfigFailure(MakeError(ErrorKind::kInvalidArgument,
                                          "--clients is required")),
                  err);
  }
  auto clients = LoadClients(*clients_spec, config->seed);
  if (!clients.ok()) return Report(DataFailure(clients.status()), err);
  for (const ClientDataset& c : *clients) {
    if (c.dim() != public_data->cols()) {
      return Report(DataFailure(MakeError(
                        ErrorKind::kDimMismatch,
                        absl::StrCat("public dim ", public_data->cols(),
                                     " != client '", c.id(), "' dim ",
                                     c.dim()))),
                    err);
    }
  }
  const std::string name = settings.String("public_name").value_or(
      fs::path(*public_path).filename().string());
  auto report = RunFred({name, *std::move(public_data)}, *clients, *config);
  if (!report.ok()) return Report(ProtocolFailure(report.status()), err);
  if (auto release_path = settings.String("save_release")) {
    if (absl::Status s = SaveRelease(report->release, *release_path); !s.ok()) {
      return Report(DataFailure(s), err);
    }
  }
  if (absl::Status s = WriteTextFile(*out_path, SerializeReport(*report));
      !s.ok()) {
    return Report(DataFailure(s), err);
  }
  const FrechetValue& d = report->candidates.front().distance;
  out << absl::StrFormat("distance\t%.10g\n", d.clamped);
  out << absl::StrFormat("raw\t%.10g\n", d.raw);
  out << BudgetLine(report->release) << "\n";
  out << "report\t" << *out_path << "\n";
  return kExitOk;
}

int RunRank(const Settings& settings, std::ostream& out, std::ostream& err) {
  std::vector<std::string> candidate_paths;
  if (auto list = settings.String("candidates")) {
    for (absl::string_view p : absl::StrSplit(*list, ',', absl::SkipEmpty())) {
      candidate_paths.emplace_back(p);
    }
  }
  auto public_path = settings.String("public");
  if (public_path) candidate_paths.insert(candidate_paths.begin(), *public_path);
  if (candidate_paths.empty()) {
    return Report(ConfigFailure(MakeError(ErrorKind::kEmptyList,
                                          "no candidates given")),
                  err);
  }

  auto release_path = settings.String("release");
  std::error_code ec;
  const bool reuse = release_path && fs::exists(*release_path, ec);
  PrivateRelease release;
  if (reuse) {
    auto loaded = LoadRelease(*release_path);
    if (!loaded.ok()) return Report(DataFailure(loaded.status()), err);
    release = *std::move(loaded);
    err << "reusing release " << *release_path
        << " (no additional privacy cost)\n";
  } else {
    auto config = ResolveProtocolConfig(settings);
    if (!config.ok()) return Report(ConfigFailure(config.status()), err);
    Result<PrivateRelease> produced = ProduceRelease(settings, *config);
    if (auto* f = std::get_if<Failure>(&produced)) return Report(*f, err);
    release = std::get<PrivateRelease>(std::move(produced));
    if (release_path) {
      if (absl::Status s = SaveRelease(release, *release_path); !s.ok()) {
        return Report(DataFailure(s), err);
      }
    }
  }

  std::vector<NamedEmbeddings> candidates;
  std::vector<std::string> load_warnings;
  for (const std::string& p : candidate_paths) {
    auto m = LoadPooled(p);
    const std::string name = fs::path(p).filename().string();
    if (!m.ok()) {
      load_warnings.push_back(absl::StrCat("skipping candidate '", name,
                                           "': ", m.status().message()));
      continue;
    }
    candidates.push_back({name, *std::move(m)});
  }
  Ranking ranking = RankCandidates(candidates, release);
  ranking.warnings.insert(ranking.warnings.begin(), load_warnings.begin(),
                          load_warnings.end());
  for (const std::string& w : ranking.warnings) err << "warning: " << w << "\n";
  if (ranking.ranked.empty()) {
    return Report(DataFailure(MakeError(ErrorKind::kEmptyInput,
                                        "no candidate could be ranked")),
                  err);
  }

  out << "rank\tname\tdistance\traw\n";
  for (size_t i = 0; i < ranking.ranked.size(); ++i) {
    const RankedCandidate& c = ranking.ranked[i];
    out << absl::StrFormat("%d\t%s\t%.10g\t%.10g\n", i + 1, c.name,
                           c.distance.clamped, c.distance.raw);
  }
  out << BudgetLine(release) << "\n";

  if (auto out_path = settings.String("out")) {
    FredReport report;
    report.command = "rank";
    report.release = release;
    report.candidates = ranking.ranked;
    report.warnings = ranking.warnings;
    if (absl::Status s = WriteTextFile(*out_path, SerializeReport(report));
        !s.ok()) {
      return Report(DataFailure(s), err);
    }
  }
  return kExitOk;
}

absl::StatusOr<MixtureBenchConfig> ResolveBenchConfig(
    const Settings& settings) {
  MixtureBenchConfig config;
  if (auto steps = settings.String("mix_steps")) {
    config.mix_steps.clear();
    for (absl::string_view s : absl::StrSplit(*steps, ',', absl::SkipEmpty())) {
      double y;
      if (!absl::SimpleAtod(s, &y)) {
        return MakeError(ErrorKind::kParseError,
                         absl::StrCat("mix step '", s, "' is not a number"));
      }
      config.mix_steps.push_back(y);
    }
  }
  FRED_ASSIGN_OR_RETURN(auto trials, settings.Integer<int>("trials"));
  if (trials) config.trials = *trials;
  FRED_ASSIGN_OR_RETURN(auto epsilon, settings.Double("epsilon"));
  FRED_ASSIGN_OR_RETURN(auto delta, settings.Double("delta"));
  FRED_ASSIGN_OR_RETURN(config.total_budget,
                        PrivacyBudget::Create(epsilon.value_or(0.6),
                                              delta.value_or(2e-6)));
  FRED_ASSIGN_OR_RETURN(auto dim, settings.Integer<int64_t>("dim"));
  if (dim) config.dim = *dim;
  FRED_ASSIGN_OR_RETURN(auto separation, settings.Double("separation"));
  if (separation) config.separation = *separation;
  FRED_ASSIGN_OR_RETURN(auto samples, settings.Integer<int64_t>("n"));
  if (samples) config.samples = *samples;
  FRED_ASSIGN_OR_RETURN(auto clients, settings.Integer<size_t>("clients"));
  if (clients) config.client_count = *clients;
  FRED_ASSIGN_OR_RETURN(auto clip, settings.Double("clip"));
  if (clip) config.clip_norm = *clip;
  FRED_ASSIGN_OR_RETURN(
      config.private_mode,
      ParseNoiseMode(settings.String("mode").value_or("calibrated")));
  FRED_ASSIGN_OR_RETURN(auto scale_bits, settings.Integer<int>("scale_bits"));
  if (scale_bits) config.scale_bits = *scale_bits;
  FRED_ASSIGN_OR_RETURN(config.seed, ResolveSeed(settings));
  return config;
}

int RunSynthBench(const Settings& settings, std::ostream& out,
                  std::ostream& err) {
  auto config = ResolveBenchConfig(settings);
  if (!config.ok()) return Report(ConfigFailure(config.status()), err);
  auto result = RunMixtureBench(*config);
  if (!result.ok()) {
    const bool config_error =
        HasErrorKind(result.status(), ErrorKind::kInvalidArgument) ||
        HasErrorKind(result.status(), ErrorKind::kInvalidBudget);
    return Report(config_error ? ConfigFailure(result.status())
                               : ProtocolFailure(result.status()),
                  err);
  }
  out << "Y\taudit\tmin\tmedian\tmax\n";
  for (const MixtureBenchRow& r : result->rows) {
    out << absl::StrFormat("%g\t%.6g\t%.6g\t%.6g\t%.6g\n", r.percent, r.audit,
                           r.min, r.median, r.max);
  }
  for (const AdjacentPair& p : result->pairs) {
    out << absl::StrFormat(
        "pair\t%g->%g\taudit_decreasing=%s\tmedian_decreasing=%s\t"
        "nonoverlapping=%s\n",
        p.lower_percent, p.upper_percent, p.audit_decreasing ? "yes" : "no",
        p.median_decreasing ? "yes" : "no", p.nonoverlapping ? "yes" : "no");
  }
  out << absl::StrFormat("audit_strictly_decreasing\t%s\n",
                         result->AuditStrictlyDecreasing() ? "yes" : "no");
  out << absl::StrFormat("median_decreasing_pairs\t%d/%d\n",
                         result->MedianDecreasingPairs(),
                         result->pairs.size());
  if (auto plot = settings.String("plot_data")) {
    if (absl::Status s = WriteTextFile(*plot, PlotDataTsv(*result)); !s.ok()) {
      return Report(DataFailure(s), err);
    }
  }
  if (auto out_path = settings.String("out")) {
    if (absl::Status s =
            WriteTextFile(*out_path, BenchToJson(*result).dump(2) + "\n");
        !s.ok()) {
      return Report(DataFailure(s), err);
    }
  }
  return kExitOk;
}

int RunImportCsv(const Settings& settings, std::ostream& out,
                 std::ostream& err) {
  auto in_path = settings.String("in");
  auto out_path = settings.String("out");
  if (!in_path || !out_path) {
    return Report(ConfigFailure(MakeError(ErrorKind::kInvalidArgument,
                                          "--in and --out are required")),
                  err);
  }
  Dtype dtype = Dtype::kF64;
  const std::string name = settings.String("dtype").value_or("f64");
  if (name == "f32") {
    dtype = Dtype::kF32;
  } else if (name != "f64") {
    return Report(ConfigFailure(MakeError(ErrorKind::kUnsupportedDtype,
                                          absl::StrCat("dtype '", name,
                                                       "'"))),
                  err);
  }
  auto m = ReadCsvEmbeddings(*in_path);
  if (!m.ok()) return Report(DataFailure(m.status()), err);
  if (absl::Status s = WriteEmbeddings(*m, *out_path, dtype); !s.ok()) {
    return Report(DataFailure(s), err);
  }
  out << absl::StrFormat("rows\t%d\ndim\t%d\n", m->rows(), m->cols());
  return kExitOk;
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Private Frechet distance between a server dataset and a "
               "federated one"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> protocol_keys = {
      {"clients", "client directory, or FILE@round_robin:K, "
                  "FILE@dirichlet:K:ALPHA, FILE@by_label:K:LABELS"},
      {"epsilon", "total epsilon"},
      {"delta", "total delta"},
      {"clip", "l2 clip norm"},
      {"mode", "literal | calibrated | audit"},
      {"seed", "RNG seed (falls back to FRED_SEED)"},
      {"n2", "declared client sample count"},
      {"budget_split", "share of the budget spent on the mean"},
      {"scale_bits", "fixed-point fraction bits"},
  };
  const std::vector<std::pair<std::string, std::string>> parallel_flag = {
      {"parallel", "compute client contributions on worker threads"}};

  CLI::App* compute = app.add_subcommand(
      "compute", "privately compute the distance to one public dataset");
  auto compute_keys = protocol_keys;
  compute_keys.insert(compute_keys.end(),
                      {{"public", "public embeddings (file or directory)"},
                       {"public_name", "name recorded for the public set"},
                       {"out", "report path"},
                       {"save_release", "also persist the private release"}});
  OptionSet compute_opts(compute, compute_keys, parallel_flag);

  CLI::App* rank = app.add_subcommand(
      "rank", "rank candidate datasets against one private release");
  auto rank_keys = protocol_keys;
  rank_keys.insert(
      rank_keys.end(),
      {{"candidates", "comma-separated candidate files or directories"},
       {"release", "release file to reuse, or to create if missing"},
       {"public", "extra candidate listed first"},
       {"out", "report path"}});
  OptionSet rank_opts(rank, rank_keys, parallel_flag);

  CLI::App* bench = app.add_subcommand(
      "synth-bench", "mixture monotonicity benchmark on synthetic data");
  OptionSet bench_opts(
      bench, {{"mix_steps", "comma-separated percentages of source A"},
              {"trials", "private trials per step"},
              {"epsilon", "total epsilon per trial"},
              {"delta", "total delta per trial"},
              {"dim", "embedding dimension"},
              {"separation", "distance between source means"},
              {"n", "target and candidate sample count"},
              {"clients", "number of clients"},
              {"clip", "l2 clip norm"},
              {"mode", "literal | calibrated"},
              {"seed", "RNG seed (falls back to FRED_SEED)"},
              {"scale_bits", "fixed-point fraction bits"},
              {"plot_data", "tab-separated plot data path"},
              {"out", "JSON result path"}});

  CLI::App* import = app.add_subcommand(
      "import-csv", "convert a dim=<d> CSV file to the binary format");
  OptionSet import_opts(import, {{"in", "CSV input"},
                                 {"out", "binary output"},
                                 {"dtype", "f32 | f64"}});

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  struct Command {
    CLI::App* app;
    const OptionSet* options;
    std::function<int(const Settings&, std::ostream&, std::ostream&)> run;
  };
  const std::vector<Command> commands = {
      {compute, &compute_opts, RunCompute},
      {rank, &rank_opts, RunRank},
      {bench, &bench_opts, RunSynthBench},
      {import, &import_opts, RunImportCsv},
  };
  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    auto settings = c.options->Resolve();
    if (!settings.ok()) return Report(ConfigFailure(settings.status()), err);
    return c.run(*settings, out, err);
  }
  return kExitConfig;
}

}  // namespace fred::cli
