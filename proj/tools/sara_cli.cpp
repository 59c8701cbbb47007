// Copyright 2026 The SARA Authors. All Rights Reserved.
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

// sara-cli: command-line surface over the SARA C API.
//
// Exit codes: 0 success, 1 check/property failure, 2 usage error,
// 3 I/O or format error.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sara/sara.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kSchemaVersion = 1;

struct CliError {
  int exit_code;
  std::string message;
};

struct TensorDeleter {
  void operator()(sara_tensor* t) const { sara_tensor_destroy(t); }
};
using TensorPtr = std::unique_ptr<sara_tensor, TensorDeleter>;

struct BatchDeleter {
  void operator()(sara_batch_result* r) const { sara_batch_result_destroy(r); }
};
using BatchPtr = std::unique_ptr<sara_batch_result, BatchDeleter>;

struct HuddleDeleter {
  void operator()(sara_huddle* h) const { sara_huddle_destroy(h); }
};
using HuddlePtr = std::unique_ptr<sara_huddle, HuddleDeleter>;

[[noreturn]] void Throw(int code, const std::string& what) {
  throw CliError{code, what};
}

// Library failures on user-supplied files are format errors (3); anything
// else reaching here is a usage error (2).
void Check(sara_status s, const std::string& context, int code = kExitUsage) {
  if (s != SARA_OK) {
    Throw(code, context + ": " + sara_status_name(s) + ": " + sara_last_error());
  }
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double ParseDouble(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    Throw(kExitUsage, "malformed " + what + ": '" + s + "'");
  }
}

std::uint32_t ParseCount(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(s, &pos);
    if (pos != s.size() || s.empty() || s[0] == '-' || v > 0xffffffffUL) {
      throw std::invalid_argument(s);
    }
    return static_cast<std::uint32_t>(v);
  } catch (const std::exception&) {
    Throw(kExitUsage, "malformed " + what + ": '" + s + "'");
  }
}

std::vector<std::uint32_t> ParseDims(const std::string& s, std::size_t n,
                                     const std::string& what) {
  const auto parts = Split(s, 'x');
  if (parts.size() != n) Throw(kExitUsage, "malformed " + what + ": '" + s + "'");
  std::vector<std::uint32_t> dims;
  for (const auto& p : parts) {
    const auto v = ParseCount(p, what);
    if (v == 0) Throw(kExitUsage, what + " entries must be >= 1");
    dims.push_back(v);
  }
  return dims;
}

sara_bin_grid ParseGrid(const std::string& s) {
  const auto d = ParseDims(s, 3, "--grid (HxWxS)");
  return {d[0], d[1], d[2]};
}

sara_roi ParseRoi(const std::string& s) {
  const auto parts = Split(s, ',');
  if (parts.size() != 4) Throw(kExitUsage, "--roi needs x1,y1,x2,y2");
  return {ParseDouble(parts[0], "--roi"), ParseDouble(parts[1], "--roi"),
          ParseDouble(parts[2], "--roi"), ParseDouble(parts[3], "--roi")};
}

// Accepts "0.4,0.2", "[0.4, 0.2]" or a path to a file holding either.
std::vector<double> ParseScores(const std::string& arg, const std::string& what) {
  std::string text = arg;
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    if (!in) Throw(kExitIo, "cannot read " + arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      return Json::parse(text).get<std::vector<double>>();
    } catch (const std::exception& e) {
      Throw(kExitUsage, "malformed " + what + ": " + e.what());
    }
  }
  std::vector<double> out;
  for (auto& item : Split(text, ',')) {
    item.erase(0, item.find_first_not_of(" \t\r\n"));
    item.erase(item.find_last_not_of(" \t\r\n") + 1);
    out.push_back(ParseDouble(item, what));
  }
  if (out.empty()) Throw(kExitUsage, what + " is empty");
  return out;
}

std::vector<unsigned> ParseWorkers(const std::string& s) {
  std::vector<unsigned> out;
  for (const auto& p : Split(s, ',')) {
    const auto v = ParseCount(p, "--workers");
    if (v == 0) Throw(kExitUsage, "--workers entries must be >= 1");
    out.push_back(v);
  }
  if (out.empty()) Throw(kExitUsage, "--workers is empty");
  return out;
}

std::string Hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

void Emit(const Json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  out << text;
  if (!out) Throw(kExitIo, "cannot write " + out_path);
}

TensorPtr ReadTensor(const std::string& path, sara_tensor_kind kind) {
  sara_tensor* t = nullptr;
  Check(sara_tensor_read_file(path.c_str(), kind, &t), path, kExitIo);
  return TensorPtr(t);
}

// ---------------------------------------------------------------------------

struct PoolArgs {
  std::string feature, prob, roi, grid = "7x7x2", out;
};

int RunPool(const PoolArgs& a) {
  const auto roi = ParseRoi(a.roi);
  const auto grid = ParseGrid(a.grid);
  const auto feature = ReadTensor(a.feature, SARA_TENSOR_FEATURE_MAP);
  sara_tensor* out = nullptr;
  if (a.prob.empty()) {
    Check(sara_roi_align_forward(feature.get(), roi, grid, &out), "pool");
  } else {
    const auto prob = ReadTensor(a.prob, SARA_TENSOR_PROB_MAP);
    Check(sara_sa_roi_align_forward(feature.get(), roi, prob.get(), grid, &out),
          "pool");
  }
  const TensorPtr pooled(out);
  Check(sara_tensor_write_file(pooled.get(), a.out.c_str(), nullptr), a.out, kExitIo);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GradcheckArgs {
  std::string kernel = "roialign";
  std::uint32_t seeds = 100;
  std::uint64_t seed_base = 0;
  double eps = 1e-3;
  double tol = 1e-3;
  std::string out;
};

int RunGradcheck(const GradcheckArgs& a) {
  if (a.seeds == 0) Throw(kExitUsage, "--seeds must be >= 1");
  if (!(a.eps > 0.0)) Throw(kExitUsage, "--eps must be > 0");
  if (!(a.tol >= 0.0)) Throw(kExitUsage, "--tol must be >= 0");
  const bool shaped = a.kernel == "sa";
  const auto kind = shaped ? SARA_KERNEL_SA : SARA_KERNEL_ROIALIGN;
  std::vector<sara_grad_target> targets{SARA_TARGET_FEATURE};
  if (shaped) targets.push_back(SARA_TARGET_PROB);

  Json cases = Json::array();
  Json worst;
  double worst_err = -1.0;
  bool all_pass = true;
  for (std::uint64_t s = a.seed_base; s < a.seed_base + a.seeds; ++s) {
    for (auto target : targets) {
      sara_gradcheck_report rep{};
      Check(sara_gradcheck_random(kind, s, target, a.eps, a.tol, &rep), "gradcheck");
      const char* tname = target == SARA_TARGET_PROB ? "prob" : "feature";
      all_pass = all_pass && rep.pass;
      cases.push_back({{"seed", s},
                       {"target", tname},
                       {"max_rel_error", rep.max_rel_error},
                       {"pass", rep.pass != 0}});
      if (rep.max_rel_error > worst_err) {
        worst_err = rep.max_rel_error;
        worst = {{"seed", s},
                 {"target", tname},
                 {"index", rep.worst_index},
                 {"analytic", rep.analytic_value},
                 {"numeric", rep.numeric_value},
                 {"rel_error", rep.max_rel_error}};
      }
    }
  }
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "gradcheck";
  doc["kernel"] = a.kernel;
  doc["seeds"] = a.seeds;
  doc["eps"] = a.eps;
  doc["tol"] = a.tol;
  doc["pass"] = all_pass;
  doc["worst"] = worst;
  doc["cases"] = cases;
  Emit(doc, a.out);
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string sizes = "256x64x64x1000";
  std::string workers;
  std::string grid = "7x7x2";
  std::uint32_t repeats = 5;
  std::uint32_t oracle_rois = 20;
  std::uint64_t seed = 0;
  std::string out;
};

double Seconds(std::chrono::steady_clock::duration d) {
  return std::chrono::duration<double>(d).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int RunBench(const BenchArgs& a) {
  if (a.repeats == 0) Throw(kExitUsage, "--repeats must be >= 1");
  if (a.oracle_rois == 0) Throw(kExitUsage, "--oracle-rois must be >= 1");
  std::string workers_spec = a.workers;
  if (workers_spec.empty()) {
    const char* env = std::getenv("SARA_WORKERS");
    workers_spec = env && *env ? env : "1,2,8";
  }
  const auto workers = ParseWorkers(workers_spec);
  const auto grid = ParseGrid(a.grid);

  Json records = Json::array();
  bool deterministic = true;
  for (const auto& size : Split(a.sizes, ',')) {
    const auto d = ParseDims(size, 4, "--sizes (CxHxWxR)");
    const std::uint32_t C = d[0], H = d[1], W = d[2], R = d[3];

    sara_tensor* raw = nullptr;
    Check(sara_random_feature_map(a.seed, C, H, W, 0.0f, 1.0f, &raw), "bench");
    const TensorPtr feature(raw);
    Check(sara_random_prob_map(a.seed + 1, 28, 28, &raw), "bench");
    const TensorPtr prob(raw);
    std::vector<sara_roi> rois(R);
    Check(sara_random_rois(a.seed + 2, H, W, R, rois.data()), "bench");

    for (const bool shaped : {false, true}) {
      std::vector<sara_batch_job> jobs(R);
      for (std::uint32_t i = 0; i < R; ++i) {
        jobs[i] = {feature.get(), rois[i], shaped ? prob.get() : nullptr, grid,
                   nullptr};
      }

      // Oracle cost per RoI on a fixed prefix of the workload.
      const std::uint32_t n_oracle = std::min(a.oracle_rois, R);
      std::vector<double> buf(std::size_t{C} * grid.rows * grid.cols);
      std::vector<double> oracle_times;
      for (std::uint32_t rep = 0; rep < std::min<std::uint32_t>(a.repeats, 3); ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::uint32_t i = 0; i < n_oracle; ++i) {
          Check(shaped ? sara_oracle_sa_roi_align(feature.get(), rois[i], prob.get(),
                                                  grid, buf.data(), buf.size())
                       : sara_oracle_roi_align(feature.get(), rois[i], grid,
                                               buf.data(), buf.size()),
                "bench oracle");
        }
        oracle_times.push_back(Seconds(std::chrono::steady_clock::now() - t0) / n_oracle);
      }
      const double oracle_per_roi = Median(oracle_times);

      std::uint64_t reference_checksum = 0;
      for (std::size_t wi = 0; wi < workers.size(); ++wi) {
        const unsigned nw = workers[wi];
        std::vector<double> times;
        std::uint64_t checksum = 0;
        for (std::uint32_t rep = 0; rep <= a.repeats; ++rep) {  // rep 0 = warmup
          sara_batch_result* res = nullptr;
          const auto t0 = std::chrono::steady_clock::now();
          Check(sara_batch_run(jobs.data(), jobs.size(), SARA_BATCH_FORWARD, nw, &res),
                "bench");
          const double dt = Seconds(std::chrono::steady_clock::now() - t0);
          const BatchPtr result(res);
          const auto cs = sara_batch_result_checksum(result.get());
          if (rep > 0) times.push_back(dt);
          if (rep > 0 && cs != checksum) deterministic = false;
          checksum = cs;
        }
        if (wi == 0) reference_checksum = checksum;
        if (checksum != reference_checksum) deterministic = false;
        const double wall = Median(times);
        const double kernel_per_roi = wall / R;
        records.push_back({
            {"kernel", shaped ? "sa" : "roialign"},
            {"dims", {C, H, W}},
            {"grid", {grid.rows, grid.cols, grid.samples_per_side}},
            {"jobs", R},
            {"workers", nw},
            {"wall_time_s", wall},
            {"throughput_rois_per_s", wall > 0 ? R / wall : 0.0},
            {"oracle_rois", n_oracle},
            {"oracle_time_per_roi_s", oracle_per_roi},
            {"speedup_vs_oracle", kernel_per_roi > 0 ? oracle_per_roi / kernel_per_roi : 0.0},
            {"checksum", Hex(checksum)},
        });
      }
    }
  }
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "bench";
  doc["repeats"] = a.repeats;
  doc["statistic"] = "median";
  doc["deterministic"] = deterministic;
  doc["records"] = records;
  Emit(doc, a.out);
  if (!deterministic) {
    std::cerr << "bench: checksum differs across worker counts or repeats\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct HuddleArgs {
  std::string sigmas = "0,0.05,0.1";
  std::uint64_t seed = 0;
  std::string grid = "7x7x2";
  std::string csv, export_dir, out;
};

int RunDemoHuddle(const HuddleArgs& a) {
  const auto grid = ParseGrid(a.grid);
  std::vector<double> sigmas;
  for (const auto& s : Split(a.sigmas, ',')) {
    const double v = ParseDouble(s, "--sigma");
    if (!(v >= 0.0)) Throw(kExitUsage, "--sigma entries must be >= 0");
    sigmas.push_back(v);
  }
  if (sigmas.empty()) Throw(kExitUsage, "--sigma is empty");
  if (!a.export_dir.empty()) std::filesystem::create_directories(a.export_dir);

  Json rows = Json::array();
  bool ordering = true;
  std::ostringstream csv;
  csv.precision(17);
  csv << "sigma,cos_plain,cos_shaped\n";
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    sara_huddle_params p;
    sara_huddle_default_params(&p);
    p.sigma = sigmas[i];
    p.seed = a.seed;
    sara_huddle* raw = nullptr;
    Check(sara_huddle_generate(&p, &raw), "demo-huddle");
    const HuddlePtr h(raw);
    double plain = 0.0, shaped = 0.0;
    const auto st = sara_huddle_separability(h.get(), grid, &plain, &shaped);
    Json row{{"sigma", sigmas[i]}};
    if (st == SARA_ERR_UNDEFINED_SIMILARITY) {
      row["cos_plain"] = nullptr;
      row["cos_shaped"] = nullptr;
      row["error"] = sara_last_error();
      if (sigmas[i] <= 0.1) ordering = false;
    } else {
      Check(st, "demo-huddle");
      row["cos_plain"] = plain;
      row["cos_shaped"] = shaped;
      if (sigmas[i] <= 0.1 && !(shaped < plain)) ordering = false;
      csv << sigmas[i] << ',' << plain << ',' << shaped << '\n';
    }
    rows.push_back(row);
    if (!a.export_dir.empty()) {
      const auto dir = std::filesystem::path(a.export_dir) / ("sigma_" + std::to_string(i));
      std::filesystem::create_directories(dir);
      Check(sara_huddle_export(h.get(), dir.string().c_str()), "export", kExitIo);
    }
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    out << csv.str();
    if (!out) Throw(kExitIo, "cannot write " + a.csv);
  }
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "demo-huddle";
  doc["seed"] = a.seed;
  doc["grid"] = {grid.rows, grid.cols, grid.samples_per_side};
  doc["ordering_holds"] = ordering;
  doc["rows"] = rows;
  Emit(doc, a.out);
  return ordering ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct FuseArgs {
  std::string sb, sr, out;
  double alpha = sara_default_fusion_alpha();
  std::size_t background = 0;
};

int RunFuse(const FuseArgs& a) {
  const auto sb = ParseScores(a.sb, "--sb");
  const auto sr = ParseScores(a.sr, "--sr");
  if (sb.size() != sr.size()) {
    Throw(kExitUsage, "--sb and --sr differ in length (" +
                          std::to_string(sb.size()) + " vs " +
                          std::to_string(sr.size()) + ")");
  }
  std::vector<double> fused(sb.size());
  Check(sara_fuse_scores(sb.data(), sr.data(), sb.size(), a.background, a.alpha,
                         fused.data()),
        "fuse");
  const auto argmax = static_cast<std::size_t>(
      std::max_element(fused.begin(), fused.end()) - fused.begin());
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "fuse";
  doc["alpha"] = a.alpha;
  doc["background_index"] = a.background;
  doc["fused"] = fused;
  doc["argmax"] = argmax;
  Emit(doc, a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape-aware RoIAlign kernels: pooling, gradient checks, "
               "benchmarks and the huddled-instance demo"};
  app.set_version_flag("--version", std::string(sara_version()));
  app.require_subcommand(1);

  PoolArgs pool;
  auto* pool_cmd = app.add_subcommand("pool", "Pool a RoI from a feature map file");
  pool_cmd->add_option("--feature", pool.feature, "Feature map (SARA, C x H x W)")->required();
  pool_cmd->add_option("--roi", pool.roi, "x1,y1,x2,y2 in feature-map pixels")->required();
  pool_cmd->add_option("--grid", pool.grid, "Bins and samples as HxWxS")->capture_default_str();
  pool_cmd->add_option("--prob", pool.prob, "Probability map (SARA, H_p x W_p); selects the shape-aware kernel");
  pool_cmd->add_option("--out", pool.out, "Output pooled grid (SARA)")->required();

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  gc_cmd->add_option("--kernel", gc.kernel, "roialign or sa")
      ->check(CLI::IsMember({"roialign", "sa"}))->capture_default_str();
  gc_cmd->add_option("--seeds", gc.seeds, "Number of random instances")->capture_default_str();
  gc_cmd->add_option("--seed-base", gc.seed_base, "First seed")->capture_default_str();
  gc_cmd->add_option("--eps", gc.eps, "Finite-difference step")->capture_default_str();
  gc_cmd->add_option("--tol", gc.tol, "Max relative error")->capture_default_str();
  gc_cmd->add_option("--out", gc.out, "Write the JSON report here instead of stdout");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time kernels against the oracle");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma list of CxHxWxR workloads")->capture_default_str();
  bench_cmd->add_option("--workers", bench.workers, "Comma list of worker counts (default $SARA_WORKERS or 1,2,8)");
  bench_cmd->add_option("--grid", bench.grid, "Bins and samples as HxWxS")->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats, "Timed repeats after one warmup")->capture_default_str();
  bench_cmd->add_option("--oracle-rois", bench.oracle_rois, "RoIs timed through the oracle")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Workload seed")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Write the JSON report here instead of stdout");

  HuddleArgs huddle;
  auto* huddle_cmd = app.add_subcommand("demo-huddle", "Feature separability on huddled instances");
  huddle_cmd->add_option("--sigma", huddle.sigmas, "Comma list of noise levels")->capture_default_str();
  huddle_cmd->add_option("--seed", huddle.seed, "Scenario seed")->capture_default_str();
  huddle_cmd->add_option("--grid", huddle.grid, "Bins and samples as HxWxS")->capture_default_str();
  huddle_cmd->add_option("--csv", huddle.csv, "Also write sigma,cos_plain,cos_shaped rows here");
  huddle_cmd->add_option("--export-dir", huddle.export_dir, "Export each scenario (SARA tensors + JSON)");
  huddle_cmd->add_option("--out", huddle.out, "Write the JSON report here instead of stdout");

  FuseArgs fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse box-head and refining-head class scores");
  fuse_cmd->add_option("--sb", fuse.sb, "Box-head scores: inline list, JSON array or file")->required();
  fuse_cmd->add_option("--sr", fuse.sr, "Refining-head scores: inline list, JSON array or file")->required();
  fuse_cmd->add_option("--alpha", fuse.alpha, "Weight of the refining scores")->capture_default_str();
  fuse_cmd->add_option("--background", fuse.background, "Background class index")->capture_default_str();
  fuse_cmd->add_option("--out", fuse.out, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*pool_cmd) return RunPool(pool);
    if (*gc_cmd) return RunGradcheck(gc);
    if (*bench_cmd) return RunBench(bench);
    if (*huddle_cmd) return RunDemoHuddle(huddle);
    if (*fuse_cmd) return RunFuse(fuse);
  } catch (const CliError& e) {
    std::cerr << "sara-cli: " << e.message << '\n';
    if (e.exit_code == kExitUsage) {
      std::cerr << "run 'sara-cli <command> --help' for usage\n";
    }
    return e.exit_code;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "sara-cli: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
