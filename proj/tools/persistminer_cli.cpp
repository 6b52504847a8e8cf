// persistminer command-line tool: generate, mine, detect, inject, bench.

#include <openssl/evp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "persistminer/detect.hpp"
#include "persistminer/error.hpp"
#include "persistminer/inject.hpp"
#include "persistminer/miner.hpp"

using namespace persistminer;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, in.gcount());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return "sha256:" + hex.str();
}

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes through a temporary file so a failed run never leaves a partial
// output behind. "-" means stdout.
class Output {
 public:
  explicit Output(std::string path) : path_(std::move(path)) {
    if (path_ != "-") {
      tmp_ = path_ + ".tmp";
      file_.open(tmp_);
      if (!file_) throw Error("cannot open " + path_ + " for writing");
    }
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
  void commit() {
    stream().flush();
    if (!stream()) throw Error("failed writing " + path_);
    if (path_ == "-") return;
    file_.close();
    std::rename(tmp_.c_str(), path_.c_str());
  }
  ~Output() {
    if (file_.is_open()) {
      file_.close();
      std::remove(tmp_.c_str());
    }
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream file_;
};

struct Common {
  std::string input;
  std::string output = "-";
  std::string manifest;
};

void write_manifest(const Common& c, const std::string& command, json config, json timings,
                    json extra = json::object()) {
  std::string path = c.manifest;
  if (path.empty()) {
    if (c.output == "-") return;
    path = c.output + ".manifest.json";
  }
  json m;
  m["tool"] = "persistminer";
  m["version"] = PERSISTMINER_VERSION;
  m["command"] = command;
  m["config"] = std::move(config);
  if (!c.input.empty()) m["input"] = {{"path", c.input}, {"digest", sha256_file(c.input)}};
  m["timings_seconds"] = std::move(timings);
  for (auto& [k, v] : extra.items()) m[k] = v;
  Output out(path);
  out.stream() << m.dump(2) << '\n';
  out.commit();
}

struct MinerFlags {
  double delta_max = 0.0;
  std::size_t k_max = 1;
  std::string view = "id";
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  std::string variant = "offline";

  void add(CLI::App* app, PersistenceParams defaults, std::string variant_default) {
    alpha = defaults.alpha;
    beta = defaults.beta;
    gamma = defaults.gamma;
    variant = std::move(variant_default);
    app->add_option("--delta-max", delta_max, "Maximum snippet duration in seconds")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--k-max", k_max, "Maximum snippet size")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--view", view, "Node view")
        ->check(CLI::IsMember({"id", "label", "order"}, CLI::ignore_case))
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Width exponent")->capture_default_str();
    app->add_option("--beta", beta, "Frequency exponent")->capture_default_str();
    app->add_option("--gamma", gamma, "Spread exponent")->capture_default_str();
  }

  MinerConfig resolve() const {
    MinerConfig c;
    c.delta_max = delta_max;
    c.k_max = k_max;
    c.view = parse_view(view);
    c.params = {alpha, beta, gamma};
    c.variant = parse_variant(variant);
    c.validate();
    return c;
  }

  json to_json() const {
    return {{"delta_max", delta_max}, {"k_max", k_max}, {"view", view},
            {"alpha", alpha},         {"beta", beta},   {"gamma", gamma},
            {"variant", variant}};
  }
};

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "not an integer: " + item);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "not a number: " + item);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void cmd_mine(const Common& c, const MinerFlags& f) {
  const MinerConfig cfg = f.resolve();
  const auto t0 = Clock::now();
  Stream stream = read_stream(c.input);
  const double read_s = seconds_since(t0);
  spdlog::info("read {} updates in {:.3f}s", stream.size(), read_s);

  const auto t1 = Clock::now();
  MiningResult result;
  if (cfg.variant == Variant::Offline) {
    result = mine_offline(stream, cfg);
  } else {
    StreamingMiner miner(cfg);
    for (const auto& u : stream) miner.push(u);
    result = miner.snapshot();
  }
  const double mine_s = seconds_since(t1);
  spdlog::info("mined {} snippets in {:.3f}s", result.snippets.size(), mine_s);

  Output out(c.output);
  auto& os = out.stream();
  os << "snippet_key,frequency,persistence\n";
  for (const auto& [key, s] : result.ranked())
    os << csv_quote(key) << ',' << num(s.frequency) << ',' << num(s.persistence) << '\n';
  out.commit();
  write_manifest(c, "mine", f.to_json(), {{"read", read_s}, {"mine", mine_s}},
                 {{"updates", stream.size()}, {"snippets", result.snippets.size()}});
}

struct DetectFlags {
  std::string detector = "persistence";
  std::uint64_t seed = 0;
  std::size_t trees = 10;
  std::size_t max_leaves = 256;
  std::uint32_t periods = 60;
  std::string labels;
  std::string top_k = "100,500,1000";
};

void cmd_detect(const Common& c, const MinerFlags& f, const DetectFlags& d) {
  DetectConfig cfg;
  cfg.miner = f.resolve();
  cfg.miner.variant = Variant::Streaming;
  cfg.detector = parse_detector(d.detector);
  cfg.forest = {d.trees, d.max_leaves, d.seed};
  cfg.forest.validate();
  cfg.periods = d.periods;
  const auto ks = parse_size_list(d.top_k);

  const auto t0 = Clock::now();
  Stream stream = read_stream(c.input);
  std::vector<int> labels;
  if (!d.labels.empty()) {
    labels = read_labels(d.labels);
    if (labels.size() != stream.size())
      throw ConfigError("label file has " + std::to_string(labels.size()) + " rows but stream has " +
                        std::to_string(stream.size()) + " updates");
  }
  const double read_s = seconds_since(t0);

  Output out(c.output);
  auto& os = out.stream();
  os << "t,snippet_key,score,level\n";
  const auto t1 = Clock::now();
  auto scores = run_detection(stream, cfg, [&](const ScoredOccurrence& s) {
    os << num(s.t) << ',' << csv_quote(s.key) << ',' << num(s.verdict.score) << ','
       << s.verdict.level << '\n';
  });
  const double detect_s = seconds_since(t1);
  out.commit();
  spdlog::info("scored {} updates in {:.3f}s", stream.size(), detect_s);

  json extra = {{"updates", stream.size()}};
  if (!labels.empty()) {
    json metrics;
    const double auc = roc_auc(scores, labels);
    metrics["auc"] = auc;
    std::ostream& summary = c.output == "-" ? std::cerr : std::cout;
    summary << "metric,value\n" << "auc," << num(auc) << '\n';
    for (std::size_t k : ks) {
      const double f1 = f1_at_k(scores, labels, k);
      metrics["f1_at_" + std::to_string(k)] = f1;
      summary << "f1@" << k << ',' << num(f1) << '\n';
    }
    extra["metrics"] = metrics;
  }
  json config = f.to_json();
  config["variant"] = "streaming";
  config["detector"] = d.detector;
  config["seed"] = d.seed;
  config["trees"] = d.trees;
  config["max_leaves"] = d.max_leaves;
  config["periods"] = d.periods;
  config["labels"] = d.labels;
  config["top_k"] = ks;
  write_manifest(c, "detect", config, {{"read", read_s}, {"detect", detect_s}}, extra);
}

struct InjectFlags {
  InjectionSpec spec;
  std::string labels_out;
  std::uint32_t fixed = 0;
};

void cmd_inject(const Common& c, InjectFlags& f) {
  if (f.fixed) f.spec.fixed_occurrences = f.fixed;
  const auto t0 = Clock::now();
  Stream host = read_stream(c.input);
  auto result = inject(host, f.spec);
  const double inject_s = seconds_since(t0);
  spdlog::info("injected {} updates across {} trips", result.injected_count(), result.trips.size());

  Output out(c.output);
  write_stream(out.stream(), result.stream);
  out.commit();
  write_labels(f.labels_out, result.labels);
  const auto& s = f.spec;
  json config = {{"trip_count", s.trip_count}, {"occ_min", s.occ_min},     {"occ_max", s.occ_max},
                 {"jitter", s.jitter},         {"margin", s.margin},       {"trip_duration", s.trip_duration},
                 {"seed", s.seed},             {"labels", f.labels_out}};
  if (s.fixed_occurrences) config["fixed_occurrences"] = *s.fixed_occurrences;
  write_manifest(c, "inject", config, {{"inject", inject_s}},
                 {{"injected_updates", result.injected_count()}, {"host_updates", host.size()}});
}

struct GenerateFlags {
  std::string kind = "synthetic";
  std::size_t n = 100000;
  std::optional<double> rate;  // default depends on kind
  std::size_t nodes = 100;
  std::uint64_t seed = 0;
  double skew = 1.0;
  double duration = 900.0;
};

Stream generate(const GenerateFlags& g) {
  if (g.kind == "synthetic") return generate_synthetic(g.n, g.rate.value_or(10.0), g.nodes, g.seed);
  TripStreamOptions o;
  o.trips = g.n;
  if (g.rate) o.rate = *g.rate;
  o.node_count = g.nodes;
  o.popularity_skew = g.skew;
  o.mean_duration = g.duration;
  o.seed = g.seed;
  return generate_trip_stream(o);
}

json generate_json(const GenerateFlags& g) {
  const double rate = g.rate.value_or(g.kind == "synthetic" ? 10.0 : TripStreamOptions{}.rate);
  return {{"kind", g.kind}, {"n", g.n},         {"rate", rate},        {"nodes", g.nodes},
          {"seed", g.seed}, {"skew", g.skew}, {"duration", g.duration}};
}

void cmd_generate(const Common& c, const GenerateFlags& g) {
  const auto t0 = Clock::now();
  Stream s = generate(g);
  Output out(c.output);
  write_stream(out.stream(), s);
  out.commit();
  write_manifest(c, "generate", generate_json(g), {{"generate", seconds_since(t0)}},
                 {{"updates", s.size()}});
}

struct BenchFlags {
  std::string deltas = "60,600,3600";
  std::string kmaxes = "1,2,3";
  std::size_t reps = 3;
  std::size_t jobs = 1;
  std::string view = "id";
  std::string variant = "offline";
  GenerateFlags gen;
};

void cmd_bench(const Common& c, const BenchFlags& b) {
  const auto deltas = parse_double_list(b.deltas);
  const auto kmaxes = parse_size_list(b.kmaxes);
  if (deltas.empty() || kmaxes.empty()) throw CLI::ValidationError("bench", "empty grid");
  if (b.reps == 0) throw CLI::ValidationError("--reps", "must be >= 1");

  const auto t0 = Clock::now();
  const Stream stream = c.input.empty() ? generate(b.gen) : read_stream(c.input);
  const double load_s = seconds_since(t0);
  const double span = stream.empty() ? 0.0 : stream.back().t - stream.front().t;

  struct Cell {
    double delta;
    std::size_t k;
    double mean_s = 0;
    double min_s = 0;
    std::uint64_t occurrences = 0;
  };
  std::vector<Cell> cells;
  for (std::size_t k : kmaxes)
    for (double d : deltas) cells.push_back({d, k});

  auto run_cell = [&](Cell& cell) {
    MinerConfig cfg;
    cfg.delta_max = cell.delta;
    cfg.k_max = cell.k;
    cfg.view = parse_view(b.view);
    cfg.variant = parse_variant(b.variant);
    cfg.validate();
    double total = 0, best = 1e300;
    for (std::size_t r = 0; r < b.reps; ++r) {
      const auto t = Clock::now();
      std::uint64_t occ = 0;
      if (cfg.variant == Variant::Offline) {
        OfflineMiner m(cfg);
        for (const auto& u : stream) m.push(u);
        occ = m.occurrence_count();
        auto res = m.finish();
        (void)res;
      } else {
        mine_streaming(stream, cfg, [&](const OccurrenceEvent&) { ++occ; });
      }
      const double s = seconds_since(t);
      total += s;
      best = std::min(best, s);
      cell.occurrences = occ;
    }
    cell.mean_s = total / static_cast<double>(b.reps);
    cell.min_s = best;
    spdlog::info("delta_max={} k_max={} mean {:.3f}s", cell.delta, cell.k, cell.mean_s);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(b.jobs, cells.size()));
  if (jobs == 1) {
    for (auto& cell : cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    for (std::size_t j = 0; j < jobs; ++j)
      workers.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
      }));
    for (auto& w : workers) w.get();
  }

  Output out(c.output);
  auto& os = out.stream();
  os << "delta_max,k_max,updates,reps,occurrences,mean_seconds,min_seconds,updates_per_second,"
        "stream_seconds_per_wall_second\n";
  for (const auto& cell : cells) {
    const double ups = cell.mean_s > 0 ? static_cast<double>(stream.size()) / cell.mean_s : 0.0;
    const double speedup = cell.mean_s > 0 ? span / cell.mean_s : 0.0;
    os << num(cell.delta) << ',' << cell.k << ',' << stream.size() << ',' << b.reps << ','
       << cell.occurrences << ',' << num(cell.mean_s) << ',' << num(cell.min_s) << ',' << num(ups)
       << ',' << num(speedup) << '\n';
  }
  out.commit();
  json config = {{"delta_max", deltas}, {"k_max", kmaxes}, {"reps", b.reps},
                 {"jobs", jobs},        {"view", b.view},  {"variant", b.variant}};
  if (c.input.empty()) config["generate"] = generate_json(b.gen);
  write_manifest(c, "bench", config, {{"load", load_s}, {"total", seconds_since(t0)}},
                 {{"updates", stream.size()}});
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("persistminer");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("PERSISTMINER_LOG"))
    spdlog::set_level(spdlog::level::from_str(lvl));
}

void add_common(CLI::App* app, Common& c, bool needs_input) {
  auto* in = app->add_option("-i,--input", c.input, "Input edge stream (t,op,src,rel,dst[,src_label,dst_label])")
                 ->check(CLI::ExistingFile);
  if (needs_input) in->required();
  app->add_option("-o,--output", c.output, "Output file, '-' for stdout")->capture_default_str();
  app->add_option("--manifest", c.manifest, "Manifest path (default: <output>.manifest.json)");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Persistent activity snippet mining over edge streams"};
  app.set_version_flag("--version", PERSISTMINER_VERSION);
  app.require_subcommand(1);

  Common mine_c, detect_c, inject_c, gen_c, bench_c;

  auto* mine = app.add_subcommand("mine", "Mine snippets and write a persistence-vs-frequency CSV");
  add_common(mine, mine_c, true);
  MinerFlags mine_f;
  mine_f.add(mine, {}, "offline");
  mine->add_option("--variant", mine_f.variant, "Miner variant")
      ->check(CLI::IsMember({"offline", "streaming"}, CLI::ignore_case))
      ->capture_default_str();

  auto* detect = app.add_subcommand("detect", "Score snippet occurrences for anomalies");
  add_common(detect, detect_c, true);
  MinerFlags detect_f;
  detect_f.add(detect, {1.0, 0.2, 10.0}, "streaming");
  DetectFlags detect_d;
  detect->add_option("--detector", detect_d.detector, "Scoring method")
      ->check(CLI::IsMember({"persistence", "penminer", "freq", "ds"}, CLI::ignore_case))
      ->capture_default_str();
  detect->add_option("--seed", detect_d.seed, "Forest seed")->capture_default_str();
  detect->add_option("--trees", detect_d.trees, "Trees in the forest")->capture_default_str();
  detect->add_option("--max-leaves", detect_d.max_leaves, "Points per tree")->capture_default_str();
  detect->add_option("--periods", detect_d.periods, "Periods for the DS detector")->capture_default_str();
  detect->add_option("--labels", detect_d.labels, "Label file (line_index,label)")->check(CLI::ExistingFile);
  detect->add_option("--top-k", detect_d.top_k, "Comma-separated K values for F1@K")->capture_default_str();

  auto* inj = app.add_subcommand("inject", "Inject subtly persistent trips into a host stream");
  add_common(inj, inject_c, true);
  InjectFlags inject_f;
  inj->add_option("--labels-out", inject_f.labels_out, "Label file to write")->required();
  inj->add_option("--trips", inject_f.spec.trip_count, "Number of injected trips")->capture_default_str();
  inj->add_option("--occ-min", inject_f.spec.occ_min, "Minimum occurrences per trip")->capture_default_str();
  inj->add_option("--occ-max", inject_f.spec.occ_max, "Maximum occurrences per trip")->capture_default_str();
  inj->add_option("--fixed-occurrences", inject_f.fixed, "Force the occurrence count");
  inj->add_option("--jitter", inject_f.spec.jitter, "Jitter bound in seconds")->capture_default_str();
  inj->add_option("--margin", inject_f.spec.margin, "Start/end margin in seconds")->capture_default_str();
  inj->add_option("--trip-duration", inject_f.spec.trip_duration,
                  "Seconds until the matching deletion (0: insertions only)")
      ->capture_default_str();
  inj->add_option("--seed", inject_f.spec.seed, "Random seed")->capture_default_str();

  auto* gen = app.add_subcommand("generate", "Write a synthetic edge stream");
  add_common(gen, gen_c, false);
  gen->remove_option(gen->get_option("--input"));
  GenerateFlags gen_f;
  auto add_gen = [](CLI::App* a, GenerateFlags& g, const char* rate_help) {
    a->add_option("--kind", g.kind, "synthetic | trips")
        ->check(CLI::IsMember({"synthetic", "trips"}))
        ->capture_default_str();
    a->add_option("-n,--count", g.n, "Updates (synthetic) or trips (trips)")->capture_default_str();
    a->add_option("--rate", g.rate, rate_help);
    a->add_option("--nodes", g.nodes, "Node universe size")->capture_default_str();
    a->add_option("--seed", g.seed, "Random seed")->capture_default_str();
    a->add_option("--skew", g.skew, "Station popularity exponent (trips)")->capture_default_str();
    a->add_option("--duration", g.duration, "Mean trip duration in seconds (trips)")->capture_default_str();
  };
  add_gen(gen, gen_f, "Mean arrivals per second (synthetic: 10, trips: 0.0125)");

  auto* bench = app.add_subcommand("bench", "Measure mining throughput over a (delta_max, k_max) grid");
  add_common(bench, bench_c, false);
  BenchFlags bench_f;
  bench_f.gen.rate = 0.05;  // keeps window occupancy small at delta_max in the thousands
  bench->add_option("--delta-max", bench_f.deltas, "Comma-separated delta_max values")->capture_default_str();
  bench->add_option("--k-max", bench_f.kmaxes, "Comma-separated k_max values")->capture_default_str();
  bench->add_option("--reps", bench_f.reps, "Repetitions per cell")->capture_default_str();
  bench->add_option("--jobs", bench_f.jobs, "Grid cells run in parallel")->capture_default_str();
  bench->add_option("--view", bench_f.view, "Node view")
      ->check(CLI::IsMember({"id", "label", "order"}, CLI::ignore_case))
      ->capture_default_str();
  bench->add_option("--variant", bench_f.variant, "Miner variant")
      ->check(CLI::IsMember({"offline", "streaming"}, CLI::ignore_case))
      ->capture_default_str();
  add_gen(bench, bench_f.gen, "Mean arrivals per second [0.05]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*mine) cmd_mine(mine_c, mine_f);
    if (*detect) cmd_detect(detect_c, detect_f, detect_d);
    if (*inj) cmd_inject(inject_c, inject_f);
    if (*gen) cmd_generate(gen_c, gen_f);
    if (*bench) cmd_bench(bench_c, bench_f);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
