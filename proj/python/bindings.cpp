#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "persistminer/detect.hpp"
#include "persistminer/error.hpp"
#include "persistminer/inject.hpp"
#include "persistminer/miner.hpp"
#include "persistminer/persistence.hpp"

namespace py = pybind11;
using namespace persistminer;

namespace {

PersistenceParams params_of(double alpha, double beta, double gamma) {
  PersistenceParams p{alpha, beta, gamma};
  p.validate();
  return p;
}

MinerConfig miner_config(double delta_max, std::size_t k_max, const std::string& view, double alpha,
                         double beta, double gamma, const std::string& variant) {
  MinerConfig c;
  c.delta_max = delta_max;
  c.k_max = k_max;
  c.view = parse_view(view);
  c.params = {alpha, beta, gamma};
  c.variant = parse_variant(variant);
  c.validate();
  return c;
}

py::list ranked_rows(const MiningResult& r) {
  py::list rows;
  for (const auto& [key, s] : r.ranked())
    rows.append(py::make_tuple(key, s.occ_count, s.frequency, s.persistence));
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Persistent activity snippet mining over edge streams";
  m.attr("__version__") = PERSISTMINER_VERSION;

  auto base = py::register_exception<Error>(m, "PersistMinerError");
  py::register_exception<StreamError>(m, "StreamError", base.ptr());
  py::register_exception<OrderingError>(m, "OrderingError", base.ptr());
  py::register_exception<IntervalError>(m, "IntervalError", base.ptr());
  py::register_exception<ViewError>(m, "ViewError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ExhaustionError>(m, "ExhaustionError", base.ptr());

  py::class_<EdgeUpdate>(m, "EdgeUpdate")
      .def(py::init([](double t, const std::string& op, std::string src, std::string rel,
                       std::string dst, std::optional<std::string> src_label,
                       std::optional<std::string> dst_label) {
             if (op != "+" && op != "-") throw ConfigError("op must be '+' or '-'");
             EdgeUpdate u;
             u.t = t;
             u.op = op == "+" ? Op::Insert : Op::Delete;
             u.src = std::move(src);
             u.rel = std::move(rel);
             u.dst = std::move(dst);
             u.src_label = std::move(src_label);
             u.dst_label = std::move(dst_label);
             return u;
           }),
           py::arg("t"), py::arg("op"), py::arg("src"), py::arg("rel"), py::arg("dst"),
           py::arg("src_label") = py::none(), py::arg("dst_label") = py::none())
      .def_readwrite("t", &EdgeUpdate::t)
      .def_property_readonly("op", [](const EdgeUpdate& u) { return std::string(1, op_char(u.op)); })
      .def_readwrite("src", &EdgeUpdate::src)
      .def_readwrite("rel", &EdgeUpdate::rel)
      .def_readwrite("dst", &EdgeUpdate::dst)
      .def_readwrite("src_label", &EdgeUpdate::src_label)
      .def_readwrite("dst_label", &EdgeUpdate::dst_label)
      .def("__eq__", [](const EdgeUpdate& a, const EdgeUpdate& b) { return a == b; })
      .def("__repr__", [](const EdgeUpdate& u) { return "EdgeUpdate(" + format_update(u) + ")"; });

  m.def("parse_update", &parse_update, py::arg("line"), py::arg("line_no") = 1);
  m.def("format_update", &format_update);
  m.def("read_stream", py::overload_cast<const std::string&>(&read_stream), py::arg("path"));
  m.def(
      "write_stream",
      [](const std::string& path, const Stream& s) { write_stream(path, s); }, py::arg("path"),
      py::arg("stream"));
  m.def("generate_synthetic", &generate_synthetic, py::arg("n"), py::arg("rate"),
        py::arg("node_count"), py::arg("seed") = 0);
  m.def(
      "generate_trip_stream",
      [](std::size_t trips, double rate, std::size_t node_count, double skew, double mean_duration,
         std::uint64_t seed) {
        TripStreamOptions o;
        o.trips = trips;
        o.rate = rate;
        o.node_count = node_count;
        o.popularity_skew = skew;
        o.mean_duration = mean_duration;
        o.seed = seed;
        return generate_trip_stream(o);
      },
      py::arg("trips") = TripStreamOptions{}.trips, py::arg("rate") = TripStreamOptions{}.rate,
      py::arg("node_count") = TripStreamOptions{}.node_count,
      py::arg("skew") = TripStreamOptions{}.popularity_skew,
      py::arg("mean_duration") = TripStreamOptions{}.mean_duration, py::arg("seed") = 0);

  m.def(
      "persistence",
      [](std::vector<double> occ, double t_start, double t_end, double alpha, double beta,
         double gamma) { return persistence(occ, t_start, t_end, params_of(alpha, beta, gamma)); },
      py::arg("occurrences"), py::arg("t_start"), py::arg("t_end"), py::arg("alpha") = 1.0,
      py::arg("beta") = 1.0, py::arg("gamma") = 1.0);
  m.def(
      "persistence_components",
      [](std::vector<double> occ, double t_start, double t_end) {
        auto c = persistence_components(occ, t_start, t_end);
        return py::make_tuple(c.width, c.frequency, c.spread);
      },
      py::arg("occurrences"), py::arg("t_start"), py::arg("t_end"),
      "(width, frequency, spread) terms");
  m.def("gap_entropy", [](std::vector<double> gaps) { return gap_entropy(gaps); }, py::arg("gaps"));

  m.def(
      "mine",
      [](const Stream& stream, double delta_max, std::size_t k_max, const std::string& view,
         double alpha, double beta, double gamma, const std::string& variant) {
        const MinerConfig cfg = miner_config(delta_max, k_max, view, alpha, beta, gamma, variant);
        if (cfg.variant == Variant::Offline) return ranked_rows(mine_offline(stream, cfg));
        StreamingMiner miner(cfg);
        for (const auto& u : stream) miner.push(u);
        return ranked_rows(miner.snapshot());
      },
      py::arg("stream"), py::arg("delta_max") = 0.0, py::arg("k_max") = 1, py::arg("view") = "id",
      py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 1.0,
      py::arg("variant") = "offline",
      "List of (key, occurrences, frequency, persistence), highest persistence first.");

  py::class_<StreamingMiner>(m, "StreamingMiner")
      .def(py::init([](double delta_max, std::size_t k_max, const std::string& view, double alpha,
                       double beta, double gamma) {
             return StreamingMiner(
                 miner_config(delta_max, k_max, view, alpha, beta, gamma, "streaming"));
           }),
           py::arg("delta_max") = 0.0, py::arg("k_max") = 1, py::arg("view") = "id",
           py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 1.0)
      .def(
          "push",
          [](StreamingMiner& self, const EdgeUpdate& u) {
            py::list events;
            self.push(u, [&](const OccurrenceEvent& ev) {
              events.append(py::make_tuple(ev.t, std::string(ev.key), ev.frequency, ev.persistence));
            });
            return events;
          },
          py::arg("update"), "Processes one update; returns (t, key, frequency, persistence) per occurrence.")
      .def(
          "query", [](const StreamingMiner& self, const std::string& key, double t) { return self.query(key, t); },
          py::arg("key"), py::arg("t"))
      .def("snapshot", [](const StreamingMiner& self) { return ranked_rows(self.snapshot()); })
      .def_property_readonly("snippet_count", &StreamingMiner::snippet_count)
      .def_property_readonly("update_count", &StreamingMiner::update_count);

  m.def(
      "detect",
      [](const Stream& stream, const std::string& detector, double delta_max, std::size_t k_max,
         const std::string& view, double alpha, double beta, double gamma, std::uint64_t seed,
         std::size_t trees, std::size_t max_leaves, std::uint32_t periods) {
        DetectConfig cfg;
        cfg.miner = miner_config(delta_max, k_max, view, alpha, beta, gamma, "streaming");
        cfg.detector = parse_detector(detector);
        cfg.forest = {trees, max_leaves, seed};
        cfg.forest.validate();
        cfg.periods = periods;
        return run_detection(stream, cfg);
      },
      py::arg("stream"), py::arg("detector") = "persistence", py::arg("delta_max") = 0.0,
      py::arg("k_max") = 1, py::arg("view") = "id", py::arg("alpha") = 1.0, py::arg("beta") = 0.2,
      py::arg("gamma") = 10.0, py::arg("seed") = 0, py::arg("trees") = 10,
      py::arg("max_leaves") = 256, py::arg("periods") = 60,
      "One anomaly score per update: the highest score among the occurrences it triggered.");

  m.def(
      "inject",
      [](const Stream& host, std::uint32_t trip_count, std::uint32_t occ_min, std::uint32_t occ_max,
         double jitter, double margin, double trip_duration,
         std::optional<std::uint32_t> fixed_occurrences, std::uint64_t seed) {
        InjectionSpec spec;
        spec.trip_count = trip_count;
        spec.occ_min = occ_min;
        spec.occ_max = occ_max;
        spec.jitter = jitter;
        spec.margin = margin;
        spec.trip_duration = trip_duration;
        spec.fixed_occurrences = fixed_occurrences;
        spec.seed = seed;
        auto r = inject(host, spec);
        return py::make_tuple(std::move(r.stream), std::move(r.labels));
      },
      py::arg("host"), py::arg("trip_count") = 50, py::arg("occ_min") = 5, py::arg("occ_max") = 100,
      py::arg("jitter") = 1200.0, py::arg("margin") = 600.0, py::arg("trip_duration") = 900.0,
      py::arg("fixed_occurrences") = py::none(), py::arg("seed") = 0,
      "Returns (augmented stream, labels).");

  m.def(
      "ds_baseline",
      [](std::vector<double> occ, double t_start, double t_end, std::uint32_t periods) {
        return ds_baseline(occ, t_start, t_end, periods);
      },
      py::arg("occurrences"), py::arg("t_start"), py::arg("t_end"), py::arg("periods") = 60);
  m.def(
      "roc_auc",
      [](std::vector<double> scores, std::vector<int> labels) { return roc_auc(scores, labels); },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "f1_at_k",
      [](std::vector<double> scores, std::vector<int> labels, std::size_t k) {
        return f1_at_k(scores, labels, k);
      },
      py::arg("scores"), py::arg("labels"), py::arg("k"));
}
