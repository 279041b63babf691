// lapseg command-line front end.
#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lapseg/bench.hpp"
#include "lapseg/codec.hpp"
#include "lapseg/error.hpp"
#include "lapseg/netmetrics.hpp"
#include "lapseg/parallel.hpp"
#include "lapseg/pipeline.hpp"
#include "lapseg/report.hpp"
#include "lapseg/resample.hpp"
#include "lapseg/service.hpp"

namespace {

using namespace lapseg;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct ConfigFlags {
  SegConfig cfg;
  std::string lambda = "uniform";

  void add(CLI::App* app) {
    app->add_option("--k", cfg.k, "neighbours per node in the k-NN graph")
        ->check(CLI::PositiveNumber);
    app->add_option("--sigma", cfg.sigma, "Gaussian kernel width")->check(CLI::PositiveNumber);
    app->add_option("--omega", cfg.omega, "convergence threshold")->check(CLI::PositiveNumber);
    app->add_option("--lambda", lambda, "feature weights: uniform, location or w1,...,w9");
    app->add_option("--tau", cfg.tau, "stage-1 labelling threshold");
    app->add_option("--max-iterations", cfg.max_iterations, "iteration cap per stage");
  }

  SegConfig resolve() {
    cfg.lambda = LambdaPreset::parse(lambda);
    cfg.validate();
    return cfg;
  }
};

struct DatasetFlags {
  std::string images, trimaps, scribbles, truth;

  void add(CLI::App* app) {
    app->add_option("--images", images, "directory of input images")->required();
    auto* t = app->add_option("--trimaps", trimaps, "directory of trimaps");
    auto* s = app->add_option("--scribbles", scribbles, "directory of scribble images");
    t->excludes(s);
    app->add_option("--truth", truth, "directory of ground-truth masks")->required();
  }

  std::vector<LoadedItem> load() const {
    if (trimaps.empty() == scribbles.empty()) {
      throw CLI::ValidationError("exactly one of --trimaps or --scribbles is required");
    }
    const bool use_trimaps = !trimaps.empty();
    std::vector<LoadedItem> items;
    for (const DatasetItem& item :
         discover_dataset(images, use_trimaps ? trimaps : scribbles, truth)) {
      items.push_back(load_item(item, use_trimaps ? SeedSource::kTrimap : SeedSource::kScribbles));
    }
    return items;
  }
};

std::optional<Rgb8> parse_rgb(const std::string& text) {
  if (text.empty()) return std::nullopt;
  Rgb8 out{};
  std::size_t pos = 0;
  for (int c = 0; c < 3; ++c) {
    std::size_t used = 0;
    const int v = std::stoi(text.substr(pos), &used);
    if (v < 0 || v > 255) throw CLI::ValidationError("colour components must be 0..255");
    out[c] = static_cast<std::uint8_t>(v);
    pos += used;
    if (c < 2) {
      if (pos >= text.size() || text[pos] != ',') throw CLI::ValidationError("colour is R,G,B");
      ++pos;
    }
  }
  return out;
}

LabelMap load_seeds(const std::string& scribbles, const std::string& trimap,
                    const std::string& background) {
  if (!trimap.empty()) return parse_trimap(decode_gray(read_file(trimap))).seeds;
  const RgbImage scrib = decode_image(read_file(scribbles));
  return parse_scribbles(scrib, parse_rgb(background).value_or(dominant_color(scrib)));
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void write_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::string text = bench_csv_header() + "\n";
  for (const BenchRow& row : rows) text += to_csv_line(row) + "\n";
  write_text(path, text);
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scribble-driven image segmentation by label propagation"};
  app.require_subcommand(1);

  // segment
  auto* seg = app.add_subcommand("segment", "segment one image");
  std::string seg_image, seg_scribbles, seg_trimap, seg_out, seg_report, seg_background;
  ConfigFlags seg_cfg;
  seg->add_option("-i,--image", seg_image, "input image (PNG or PPM)")->required();
  auto* seg_s = seg->add_option("-s,--scribbles", seg_scribbles, "scribble image");
  auto* seg_t = seg->add_option("-t,--trimap", seg_trimap, "trimap image");
  seg_s->excludes(seg_t);
  seg->add_option("-o,--output", seg_out, "output label map (indexed PNG)")->required();
  seg->add_option("--report", seg_report, "write the run report as JSON");
  seg->add_option("--background", seg_background,
                  "scribble background colour R,G,B (default: most frequent colour)");
  seg_cfg.add(seg);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "error rates over a dataset");
  DatasetFlags bench_data;
  ConfigFlags bench_cfg;
  bool optimize_k = false;
  std::string k_grid_spec, bench_csv, bench_json;
  std::size_t bench_repeats = 1;
  bench_data.add(bench);
  bench_cfg.add(bench);
  bench->add_flag("--optimize-k", optimize_k, "also report the best k per image");
  bench->add_option("--k-grid", k_grid_spec, "k values for --optimize-k (default 2..40,50..250)");
  bench->add_option("--csv", bench_csv, "per-image rows as CSV");
  bench->add_option("--json", bench_json, "full report as JSON");
  bench->add_option("--repeats", bench_repeats, "timed runs per image")->check(CLI::PositiveNumber);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "error curve over one parameter");
  DatasetFlags sweep_data;
  ConfigFlags sweep_cfg;
  std::string sweep_param, sweep_grid, sweep_csv;
  std::size_t sweep_repeats = 1;
  sweep_data.add(sweep);
  sweep_cfg.add(sweep);
  sweep->add_option("--param", sweep_param, "k, sigma or omega")->required();
  sweep->add_option("--grid", sweep_grid, "A:STEP:B or comma-separated values")->required();
  sweep->add_option("--csv", sweep_csv, "curve as CSV");
  sweep->add_option("--repeats", sweep_repeats, "timed runs per image")->check(CLI::PositiveNumber);

  // erode-seeds
  auto* erode = app.add_subcommand("erode-seeds", "error as seeds are randomly removed");
  DatasetFlags erode_data;
  ConfigFlags erode_cfg;
  std::string p_grid = "0:0.1:0.9";
  std::size_t trials = 20;
  std::uint64_t erode_seed = 1;
  std::string erode_csv;
  erode_data.add(erode);
  erode_cfg.add(erode);
  erode->add_option("--p-grid", p_grid, "erasure probabilities, A:STEP:B or a list");
  erode->add_option("--trials", trials, "trials per probability")->check(CLI::PositiveNumber);
  erode->add_option("--seed", erode_seed, "master random seed");
  erode->add_option("--csv", erode_csv, "curve as CSV");

  // netstats
  auto* net = app.add_subcommand("netstats", "small-world statistics of the k-NN graph");
  std::string net_image, net_scribbles, net_trimap, net_background;
  ConfigFlags net_cfg;
  std::size_t samples = 20;
  std::uint64_t net_seed = 1;
  net->add_option("-i,--image", net_image, "input image")->required();
  auto* net_s = net->add_option("-s,--scribbles", net_scribbles, "scribble image");
  auto* net_t = net->add_option("-t,--trimap", net_trimap, "trimap image");
  net_s->excludes(net_t);
  net->add_option("--background", net_background, "scribble background colour R,G,B");
  net->add_option("--samples", samples, "random baselines")->check(CLI::PositiveNumber);
  net->add_option("--seed", net_seed, "master random seed");
  net_cfg.add(net);

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP API for interactive use");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  int idle_minutes = 30;
  serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "listen address");
  serve->add_option("--static", static_dir, "directory served at /");
  serve->add_option("--idle-timeout", idle_minutes, "session idle timeout in minutes")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  worker_count();

  try {
    if (*seg) {
      if (seg_scribbles.empty() == seg_trimap.empty()) {
        std::cerr << "segment: exactly one of -s/--scribbles or -t/--trimap is required\n";
        return kExitUsage;
      }
      const SegConfig cfg = seg_cfg.resolve();
      const RgbImage img = decode_image(read_file(seg_image));
      const LabelMap seeds = load_seeds(seg_scribbles, seg_trimap, seg_background);
      const SegmentationResult result = segment(img, seeds, cfg);
      write_file(seg_out, encode_labelmap(result.labels));
      json report = to_json(result);
      report["config"] = to_json(cfg);
      if (result.effective_k < cfg.k) {
        std::cerr << "warning: k=" << cfg.k << " exceeds the node count; using k="
                  << result.effective_k << "\n";
      }
      if (!seg_report.empty()) write_text(seg_report, report.dump(2) + "\n");
      std::cout << report.dump() << "\n";
    } else if (*bench) {
      const SegConfig cfg = bench_cfg.resolve();
      const std::vector<LoadedItem> items = bench_data.load();
      std::vector<std::size_t> k_grid;
      if (optimize_k) {
        if (k_grid_spec.empty()) {
          k_grid = default_k_grid();
        } else {
          for (double k : parse_grid(k_grid_spec)) {
            if (!(k >= 1.0) || k != static_cast<double>(static_cast<std::size_t>(k))) {
              throw Error(ErrorCode::kParameter, "k grid values must be positive integers");
            }
            k_grid.push_back(static_cast<std::size_t>(k));
          }
        }
      }
      const BenchReport report = run_grabcut(items, cfg, k_grid, bench_repeats);
      if (!bench_csv.empty()) {
        std::vector<BenchRow> rows = report.rows;
        rows.insert(rows.end(), report.best_k_rows.begin(), report.best_k_rows.end());
        write_csv(bench_csv, rows);
      }
      if (!bench_json.empty()) write_text(bench_json, to_json(report).dump(2) + "\n");
      std::cout << "images=" << report.rows.size() << " mean_error=" << report.mean_error
                << " mean_time_s=" << report.mean_time_s;
      if (report.mean_best_k_error) std::cout << " mean_best_k_error=" << *report.mean_best_k_error;
      std::cout << "\n";
    } else if (*sweep) {
      const SegConfig cfg = sweep_cfg.resolve();
      const SweepParam param = parse_sweep_param(sweep_param);
      const std::vector<double> grid = parse_grid(sweep_grid);
      const std::vector<LoadedItem> items = sweep_data.load();
      const auto curve = parameter_sweep(items, param, grid, cfg, sweep_repeats);
      std::string csv = std::string(to_string(param)) + ",mean_error,mean_time_s\n";
      for (const SweepPoint& p : curve) {
        csv += csv_number(p.value) + "," + csv_number(p.mean_error) + "," +
               csv_number(p.mean_time_s) + "\n";
      }
      if (!sweep_csv.empty()) write_text(sweep_csv, csv);
      std::cout << csv;
    } else if (*erode) {
      const SegConfig cfg = erode_cfg.resolve();
      const std::vector<double> grid = parse_grid(p_grid);
      const std::vector<LoadedItem> items = erode_data.load();
      const auto curve = seed_sensitivity(items, grid, trials, cfg, erode_seed);
      std::string csv = "p,mean_error_all,mean_error_excluding_seeds,mean_seed_fraction\n";
      for (const SensitivityPoint& p : curve) {
        csv += csv_number(p.p) + "," + csv_number(p.mean_error_all) + "," +
               csv_number(p.mean_error_excluding_seeds) + "," +
               csv_number(p.mean_seed_fraction) + "\n";
      }
      if (!erode_csv.empty()) write_text(erode_csv, csv);
      std::cout << csv;
    } else if (*net) {
      const SegConfig cfg = net_cfg.resolve();
      const RgbImage img = decode_image(read_file(net_image));
      LabelMap seeds(img.width, img.height, 0);
      if (!net_scribbles.empty() || !net_trimap.empty()) {
        seeds = load_seeds(net_scribbles, net_trimap, net_background);
      }
      if (seeds.width != img.width || seeds.height != img.height) {
        throw Error(ErrorCode::kDimension, "seed image does not match the input image");
      }
      const RgbImage small = downscale_bicubic(img);
      const LabelMap small_seeds = downscale_nearest(seeds, small.width, small.height);
      const SparseDigraph graph = build_knn_digraph(image_features(small, cfg.lambda),
                                                    small_seeds.labels, cfg.k, cfg.sigma);
      const NetworkStats stats = small_world_ness(graph, samples, net_seed);
      json out = to_json(stats);
      out["k"] = cfg.k;
      out["seed"] = net_seed;
      std::cout << out.dump() << "\n";
    } else if (*serve) {
      ServiceOptions options;
      options.idle_timeout = std::chrono::minutes(idle_minutes);
      if (!static_dir.empty()) options.static_dir = static_dir;
      SessionService service(options);
      httplib::Server server;
      service.mount(server);
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      const int bound = port == 0 ? server.bind_to_any_port(host) : port;
      if (port != 0 && !server.bind_to_port(host, port)) {
        throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
      }
      if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      if (!server.listen_after_bind()) throw Error(ErrorCode::kIo, "server stopped unexpectedly");
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
