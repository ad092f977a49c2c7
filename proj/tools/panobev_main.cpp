// panobev: panorama-to-BEV cross-view retrieval toolkit.
//
// Subcommands: warp, polar, bench, split, train, embed, index, eval,
// fetch-tiles. Exit codes: 0 success, 2 usage/I-O error, 3 protocol
// violation. Machine output goes to stdout, progress to stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "panobev/benchmark_gen.hpp"
#include "panobev/pano_ops.hpp"
#include "panobev/pipeline.hpp"
#include "panobev/png_io.hpp"
#include "panobev/protocol.hpp"
#include "panobev/tiles.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace panobev;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitProtocol = 3;

struct RunConfig {
  std::string dataset_root = ".";
  int l = 512;
  double r = 0.14;
  double camera_height = 1.5;
  double yaw_offset_deg = 0.0;
  int pano_h = 512;
  int pano_w = 1024;
  int grid = 8;
  int dim = 64;
  double lr = 1e-3;
  int epochs = 30;
  int batch = 32;
  std::uint64_t seed = 0;
  double weight_decay = 0.01;
  double tau_init = 0.07;
  bool single_direction = false;
  int fusion_m = 64;
  std::string protocol;
  bool no_heading_compensation = false;
};

json config_to_json(const RunConfig& c) {
  json j;
  j["dataset_root"] = c.dataset_root;
  j["plane"] = {{"l", c.l}, {"r", c.r}};
  j["rig"] = {{"H", c.camera_height}, {"yaw_offset_deg", c.yaw_offset_deg}};
  j["panorama"] = {{"h", c.pano_h}, {"w", c.pano_w}};
  j["encoder"] = {{"grid", c.grid}, {"dim", c.dim}};
  j["train"] = {{"lr", c.lr},
                {"epochs", c.epochs},
                {"batch", c.batch},
                {"seed", c.seed},
                {"weight_decay", c.weight_decay},
                {"tau_init", c.tau_init},
                {"symmetric", !c.single_direction}};
  j["fusion"] = {{"M", c.fusion_m}};
  j["protocol"] = c.protocol;
  j["heading_compensation"] = !c.no_heading_compensation;
  return j;
}

void config_from_json(const json& j, RunConfig& c) {
  if (j.contains("dataset_root")) c.dataset_root = j["dataset_root"].get<std::string>();
  if (j.contains("plane")) {
    const auto& p = j["plane"];
    if (p.contains("l")) c.l = p["l"].get<int>();
    if (p.contains("r")) c.r = p["r"].get<double>();
  }
  if (j.contains("rig")) {
    const auto& p = j["rig"];
    if (p.contains("H")) c.camera_height = p["H"].get<double>();
    if (p.contains("yaw_offset_deg")) c.yaw_offset_deg = p["yaw_offset_deg"].get<double>();
  }
  if (j.contains("panorama")) {
    const auto& p = j["panorama"];
    if (p.contains("h")) c.pano_h = p["h"].get<int>();
    if (p.contains("w")) c.pano_w = p["w"].get<int>();
  }
  if (j.contains("encoder")) {
    const auto& p = j["encoder"];
    if (p.contains("grid")) c.grid = p["grid"].get<int>();
    if (p.contains("dim")) c.dim = p["dim"].get<int>();
  }
  if (j.contains("train")) {
    const auto& p = j["train"];
    if (p.contains("lr")) c.lr = p["lr"].get<double>();
    if (p.contains("epochs")) c.epochs = p["epochs"].get<int>();
    if (p.contains("batch")) c.batch = p["batch"].get<int>();
    if (p.contains("seed")) c.seed = p["seed"].get<std::uint64_t>();
    if (p.contains("weight_decay")) c.weight_decay = p["weight_decay"].get<double>();
    if (p.contains("tau_init")) c.tau_init = p["tau_init"].get<double>();
    if (p.contains("symmetric")) c.single_direction = !p["symmetric"].get<bool>();
  }
  if (j.contains("fusion") && j["fusion"].contains("M")) {
    c.fusion_m = j["fusion"]["M"].get<int>();
  }
  if (j.contains("protocol")) c.protocol = j["protocol"].get<std::string>();
  if (j.contains("heading_compensation")) {
    c.no_heading_compensation = !j["heading_compensation"].get<bool>();
  }
}

void write_sidecar(const fs::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sidecar " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig cfg;
  cfg.plane = {c.l, c.r};
  cfg.camera_height_m = c.camera_height;
  cfg.grid = c.grid;
  cfg.compensate_heading = !c.no_heading_compensation;
  return cfg;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig cfg;
  cfg.batch = c.batch;
  cfg.epochs = c.epochs;
  cfg.lr = c.lr;
  cfg.weight_decay = c.weight_decay;
  cfg.seed = c.seed;
  cfg.dim = c.dim;
  cfg.tau_init = c.tau_init;
  cfg.symmetric = !c.single_direction;
  return cfg;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

fs::path resolve_manifest(const RunConfig& cfg, const std::string& manifest) {
  fs::path p(manifest);
  if (p.is_relative() && cfg.dataset_root != ".") p = fs::path(cfg.dataset_root) / p;
  return p;
}

// ---------------------------------------------------------------------------
// warp

int cmd_warp(const RunConfig& cfg, const std::string& input, const std::string& output,
             bool pad, bool nearest, const std::string& cache_dir,
             const std::string& sidecar) {
  ImageBuffer pano = read_png(input);
  if (pano.height * 2 != pano.width) {
    if (!pad) {
      std::cerr << "panobev warp: input is " << pano.width << "x" << pano.height
                << ", expected 2:1 aspect (use --pad for partial strips)\n";
      return kExitUsage;
    }
    const PaddedPanorama padded = pad_panorama(pano);
    std::cerr << "padded " << pano.width << "x" << pano.height << " to 2:1, content at row "
              << padded.top_row << "\n";
    pano = padded.image;
  }

  const PanoramaSpec pano_spec{pano.height, pano.width};
  const double yaw = cfg.yaw_offset_deg * std::numbers::pi / 180.0;
  const CameraRig rig{cfg.camera_height, yaw};
  const BevPlaneSpec plane{cfg.l, cfg.r};

  fs::create_directories(cache_dir);
  const fs::path cache_path =
      fs::path(cache_dir) / ("warp_l" + std::to_string(cfg.l) + "_r" + format_double(cfg.r) +
                             "_H" + format_double(cfg.camera_height) + "_yaw" +
                             format_double(cfg.yaw_offset_deg) + "_h" +
                             std::to_string(pano_spec.height_px) + "_w" +
                             std::to_string(pano_spec.width_px) + ".epbw");

  WarpMap map;
  bool cache_hit = false;
  if (fs::exists(cache_path)) {
    try {
      map = load_warp_map(cache_path);
      cache_hit = map.size == cfg.l && map.pano_height == pano_spec.height_px &&
                  map.pano_width == pano_spec.width_px;
    } catch (const std::exception& e) {
      std::cerr << "ignoring unreadable warp map cache: " << e.what() << "\n";
    }
  }
  if (cache_hit) {
    std::cerr << "warp map cache hit: " << cache_path.string() << "\n";
  } else {
    map = build_warp_map(plane, rig, pano_spec);
    save_warp_map(cache_path, map);
    std::cerr << "warp map cached: " << cache_path.string() << "\n";
  }

  const SamplingMode mode{nearest ? SampleFilter::nearest : SampleFilter::bilinear,
                          HorizontalEdge::wrap};
  write_png(output, apply_warp(pano, map, mode));
  write_sidecar(sidecar.empty() ? output + ".config.json" : sidecar, cfg);
  std::cerr << "wrote " << output << " (" << cfg.l << "x" << cfg.l << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// polar

int cmd_polar(const RunConfig& cfg, const std::string& input, const std::string& output,
              int out_h, int out_w, const std::string& sidecar) {
  const ImageBuffer sat = read_png(input);
  write_png(output, polar_transform(sat, out_h, out_w));
  if (!sidecar.empty()) write_sidecar(sidecar, cfg);
  std::cerr << "wrote " << output << " (" << out_w << "x" << out_h << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const RunConfig& cfg, const std::string& out_dir, int n, int texture_side,
              double texture_res, const std::string& sidecar) {
  BenchmarkSpec spec;
  spec.scenes = n;
  spec.seed = cfg.seed;
  spec.pano = {cfg.pano_h, cfg.pano_w};
  spec.camera_height_m = cfg.camera_height;
  spec.texture_side = texture_side > 0 ? texture_side : cfg.l;
  spec.texture_res_m = texture_res > 0 ? texture_res : cfg.r;

  const auto records = generate_synthetic_benchmark(spec, out_dir);
  write_sidecar(sidecar.empty() ? (fs::path(out_dir) / "run_config.json").string() : sidecar,
                cfg);
  std::cout << "scenes,panoramas,satellites\n"
            << records.size() << "," << records.size() << "," << records.size() << "\n";
  std::cerr << "benchmark written to " << out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// split

int cmd_split(const RunConfig& cfg, const std::string& manifest, const std::string& scheme,
              const std::vector<std::string>& holdout, double val_fraction,
              const std::string& out_dir, const std::string& sidecar) {
  const fs::path manifest_path = resolve_manifest(cfg, manifest);
  const auto records = load_manifest(manifest_path);

  SplitScheme s;
  s.scheme = scheme;
  s.seed = cfg.seed;
  s.val_fraction = val_fraction;
  s.holdout_cities.insert(holdout.begin(), holdout.end());

  const auto splits = make_splits(records, s);
  fs::create_directories(out_dir);
  std::cout << "split,queries,references\n";
  for (const SplitSpec& split : splits) {
    save_split(fs::path(out_dir) / (split.name + ".json"), split);
    std::cout << split.name << "," << split.query_ids.size() << ","
              << split.reference_ids.size() << "\n";
  }
  if (!sidecar.empty()) write_sidecar(sidecar, cfg);
  std::cerr << splits.size() << " splits written to " << out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const RunConfig& cfg, const std::string& manifest, const std::string& split_file,
              const std::string& branch_name, const std::string& out,
              const std::string& curve_path, const std::string& sidecar) {
  const fs::path manifest_path = resolve_manifest(cfg, manifest);
  const auto records = load_manifest(manifest_path);
  const SplitSpec split = load_split(split_file);
  const Branch branch = branch_from_string(branch_name);

  WarpMapCache cache;
  std::cerr << "training " << branch_name << " branch on " << split.query_ids.size()
            << " pairs\n";
  const TrainResult result =
      train_branch_on_split(records, split, branch, manifest_path.parent_path(),
                            train_config(cfg), pipeline_config(cfg), cache);

  save_encoder(out, result.params);
  save_loss_curve(curve_path.empty() ? out + ".curve.csv" : curve_path, result.curve);
  write_sidecar(sidecar.empty() ? out + ".config.json" : sidecar, cfg);

  char line[160];
  std::snprintf(line, sizeof(line), "branch,pairs,epochs,final_loss,tau\n%s,%zu,%d,%.6f,%.6f\n",
                branch_name.c_str(), split.query_ids.size(), cfg.epochs,
                result.curve.empty() ? 0.0 : result.curve.back().mean_loss,
                result.params.tau());
  std::cout << line;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// embed

int cmd_embed(const RunConfig& cfg, const std::string& manifest, const std::string& split_file,
              const std::string& branch_name, const std::string& params_path,
              const std::string& side, const std::string& out, const std::string& sidecar) {
  const fs::path manifest_path = resolve_manifest(cfg, manifest);
  const auto records = load_manifest(manifest_path);
  const SplitSpec split = load_split(split_file);
  const EncoderParams params = load_encoder(params_path);
  const fs::path root = manifest_path.parent_path();
  const PipelineConfig pcfg = pipeline_config(cfg);

  BranchDescriptors descs;
  WarpMapCache cache;
  if (side == "query") {
    descs = query_descriptors(records, split.query_ids, root, branch_from_string(branch_name),
                              pcfg, cache);
  } else if (side == "reference") {
    descs = reference_descriptors(records, split.reference_ids, root, split.modality, pcfg);
  } else {
    throw std::invalid_argument("--side must be query or reference");
  }

  const EmbeddingMatrix emb = embed_vectors(descs.descriptors, descs.ids, params);
  validate(emb);
  save_embeddings(out, emb);
  if (!sidecar.empty()) write_sidecar(sidecar, cfg);
  std::cout << "rows,dim\n" << emb.count() << "," << emb.dim() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// index

int cmd_index(const std::string& embeddings_path, double tol) {
  const EmbeddingMatrix emb = load_embeddings(embeddings_path);
  validate(emb, tol);
  std::cout << "rows,dim,unit_norm_ok\n" << emb.count() << "," << emb.dim() << ",1\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const RunConfig& cfg, const std::string& manifest, const std::string& split_file,
             const std::string& street_params_path, const std::string& bev_params_path,
             const std::string& mode_name, const std::string& dump_path,
             const std::string& train_split_file, const std::string& sidecar) {
  const fs::path manifest_path = resolve_manifest(cfg, manifest);
  const auto records = load_manifest(manifest_path);
  SplitSpec split = load_split(split_file);
  const fs::path root = manifest_path.parent_path();
  const PipelineConfig pcfg = pipeline_config(cfg);

  if (!train_split_file.empty()) {
    const SplitSpec train_split = load_split(train_split_file);
    split.excluded_reference_ids.insert(split.excluded_reference_ids.end(),
                                        train_split.reference_ids.begin(),
                                        train_split.reference_ids.end());
  }

  std::vector<EvalMode> modes;
  if (mode_name == "all") {
    modes = {EvalMode::street_only, EvalMode::bev_only, EvalMode::fused};
  } else if (mode_name == "street") {
    modes = {EvalMode::street_only};
  } else if (mode_name == "bev") {
    modes = {EvalMode::bev_only};
  } else if (mode_name == "fused") {
    modes = {EvalMode::fused};
  } else {
    throw std::invalid_argument("--mode must be street, bev, fused, or all");
  }
  if (!dump_path.empty() && modes.size() != 1) {
    throw std::invalid_argument("--dump needs a single --mode");
  }

  const bool need_street =
      mode_name == "all" || mode_name == "street" || mode_name == "fused";
  const bool need_bev = mode_name == "all" || mode_name == "bev" || mode_name == "fused";
  if (need_street && street_params_path.empty()) {
    throw std::invalid_argument("eval: --street-params required for mode " + mode_name);
  }
  if (need_bev && bev_params_path.empty()) {
    throw std::invalid_argument("eval: --bev-params required for mode " + mode_name);
  }

  WarpMapCache cache;
  ProtocolEmbeddings emb;
  if (need_street) {
    const EncoderParams street_params = load_encoder(street_params_path);
    const auto q = query_descriptors(records, split.query_ids, root, Branch::street, pcfg, cache);
    emb.street_queries = embed_vectors(q.descriptors, q.ids, street_params);
    const auto refs = reference_descriptors(records, split.reference_ids, root, split.modality,
                                            pcfg);
    emb.street_refs = embed_vectors(refs.descriptors, refs.ids, street_params);
  }
  if (need_bev) {
    const EncoderParams bev_params = load_encoder(bev_params_path);
    const auto q = query_descriptors(records, split.query_ids, root, Branch::bev, pcfg, cache);
    emb.bev_queries = embed_vectors(q.descriptors, q.ids, bev_params);
    const auto refs = reference_descriptors(records, split.reference_ids, root, split.modality,
                                            pcfg);
    emb.bev_refs = embed_vectors(refs.descriptors, refs.ids, bev_params);
  }

  const FusionConfig fusion{cfg.fusion_m};
  std::vector<RecallReport> reports;
  std::vector<QueryRanking> dump;
  for (EvalMode mode : modes) {
    reports.push_back(evaluate_protocol(split, emb, fusion, mode,
                                        dump_path.empty() ? nullptr : &dump));
  }

  std::cout << recall_csv_header() << "\n";
  for (const RecallReport& r : reports) std::cout << recall_csv_row(r) << "\n";
  print_recall_table(std::cerr, reports);

  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    if (!out) throw std::runtime_error("cannot write " + dump_path);
    out << "query_id,rank,ref_id,score_fused,score_s1,score_s2\n";
    char line[256];
    for (const QueryRanking& qr : dump) {
      for (std::size_t rank = 0; rank < qr.entries.size(); ++rank) {
        const FusedEntry& e = qr.entries[rank];
        std::snprintf(line, sizeof(line), "%s,%zu,%s,%.6f,%.6f,%.6f\n", qr.query_id.c_str(),
                      rank + 1, e.id.c_str(), e.score_fused, e.score_s1, e.score_s2);
        out << line;
      }
    }
  }
  if (!sidecar.empty()) write_sidecar(sidecar, cfg);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fetch-tiles

int cmd_fetch_tiles(const RunConfig& cfg, const std::string& manifest,
                    const std::string& url_template, const std::string& cache_dir, int zoom,
                    int concurrency) {
  const fs::path manifest_path = resolve_manifest(cfg, manifest);
  const auto records = load_manifest(manifest_path);

  TileFetchOptions options;
  options.zoom = zoom;
  options.concurrency = concurrency;
  const TileFetchReport report = fetch_tiles(records, url_template, cache_dir, options);

  std::cout << "id,z,x,y,status\n";
  for (const auto& item : report.items) {
    std::cout << item.record_id << "," << item.tile.z << "," << item.tile.x << ","
              << item.tile.y << "," << item.status << "\n";
  }
  std::cerr << "fetched " << report.fetched << ", cached " << report.cached << ", failed "
            << report.failed << "\n";
  return kExitOk;
}

std::optional<std::string> find_config_arg(int argc, char** argv) {
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--config" && k + 1 < argc) return std::string(argv[k + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

void add_config_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--config", "JSON config file (flags override it)");
  cmd->add_option("--dataset-root", cfg.dataset_root, "Directory manifests resolve against");
  cmd->add_option("--l", cfg.l, "BEV plane side length in pixels");
  cmd->add_option("--r", cfg.r, "BEV ground resolution in meters per pixel");
  cmd->add_option("--camera-height", cfg.camera_height, "Camera height above ground (m)");
  cmd->add_option("--yaw-deg", cfg.yaw_offset_deg, "Yaw offset applied to azimuths (degrees)");
  cmd->add_option("--pano-h", cfg.pano_h, "Panorama height in pixels");
  cmd->add_option("--pano-w", cfg.pano_w, "Panorama width in pixels");
  cmd->add_option("--grid", cfg.grid, "Descriptor grid size");
  cmd->add_option("--dim", cfg.dim, "Embedding dimension");
  cmd->add_option("--lr", cfg.lr, "Learning rate");
  cmd->add_option("--epochs", cfg.epochs, "Training epochs");
  cmd->add_option("--batch", cfg.batch, "Batch size (>= 2)");
  cmd->add_option("--seed", cfg.seed, "Seed for every random choice");
  cmd->add_option("--weight-decay", cfg.weight_decay, "AdamW weight decay");
  cmd->add_option("--tau-init", cfg.tau_init, "Initial temperature");
  cmd->add_flag("--single-direction", cfg.single_direction,
                "Use only the query->references InfoNCE direction");
  cmd->add_option("--M", cfg.fusion_m, "Street-branch shortlist size for fusion");
  cmd->add_option("--protocol", cfg.protocol, "Protocol label");
  cmd->add_flag("--no-heading-compensation", cfg.no_heading_compensation,
                "Ignore manifest headings when warping the BEV branch");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  if (const auto config_path = find_config_arg(argc, argv)) {
    try {
      std::ifstream in(*config_path);
      if (!in) throw std::runtime_error("cannot open config " + *config_path);
      json j;
      in >> j;
      config_from_json(j, cfg);
    } catch (const std::exception& e) {
      std::cerr << "panobev: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  CLI::App app{"panorama-to-BEV cross-view retrieval toolkit"};
  app.require_subcommand(1);

  int exit_code = kExitOk;

  // warp
  std::string in_path, out_path, cache_dir = ".panobev-cache", sidecar;
  bool pad = false, nearest = false;
  auto* warp = app.add_subcommand("warp", "Reproject an equirectangular panorama to BEV");
  warp->add_option("--input", in_path, "Input panorama PNG")->required();
  warp->add_option("--output", out_path, "Output BEV PNG")->required();
  warp->add_flag("--pad", pad, "Pad partial strips to 2:1 before warping");
  warp->add_flag("--nearest", nearest, "Nearest-neighbor sampling instead of bilinear");
  warp->add_option("--cache-dir", cache_dir, "Warp map cache directory");
  warp->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(warp, cfg);
  warp->callback(
      [&] { exit_code = cmd_warp(cfg, in_path, out_path, pad, nearest, cache_dir, sidecar); });

  // polar
  int polar_h = 128, polar_w = 512;
  auto* polar = app.add_subcommand("polar", "Polar-transform a square overhead image");
  polar->add_option("--input", in_path, "Input satellite PNG")->required();
  polar->add_option("--output", out_path, "Output polar PNG")->required();
  polar->add_option("--out-h", polar_h, "Output height");
  polar->add_option("--out-w", polar_w, "Output width");
  polar->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(polar, cfg);
  polar->callback([&] { exit_code = cmd_polar(cfg, in_path, out_path, polar_h, polar_w, sidecar); });

  // bench
  std::string bench_dir;
  int bench_n = 50, texture_side = 0;
  double texture_res = 0.0;
  auto* bench = app.add_subcommand("bench", "Generate a synthetic retrieval benchmark");
  bench->add_option("--out", bench_dir, "Output directory")->required();
  bench->add_option("--n", bench_n, "Number of scenes (>= 2)");
  bench->add_option("--texture-side", texture_side, "Overhead texture side (default: --l)");
  bench->add_option("--texture-res", texture_res, "Overhead texture resolution (default: --r)");
  bench->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(bench, cfg);
  bench->callback(
      [&] { exit_code = cmd_bench(cfg, bench_dir, bench_n, texture_side, texture_res, sidecar); });

  // split
  std::string manifest, scheme = "regional", split_out;
  std::vector<std::string> holdout;
  double val_fraction = 0.1;
  auto* split = app.add_subcommand("split", "Generate evaluation splits from a manifest");
  split->add_option("--manifest", manifest, "Manifest JSONL")->required();
  split->add_option("--scheme", scheme, "regional | temporal | map");
  split->add_option("--holdout", holdout, "Cities held out as the regional test");
  split->add_option("--val-fraction", val_fraction, "Validation fraction of non-holdout data");
  split->add_option("--out", split_out, "Output directory for split JSON files")->required();
  split->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(split, cfg);
  split->callback([&] {
    exit_code = cmd_split(cfg, manifest, scheme, holdout, val_fraction, split_out, sidecar);
  });

  // train
  std::string split_file, branch = "street", params_out, curve_path;
  auto* train = app.add_subcommand("train", "Train one branch encoder on a split");
  train->add_option("--manifest", manifest, "Manifest JSONL")->required();
  train->add_option("--split", split_file, "Training split JSON")->required();
  train->add_option("--branch", branch, "street | bev")->required();
  train->add_option("--out", params_out, "Output encoder file (.epbe)")->required();
  train->add_option("--curve", curve_path, "Loss curve CSV (default: <out>.curve.csv)");
  train->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(train, cfg);
  train->callback([&] {
    exit_code = cmd_train(cfg, manifest, split_file, branch, params_out, curve_path, sidecar);
  });

  // embed
  std::string params_path, side = "query", embed_out;
  auto* embed = app.add_subcommand("embed", "Embed a split's images with trained parameters");
  embed->add_option("--manifest", manifest, "Manifest JSONL")->required();
  embed->add_option("--split", split_file, "Split JSON")->required();
  embed->add_option("--branch", branch, "street | bev")->required();
  embed->add_option("--params", params_path, "Encoder file (.epbe)")->required();
  embed->add_option("--side", side, "query | reference");
  embed->add_option("--out", embed_out, "Output embeddings file (.epbm)")->required();
  embed->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(embed, cfg);
  embed->callback([&] {
    exit_code =
        cmd_embed(cfg, manifest, split_file, branch, params_path, side, embed_out, sidecar);
  });

  // index
  std::string emb_path;
  double norm_tol = 1e-6;
  auto* index = app.add_subcommand("index", "Validate an embeddings file as a gallery index");
  index->add_option("--embeddings", emb_path, "Embeddings file (.epbm)")->required();
  index->add_option("--tol", norm_tol, "Unit-norm tolerance");
  index->callback([&] { exit_code = cmd_index(emb_path, norm_tol); });

  // eval
  std::string street_params, bev_params, mode = "all", dump_path, train_split;
  auto* eval = app.add_subcommand("eval", "Evaluate retrieval recall on a split");
  eval->add_option("--manifest", manifest, "Manifest JSONL")->required();
  eval->add_option("--split", split_file, "Evaluation split JSON")->required();
  eval->add_option("--street-params", street_params, "Street branch encoder (.epbe)");
  eval->add_option("--bev-params", bev_params, "BEV branch encoder (.epbe)");
  eval->add_option("--mode", mode, "street | bev | fused | all");
  eval->add_option("--dump", dump_path, "Ranked-list debug CSV (single mode only)");
  eval->add_option("--train-split", train_split,
                   "Training split JSON whose references must be absent from the gallery");
  eval->add_option("--sidecar", sidecar, "Effective-config echo path");
  add_config_options(eval, cfg);
  eval->callback([&] {
    exit_code = cmd_eval(cfg, manifest, split_file, street_params, bev_params, mode, dump_path,
                         train_split, sidecar);
  });

  // fetch-tiles
  std::string url_template, tile_cache = "tiles";
  int zoom = 18, concurrency = 4;
  auto* fetch = app.add_subcommand("fetch-tiles", "Download XYZ tiles covering a manifest");
  fetch->add_option("--manifest", manifest, "Manifest JSONL")->required();
  fetch->add_option("--template", url_template, "URL template with {z}/{x}/{y}")->required();
  fetch->add_option("--cache", tile_cache, "Tile cache directory");
  fetch->add_option("--zoom", zoom, "Tile zoom level");
  fetch->add_option("--concurrency", concurrency, "Parallel request limit");
  add_config_options(fetch, cfg);
  fetch->callback([&] {
    exit_code = cmd_fetch_tiles(cfg, manifest, url_template, tile_cache, zoom, concurrency);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const protocol_error& e) {
    std::cerr << "panobev: protocol violation: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "panobev: " << e.what() << "\n";
    return kExitUsage;
  }
  return exit_code;
}
