#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualview/anchors.hpp"
#include "dualview/dataset.hpp"
#include "dualview/detector.hpp"
#include "dualview/errors.hpp"
#include "dualview/pipeline.hpp"
#include "dualview/svg_plot.hpp"
#include "dualview/synth.hpp"

namespace fs = std::filesystem;
using namespace dualview;

namespace {

AttenuationBands bands_from(const std::string& config_path) {
  return config_path.empty() ? AttenuationBands{}
                             : AttenuationBands::load(config_path);
}

int run(int argc, char** argv) {
  CLI::App app{"Dual-view X-ray detection evaluation toolkit"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "Render a synthetic dual-view dataset");
  GenerateParams gen;
  std::string gen_out = "dataset";
  std::string gen_attenuation;
  std::vector<double> gen_mix;
  generate->add_option("--n", gen.n_scans, "Number of bag-scans")
      ->default_val(1);
  generate->add_option("--seed", gen.seed, "Master seed")
      ->envname("DUALVIEW_SEED")
      ->default_val(0);
  generate
      ->add_option("--threat-prob", gen.threat_prob,
                   "Probability a bag holds one threat")
      ->default_val(0.8);
  generate
      ->add_option("--threat-mix", gen_mix,
                   "Relative class weights: sharps blunts firearms lags")
      ->expected(4);
  generate->add_option("--clutter-min", gen.clutter_min)->default_val(3);
  generate->add_option("--clutter-max", gen.clutter_max)->default_val(8);
  generate
      ->add_option("--resolution-mm", gen.resolution_mm,
                   "Sampling pitch, mm per pixel")
      ->default_val(1.0);
  generate->add_option("--out-dir", gen_out, "Output directory")
      ->default_val("dataset");
  generate->add_option("--attenuation-config", gen_attenuation,
                       "JSON overriding the two-band attenuation model");
  generate
      ->add_option("--z-orange-green", gen.false_color.z_orange_green,
                   "Effective-Z edge between organic and intermediate hues")
      ->default_val(10.0);
  generate
      ->add_option("--z-green-blue", gen.false_color.z_green_blue,
                   "Effective-Z edge between intermediate and metallic hues")
      ->default_val(18.0);

  // split
  auto* split = app.add_subcommand(
      "split", "Partition a dataset into train/validation/test");
  std::string split_annotations;
  std::string split_out = "split.json";
  std::string split_group = "bag-scan";
  std::vector<double> split_fractions = {0.7, 0.1, 0.2};
  std::uint64_t split_seed = 0;
  split->add_option("--annotations", split_annotations)->required();
  split->add_option("--out", split_out)->default_val("split.json");
  split->add_option("--seed", split_seed)
      ->envname("DUALVIEW_SEED")
      ->default_val(0);
  split
      ->add_option("--fractions", split_fractions,
                   "Train, validation, test fractions")
      ->expected(3);
  split->add_option("--group-by", split_group, "bag-scan or bag")
      ->check(CLI::IsMember({"bag-scan", "bag"}))
      ->default_val("bag-scan");

  // detect
  auto* detect = app.add_subcommand(
      "detect", "Run the baseline detector over rendered images");
  std::string det_annotations, det_images, det_out = "detections.jsonl";
  DetectorParams det_params;
  double det_display = 0.0;
  detect->add_option("--annotations", det_annotations)->required();
  detect->add_option("--images-dir", det_images)->required();
  detect->add_option("--out", det_out)->default_val("detections.jsonl");
  detect->add_option("--min-blob-area", det_params.min_blob_area)
      ->default_val(120.0);
  detect->add_option("--nms-iou", det_params.nms_iou)->default_val(0.5);
  detect
      ->add_option("--display-threshold", det_display,
                   "Emit only detections scoring strictly above this")
      ->default_val(0.0);

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score detections against annotations");
  std::string eval_annotations, eval_detections, eval_out;
  std::string eval_mode = "single";
  std::string eval_interp = "all-points";
  double eval_iou = 0.5;
  evaluate->add_option("--annotations", eval_annotations)->required();
  evaluate->add_option("--detections", eval_detections)->required();
  evaluate->add_option("--mode", eval_mode, "single, fused or both")
      ->check(CLI::IsMember({"single", "fused", "both"}))
      ->default_val("single");
  evaluate->add_option("--iou-threshold", eval_iou)->default_val(0.5);
  evaluate
      ->add_option("--interpolation", eval_interp,
                   "AP integration: all-points or 11-point")
      ->check(CLI::IsMember({"all-points", "11-point"}))
      ->default_val("all-points");
  evaluate->add_option("--out-dir", eval_out,
                       "Write ap_table.txt, pr_curves.csv, pr_curves.svg");

  // anchors
  auto* anchors_cmd = app.add_subcommand(
      "anchors", "Cluster annotation box dimensions into anchor priors");
  std::string anc_annotations, anc_csv = "anchors.csv", anc_svg;
  std::size_t anc_k = 6;
  std::uint64_t anc_seed = 0;
  int anc_restarts = 10;
  anchors_cmd->add_option("--annotations", anc_annotations)->required();
  anchors_cmd->add_option("--k", anc_k)->default_val(6);
  anchors_cmd->add_option("--seed", anc_seed)
      ->envname("DUALVIEW_SEED")
      ->default_val(0);
  anchors_cmd
      ->add_option("--restarts", anc_restarts,
                   "Independent seeds, best run kept")
      ->default_val(10);
  anchors_cmd->add_option("--out-csv", anc_csv)->default_val("anchors.csv");
  anchors_cmd->add_option("--svg", anc_svg,
                          "Optional dimension-density scatter");

  // plot
  auto* plot = app.add_subcommand("plot", "Re-plot PR curves from CSV");
  std::string plot_csv, plot_out = "pr_curves.svg";
  plot->add_option("--curves", plot_csv, "CSV written by evaluate")
      ->required();
  plot->add_option("--out", plot_out)->default_val("pr_curves.svg");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Streaming latency harness over rendered scans");
  std::string bench_annotations, bench_images, bench_out = "latency.json";
  double bench_budget = 0.25;
  double bench_display = 0.0;
  bench->add_option("--annotations", bench_annotations)->required();
  bench->add_option("--images-dir", bench_images)->required();
  bench->add_option("--budget", bench_budget, "Per-scan budget, seconds")
      ->default_val(0.25);
  bench
      ->add_option("--display-threshold", bench_display,
                   "Display cut applied to emitted detections")
      ->required();
  bench->add_option("--out", bench_out)->default_val("latency.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage problems count as validation errors (exit 1); --help exits 0
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (generate->parsed()) {
    if (!gen_mix.empty()) {
      std::copy(gen_mix.begin(), gen_mix.end(), gen.threat_mix.begin());
    }
    const AttenuationBands bands = bands_from(gen_attenuation);
    const GeneratedDataset dataset = generate_dataset(gen, gen_out, bands);
    std::printf("generated %d bag-scans (%zu view annotations) in %s\n",
                gen.n_scans, dataset.annotations.size(), gen_out.c_str());
    return 0;
  }

  if (split->parsed()) {
    const auto annos = load_annotations(split_annotations);
    const SplitFractions fractions{split_fractions[0], split_fractions[1],
                                   split_fractions[2]};
    const DatasetSplit result = split_dataset(
        annos, fractions, split_seed,
        split_group == "bag" ? SplitGroupBy::Bag : SplitGroupBy::BagScan);
    save_split(result, split_out);
    std::printf("split %zu/%zu/%zu scans -> %s\n", result.train.size(),
                result.validation.size(), result.test.size(),
                split_out.c_str());
    return 0;
  }

  if (detect->parsed()) {
    const auto annos = load_annotations(det_annotations);
    const HeuristicDetector detector(det_params);
    const PipelineResult result =
        run_pipeline(annos, det_images, detector, det_display, 0.25);
    save_detections(result.detections, annos, det_out);
    for (const auto& err : result.latency.errors) {
      std::fprintf(stderr, "warning: %s\n", err.c_str());
    }
    std::printf("%zu detections over %zu scans -> %s\n",
                result.detections.size(),
                result.latency.per_scan_seconds.size(), det_out.c_str());
    return 0;
  }

  if (evaluate->parsed()) {
    const auto annos = load_annotations(eval_annotations);
    const auto dets = load_detections(eval_detections);
    std::vector<EvalMode> modes;
    if (eval_mode == "single" || eval_mode == "both") {
      modes.push_back(EvalMode::Single);
    }
    if (eval_mode == "fused" || eval_mode == "both") {
      modes.push_back(EvalMode::Fused);
    }
    EvalReport report = evaluate_detections(annos, dets, modes, eval_iou);
    if (eval_interp == "11-point") {
      for (auto& [mode, curves] : report.curves) {
        for (auto& [cls, curve] : curves) {
          curve.ap =
              average_precision(curve, ApInterpolation::ElevenPoint);
        }
      }
    }
    write_ap_table(std::cout, report);
    if (!eval_out.empty()) {
      fs::create_directories(eval_out);
      std::ofstream table(fs::path(eval_out) / "ap_table.txt");
      write_ap_table(table, report);
      write_curves_csv(report, fs::path(eval_out) / "pr_curves.csv");
      write_curves_svg(report, fs::path(eval_out) / "pr_curves.svg");
    }
    return 0;
  }

  if (anchors_cmd->parsed()) {
    const auto annos = load_annotations(anc_annotations);
    std::vector<BoxDims> dims;
    for (const auto& anno : annos) {
      for (const auto& gt : anno.objects) {
        dims.push_back({gt.box.w(), gt.box.h()});
      }
    }
    if (dims.empty()) {
      throw ValidationError("no annotated boxes to cluster");
    }

    KMeansResult best;
    bool have_best = false;
    for (int r = 0; r < anc_restarts; ++r) {
      KMeansResult run = kmeans_anchors(dims, anc_k, anc_seed + r);
      if (!have_best || run.mean_iou > best.mean_iou) {
        best = std::move(run);
        have_best = true;
      }
    }

    std::ofstream csv(anc_csv, std::ios::binary);
    if (!csv) throw IoError("cannot open for writing: " + anc_csv);
    csv << "w,h\n";
    for (const auto& c : best.centroids) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", c.w, c.h);
      csv << buf;
    }
    const CoverageStats coverage = anchor_coverage(best.centroids, dims);
    std::printf(
        "k=%zu over %zu boxes: mean IoU %.4f (coverage mean %.4f, min %.4f, "
        ">0.5 %.1f%%) -> %s\n",
        anc_k, dims.size(), best.mean_iou, coverage.mean_iou,
        coverage.min_iou, 100.0 * coverage.frac_above_half, anc_csv.c_str());

    if (!anc_svg.empty()) {
      double max_w = 0.0, max_h = 0.0;
      std::vector<ScatterPoint> points, centers;
      for (const auto& d : dims) {
        points.push_back({d.w, d.h});
        max_w = std::max(max_w, d.w);
        max_h = std::max(max_h, d.h);
      }
      for (const auto& c : best.centroids) centers.push_back({c.w, c.h});
      write_dims_svg(points, centers, max_w, max_h, anc_svg);
    }
    return 0;
  }

  if (plot->parsed()) {
    const EvalReport report = load_curves_csv(plot_csv);
    write_curves_svg(report, plot_out);
    std::printf("plotted %s -> %s\n", plot_csv.c_str(), plot_out.c_str());
    return 0;
  }

  if (bench->parsed()) {
    const auto annos = load_annotations(bench_annotations);
    const HeuristicDetector detector;
    const PipelineResult result = run_pipeline(
        annos, bench_images, detector, bench_display, bench_budget);
    write_latency_json(result.latency, bench_out);
    for (const auto& err : result.latency.errors) {
      std::fprintf(stderr, "warning: %s\n", err.c_str());
    }
    std::printf(
        "%zu scans: mean %.4fs median %.4fs p95 %.4fs budget %.2fs -> %s\n",
        result.latency.per_scan_seconds.size(), result.latency.mean_seconds,
        result.latency.median_seconds, result.latency.p95_seconds,
        result.latency.budget_seconds, result.latency.pass ? "PASS" : "FAIL");
    return result.latency.pass ? 0 : 1;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
