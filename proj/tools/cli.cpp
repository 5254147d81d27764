#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ige/ige.h"

namespace ige::cli {

namespace fs = std::filesystem;

namespace {

struct ImageDeleter {
  void operator()(ige_image* p) const { ige_image_destroy(p); }
};
struct FilterResultDeleter {
  void operator()(ige_filter_result* p) const { ige_filter_result_destroy(p); }
};
struct DenoiseResultDeleter {
  void operator()(ige_denoise_result* p) const { ige_denoise_result_destroy(p); }
};
struct GraphDeleter {
  void operator()(ige_graph* p) const { ige_graph_destroy(p); }
};
using ImagePtr = std::unique_ptr<ige_image, ImageDeleter>;
using FilterResultPtr = std::unique_ptr<ige_filter_result, FilterResultDeleter>;
using DenoiseResultPtr = std::unique_ptr<ige_denoise_result, DenoiseResultDeleter>;
using GraphPtr = std::unique_ptr<ige_graph, GraphDeleter>;

/// Carries a C status out of a command body.
struct Failure {
  ige_status status;
  std::string message;
};

int exit_code(ige_status s) {
  switch (s) {
    case IGE_OK: return kSuccess;
    case IGE_ERR_PARAMETER:
    case IGE_ERR_INVALID_ARGUMENT: return kParameter;
    default: return kIo;
  }
}

void check(ige_status s, const std::string& context) {
  if (s != IGE_OK) throw Failure{s, context + ": " + ige_last_error()};
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Options {
  std::string input;
  std::string output;
  ige_filter_params filter{};
  ige_denoise_params denoise{};
  std::string threshold = "t2";
  std::string export_graph;
  std::string export_dot;
  std::string export_labels;
  std::string report;
  std::string loss_history;
  std::string manifest;
  bool progression = false;
  bool pre_denoise = false;
  bool initial = false;
  int threads = 0;

  Options() {
    ige_filter_params_default(&filter);
    ige_denoise_params_default(&denoise);
  }

  int32_t worker_threads() const {
    if (threads > 0) return threads;
    return int32_t(std::max(1u, std::thread::hardware_concurrency()));
  }
};

void add_filter_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--target-res", o.filter.target_resolution, "Target resolution r* in ]0,1[")->capture_default_str();
  cmd.add_option("--dr", o.filter.step, "Resolution decrement per merge step")->capture_default_str();
  cmd.add_option("--d0", o.filter.d0, "Minimum perceived color distance at full resolution")->capture_default_str();
  cmd.add_option("--alpha", o.filter.alpha, "Size-adjustment slope")->capture_default_str();
  cmd.add_option("--beta", o.filter.beta, "Size-adjustment offset")->capture_default_str();
  cmd.add_option("--threshold", o.threshold, "Threshold form")
      ->check(CLI::IsMember({"t1", "t2"}, CLI::ignore_case))
      ->capture_default_str();
  cmd.add_option("--rm", o.filter.r_m, "r_m of threshold T2")->capture_default_str();
}

void add_denoise_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--lambda", o.denoise.lambda, "Fidelity weight")->capture_default_str();
  cmd.add_option("--sigmoid-alpha", o.denoise.sigmoid_alpha, "Step-surrogate sharpness")->capture_default_str();
  cmd.add_option("--steps", o.denoise.max_iters, "Gradient-descent iterations")->capture_default_str();
  cmd.add_option("--step-size", o.denoise.step_size, "Initial gradient step")->capture_default_str();
}

void add_export_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--export-graph", o.export_graph, "Write the final graph as CSV");
  cmd.add_option("--export-dot", o.export_dot, "Write the final graph as Graphviz DOT");
  cmd.add_option("--export-labels", o.export_labels, "Write the label matrix as text");
}

void finalize_threshold(Options& o) {
  std::string t = o.threshold;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  o.filter.threshold = t == "t1" ? IGE_THRESHOLD_T1 : IGE_THRESHOLD_T2;
}

ImagePtr load(const std::string& path) {
  ige_image* raw = nullptr;
  check(ige_image_read(path.c_str(), &raw), "reading " + path);
  return ImagePtr(raw);
}

ImagePtr run_denoise(const ige_image* image, const Options& o, std::vector<double>* losses) {
  ige_denoise_result* raw = nullptr;
  check(ige_denoise(image, &o.denoise, o.worker_threads(), &raw), "denoising");
  DenoiseResultPtr result(raw);
  if (losses) {
    losses->resize(ige_denoise_result_loss_count(raw));
    check(ige_denoise_result_losses(raw, losses->data(), losses->size()), "loss history");
  }
  // Copy the borrowed image out before the result goes away.
  const ige_image* out = ige_denoise_result_image(raw);
  std::vector<double> data(std::size_t(ige_image_height(out)) * ige_image_width(out) * 3);
  check(ige_image_copy_data(out, data.data(), data.size()), "denoised image");
  ige_image* copy = nullptr;
  check(ige_image_create(ige_image_height(out), ige_image_width(out), data.data(), &copy), "denoised image");
  return ImagePtr(copy);
}

void write_exports(const ige_graph* graph, const Options& o) {
  if (!o.export_graph.empty()) check(ige_graph_write_csv(graph, o.export_graph.c_str()), "writing " + o.export_graph);
  if (!o.export_dot.empty()) check(ige_graph_write_dot(graph, o.export_dot.c_str()), "writing " + o.export_dot);
  if (!o.export_labels.empty()) {
    check(ige_graph_write_labels(graph, o.export_labels.c_str()), "writing " + o.export_labels);
  }
}

std::string step_report(const ige_filter_result* result, std::size_t initial_nodes) {
  std::ostringstream rep;
  rep << "step=0 resolution=" << fixed6(1.0) << " nodes=" << initial_nodes << '\n';
  for (std::size_t k = 0; k < ige_filter_result_step_count(result); ++k) {
    ige_step_report s{};
    check(ige_filter_result_step(result, k, &s), "step report");
    rep << "step=" << (k + 1) << " resolution_before=" << fixed6(s.resolution_before)
        << " resolution=" << fixed6(s.resolution_after) << " threshold=" << fixed6(s.threshold_value)
        << " merges=" << s.merges_performed << " nodes=" << s.node_count_after << '\n';
  }
  return rep.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{IGE_ERR_IO, "cannot write " + path};
}

FilterResultPtr run_filter(const ige_image* image, const Options& o, int32_t threads) {
  check(ige_filter_params_validate(&o.filter), "invalid filter parameters");
  ige_filter_result* raw = nullptr;
  check(ige_filter(image, &o.filter, threads, o.progression ? 1 : 0, &raw), "filtering");
  return FilterResultPtr(raw);
}

std::size_t initial_node_count(const ige_filter_result* result) {
  ige_step_report first{};
  if (ige_filter_result_step_count(result) == 0 || ige_filter_result_step(result, 0, &first) != IGE_OK) {
    return ige_graph_node_count(ige_filter_result_graph(result));
  }
  return std::size_t(first.node_count_after + first.merges_performed);
}

std::string percent_suffix(double r) { return "_r" + std::to_string(std::lround(r * 100.0)); }

// --- subcommands -------------------------------------------------------------

int cmd_filter(Options& o, std::ostream& out) {
  finalize_threshold(o);
  check(ige_filter_params_validate(&o.filter), "invalid filter parameters");
  if (o.pre_denoise) check(ige_denoise_params_validate(&o.denoise), "invalid denoise parameters");
  ImagePtr image = load(o.input);
  if (o.pre_denoise) image = run_denoise(image.get(), o, nullptr);
  FilterResultPtr result = run_filter(image.get(), o, o.worker_threads());
  const ige_graph* graph = ige_filter_result_graph(result.get());

  check(ige_image_write(ige_filter_result_image(result.get()), o.output.c_str()), "writing " + o.output);
  write_exports(graph, o);
  if (!o.report.empty()) write_text(o.report, step_report(result.get(), initial_node_count(result.get())));
  if (o.progression) {
    const fs::path base(o.output);
    for (std::size_t k = 0; k < ige_filter_result_step_count(result.get()); ++k) {
      ige_step_report s{};
      check(ige_filter_result_step(result.get(), k, &s), "step report");
      const fs::path frame = base.parent_path() / (base.stem().string() + "_step" + std::to_string(k + 1) +
                                                   percent_suffix(s.resolution_after) + base.extension().string());
      check(ige_image_write(ige_filter_result_progression(result.get(), k), frame.string().c_str()),
            "writing " + frame.string());
    }
  }
  out << "nodes=" << ige_graph_node_count(graph) << " edges=" << ige_graph_edge_count(graph)
      << " resolution=" << fixed6(ige_graph_resolution(graph)) << '\n';
  return kSuccess;
}

int cmd_denoise(Options& o, std::ostream& out) {
  check(ige_denoise_params_validate(&o.denoise), "invalid denoise parameters");
  ImagePtr image = load(o.input);
  std::vector<double> losses;
  ImagePtr result = run_denoise(image.get(), o, &losses);
  check(ige_image_write(result.get(), o.output.c_str()), "writing " + o.output);
  const std::string history = o.loss_history.empty() ? o.output + ".loss.txt" : o.loss_history;
  std::ostringstream text;
  for (std::size_t k = 0; k < losses.size(); ++k) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "iteration=%zu loss=%.17g\n", k, losses[k]);
    text << buf;
  }
  write_text(history, text.str());
  out << "iterations=" << (losses.empty() ? 0 : losses.size() - 1)
      << " final_loss=" << (losses.empty() ? 0.0 : losses.back()) << '\n';
  return kSuccess;
}

int cmd_graph(Options& o, std::ostream& out) {
  finalize_threshold(o);
  if (o.export_graph.empty() && o.export_dot.empty() && o.export_labels.empty()) {
    throw Failure{IGE_ERR_INVALID_ARGUMENT, "graph: nothing to do, pass --export-graph, --export-dot or --export-labels"};
  }
  ImagePtr image = load(o.input);
  if (o.pre_denoise) image = run_denoise(image.get(), o, nullptr);
  if (o.initial) {
    ige_graph* raw = nullptr;
    check(ige_graph_extract(image.get(), o.worker_threads(), &raw), "extracting graph");
    GraphPtr graph(raw);
    write_exports(graph.get(), o);
    out << "nodes=" << ige_graph_node_count(raw) << " edges=" << ige_graph_edge_count(raw) << '\n';
    return kSuccess;
  }
  FilterResultPtr result = run_filter(image.get(), o, o.worker_threads());
  const ige_graph* graph = ige_filter_result_graph(result.get());
  write_exports(graph, o);
  out << "nodes=" << ige_graph_node_count(graph) << " edges=" << ige_graph_edge_count(graph) << '\n';
  return kSuccess;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext == ".png" || ext == ".ppm";
}

bool inside(const fs::path& child, const fs::path& parent) {
  auto c = child.begin();
  for (auto p = parent.begin(); p != parent.end(); ++p, ++c) {
    if (c == child.end() || *c != *p) return false;
  }
  return true;
}

int cmd_augment(Options& o, std::ostream& out, std::ostream& err) {
  finalize_threshold(o);
  check(ige_filter_params_validate(&o.filter), "invalid filter parameters");
  if (o.pre_denoise) check(ige_denoise_params_validate(&o.denoise), "invalid denoise parameters");
  const fs::path in_dir(o.input);
  const fs::path out_dir(o.output);
  std::error_code ec;
  if (!fs::is_directory(in_dir, ec)) throw Failure{IGE_ERR_IO, "input directory " + o.input + " does not exist"};
  const fs::path in_abs = fs::weakly_canonical(in_dir);
  const fs::path out_abs = fs::weakly_canonical(out_dir);
  if (inside(out_abs, in_abs) || inside(in_abs, out_abs)) {
    throw Failure{IGE_ERR_INVALID_ARGUMENT, "output directory must be distinct from (and not nested with) the input"};
  }
  fs::create_directories(out_dir, ec);
  if (ec) throw Failure{IGE_ERR_IO, "cannot create " + o.output + ": " + ec.message()};

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(fs::relative(entry.path(), in_dir));
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Failure{IGE_ERR_IO, "no images found in " + o.input};

  const std::string suffix = percent_suffix(o.filter.target_resolution);
  std::vector<std::optional<std::string>> errors(files.size());
  std::vector<fs::path> filtered_names(files.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const fs::path& rel = files[i];
      filtered_names[i] = rel.parent_path() / (rel.stem().string() + suffix + rel.extension().string());
      try {
        ImagePtr image = load((in_dir / rel).string());
        if (o.pre_denoise) image = run_denoise(image.get(), o, nullptr);
        FilterResultPtr result = run_filter(image.get(), o, 1);
        const fs::path target = out_dir / rel;
        fs::create_directories(target.parent_path());
        fs::copy_file(in_dir / rel, target, fs::copy_options::overwrite_existing);
        const fs::path filtered = out_dir / filtered_names[i];
        check(ige_image_write(ige_filter_result_image(result.get()), filtered.string().c_str()),
              "writing " + filtered.string());
      } catch (const Failure& f) {
        errors[i] = f.message;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      if (errors[i]) {
        std::lock_guard lock(log_mutex);
        err << "skipping " << (in_dir / rel).string() << ": " << *errors[i] << '\n';
      }
    }
  };
  {
    const std::size_t workers = std::min<std::size_t>(std::size_t(o.worker_threads()), files.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
  }

  const fs::path manifest = o.manifest.empty() ? out_dir / "manifest.csv" : fs::path(o.manifest);
  std::ostringstream text;
  text << "original,filtered\n";
  std::size_t ok = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (errors[i]) continue;
    text << files[i].generic_string() << ',' << filtered_names[i].generic_string() << '\n';
    ++ok;
  }
  if (ok == 0) throw Failure{IGE_ERR_IO, "every image in " + o.input + " failed"};
  write_text(manifest.string(), text.str());
  out << "images=" << ok << " skipped=" << (files.size() - ok) << " manifest=" << manifest.string() << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Image-graph extractor: iterative texture-suppressing filter"};
  app.name(args.empty() ? "ige" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  Options o;

  auto* filter = app.add_subcommand("filter", "Filter one image down to the target resolution");
  filter->add_option("input", o.input, "Input image (PNG or PPM)")->required();
  filter->add_option("output", o.output, "Filtered output image (.png or .ppm)")->required();
  add_filter_flags(*filter, o);
  add_export_flags(*filter, o);
  filter->add_option("--report", o.report, "Write per-step key=value report");
  filter->add_flag("--progression", o.progression, "Also write the image after every merge step");
  filter->add_flag("--denoise", o.pre_denoise, "Run the denoising pre-processor first");
  add_denoise_flags(*filter, o);
  filter->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* denoise = app.add_subcommand("denoise", "Run the TV + surface-loss denoiser");
  denoise->add_option("input", o.input, "Input image")->required();
  denoise->add_option("output", o.output, "Output image")->required();
  add_denoise_flags(*denoise, o);
  denoise->add_option("--loss-history", o.loss_history, "Loss history file (default: <output>.loss.txt)");
  denoise->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* graph = app.add_subcommand("graph", "Export the image-graph of an image");
  graph->add_option("input", o.input, "Input image")->required();
  add_filter_flags(*graph, o);
  add_export_flags(*graph, o);
  graph->add_flag("--initial", o.initial, "Export the unfiltered graph at resolution 1");
  graph->add_flag("--denoise", o.pre_denoise, "Run the denoising pre-processor first");
  add_denoise_flags(*graph, o);
  graph->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* augment = app.add_subcommand("augment", "Write every image of a dataset next to its filtered copy");
  augment->add_option("input_dir", o.input, "Dataset directory (flat or class subdirectories)")->required();
  augment->add_option("output_dir", o.output, "Output directory")->required();
  add_filter_flags(*augment, o);
  augment->add_option("--manifest", o.manifest, "Manifest path (default: <output_dir>/manifest.csv)");
  augment->add_flag("--denoise", o.pre_denoise, "Run the denoising pre-processor first");
  add_denoise_flags(*augment, o);
  augment->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (filter->parsed()) return cmd_filter(o, out);
    if (denoise->parsed()) return cmd_denoise(o, out);
    if (graph->parsed()) return cmd_graph(o, out);
    if (augment->parsed()) return cmd_augment(o, out, err);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return exit_code(f.status);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace ige::cli
