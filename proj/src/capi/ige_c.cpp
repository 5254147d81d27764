// extern "C" surface over the C++ engine. Exceptions never cross this
// boundary; each entry point maps them to an ige_status and records the
// message in a thread-local slot.

#include "ige/ige.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ige/denoiser.hpp"
#include "ige/graph_extract.hpp"
#include "ige/io.hpp"
#include "ige/merge_engine.hpp"

struct ige_image {
  ige::Image value;
};

struct ige_graph {
  ige::ImageGraph value;
};

struct ige_filter_result {
  ige_image image;
  ige_graph graph;
  std::vector<ige::MergeStepReport> steps;
  std::vector<ige_image> progression;
};

struct ige_denoise_result {
  ige_image image;
  std::vector<double> losses;
  int32_t rejected_steps = 0;
  double final_step_size = 0.0;
};

namespace {

thread_local std::string g_last_error;

ige_status fail(ige_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
ige_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const ige::ParameterError& e) {
    return fail(IGE_ERR_PARAMETER, e.what());
  } catch (const ige::IoError& e) {
    return fail(IGE_ERR_IO, e.what());
  } catch (const ige::FormatError& e) {
    return fail(IGE_ERR_FORMAT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IGE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IGE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(IGE_ERR_INTERNAL, "unknown error");
  }
}

#define IGE_REQUIRE(cond, what) \
  if (!(cond)) return fail(IGE_ERR_INVALID_ARGUMENT, what)

ige::FilterParams to_cpp(const ige_filter_params& p) {
  ige::FilterParams out;
  out.target_resolution = p.target_resolution;
  out.step = p.step;
  out.d0 = p.d0;
  out.alpha = p.alpha;
  out.beta = p.beta;
  switch (p.threshold) {
    case IGE_THRESHOLD_T1:
      out.threshold = ige::ThresholdForm::T1;
      break;
    case IGE_THRESHOLD_T2:
      out.threshold = ige::ThresholdForm::T2;
      break;
    default:
      throw ige::ParameterError("unknown threshold form " + std::to_string(int(p.threshold)));
  }
  out.r_m = p.r_m;
  return out;
}

ige::DenoiseParams to_cpp(const ige_denoise_params& p) {
  ige::DenoiseParams out;
  out.lambda = p.lambda;
  out.sigmoid_alpha = p.sigmoid_alpha;
  out.step_size = p.step_size;
  out.max_iters = p.max_iters;
  out.tv_weight = p.tv_weight;
  out.surf_weight = p.surf_weight;
  return out;
}

ige_step_report to_c(const ige::MergeStepReport& r) {
  return {r.resolution_before, r.resolution_after, r.merges_performed, r.node_count_after, r.threshold_value};
}

ige::Parallelism threads_of(int32_t threads) { return {threads < 1 ? 1 : threads}; }

std::size_t value_count(const ige::Image& x) { return x.pixel_count() * ige::kChannels; }

}  // namespace

extern "C" {

const char* ige_version(void) { return "0.1.0"; }

const char* ige_last_error(void) { return g_last_error.c_str(); }

const char* ige_status_string(ige_status status) {
  switch (status) {
    case IGE_OK: return "ok";
    case IGE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IGE_ERR_PARAMETER: return "parameter violation";
    case IGE_ERR_IO: return "i/o error";
    case IGE_ERR_FORMAT: return "format error";
    case IGE_ERR_INVALID_GRAPH: return "invalid graph";
    case IGE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ige_filter_params_default(ige_filter_params* params) {
  if (!params) return;
  const ige::FilterParams d;
  *params = {d.target_resolution, d.step, d.d0, d.alpha, d.beta, IGE_THRESHOLD_T2, d.r_m};
}

ige_status ige_filter_params_validate(const ige_filter_params* params) {
  IGE_REQUIRE(params, "params is null");
  return guarded([&] {
    to_cpp(*params).validate();
    return IGE_OK;
  });
}

void ige_denoise_params_default(ige_denoise_params* params) {
  if (!params) return;
  const ige::DenoiseParams d;
  *params = {d.lambda, d.sigmoid_alpha, d.step_size, d.max_iters, d.tv_weight, d.surf_weight};
}

ige_status ige_denoise_params_validate(const ige_denoise_params* params) {
  IGE_REQUIRE(params, "params is null");
  return guarded([&] {
    to_cpp(*params).validate();
    return IGE_OK;
  });
}

// --- images ----------------------------------------------------------------

ige_status ige_image_create(int32_t height, int32_t width, const double* rgb, ige_image** out) {
  IGE_REQUIRE(rgb && out, "null argument");
  IGE_REQUIRE(height > 0 && width > 0, "image must be at least 1x1");
  return guarded([&] {
    const std::size_t n = std::size_t(height) * std::size_t(width) * 3;
    try {
      *out = new ige_image{ige::Image(height, width, std::vector<double>(rgb, rgb + n))};
    } catch (const ige::ParameterError& e) {
      return fail(IGE_ERR_INVALID_ARGUMENT, e.what());
    }
    return IGE_OK;
  });
}

ige_status ige_image_create_u8(int32_t height, int32_t width, const uint8_t* rgb, ige_image** out) {
  IGE_REQUIRE(rgb && out, "null argument");
  IGE_REQUIRE(height > 0 && width > 0, "image must be at least 1x1");
  return guarded([&] {
    const std::size_t n = std::size_t(height) * std::size_t(width) * 3;
    *out = new ige_image{ige::from_bytes(height, width, std::span<const uint8_t>(rgb, n))};
    return IGE_OK;
  });
}

ige_status ige_image_read(const char* path, ige_image** out) {
  IGE_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new ige_image{ige::read_image(path)};
    return IGE_OK;
  });
}

ige_status ige_image_write(const ige_image* image, const char* path) {
  IGE_REQUIRE(image && path, "null argument");
  return guarded([&] {
    ige::write_image(image->value, path);
    return IGE_OK;
  });
}

ige_status ige_image_encode_png(const ige_image* image, uint8_t** out_bytes, size_t* out_size) {
  IGE_REQUIRE(image && out_bytes && out_size, "null argument");
  return guarded([&] {
    const auto bytes = ige::encode_png(image->value);
    auto* buf = static_cast<uint8_t*>(std::malloc(bytes.size()));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, bytes.data(), bytes.size());
    *out_bytes = buf;
    *out_size = bytes.size();
    return IGE_OK;
  });
}

int32_t ige_image_height(const ige_image* image) { return image ? image->value.height() : 0; }
int32_t ige_image_width(const ige_image* image) { return image ? image->value.width() : 0; }

ige_status ige_image_copy_data(const ige_image* image, double* out, size_t count) {
  IGE_REQUIRE(image && out, "null argument");
  IGE_REQUIRE(count == value_count(image->value), "buffer length must be height*width*3");
  std::memcpy(out, image->value.data().data(), count * sizeof(double));
  return IGE_OK;
}

ige_status ige_image_copy_u8(const ige_image* image, uint8_t* out, size_t count) {
  IGE_REQUIRE(image && out, "null argument");
  IGE_REQUIRE(count == value_count(image->value), "buffer length must be height*width*3");
  const auto bytes = ige::to_bytes(image->value);
  std::memcpy(out, bytes.data(), count);
  return IGE_OK;
}

void ige_image_destroy(ige_image* image) { delete image; }

void ige_buffer_free(uint8_t* bytes) { std::free(bytes); }

// --- graphs ----------------------------------------------------------------

ige_status ige_graph_extract(const ige_image* image, int32_t threads, ige_graph** out) {
  IGE_REQUIRE(image && out, "null argument");
  return guarded([&] {
    *out = new ige_graph{ige::img2graph(image->value, threads_of(threads))};
    return IGE_OK;
  });
}

ige_status ige_graph_clone(const ige_graph* graph, ige_graph** out) {
  IGE_REQUIRE(graph && out, "null argument");
  return guarded([&] {
    *out = new ige_graph{graph->value};
    return IGE_OK;
  });
}

size_t ige_graph_node_count(const ige_graph* graph) { return graph ? graph->value.nodes.size() : 0; }
size_t ige_graph_edge_count(const ige_graph* graph) { return graph ? graph->value.edges.size() : 0; }
double ige_graph_resolution(const ige_graph* graph) { return graph ? graph->value.resolution : 0.0; }
int32_t ige_graph_height(const ige_graph* graph) { return graph ? graph->value.height() : 0; }
int32_t ige_graph_width(const ige_graph* graph) { return graph ? graph->value.width() : 0; }

ige_status ige_graph_get_node(const ige_graph* graph, size_t index, ige_node* out) {
  IGE_REQUIRE(graph && out, "null argument");
  IGE_REQUIRE(index < graph->value.nodes.size(), "node index out of range");
  const ige::Node& n = graph->value.nodes[index];
  *out = {n.id, n.size, {n.color_sum[0], n.color_sum[1], n.color_sum[2]}, {n.color[0], n.color[1], n.color[2]},
          n.perimeter};
  return IGE_OK;
}

ige_status ige_graph_get_edge(const ige_graph* graph, size_t index, ige_edge* out) {
  IGE_REQUIRE(graph && out, "null argument");
  IGE_REQUIRE(index < graph->value.edges.size(), "edge index out of range");
  const ige::Edge& e = graph->value.edges[index];
  *out = {e.src, e.dst, e.shared_pixels, e.color_distance, e.perimeter_fraction_src, e.perimeter_fraction_dst};
  return IGE_OK;
}

ige_status ige_graph_copy_labels(const ige_graph* graph, int32_t* out, size_t count) {
  IGE_REQUIRE(graph && out, "null argument");
  const auto& labels = graph->value.labels.labels;
  IGE_REQUIRE(count == labels.size(), "buffer length must be height*width");
  std::memcpy(out, labels.data(), count * sizeof(int32_t));
  return IGE_OK;
}

ige_status ige_graph_validate(const ige_graph* graph) {
  IGE_REQUIRE(graph, "null argument");
  return guarded([&] {
    if (const auto v = ige::validate(graph->value)) return fail(IGE_ERR_INVALID_GRAPH, v->kind + ": " + v->message);
    return IGE_OK;
  });
}

ige_status ige_graph_to_image(const ige_graph* graph, ige_image** out) {
  IGE_REQUIRE(graph && out, "null argument");
  return guarded([&] {
    *out = new ige_image{ige::graph2img(graph->value)};
    return IGE_OK;
  });
}

ige_status ige_graph_merge_step(const ige_graph* graph, double resolution, const ige_filter_params* params,
                                int32_t threads, ige_graph** out, ige_step_report* report) {
  IGE_REQUIRE(graph && params && out, "null argument");
  return guarded([&] {
    auto [next, rep] = ige::merge_step(graph->value, resolution, to_cpp(*params), threads_of(threads));
    *out = new ige_graph{std::move(next)};
    if (report) *report = to_c(rep);
    return IGE_OK;
  });
}

ige_status ige_graph_write_csv(const ige_graph* graph, const char* path) {
  IGE_REQUIRE(graph && path, "null argument");
  return guarded([&] {
    ige::write_graph_csv(graph->value, std::filesystem::path(path));
    return IGE_OK;
  });
}

ige_status ige_graph_write_dot(const ige_graph* graph, const char* path) {
  IGE_REQUIRE(graph && path, "null argument");
  return guarded([&] {
    ige::write_graph_dot(graph->value, std::filesystem::path(path));
    return IGE_OK;
  });
}

ige_status ige_graph_write_labels(const ige_graph* graph, const char* path) {
  IGE_REQUIRE(graph && path, "null argument");
  return guarded([&] {
    ige::write_labels(graph->value.labels, std::filesystem::path(path));
    return IGE_OK;
  });
}

void ige_graph_destroy(ige_graph* graph) { delete graph; }

// --- filter ----------------------------------------------------------------

ige_status ige_filter(const ige_image* image, const ige_filter_params* params, int32_t threads,
                      int32_t keep_progression, ige_filter_result** out) {
  IGE_REQUIRE(image && params && out, "null argument");
  return guarded([&] {
    auto result = std::make_unique<ige_filter_result>();
    ige::StepObserver observer;
    if (keep_progression) {
      observer = [&](const ige::ImageGraph& g, const ige::MergeStepReport&) {
        result->progression.push_back(ige_image{ige::graph2img(g)});
      };
    }
    auto filtered = ige::filter(image->value, to_cpp(*params), threads_of(threads), observer);
    result->image.value = std::move(filtered.filtered);
    result->graph.value = std::move(filtered.graph);
    result->steps = std::move(filtered.steps);
    *out = result.release();
    return IGE_OK;
  });
}

const ige_image* ige_filter_result_image(const ige_filter_result* result) {
  return result ? &result->image : nullptr;
}

const ige_graph* ige_filter_result_graph(const ige_filter_result* result) {
  return result ? &result->graph : nullptr;
}

size_t ige_filter_result_step_count(const ige_filter_result* result) { return result ? result->steps.size() : 0; }

ige_status ige_filter_result_step(const ige_filter_result* result, size_t index, ige_step_report* out) {
  IGE_REQUIRE(result && out, "null argument");
  IGE_REQUIRE(index < result->steps.size(), "step index out of range");
  *out = to_c(result->steps[index]);
  return IGE_OK;
}

const ige_image* ige_filter_result_progression(const ige_filter_result* result, size_t index) {
  if (!result || index >= result->progression.size()) return nullptr;
  return &result->progression[index];
}

void ige_filter_result_destroy(ige_filter_result* result) { delete result; }

// --- denoise ---------------------------------------------------------------

ige_status ige_denoise(const ige_image* image, const ige_denoise_params* params, int32_t threads,
                       ige_denoise_result** out) {
  IGE_REQUIRE(image && params && out, "null argument");
  return guarded([&] {
    auto r = ige::denoise(image->value, to_cpp(*params), threads_of(threads));
    auto result = std::make_unique<ige_denoise_result>();
    result->image.value = std::move(r.output);
    result->losses = std::move(r.state.loss_history);
    result->rejected_steps = r.rejected_steps;
    result->final_step_size = r.final_step_size;
    *out = result.release();
    return IGE_OK;
  });
}

const ige_image* ige_denoise_result_image(const ige_denoise_result* result) {
  return result ? &result->image : nullptr;
}

size_t ige_denoise_result_loss_count(const ige_denoise_result* result) { return result ? result->losses.size() : 0; }

ige_status ige_denoise_result_losses(const ige_denoise_result* result, double* out, size_t count) {
  IGE_REQUIRE(result && out, "null argument");
  IGE_REQUIRE(count == result->losses.size(), "buffer length must equal the loss count");
  std::memcpy(out, result->losses.data(), count * sizeof(double));
  return IGE_OK;
}

int32_t ige_denoise_result_rejected_steps(const ige_denoise_result* result) {
  return result ? result->rejected_steps : 0;
}

double ige_denoise_result_final_step_size(const ige_denoise_result* result) {
  return result ? result->final_step_size : 0.0;
}

void ige_denoise_result_destroy(ige_denoise_result* result) { delete result; }

}  // extern "C"
