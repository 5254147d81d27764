/*
 * ige.h - C interface to the image-graph extractor.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns an ige_status;
 * on failure ige_last_error() gives a message for the calling thread.
 * Handles are immutable after creation and may be shared across threads.
 */
#ifndef IGE_H
#define IGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(IGE_BUILDING_LIBRARY)
#define IGE_API __attribute__((visibility("default")))
#else
#define IGE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ige_status {
  IGE_OK = 0,
  IGE_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad shape, out-of-range value */
  IGE_ERR_PARAMETER = 2,        /* filter / denoise parameters outside their domain */
  IGE_ERR_IO = 3,               /* file could not be opened, read or written */
  IGE_ERR_FORMAT = 4,           /* unsupported or corrupt file contents */
  IGE_ERR_INVALID_GRAPH = 5,    /* ige_graph_validate found a violation */
  IGE_ERR_INTERNAL = 6
} ige_status;

typedef enum ige_threshold_form { IGE_THRESHOLD_T1 = 1, IGE_THRESHOLD_T2 = 2 } ige_threshold_form;

typedef struct ige_filter_params {
  double target_resolution;
  double step;
  double d0;
  double alpha;
  double beta;
  ige_threshold_form threshold;
  double r_m;
} ige_filter_params;

typedef struct ige_denoise_params {
  double lambda;
  double sigmoid_alpha;
  double step_size;
  int32_t max_iters;
  double tv_weight;
  double surf_weight;
} ige_denoise_params;

typedef struct ige_step_report {
  double resolution_before;
  double resolution_after;
  uint64_t merges_performed;
  uint64_t node_count_after;
  double threshold_value;
} ige_step_report;

typedef struct ige_node {
  int32_t id;
  int64_t size;
  double color_sum[3];
  double color[3];
  int64_t perimeter;
} ige_node;

typedef struct ige_edge {
  int32_t src;
  int32_t dst;
  int64_t shared_pixels;
  double color_distance;
  double perimeter_fraction_src;
  double perimeter_fraction_dst;
} ige_edge;

typedef struct ige_image ige_image;
typedef struct ige_graph ige_graph;
typedef struct ige_filter_result ige_filter_result;
typedef struct ige_denoise_result ige_denoise_result;

IGE_API const char* ige_version(void);
/* Message for the last failed call on this thread; never null. */
IGE_API const char* ige_last_error(void);
IGE_API const char* ige_status_string(ige_status status);

IGE_API void ige_filter_params_default(ige_filter_params* params);
IGE_API ige_status ige_filter_params_validate(const ige_filter_params* params);
IGE_API void ige_denoise_params_default(ige_denoise_params* params);
IGE_API ige_status ige_denoise_params_validate(const ige_denoise_params* params);

/* Images: interleaved row-major RGB, height x width x 3. */
IGE_API ige_status ige_image_create(int32_t height, int32_t width, const double* rgb, ige_image** out);
IGE_API ige_status ige_image_create_u8(int32_t height, int32_t width, const uint8_t* rgb, ige_image** out);
IGE_API ige_status ige_image_read(const char* path, ige_image** out);
IGE_API ige_status ige_image_write(const ige_image* image, const char* path);
/* Encodes to PNG in memory; *out_bytes is released with ige_buffer_free. */
IGE_API ige_status ige_image_encode_png(const ige_image* image, uint8_t** out_bytes, size_t* out_size);
IGE_API int32_t ige_image_height(const ige_image* image);
IGE_API int32_t ige_image_width(const ige_image* image);
IGE_API ige_status ige_image_copy_data(const ige_image* image, double* out, size_t count);
IGE_API ige_status ige_image_copy_u8(const ige_image* image, uint8_t* out, size_t count);
IGE_API void ige_image_destroy(ige_image* image);
IGE_API void ige_buffer_free(uint8_t* bytes);

/* Graphs */
IGE_API ige_status ige_graph_extract(const ige_image* image, int32_t threads, ige_graph** out);
IGE_API ige_status ige_graph_clone(const ige_graph* graph, ige_graph** out);
IGE_API size_t ige_graph_node_count(const ige_graph* graph);
IGE_API size_t ige_graph_edge_count(const ige_graph* graph);
IGE_API double ige_graph_resolution(const ige_graph* graph);
IGE_API int32_t ige_graph_height(const ige_graph* graph);
IGE_API int32_t ige_graph_width(const ige_graph* graph);
IGE_API ige_status ige_graph_get_node(const ige_graph* graph, size_t index, ige_node* out);
IGE_API ige_status ige_graph_get_edge(const ige_graph* graph, size_t index, ige_edge* out);
IGE_API ige_status ige_graph_copy_labels(const ige_graph* graph, int32_t* out, size_t count);
/* IGE_OK, or IGE_ERR_INVALID_GRAPH with the violation in ige_last_error(). */
IGE_API ige_status ige_graph_validate(const ige_graph* graph);
IGE_API ige_status ige_graph_to_image(const ige_graph* graph, ige_image** out);
IGE_API ige_status ige_graph_merge_step(const ige_graph* graph, double resolution,
                                        const ige_filter_params* params, int32_t threads,
                                        ige_graph** out, ige_step_report* report);
IGE_API ige_status ige_graph_write_csv(const ige_graph* graph, const char* path);
IGE_API ige_status ige_graph_write_dot(const ige_graph* graph, const char* path);
IGE_API ige_status ige_graph_write_labels(const ige_graph* graph, const char* path);
IGE_API void ige_graph_destroy(ige_graph* graph);

/* Iterative filter. With keep_progression != 0 the result also holds the
 * reconstructed image after every merge step. */
IGE_API ige_status ige_filter(const ige_image* image, const ige_filter_params* params, int32_t threads,
                              int32_t keep_progression, ige_filter_result** out);
/* Borrowed handles, valid until the result is destroyed. */
IGE_API const ige_image* ige_filter_result_image(const ige_filter_result* result);
IGE_API const ige_graph* ige_filter_result_graph(const ige_filter_result* result);
IGE_API size_t ige_filter_result_step_count(const ige_filter_result* result);
IGE_API ige_status ige_filter_result_step(const ige_filter_result* result, size_t index, ige_step_report* out);
IGE_API const ige_image* ige_filter_result_progression(const ige_filter_result* result, size_t index);
IGE_API void ige_filter_result_destroy(ige_filter_result* result);

/* Denoising pre-processor */
IGE_API ige_status ige_denoise(const ige_image* image, const ige_denoise_params* params, int32_t threads,
                               ige_denoise_result** out);
IGE_API const ige_image* ige_denoise_result_image(const ige_denoise_result* result);
IGE_API size_t ige_denoise_result_loss_count(const ige_denoise_result* result);
IGE_API ige_status ige_denoise_result_losses(const ige_denoise_result* result, double* out, size_t count);
IGE_API int32_t ige_denoise_result_rejected_steps(const ige_denoise_result* result);
IGE_API double ige_denoise_result_final_step_size(const ige_denoise_result* result);
IGE_API void ige_denoise_result_destroy(ige_denoise_result* result);

#ifdef __cplusplus
}
#endif

#endif /* IGE_H */
