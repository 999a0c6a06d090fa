/* Copyright 2026 The layoutjoint Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the layoutjoint engine: layout-driven joint-attention masks,
 * the toy masked-attention sampler, the procedural depth stage and the
 * MIoU/ISR/SR evaluation harness.
 *
 * Conventions:
 *  - Every fallible call returns lj_status. On failure, lj_last_error()
 *    returns a message for the calling thread until its next failing call.
 *  - Objects are opaque handles released with their *_free function; freeing
 *    NULL is a no-op.
 *  - Strings returned through char** are heap allocated by the library and
 *    released with lj_string_free.
 *  - Instance indices are 0-based here; mask and report payloads use the
 *    1-based instance ids of the layout.
 */
#ifndef LAYOUTJOINT_H_
#define LAYOUTJOINT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LJ_BUILDING_LIBRARY)
#define LJ_API __declspec(dllexport)
#else
#define LJ_API __declspec(dllimport)
#endif
#else
#define LJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lj_status {
  LJ_OK = 0,
  LJ_ERR_EMPTY_INSTANCE_TEXT = 1,
  LJ_ERR_EMPTY_GLOBAL_TEXT = 2,
  LJ_ERR_DEGENERATE_BOX = 3,
  LJ_ERR_OUT_OF_RANGE_COORDINATE = 4,
  LJ_ERR_TOO_MANY_INSTANCES = 5,
  LJ_ERR_NO_INSTANCES = 6,
  LJ_ERR_INVALID_LAYOUT = 7,
  LJ_ERR_STEP_OUT_OF_RANGE = 8,
  LJ_ERR_NON_POSITIVE_RESOLUTION = 9,
  LJ_ERR_DIMENSION_MISMATCH = 10,
  LJ_ERR_EMPTY_ROW = 11,
  LJ_ERR_INVALID_ARGUMENT = 12,
  LJ_ERR_IO = 13,
  LJ_ERR_FORMAT = 14,
  LJ_ERR_INTERNAL = 99
} lj_status;

typedef struct lj_layout lj_layout;
typedef struct lj_mask lj_mask;
typedef struct lj_render lj_render;
typedef struct lj_depth lj_depth;
typedef struct lj_suite lj_suite;
typedef struct lj_report lj_report;

/* Engine knobs. Initialize with lj_options_init, then override. */
typedef struct lj_options {
  int total_steps;     /* sampling steps, default 20 */
  int gamma;           /* STRICT steps; negative derives it from the layout resolution */
  int patch_size;      /* pixels per patch side, default 32 */
  int seg_len;         /* tokens per text segment, default 8 */
  int embed_dim;       /* embedding width, default 32 */
  int heads;           /* attention heads, default 1 */
  uint64_t seed;       /* default 0 */
  int i2i_control;     /* booleans, default 1 */
  int i2t_control;
  int t2i_control;
  int t2t_control;
  int detail_renderer;
  int global_reads_instance_text; /* default 0 */
  const char* attributes;         /* comma separated vocabulary; NULL = eight colors */
  double iou_threshold;           /* default 0.5 */
  int jobs;                       /* evaluation workers, default 1 */
  size_t max_instances;           /* layout validation limit, default 16 */
  int resolution;                 /* grid and gamma resolution; 0 uses the layout's own */
} lj_options;

LJ_API void lj_options_init(lj_options* options);

LJ_API const char* lj_version(void);
LJ_API const char* lj_last_error(void);
LJ_API const char* lj_status_name(lj_status status);
LJ_API void lj_string_free(char* s);

/* ---- layouts ---------------------------------------------------------- */

/* Parses and validates. max_instances 0 means the default of 16. */
LJ_API lj_status lj_layout_parse(const char* json, size_t max_instances, lj_layout** out);
LJ_API lj_status lj_layout_load(const char* path, size_t max_instances, lj_layout** out);
LJ_API void lj_layout_free(lj_layout* layout);
LJ_API size_t lj_layout_instance_count(const lj_layout* layout);
LJ_API int lj_layout_resolution(const lj_layout* layout);
/* box = {x0, y0, x1, y1}, normalized. */
LJ_API lj_status lj_layout_box(const lj_layout* layout, size_t index, double box[4]);
LJ_API lj_status lj_layout_to_json(const lj_layout* layout, char** out);

LJ_API lj_status lj_box_iou(const double a[4], const double b[4], double* out);
LJ_API lj_status lj_gamma_for_resolution(int resolution, int* out);
/* Effective (gamma, total_steps) for a layout under the options. */
LJ_API lj_status lj_resolve_schedule(const lj_layout* layout, const lj_options* options, int* gamma,
                                     int* total_steps);

/* ---- masks ------------------------------------------------------------ */

LJ_API lj_status lj_mask_build(const lj_layout* layout, const lj_options* options, int step, lj_mask** out);
LJ_API void lj_mask_free(lj_mask* mask);
LJ_API size_t lj_mask_side(const lj_mask* mask);
LJ_API size_t lj_mask_text_len(const lj_mask* mask);
/* 1 permitted, 0 forbidden, -1 out of range. */
LJ_API int lj_mask_allowed(const lj_mask* mask, size_t query, size_t key);
/* P5 graymap, 255 = permitted. */
LJ_API lj_status lj_mask_write_pgm(const lj_mask* mask, const char* path);
/* Segment offsets, grid, phase and configuration of the mask. */
LJ_API lj_status lj_mask_sidecar_json(const lj_mask* mask, char** out);

/* ---- sampler ---------------------------------------------------------- */

/* Rasterize, embed, sample and decode one layout. keep_history retains
   per-step states for lj_render_write_states. */
LJ_API lj_status lj_render_layout(const lj_layout* layout, const lj_options* options, int keep_history,
                                  lj_render** out);
LJ_API void lj_render_free(lj_render* render);
/* Grid, decoded attribute map and per-instance verdicts. */
LJ_API lj_status lj_render_to_json(const lj_render* render, char** out);
/* Decoded attribute index per image token (-1 = none); writes min(cap, n)
   entries and stores n in *count. */
LJ_API lj_status lj_render_decoded(const lj_render* render, int* labels, size_t cap, size_t* count);
/* Binary state dump (LJSTATE1, little-endian float64). */
LJ_API lj_status lj_render_write_states(const lj_render* render, const char* path);

/* ---- depth stage ------------------------------------------------------ */

LJ_API lj_status lj_depth_from_layout(const lj_layout* layout, int height, int width, lj_depth** out);
LJ_API lj_status lj_depth_load_pgm(const char* path, lj_depth** out);
LJ_API void lj_depth_free(lj_depth* depth);
LJ_API lj_status lj_depth_size(const lj_depth* depth, int* height, int* width);
LJ_API double lj_depth_at(const lj_depth* depth, int row, int col);
/* 16-bit P5, maxval 65535. */
LJ_API lj_status lj_depth_write_pgm(const lj_depth* depth, const char* path);
/* notes (may be NULL) receives newline separated diagnostics. */
LJ_API lj_status lj_depth_refine(const lj_depth* depth, const lj_layout* layout, lj_layout** out, char** notes);

/* ---- evaluation ------------------------------------------------------- */

LJ_API lj_status lj_suite_generate(size_t count, int min_instances, int max_instances, uint64_t seed,
                                   int resolution, const lj_options* options, lj_suite** out);
LJ_API lj_status lj_suite_new(lj_suite** out);
LJ_API lj_status lj_suite_add(lj_suite* suite, const lj_layout* layout);
LJ_API size_t lj_suite_size(const lj_suite* suite);
LJ_API void lj_suite_free(lj_suite* suite);

LJ_API lj_status lj_evaluate(const lj_suite* suite, const lj_options* options, const char* config_name,
                             lj_report** out);
LJ_API void lj_report_free(lj_report* report);
LJ_API lj_status lj_report_metrics(const lj_report* report, double* miou, double* isr, double* sr);
LJ_API lj_status lj_report_to_json(const lj_report* report, char** out);
LJ_API lj_status lj_reports_to_csv(const lj_report* const* reports, size_t count, char** out);

/* The six ablation rows (w/o I2I, w/o I2T, w/o T2I, w/o T2T,
   w/o detail renderer, w/ all). lj_ablation_apply sets the mask switches of
   row `index` on options and returns the row name through *name (static). */
LJ_API size_t lj_ablation_count(void);
LJ_API lj_status lj_ablation_apply(size_t index, lj_options* options, const char** name);

#ifdef __cplusplus
}
#endif

#endif /* LAYOUTJOINT_H_ */
