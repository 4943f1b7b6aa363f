/* C interface to the vtriage library. All strings are UTF-8 and
 * NUL-terminated. Returned strings are owned by the handle (or by the
 * calling thread for vt_last_error) and stay valid until the next call on
 * the same handle. */
#ifndef VTRIAGE_H
#define VTRIAGE_H

#include <stddef.h>

#if defined(VT_BUILDING_LIBRARY)
#define VT_API __attribute__((visibility("default")))
#else
#define VT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vt_status {
  VT_OK = 0,
  VT_ERR_VALIDATION = 1, /* bad input, schema error, missing file */
  VT_ERR_INTERNAL = 2,
  VT_ERR_ARGUMENT = 3,   /* null handle or pointer */
  VT_ERR_UNKNOWN_COMMAND = 64
} vt_status;

typedef struct vt_pipeline vt_pipeline;
typedef struct vt_tagger vt_tagger;

VT_API const char* vt_version(void);

/* Message of the last failed call on this thread, "" if none. */
VT_API const char* vt_last_error(void);

VT_API vt_status vt_pipeline_create(vt_pipeline** out);
VT_API void vt_pipeline_destroy(vt_pipeline* p);

/* Reads a JSON config file; later vt_pipeline_set calls override it. */
VT_API vt_status vt_pipeline_load_config(vt_pipeline* p, const char* path);

/* Settings: seed, work_dir, corpus_dir, videos, transcripts, ocr, labels,
 * dictionary, data_dir, split_fraction, clf_l2, projection, tagger.<field>. */
VT_API vt_status vt_pipeline_set(vt_pipeline* p, const char* key, const char* value);

/* Per-command options: arch, target, table, model, out, keywords,
 * search_results, impute_annotations, videos_count. Cleared with
 * vt_pipeline_clear_options. */
VT_API vt_status vt_pipeline_set_option(vt_pipeline* p, const char* key, const char* value);
VT_API vt_status vt_pipeline_clear_options(vt_pipeline* p);

VT_API int vt_is_command(const char* command);

/* Runs one command. On success *summary (if non-null) receives the
 * one-line summary. */
VT_API vt_status vt_pipeline_run(vt_pipeline* p, const char* command, const char** summary);

/* Warnings from the last run, joined by newlines. */
VT_API const char* vt_pipeline_warnings(const vt_pipeline* p);

VT_API vt_status vt_tagger_load(const char* path, vt_tagger** out);
VT_API void vt_tagger_destroy(vt_tagger* t);

/* Tokenizes `text` and tags each sentence. The result has one
 * "token<TAB>tag" line per token and a blank line after each sentence. */
VT_API vt_status vt_tagger_tag(vt_tagger* t, const char* text, const char** result);

/* Flesch-Kincaid grade of `text`; *defined is 0 for text without words. */
VT_API vt_status vt_readability(const char* text, double* grade, int* defined);

#ifdef __cplusplus
}
#endif

#endif /* VTRIAGE_H */
