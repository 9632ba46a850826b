// include/translab/translab.h

// Copyright 2026  The translab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * translab C interface. Every call returns a tl_status; on failure the
 * message is available from tl_last_error() on the same thread until the
 * next call on that thread. Handles are opaque and not thread-safe; distinct
 * handles may be used from different threads.
 */

#ifndef TRANSLAB_TRANSLAB_H_
#define TRANSLAB_TRANSLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TRANSLAB_BUILDING_LIBRARY)
#define TL_API __attribute__((visibility("default")))
#else
#define TL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_ARGUMENT = 1,   /* null pointer, bad enum, buffer too small */
  TL_ERR_CONFIG = 2,     /* config parse or validation */
  TL_ERR_IO = 3,         /* missing / unreadable / corrupt file */
  TL_ERR_INPUT = 4,      /* data outside the model's domain */
  TL_ERR_DIMENSION = 5,  /* shape mismatch */
  TL_ERR_NUMERIC = 6,    /* NaN, Inf or impossible alignment */
  TL_ERR_INTERNAL = 7
} tl_status;

TL_API const char *tl_last_error(void);
TL_API const char *tl_status_name(tl_status status);
TL_API const char *tl_version(void);

/* Strings returned through char** are owned by the caller. */
TL_API void tl_string_free(char *s);

/* Receives one line of output (no trailing newline). */
typedef void (*tl_line_fn)(const char *line, void *user);

/* ---- configuration ---------------------------------------------------- */

typedef struct tl_config tl_config;

TL_API tl_status tl_config_create(tl_config **out);
TL_API void tl_config_destroy(tl_config *config);
TL_API tl_status tl_config_load_file(tl_config *config, const char *path);
TL_API tl_status tl_config_parse(tl_config *config, const char *text, const char *source);
/* "dotted.key=value" */
TL_API tl_status tl_config_set(tl_config *config, const char *assignment);
TL_API tl_status tl_config_get(const tl_config *config, const char *key, char **value);
TL_API tl_status tl_config_to_text(const tl_config *config, char **text);
/* Full validation of every section. */
TL_API tl_status tl_config_validate(const tl_config *config);

/* ---- checks and studies ----------------------------------------------- */

/* scope: loss | joint | encoder | predictor | model | all.
 * One line per check; *passed is 1 iff every check met tol. */
TL_API tl_status tl_gradcheck(const char *scope, uint64_t seed, double tol, tl_line_fn on_line,
                              void *user, int *passed);

/* Random lattices (T <= 5, U <= 4, V <= 3) scored by the forward-backward
 * loss and by path enumeration; *passed is 1 iff all agree within tol. */
TL_API tl_status tl_loss_oracle(uint64_t seed, size_t instances, double tol, tl_line_fn on_line,
                                void *user, int *passed, double *max_rel_error);

/* One JSON record per U+1 in {2, 4, ..., umax}. real_trials = 0 skips the
 * real-model rank test. */
TL_API tl_status tl_variance_study(size_t umax, size_t trials, size_t real_trials,
                                   uint64_t seed, tl_line_fn on_record, void *user);

/* ---- training ---------------------------------------------------------- */

typedef struct tl_train_summary {
  size_t steps;
  double final_loss;
  double final_eval_loss;
  double final_token_error_rate;
  double best_token_error_rate;
} tl_train_summary;

/* Writes <run_id>.metrics.jsonl, <run_id>.ckpt and <run_id>.best.ckpt to
 * out_dir. on_line receives each metrics record as it is written. */
TL_API tl_status tl_train(const tl_config *config, const char *out_dir, tl_line_fn on_line,
                          void *user, tl_train_summary *summary);

/* ---- trained models ---------------------------------------------------- */

typedef struct tl_model tl_model;

typedef struct tl_eval_summary {
  size_t utterances;
  size_t reference_tokens;
  size_t edit_errors;
  double token_error_rate;
  double sequence_accuracy;
  double mean_loss;
} tl_eval_summary;

TL_API tl_status tl_model_load(const char *checkpoint_path, tl_model **out);
TL_API void tl_model_destroy(tl_model *model);
TL_API tl_status tl_model_config_text(const tl_model *model, char **text);
TL_API tl_status tl_model_feature_dim(const tl_model *model, size_t *dim);

/* Evaluates on n utterances of the checkpoint's synthetic task drawn with
 * eval_seed. n = 0 uses train.eval_size; eval_seed = 0 uses task.eval_seed.
 * When on_line is set, one "ref ... | hyp ..." line per utterance. */
TL_API tl_status tl_model_evaluate(const tl_model *model, size_t n, uint64_t eval_seed,
                                   size_t threads, tl_line_fn on_line, void *user,
                                   tl_eval_summary *summary);

/* Greedy decoding of one utterance, features row-major [frames x dim].
 * *count receives the hypothesis length even when capacity is too small
 * (then TL_ERR_ARGUMENT is returned). */
TL_API tl_status tl_model_decode(const tl_model *model, const double *features, size_t frames,
                                 size_t dim, int *tokens, size_t capacity, size_t *count);

#ifdef __cplusplus
}
#endif

#endif  // TRANSLAB_TRANSLAB_H_
