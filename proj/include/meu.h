#ifndef MEU_H
#define MEU_H

/* C interface to the solver. A session owns its options and the buffers
   returned by the accessors; those strings stay valid until the next call on
   the same session or until it is freed. Sessions are not thread-safe, but
   distinct sessions may be used concurrently. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MEU_API __declspec(dllexport)
#else
#define MEU_API __attribute__((visibility("default")))
#endif

typedef struct meu_session meu_session;

typedef enum meu_status {
  MEU_OK = 0,
  MEU_ERR_USAGE = 1, /* bad arguments or options */
  MEU_ERR_INPUT = 2, /* parse, type or model errors */
  MEU_ERR_SOLVE = 3  /* impossible evidence, timeouts */
} meu_status;

MEU_API const char* meu_version(void);

MEU_API meu_session* meu_session_new(void);
MEU_API void meu_session_free(meu_session* s);

/* Keys: "prune" (on|off), "heuristic" (registration|largest-gap),
   "timeout_ms" (number, 0 = none), "order" (variable labels separated by
   whitespace or commas), "dot" (on|off), "oracle" (on|off), "stats" (on|off). */
MEU_API meu_status meu_set_option(meu_session* s, const char* key, const char* value);

/* lang is "dappl" or "pineappl". On success the result is available from
   meu_result_json and, with the dot option, meu_dot. */
MEU_API meu_status meu_solve(meu_session* s, const char* lang, const char* source);

/* family: bn | dr | ladder | gridworld | nested-mmap. params is a JSON object
   (n, k, dim, horizon, p, seed, strategy, network). The program text is
   returned through meu_result_json. */
MEU_API meu_status meu_generate(meu_session* s, const char* family, const char* params_json);

/* spec is a JSON object (family, lo, hi, k, horizon, p, seed, seeds, network,
   strategy, timeout_ms, threads, prune, fit_degree). The CSV text is returned through
   meu_result_json. */
MEU_API meu_status meu_bench(meu_session* s, const char* spec_json);

/* After meu_bench: {"rows", "failed", "fit": {"degree", "coef", "r2"}} where
   the fit is time_ms against the size parameter over rows with status ok. */
MEU_API const char* meu_bench_summary(const meu_session* s);

MEU_API const char* meu_result_json(const meu_session* s);
MEU_API const char* meu_dot(const meu_session* s);
/* {"error": {"kind": ..., "code": ..., "message": ..., "line": ..., "column": ...}} or "" */
MEU_API const char* meu_last_error(const meu_session* s);

#ifdef __cplusplus
}
#endif

#endif
