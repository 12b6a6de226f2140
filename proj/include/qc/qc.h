#ifndef QC_QC_H
#define QC_QC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes shared by every operation. */
typedef enum {
  QC_OK = 0,
  QC_ERR_PARSE = 1,
  QC_ERR_TYPE = 2,
  QC_ERR_PROJECTION = 3,
  QC_ERR_STUCK = 4,
  QC_ERR_FUEL = 5,
  QC_ERR_CONFORMANCE = 6,
  QC_ERR_BADARG = 7
} qc_status;

/* A parsed and validated source file. */
typedef struct qc_program qc_program;

/* Every char** output parameter receives a heap string owned by the caller;
 * release it with qc_string_free. Output parameters may be NULL to skip. */
void qc_string_free(char* s);

/* Parse a .chor source text. On failure *diagnostics (if given) holds
 * newline-separated messages with line:column spans. */
qc_status qc_parse(const char* text, qc_program** out, char** diagnostics);
void qc_program_free(qc_program* p);

/* Type-check the linked main choreography. *out receives the printed type on
 * success or the failing rule and premise on error. */
qc_status qc_check(qc_program* p, char** out);

/* Execute the choreographic semantics. strategy: 0 leftmost, 1 random.
 * *result receives the printed final configuration; *trace_jsonl one JSON
 * object per line per step. */
qc_status qc_run(qc_program* p, int fuel, int strategy, uint32_t seed,
                 char** result, char** trace_jsonl);

/* Project to one location (loc non-NULL) or to every declared location
 * (loc NULL). *out receives "L |> program" lines, or the failure path. */
qc_status qc_project(qc_program* p, const char* loc, char** out);

/* Drive the projected system. scheduler: 0 leftmost, 1 seeded. */
qc_status qc_simulate(qc_program* p, int fuel, int scheduler, uint32_t seed,
                      char** final_state, char** trace_jsonl);

/* Exhaustive bounded exploration; *graph_json receives states, labeled edges,
 * and terminal tags. */
qc_status qc_explore(qc_program* p, int depth, char** graph_json);

/* Run a generator-driven metatheory suite: preservation, progress,
 * completeness, soundness, confluence, or deadlock-freedom. */
qc_status qc_conformance(const char* suite, uint64_t seed, int cases,
                         char** report_json, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* QC_QC_H */
