/* C interface to the fixed-route attack routing simulator.
 *
 * All functions return FRASIM_OK or an error code; frasim_last_error() holds
 * a message for the last failing call on the current thread. Handles are
 * opaque and freed with their matching _free function. Strings returned via
 * char** out-parameters are heap-allocated; release them with
 * frasim_string_free. Profiles and attack sets keep a pointer to the graph
 * they were created from: free the graph last.
 */
#ifndef FRASIM_H
#define FRASIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct frasim_graph frasim_graph;
typedef struct frasim_profile frasim_profile;
typedef struct frasim_attacks frasim_attacks;
typedef struct frasim_sim_result frasim_sim_result;
typedef struct frasim_oracle_result frasim_oracle_result;
typedef struct frasim_sweep_result frasim_sweep_result;
typedef struct frasim_gadget_result frasim_gadget_result;

enum {
  FRASIM_OK = 0,
  FRASIM_ERR_IO = 1,
  FRASIM_ERR_PARSE = 2,
  FRASIM_ERR_INVALID = 3,
  FRASIM_ERR_ARG = 4,
  FRASIM_ERR_INTERNAL = 5
};

enum { FRASIM_MODE_SHORTEST = 0, FRASIM_MODE_COMMERCIAL = 1 };

const char* frasim_last_error(void);
void frasim_string_free(char* s);

/* ---- topology ---- */
int frasim_graph_load(const char* path, frasim_graph** out);
int frasim_graph_parse(const char* text, frasim_graph** out);
void frasim_graph_free(frasim_graph* g);
/* ok is set to 1 when the report is empty; report_text lists violations. */
int frasim_graph_validate(const frasim_graph* g, int mode, int* ok, char** report_text);
int frasim_graph_hierarchy_depth(const frasim_graph* g, int* depth);
int frasim_graph_node_count(const frasim_graph* g, size_t* count);
/* 1 when any edge carries a business label (p2c or peer). */
int frasim_graph_labeled(const frasim_graph* g, int* has_labels);
int frasim_graph_render(const frasim_graph* g, char** text);

/* ---- policies ---- */
int frasim_profile_shortest(const frasim_graph* g, uint64_t tie_seed, uint32_t export_pct,
                            frasim_profile** out);
/* prefer_shorter: intra-class order; peer_over_provider: tier of peers vs providers. */
int frasim_profile_commercial(const frasim_graph* g, uint64_t tie_seed, int prefer_shorter,
                              int peer_over_provider, frasim_profile** out);
int frasim_profile_apply_overrides(frasim_profile* p, const char* path);
void frasim_profile_free(frasim_profile* p);

/* ---- attacks ---- */
int frasim_attacks_load(const frasim_graph* g, const char* path, frasim_attacks** out);
/* every declared attacker present but silent */
int frasim_attacks_empty(const frasim_graph* g, frasim_attacks** out);
/* every declared attacker runs a prefix hijack */
int frasim_attacks_hijack_all(const frasim_graph* g, frasim_attacks** out);
void frasim_attacks_free(frasim_attacks* a);

/* ---- simulation ---- */
typedef struct {
  uint64_t schedule_seed; /* fair random schedule seed */
  uint64_t events_max;    /* 0 = default */
  int rounds_max;         /* 0 = unlimited */
  int synchronous;        /* deterministic full-delivery schedule with cycle detection */
  const char* schedule_file; /* explicit event list; overrides the generators */
  int init_flavor;        /* 0 = canonical all-empty start */
  uint64_t init_seed;
  int record_event_log;
} frasim_run_options;

int frasim_simulate(const frasim_graph* g, const frasim_profile* p, const frasim_attacks* a,
                    const frasim_run_options* options, frasim_sim_result** out);
void frasim_sim_result_free(frasim_sim_result* r);
int frasim_sim_quiescent(const frasim_sim_result* r);
int frasim_sim_oscillation_found(const frasim_sim_result* r);
int frasim_sim_rounds_completed(const frasim_sim_result* r);
int frasim_sim_stabilization_round(const frasim_sim_result* r);
uint64_t frasim_sim_events(const frasim_sim_result* r);
uint64_t frasim_sim_trace_hash(const frasim_sim_result* r);
int frasim_sim_final_route(const frasim_sim_result* r, int node, char** route_text);
int frasim_sim_render(const frasim_sim_result* r, int ndjson, char** text);

/* ---- fixed-point oracles (FSR for shortest-path profiles, FR for commercial) ---- */
int frasim_oracle_run(const frasim_graph* g, const frasim_profile* p, const frasim_attacks* a,
                      uint64_t selection_seed, frasim_oracle_result** out);
void frasim_oracle_result_free(frasim_oracle_result* r);
int frasim_oracle_route(const frasim_oracle_result* r, int node, char** route_text);
int frasim_oracle_render(const frasim_oracle_result* r, int ndjson, char** text);

/* ---- round-bound sweeps and the canonical gadget scenario ---- */
typedef struct {
  uint64_t base_seed;
  int seeds;   /* schedule/instance seeds per cell */
  int configs; /* initial configurations per seed */
  int jobs;    /* 0 = hardware concurrency */
} frasim_sweep_options;

/* mode: FRASIM_MODE_SHORTEST sweeps random shortest-path instances against
 * their n-round bound; FRASIM_MODE_COMMERCIAL sweeps layered hierarchies
 * against the (2x+1)-round bound. Every run is also compared against the
 * matching fixed-point oracle. */
int frasim_sweep_run(int mode, const frasim_sweep_options* options, frasim_sweep_result** out);
void frasim_sweep_result_free(frasim_sweep_result* r);
int frasim_sweep_ok(const frasim_sweep_result* r);
int frasim_sweep_failures(const frasim_sweep_result* r);
size_t frasim_sweep_cells(const frasim_sweep_result* r);
int frasim_sweep_render(const frasim_sweep_result* r, int ndjson, char** text);

int frasim_gadget_run(int seeds, frasim_gadget_result** out);
void frasim_gadget_result_free(frasim_gadget_result* r);
int frasim_gadget_ok(const frasim_gadget_result* r);
int frasim_gadget_render(const frasim_gadget_result* r, char** text);

#ifdef __cplusplus
}
#endif

#endif /* FRASIM_H */
