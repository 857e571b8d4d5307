#ifndef MEMPAL_MEMPAL_H
#define MEMPAL_MEMPAL_H

#include <stddef.h>

#if defined(_WIN32)
#define MEMPAL_API __declspec(dllexport)
#else
#define MEMPAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values are stable. */
typedef enum mempal_status {
  MEMPAL_OK = 0,
  MEMPAL_INVALID_ARGUMENT = 1,
  MEMPAL_EMPTY_TEXT = 2,
  MEMPAL_PROVIDER_UNAVAILABLE = 3,
  MEMPAL_MALFORMED_PROVIDER_OUTPUT = 4,
  MEMPAL_NO_TRANSCRIPT_ATTACHED = 5,
  MEMPAL_NO_LABELS = 6,
  MEMPAL_LABELS_OUT_OF_ORDER = 7,
  MEMPAL_EMPTY_SEGMENTS = 8,
  MEMPAL_DIM_MISMATCH = 9,
  MEMPAL_EMPTY_MAP = 10,
  MEMPAL_SINK_UNAVAILABLE = 11,
  MEMPAL_TOO_MANY_FRAMES = 12,
  MEMPAL_OUT_OF_ORDER_TIMESTAMP = 13,
  MEMPAL_ZERO_VECTOR = 14,
  MEMPAL_NO_PRIOR_TURN = 15,
  MEMPAL_ZERO_DENOMINATOR = 16,
  MEMPAL_NO_DATA = 17,
  MEMPAL_SCENARIO_INVALID = 18,
  MEMPAL_NOT_CALIBRATED = 19,
  MEMPAL_CALIBRATION_IN_PROGRESS = 20,
  MEMPAL_NO_SIGHTING = 21,
  MEMPAL_IMAGE_NOT_RETAINED = 22,
  MEMPAL_BAD_TIME_RANGE = 23,
  MEMPAL_IO = 24,
  MEMPAL_NOT_FOUND = 25,
  MEMPAL_UNAUTHORIZED = 26,
  MEMPAL_INTERNAL = 100
} mempal_status;

typedef struct mempal_engine mempal_engine;
typedef struct mempal_server mempal_server;

MEMPAL_API const char* mempal_version(void);
/* "NotCalibrated" etc.; "Ok" and "Internal" for the two extra codes. */
MEMPAL_API const char* mempal_status_name(mempal_status status);
/* HTTP status the service uses for this code (200 for MEMPAL_OK). */
MEMPAL_API int mempal_http_status(mempal_status status);
/* Message of the last failure on the calling thread ("" if none). */
MEMPAL_API const char* mempal_last_error(void);
/* Frees any string returned through a char** out parameter. */
MEMPAL_API void mempal_free(char* s);

/* Opens an engine. Configuration is layered: the JSON config file (NULL for
   defaults), then MEMPAL_* environment variables, then overrides_json (a JSON
   object merged over the result; NULL for none). */
MEMPAL_API mempal_status mempal_engine_open(const char* config_path, const char* overrides_json,
                                            mempal_engine** out);
/* Flushes and frees. NULL is ignored. */
MEMPAL_API void mempal_engine_close(mempal_engine* engine);
/* Effective configuration as JSON. */
MEMPAL_API mempal_status mempal_engine_config(mempal_engine* engine, char** out_json);

/* All calls below take and return JSON documents (UTF-8, NUL-terminated).
   On success *out_json receives a string to release with mempal_free. */

/* Walkthrough {frames, labels} or {room_map}. -> {calibration_id, rooms} */
MEMPAL_API mempal_status mempal_calibrate(mempal_engine* engine, const char* request_json, char** out_json);
/* -> {calibrated, calibration_id, rooms, adjacency} */
MEMPAL_API mempal_status mempal_calibration(mempal_engine* engine, char** out_json);
MEMPAL_API mempal_status mempal_rename_room(mempal_engine* engine, const char* old_label, const char* new_label,
                                            char** out_json);
/* One frame batch; relative frame paths resolve against frames_dir (may be NULL). */
MEMPAL_API mempal_status mempal_ingest(mempal_engine* engine, const char* batch_json, const char* frames_dir,
                                       char** out_json);
/* {session_id, transcript, t?} -> Answer */
MEMPAL_API mempal_status mempal_query(mempal_engine* engine, const char* request_json, char** out_json);
MEMPAL_API mempal_status mempal_session(mempal_engine* engine, const char* session_id, char** out_json);
/* since/until: RFC 3339 or epoch seconds, NULL for open. object/room: NULL for any. */
MEMPAL_API mempal_status mempal_activities(mempal_engine* engine, const char* since, const char* until,
                                           const char* object, const char* room, char** out_json);
MEMPAL_API mempal_status mempal_trajectory(mempal_engine* engine, char** out_json);
/* Diary as JSON Lines. */
MEMPAL_API mempal_status mempal_export(mempal_engine* engine, char** out_jsonl);
/* Appends every record of a diary export. */
MEMPAL_API mempal_status mempal_import(mempal_engine* engine, const char* jsonl, size_t* out_count);
MEMPAL_API mempal_status mempal_visual_aid(mempal_engine* engine, const char* object, char** out_json);
MEMPAL_API mempal_status mempal_latency_report(mempal_engine* engine, char** out_json);
/* Closes open trajectory runs. */
MEMPAL_API mempal_status mempal_flush(mempal_engine* engine);

/* HTTP service over an open engine. port 0 picks a free port. */
MEMPAL_API mempal_status mempal_server_start(mempal_engine* engine, const char* host, int port, mempal_server** out,
                                             int* out_port);
MEMPAL_API void mempal_server_stop(mempal_server* server);
/* Serves on the calling thread until the process ends. */
MEMPAL_API mempal_status mempal_serve(mempal_engine* engine, const char* host, int port);

/* Replays a scenario file with mock providers. out_dir may be NULL (nothing
   written). -> summary JSON; *out_report (may be NULL) gets the text report. */
MEMPAL_API mempal_status mempal_replay(const char* scenario_path, const char* out_dir, char** out_summary_json,
                                       char** out_report);
/* Accuracy table / simulated search. See the README for the request forms. */
MEMPAL_API mempal_status mempal_eval(const char* request_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
