#ifndef NAVSIM_H
#define NAVSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum NavsimStatus {
  NAVSIM_STATUS_OK = 0,
  // A required pointer argument was null.
  NAVSIM_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  NAVSIM_STATUS_INVALID_UTF8 = 2,
  // The reply is an error message with code `bad_message`.
  NAVSIM_STATUS_BAD_MESSAGE = 3,
  // The reply is an error message with code `bad_state`.
  NAVSIM_STATUS_BAD_STATE = 4,
  // The reply is an error message with code `version_mismatch`.
  NAVSIM_STATUS_VERSION_MISMATCH = 5,
  // The reply is an error message with code `bad_action`.
  NAVSIM_STATUS_BAD_ACTION = 6,
  // The reply is an error message with code `config_error`, or session
  // options were rejected.
  NAVSIM_STATUS_CONFIG_ERROR = 7,
  // The simulator panicked; the session must be freed.
  NAVSIM_STATUS_INTERNAL = 8,
} NavsimStatus;

// Opaque simulator session.
typedef struct NavsimSession NavsimSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Protocol version implemented by this library. Static storage; do not free.
const char *navsim_protocol_version(void);

// Message of the last failed call on this thread, or an empty string.
// Valid until the next call on this thread; do not free.
const char *navsim_last_error(void);

// Create a session. `scene_dir` may be null, which disables file scenes.
// `base_seed` is used for resets without a seed when `use_base_seed` is
// non-zero.
//
// # Safety
// `scene_dir` must be null or a nul-terminated string; `out` must be a valid
// pointer to write the handle to.
enum NavsimStatus navsim_session_new(const char *scene_dir,
                                     int32_t use_base_seed,
                                     uint64_t base_seed,
                                     struct NavsimSession **out);

// Release a session. Null is ignored.
//
// # Safety
// `session` must be null or a handle from `navsim_session_new` that has not
// been freed.
void navsim_session_free(struct NavsimSession *session);

// Handle one JSON client message. On return `*reply` holds the JSON server
// message (also for protocol errors, whose code is mirrored in the status)
// or null when the call failed before producing one.
//
// # Safety
// `session` must be a live handle, `request` a nul-terminated string and
// `reply` a valid pointer. Free the reply with `navsim_string_free`.
enum NavsimStatus navsim_session_send(struct NavsimSession *session,
                                      const char *request,
                                      char **reply);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string returned through a `reply` out-parameter
// that has not been freed.
void navsim_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NAVSIM_H */
