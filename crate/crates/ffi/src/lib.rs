//! C ABI for the navsim simulator.
//!
//! A session handle speaks the same JSON messages as the WebSocket server:
//! pass one client message, get one server message back. Strings returned to
//! the caller are owned by the caller and released with `navsim_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::atomic::{AtomicU64, Ordering};

use navsim::server::{ErrorCode, ServerMessage, Session, SessionOptions};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavsimStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The reply is an error message with code `bad_message`.
    BadMessage = 3,
    /// The reply is an error message with code `bad_state`.
    BadState = 4,
    /// The reply is an error message with code `version_mismatch`.
    VersionMismatch = 5,
    /// The reply is an error message with code `bad_action`.
    BadAction = 6,
    /// The reply is an error message with code `config_error`, or session
    /// options were rejected.
    ConfigError = 7,
    /// The simulator panicked; the session must be freed.
    Internal = 8,
}

impl From<ErrorCode> for NavsimStatus {
    fn from(c: ErrorCode) -> Self {
        match c {
            ErrorCode::BadMessage => NavsimStatus::BadMessage,
            ErrorCode::BadState => NavsimStatus::BadState,
            ErrorCode::VersionMismatch => NavsimStatus::VersionMismatch,
            ErrorCode::BadAction => NavsimStatus::BadAction,
            ErrorCode::ConfigError => NavsimStatus::ConfigError,
        }
    }
}

/// Opaque simulator session.
pub struct NavsimSession {
    inner: Session,
    poisoned: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

const VERSION: &CStr = c"1";

static SESSIONS: AtomicU64 = AtomicU64::new(1);

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: NavsimStatus, msg: impl Into<String>) -> NavsimStatus {
    set_error(msg);
    status
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, NavsimStatus> {
    if p.is_null() {
        return Err(fail(NavsimStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NavsimStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// Protocol version implemented by this library. Static storage; do not free.
#[no_mangle]
pub extern "C" fn navsim_protocol_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next call on this thread; do not free.
#[no_mangle]
pub extern "C" fn navsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a session. `scene_dir` may be null, which disables file scenes.
/// `base_seed` is used for resets without a seed when `use_base_seed` is
/// non-zero.
///
/// # Safety
/// `scene_dir` must be null or a nul-terminated string; `out` must be a valid
/// pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn navsim_session_new(
    scene_dir: *const c_char,
    use_base_seed: i32,
    base_seed: u64,
    out: *mut *mut NavsimSession,
) -> NavsimStatus {
    if out.is_null() {
        return fail(NavsimStatus::NullArgument, "out is null");
    }
    *out = ptr::null_mut();
    let dir = if scene_dir.is_null() {
        None
    } else {
        match str_arg(scene_dir, "scene_dir") {
            Ok(s) => Some(PathBuf::from(s)),
            Err(status) => return status,
        }
    };
    if let Some(d) = &dir {
        if !d.is_dir() {
            return fail(NavsimStatus::ConfigError, format!("scene directory {} does not exist", d.display()));
        }
    }
    let opts = SessionOptions {
        scene_dir: dir,
        default_seed: (use_base_seed != 0).then_some(base_seed),
    };
    let id = SESSIONS.fetch_add(1, Ordering::Relaxed).to_string();
    *out = Box::into_raw(Box::new(NavsimSession {
        inner: Session::new(id, opts),
        poisoned: false,
    }));
    NavsimStatus::Ok
}

/// Release a session. Null is ignored.
///
/// # Safety
/// `session` must be null or a handle from `navsim_session_new` that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn navsim_session_free(session: *mut NavsimSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Handle one JSON client message. On return `*reply` holds the JSON server
/// message (also for protocol errors, whose code is mirrored in the status)
/// or null when the call failed before producing one.
///
/// # Safety
/// `session` must be a live handle, `request` a nul-terminated string and
/// `reply` a valid pointer. Free the reply with `navsim_string_free`.
#[no_mangle]
pub unsafe extern "C" fn navsim_session_send(
    session: *mut NavsimSession,
    request: *const c_char,
    reply: *mut *mut c_char,
) -> NavsimStatus {
    if reply.is_null() {
        return fail(NavsimStatus::NullArgument, "reply is null");
    }
    *reply = ptr::null_mut();
    if session.is_null() {
        return fail(NavsimStatus::NullArgument, "session is null");
    }
    let s = &mut *session;
    if s.poisoned {
        return fail(NavsimStatus::Internal, "session is unusable after an internal error");
    }
    let text = match str_arg(request, "request") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let out = match catch_unwind(AssertUnwindSafe(|| s.inner.handle_text(text))) {
        Ok(out) => out,
        Err(_) => {
            s.poisoned = true;
            return fail(NavsimStatus::Internal, "simulator panicked");
        }
    };
    // error replies are small; only those are worth parsing
    let status = if out.starts_with(r#"{"type":"error""#) {
        match serde_json::from_str::<ServerMessage>(&out) {
            Ok(ServerMessage::Error { code, message }) => fail(code.into(), message),
            _ => NavsimStatus::Ok,
        }
    } else {
        NavsimStatus::Ok
    };
    *reply = CString::new(out).expect("JSON has no nul bytes").into_raw();
    status
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned through a `reply` out-parameter
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn navsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
