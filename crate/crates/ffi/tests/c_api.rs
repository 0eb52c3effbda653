use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use navsim_ffi::*;

struct Handle(*mut NavsimSession);

impl Handle {
    fn new(scene_dir: Option<&str>, base_seed: Option<u64>) -> Handle {
        let dir = scene_dir.map(|d| CString::new(d).unwrap());
        let mut out = ptr::null_mut();
        let status = unsafe {
            navsim_session_new(
                dir.as_ref().map_or(ptr::null(), |d| d.as_ptr()),
                i32::from(base_seed.is_some()),
                base_seed.unwrap_or(0),
                &mut out,
            )
        };
        assert_eq!(status, NavsimStatus::Ok, "{}", last_error());
        Handle(out)
    }

    fn send(&self, msg: &str) -> (NavsimStatus, String) {
        let req = CString::new(msg).unwrap();
        let mut reply = ptr::null_mut();
        let status = unsafe { navsim_session_send(self.0, req.as_ptr(), &mut reply) };
        assert!(!reply.is_null());
        let text = unsafe { CStr::from_ptr(reply) }.to_str().unwrap().to_string();
        unsafe { navsim_string_free(reply) };
        (status, text)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { navsim_session_free(self.0) };
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(navsim_last_error()) }.to_string_lossy().into_owned()
}

fn fixtures() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").to_string_lossy().into_owned()
}

#[test]
fn version_matches_the_server() {
    let v = unsafe { CStr::from_ptr(navsim_protocol_version()) };
    assert_eq!(v.to_str().unwrap(), navsim::server::PROTOCOL_VERSION);
}

#[test]
fn session_round_trip() {
    let h = Handle::new(Some(&fixtures()), None);
    assert_eq!(h.send(r#"{"type":"hello","version":"1"}"#).0, NavsimStatus::Ok);
    let (s, r) = h.send(r#"{"type":"configure","config":{"scene":{"file":"one_room.house.json"}}}"#);
    assert_eq!(s, NavsimStatus::Ok, "{r}");
    let (s, r) = h.send(r#"{"type":"reset","seed":4}"#);
    assert_eq!(s, NavsimStatus::Ok);
    assert!(r.starts_with(r#"{"type":"observation""#));
    let (s, r) = h.send(r#"{"type":"step","action":"step_forward","repeat":3}"#);
    assert_eq!(s, NavsimStatus::Ok);
    assert!(r.contains(r#""step":3"#));
    assert_eq!(h.send(r#"{"type":"close"}"#).0, NavsimStatus::Ok);
}

#[test]
fn protocol_errors_map_to_status_codes() {
    let h = Handle::new(None, None);
    assert_eq!(h.send("{").0, NavsimStatus::BadMessage);
    assert_eq!(h.send(r#"{"type":"reset"}"#).0, NavsimStatus::BadState);
    assert!(last_error().contains("not allowed"));
    assert_eq!(h.send(r#"{"type":"hello","version":"9"}"#).0, NavsimStatus::VersionMismatch);
    h.send(r#"{"type":"hello","version":"1"}"#);
    let (s, r) = h.send(r#"{"type":"configure","config":{"scene":{"file":"x.json"}}}"#);
    assert_eq!(s, NavsimStatus::ConfigError);
    assert!(r.contains("config_error"));
    h.send(r#"{"type":"configure","config":{"scene":{"generate":{"seed":2}}}}"#);
    h.send(r#"{"type":"reset"}"#);
    assert_eq!(h.send(r#"{"type":"step","action":"jump"}"#).0, NavsimStatus::BadAction);
}

#[test]
fn base_seed_drives_unseeded_resets() {
    let script = [
        r#"{"type":"hello","version":"1"}"#,
        r#"{"type":"configure","config":{"scene":{"generate":{"seed":2,"rooms":2}}}}"#,
    ];
    let a = Handle::new(None, Some(31));
    let b = Handle::new(None, None);
    for m in script {
        a.send(m);
        b.send(m);
    }
    assert_eq!(a.send(r#"{"type":"reset"}"#).1, b.send(r#"{"type":"reset","seed":31}"#).1);
}

#[test]
fn null_and_invalid_arguments() {
    let mut reply = ptr::null_mut();
    let req = CString::new("{}").unwrap();
    let s = unsafe { navsim_session_send(ptr::null_mut(), req.as_ptr(), &mut reply) };
    assert_eq!(s, NavsimStatus::NullArgument);
    assert!(reply.is_null());
    assert!(last_error().contains("session"));
    assert_eq!(unsafe { navsim_session_new(ptr::null(), 0, 0, ptr::null_mut()) }, NavsimStatus::NullArgument);

    let h = Handle::new(None, None);
    let bad = [0xffu8, 0xfe, 0];
    let s = unsafe { navsim_session_send(h.0, bad.as_ptr().cast(), &mut reply) };
    assert_eq!(s, NavsimStatus::InvalidUtf8);
    let s = unsafe { navsim_session_send(h.0, ptr::null(), &mut reply) };
    assert_eq!(s, NavsimStatus::NullArgument);

    let missing = CString::new("/definitely/not/here").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { navsim_session_new(missing.as_ptr(), 0, 0, &mut out) }, NavsimStatus::ConfigError);
    assert!(out.is_null());
    unsafe {
        navsim_session_free(ptr::null_mut());
        navsim_string_free(ptr::null_mut());
    }
}

/// Directory holding the built shared library: the test binary lives in
/// `<target>/<profile>/deps`.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let lib = lib_dir();
    if !lib.join("libnavsim_ffi.so").exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or shared library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "navsim.h"

int main(void) {
    NavsimSession *s = NULL;
    if (navsim_session_new(NULL, 0, 0, &s) != NAVSIM_STATUS_OK) return 1;
    char *reply = NULL;
    if (navsim_session_send(s, "{\"type\":\"hello\",\"version\":\"1\"}", &reply) != NAVSIM_STATUS_OK) return 2;
    if (strstr(reply, "\"ready\"") == NULL) return 3;
    navsim_string_free(reply);
    if (navsim_session_send(s, "{\"type\":\"step\",\"action\":\"idle\"}", &reply) != NAVSIM_STATUS_BAD_STATE) return 4;
    navsim_string_free(reply);
    printf("%s\n", navsim_protocol_version());
    navsim_session_free(s);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let cc = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&lib)
        .arg("-lnavsim_ffi")
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).env("LD_LIBRARY_PATH", &lib).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "1");
}
