//! C ABI for the swipt-relay simulator.
//!
//! Conventions:
//!
//! * configuration lives behind an opaque [`SwiptRelayConfig`] handle;
//! * every fallible call returns a [`SwiptRelayStatus`] and writes its
//!   result through an out-pointer;
//! * returned strings are heap-allocated, NUL-terminated UTF-8 and must be
//!   released with [`swipt_relay_string_free`];
//! * the most recent error message of the calling thread is available via
//!   [`swipt_relay_last_error_message`].
//!
//! The generated header lives at `include/swipt_relay.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::ptr;

use swipt_relay::config::Config;
use swipt_relay::experiment;
use swipt_relay::scenario::{self, Scenario};
use swipt_relay::uav_power::{self, FormulaVariant};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let cstring = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

/// Result codes of every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwiptRelayStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Arguments were syntactically valid but rejected (unknown key, bad
    /// value, unknown scenario or figure number).
    InvalidArgument = 3,
    /// The simulation or optimization itself failed.
    RuntimeError = 4,
}

/// Opaque configuration handle (create, tweak, run, free).
pub struct SwiptRelayConfig {
    inner: Config,
}

unsafe fn str_arg<'a>(pointer: *const c_char) -> Result<&'a str, SwiptRelayStatus> {
    if pointer.is_null() {
        set_last_error("NULL string argument".into());
        return Err(SwiptRelayStatus::NullArgument);
    }
    CStr::from_ptr(pointer).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8".into());
        SwiptRelayStatus::InvalidUtf8
    })
}

fn string_out(out: *mut *mut c_char, value: String) -> SwiptRelayStatus {
    match CString::new(value) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            SwiptRelayStatus::Ok
        }
        Err(_) => {
            set_last_error("output contained an interior NUL byte".into());
            SwiptRelayStatus::RuntimeError
        }
    }
}

fn json_out<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> SwiptRelayStatus {
    match serde_json::to_string_pretty(value) {
        Ok(json) => string_out(out, json),
        Err(e) => {
            set_last_error(format!("serialization failed: {e}"));
            SwiptRelayStatus::RuntimeError
        }
    }
}

/// Version of the underlying simulator crate as a static string.
#[no_mangle]
pub extern "C" fn swipt_relay_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copy of the calling thread's most recent error message, or NULL when no
/// error has occurred. Free with [`swipt_relay_string_free`].
#[no_mangle]
pub extern "C" fn swipt_relay_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by one of the
/// string-producing functions here, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Fresh configuration handle holding the shipped defaults. Never NULL.
#[no_mangle]
pub extern "C" fn swipt_relay_config_new() -> *mut SwiptRelayConfig {
    Box::into_raw(Box::new(SwiptRelayConfig {
        inner: Config::default(),
    }))
}

/// Load defaults merged with the flat `key = value` file at `path`.
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` must be a valid
/// pointer; on success `*out` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_config_load(
    path: *const c_char,
    out: *mut *mut SwiptRelayConfig,
) -> SwiptRelayStatus {
    if out.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    let path = match str_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match Config::load(Path::new(path)) {
        Ok(config) => {
            *out = Box::into_raw(Box::new(SwiptRelayConfig { inner: config }));
            SwiptRelayStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::RuntimeError
        }
    }
}

/// Release a configuration handle.
///
/// # Safety
/// `config` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_config_free(config: *mut SwiptRelayConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Set one configuration key (dotted schema name) from its textual value.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` must be NUL-terminated
/// strings.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_config_set(
    config: *mut SwiptRelayConfig,
    key: *const c_char,
    value: *const c_char,
) -> SwiptRelayStatus {
    let Some(config) = config.as_mut() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    let key = match str_arg(key) {
        Ok(k) => k,
        Err(status) => return status,
    };
    let value = match str_arg(value) {
        Ok(v) => v,
        Err(status) => return status,
    };
    match config.inner.set(key, value) {
        Ok(()) => SwiptRelayStatus::Ok,
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::InvalidArgument
        }
    }
}

/// Read one configuration key as a newly allocated string.
///
/// # Safety
/// `config` must be a live handle, `key` a NUL-terminated string, `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_config_get(
    config: *const SwiptRelayConfig,
    key: *const c_char,
    out: *mut *mut c_char,
) -> SwiptRelayStatus {
    let Some(config) = config.as_ref() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    if out.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    let key = match str_arg(key) {
        Ok(k) => k,
        Err(status) => return status,
    };
    match config.inner.get(key) {
        Ok(value) => string_out(out, value),
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::InvalidArgument
        }
    }
}

fn scenario_from(code: u8) -> Result<Scenario, SwiptRelayStatus> {
    match code {
        b'A' | b'a' => Ok(Scenario::A),
        b'B' | b'b' => Ok(Scenario::B),
        other => {
            set_last_error(format!(
                "unknown scenario code {other}; expected 'A' or 'B'"
            ));
            Err(SwiptRelayStatus::InvalidArgument)
        }
    }
}

/// Run one relay cycle and return the full report as a JSON string.
///
/// `scenario` is the ASCII code of 'A' or 'B'.
///
/// # Safety
/// `config` must be a live handle and `out_json` a valid pointer; on
/// success `*out_json` owns the string.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_run_cycle_json(
    config: *const SwiptRelayConfig,
    scenario: u8,
    out_json: *mut *mut c_char,
) -> SwiptRelayStatus {
    let Some(config) = config.as_ref() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    if out_json.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    let scenario = match scenario_from(scenario) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let cfg = &config.inner;
    match scenario::run_cycle(&cfg.mission, &cfg.channel, &cfg.aero, &cfg.swipt, scenario) {
        Ok(report) => json_out(out_json, &report),
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::RuntimeError
        }
    }
}

/// Largest user count a feasible cycle can serve under the configured
/// scenario parameters.
///
/// # Safety
/// `config` must be a live handle and `out_count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_max_users(
    config: *const SwiptRelayConfig,
    scenario: u8,
    out_count: *mut u64,
) -> SwiptRelayStatus {
    let Some(config) = config.as_ref() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    if out_count.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    let scenario = match scenario_from(scenario) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let cfg = &config.inner;
    match scenario::max_users_served(&cfg.mission, &cfg.channel, &cfg.aero, &cfg.swipt, scenario) {
        Ok(count) => {
            *out_count = count as u64;
            SwiptRelayStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::RuntimeError
        }
    }
}

/// Build the harvesting program, run the three solvers and the first-order
/// audit, and return everything as a JSON string.
///
/// # Safety
/// `config` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_optimize_json(
    config: *const SwiptRelayConfig,
    threshold_from_cycle: bool,
    grid_resolution: u32,
    out_json: *mut *mut c_char,
) -> SwiptRelayStatus {
    let Some(config) = config.as_ref() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    if out_json.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    if grid_resolution < 2 {
        set_last_error("grid resolution must be at least 2".into());
        return SwiptRelayStatus::InvalidArgument;
    }
    match experiment::optimize_mission(
        &config.inner,
        threshold_from_cycle,
        grid_resolution as usize,
    ) {
        Ok(report) => json_out(out_json, &report),
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::RuntimeError
        }
    }
}

/// Reproduce one of the trend experiments (figures 2 through 8) and return
/// its table as CSV text.
///
/// # Safety
/// `config` must be a live handle and `out_csv` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_figure_csv(
    config: *const SwiptRelayConfig,
    figure: u32,
    out_csv: *mut *mut c_char,
) -> SwiptRelayStatus {
    let Some(config) = config.as_ref() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    if out_csv.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    if !(2..=8).contains(&figure) {
        set_last_error(format!(
            "no experiment is defined for figure {figure}; valid figures are 2..=8"
        ));
        return SwiptRelayStatus::InvalidArgument;
    }
    match experiment::reproduce_figure(&config.inner, figure as u8) {
        Ok(table) => string_out(out_csv, table.to_csv()),
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::RuntimeError
        }
    }
}

/// Propulsion power of the configured airframe at forward speed `speed`,
/// standard model variant. Hover power is `speed = 0`.
///
/// # Safety
/// `config` must be a live handle and `out_watts` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swipt_relay_propulsion_power(
    config: *const SwiptRelayConfig,
    speed: f64,
    out_watts: *mut f64,
) -> SwiptRelayStatus {
    let Some(config) = config.as_ref() else {
        set_last_error("NULL config handle".into());
        return SwiptRelayStatus::NullArgument;
    };
    if out_watts.is_null() {
        set_last_error("NULL out pointer".into());
        return SwiptRelayStatus::NullArgument;
    }
    if !speed.is_finite() || speed < 0.0 {
        set_last_error(format!("speed {speed} must be finite and nonnegative"));
        return SwiptRelayStatus::InvalidArgument;
    }
    match uav_power::propulsion_power(speed, &config.inner.aero, FormulaVariant::Standard) {
        Ok(power) => {
            *out_watts = power;
            SwiptRelayStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            SwiptRelayStatus::RuntimeError
        }
    }
}
