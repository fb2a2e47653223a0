//! C ABI for the rcprod toolkit.
//!
//! Conventions:
//! - Handles are opaque pointers created by `*_new` and released by the
//!   matching `*_free`; they are never dereferenced by the caller.
//! - Functions return an [`RcprodStatus`] code; output values go through
//!   out-parameters. Passing a null required pointer yields
//!   `InvalidArgument`.
//! - Strings returned through `char **` out-parameters are NUL-terminated,
//!   UTF-8, owned by the library, and must be released with
//!   [`rcprod_string_free`].
//! - All entry points catch panics and convert them to `InternalError`;
//!   no unwinding crosses the FFI boundary.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rcprod::quadfield::{field_invariants, FieldSpec, IdealHNF};
use rcprod::rayclass::{build_ray_class_group_auto, RayClassGroup};
use rcprod::report::json_to_string;
use rcprod::verify::{
    run_brun_titchmarsh, run_cover_argument, run_degree_one_ideal, run_ideal_count,
    run_kernel_prime, run_three_primes,
};
use rcprod::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RcprodStatus {
    /// Success.
    Ok = 0,
    /// A theorem-backed assertion failed (report verdict "violated").
    Violated = 1,
    /// Malformed input: bad field/modulus/ideal spec or null pointer.
    InvalidArgument = 2,
    /// A cap was hit: factoring cap, undecided principality, or an
    /// unsaturated group.
    Undecided = 3,
    /// Internal invariant violation or panic; always a bug.
    InternalError = 4,
}

fn status_of(err: &Error) -> RcprodStatus {
    match err {
        Error::Validation(_) | Error::Usage(_) | Error::NonCoprime(_) => {
            RcprodStatus::InvalidArgument
        }
        Error::Undecided(_) | Error::FactoringCap { .. } | Error::Unsaturated { .. } => {
            RcprodStatus::Undecided
        }
        _ => RcprodStatus::InternalError,
    }
}

/// Opaque handle to a narrow ray class group H_q(K).
pub struct RcprodRayClass {
    inner: RayClassGroup,
}

fn parse_cstr<'a>(ptr: *const c_char) -> Result<&'a str, RcprodStatus> {
    if ptr.is_null() {
        return Err(RcprodStatus::InvalidArgument);
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| RcprodStatus::InvalidArgument)
}

fn write_out_string(out: *mut *mut c_char, s: String) -> RcprodStatus {
    if out.is_null() {
        return RcprodStatus::InvalidArgument;
    }
    match CString::new(s) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            RcprodStatus::Ok
        }
        Err(_) => RcprodStatus::InternalError,
    }
}

fn guard(f: impl FnOnce() -> RcprodStatus) -> RcprodStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(RcprodStatus::InternalError)
}

fn build_pair(d: i64, modulus: *const c_char) -> Result<(FieldSpec, IdealHNF), RcprodStatus> {
    let spec = FieldSpec::quadratic(d).map_err(|e| status_of(&e))?;
    let q_str = parse_cstr(modulus)?;
    let q = IdealHNF::parse(spec, q_str).map_err(|e| status_of(&e))?;
    Ok((spec, q))
}

/// Release a string previously returned through a `char **` out-parameter.
/// Passing null is a no-op.
#[no_mangle]
pub extern "C" fn rcprod_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe { drop(CString::from_raw(s)) };
    }
}

/// Build the narrow ray class group of Q(√d) modulo the ideal spec
/// (e.g. "(3)", "hnf:1,5,2", "above:5:0"). On success `*out` owns the
/// handle; release with [`rcprod_rayclass_free`].
#[no_mangle]
pub extern "C" fn rcprod_rayclass_new(
    d: i64,
    modulus: *const c_char,
    out: *mut *mut RcprodRayClass,
) -> RcprodStatus {
    guard(|| {
        if out.is_null() {
            return RcprodStatus::InvalidArgument;
        }
        let (spec, q) = match build_pair(d, modulus) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match build_ray_class_group_auto(spec, &q) {
            Ok(rcg) => {
                let handle = Box::new(RcprodRayClass { inner: rcg });
                unsafe { *out = Box::into_raw(handle) };
                RcprodStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a ray class group handle. Passing null is a no-op.
#[no_mangle]
pub extern "C" fn rcprod_rayclass_free(h: *mut RcprodRayClass) {
    if !h.is_null() {
        unsafe { drop(Box::from_raw(h)) };
    }
}

/// Group order |H_q(K)|; 0 when the handle is null. String-free.
#[no_mangle]
pub extern "C" fn rcprod_rayclass_order(h: *const RcprodRayClass) -> u64 {
    if h.is_null() {
        return 0;
    }
    unsafe { &*h }.inner.order
}

/// Copy the invariant factors d₁ | d₂ | … into `buf` (capacity `cap`)
/// and store the count in `*out_len`. Fails with `InvalidArgument` when
/// the buffer is too small. String-free.
#[no_mangle]
pub extern "C" fn rcprod_rayclass_invariant_factors(
    h: *const RcprodRayClass,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> RcprodStatus {
    guard(|| {
        if h.is_null() || out_len.is_null() {
            return RcprodStatus::InvalidArgument;
        }
        let factors = &unsafe { &*h }.inner.group.invariant_factors;
        unsafe { *out_len = factors.len() };
        if factors.is_empty() {
            return RcprodStatus::Ok;
        }
        if buf.is_null() || cap < factors.len() {
            return RcprodStatus::InvalidArgument;
        }
        for (i, &f) in factors.iter().enumerate() {
            unsafe { *buf.add(i) = f };
        }
        RcprodStatus::Ok
    })
}

/// The class of an ideal (spec string as for the modulus) as exponent
/// coordinates against the invariant factors, written into `buf`.
#[no_mangle]
pub extern "C" fn rcprod_rayclass_class_of(
    h: *const RcprodRayClass,
    ideal: *const c_char,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> RcprodStatus {
    guard(|| {
        if h.is_null() || out_len.is_null() {
            return RcprodStatus::InvalidArgument;
        }
        let rcg = &unsafe { &*h }.inner;
        let s = match parse_cstr(ideal) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let x = match IdealHNF::parse(rcg.field, s) {
            Ok(x) => x,
            Err(e) => return status_of(&e),
        };
        let class = match rcg.class_of(&x) {
            Ok(c) => c,
            Err(e) => return status_of(&e),
        };
        unsafe { *out_len = class.coords.len() };
        if class.coords.is_empty() {
            return RcprodStatus::Ok;
        }
        if buf.is_null() || cap < class.coords.len() {
            return RcprodStatus::InvalidArgument;
        }
        for (i, &c) in class.coords.iter().enumerate() {
            unsafe { *buf.add(i) = c };
        }
        RcprodStatus::Ok
    })
}

/// Classical invariants of Q(√d) as a JSON document in `*out_json`.
#[no_mangle]
pub extern "C" fn rcprod_field_info_json(d: i64, out_json: *mut *mut c_char) -> RcprodStatus {
    guard(|| {
        let spec = match FieldSpec::quadratic(d) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        let inv = match field_invariants(spec) {
            Ok(i) => i,
            Err(e) => return status_of(&e),
        };
        let v = serde_json::json!({
            "field": spec.to_string(),
            "discriminant": inv.disc,
            "degree": inv.n,
            "signature": [inv.r1, inv.r2],
            "class_number": inv.h,
            "narrow_class_number": inv.h_narrow,
            "regulator": inv.regulator,
            "roots_of_unity": inv.mu_order,
            "zeta_residue": inv.alpha,
        });
        write_out_string(out_json, json_to_string(&v))
    })
}

/// Run one verification experiment and return its JSON report.
/// `experiment` is one of "three-primes", "degree-one-ideal",
/// "kernel-prime", "brun-titchmarsh", "ideal-count", "cover"; `xmax` is
/// the search radius (ignored by kernel-prime). Returns `Violated` when
/// the report verdict is "violated" (the JSON is still written).
#[no_mangle]
pub extern "C" fn rcprod_verify_json(
    experiment: *const c_char,
    d: i64,
    modulus: *const c_char,
    xmax: i64,
    out_json: *mut *mut c_char,
) -> RcprodStatus {
    guard(|| {
        let name = match parse_cstr(experiment) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let (spec, q) = match build_pair(d, modulus) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let x = xmax as i128;
        let identity = IdealHNF::one(spec);
        let xlist = [x.min(100).max(1), x.max(1)];
        let result = match name {
            "three-primes" => run_three_primes(spec, &q, x),
            "degree-one-ideal" => run_degree_one_ideal(spec, &q, x),
            "kernel-prime" => run_kernel_prime(spec, &q),
            "brun-titchmarsh" => run_brun_titchmarsh(spec, &q, &identity, &xlist),
            "ideal-count" => run_ideal_count(spec, &q, &identity, &xlist),
            "cover" => run_cover_argument(spec, &q, x),
            _ => return RcprodStatus::InvalidArgument,
        };
        let mut report = match result {
            Ok(r) => r,
            Err(e) => return status_of(&e),
        };
        rcprod::report::normalize_runtime(&mut report);
        let violated = report.verdict == "violated";
        let v = match serde_json::to_value(&report) {
            Ok(v) => v,
            Err(_) => return RcprodStatus::InternalError,
        };
        let st = write_out_string(out_json, json_to_string(&v));
        if st != RcprodStatus::Ok {
            return st;
        }
        if violated {
            RcprodStatus::Violated
        } else {
            RcprodStatus::Ok
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    #[test]
    fn rayclass_handle_lifecycle_and_class_map() {
        let modulus = CString::new("(3)").unwrap();
        let mut h: *mut RcprodRayClass = ptr::null_mut();
        assert_eq!(
            rcprod_rayclass_new(-1, modulus.as_ptr(), &mut h),
            RcprodStatus::Ok
        );
        assert!(!h.is_null());
        assert_eq!(rcprod_rayclass_order(h), 2);

        let mut buf = [0u64; 4];
        let mut len = 0usize;
        assert_eq!(
            rcprod_rayclass_invariant_factors(h, buf.as_mut_ptr(), buf.len(), &mut len),
            RcprodStatus::Ok
        );
        assert_eq!(&buf[..len], &[2]);

        // (2+i) lies in the nontrivial class; (3+2i) in the identity.
        let p5 = CString::new("above:5:0").unwrap();
        assert_eq!(
            rcprod_rayclass_class_of(h, p5.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut len),
            RcprodStatus::Ok
        );
        assert_eq!(&buf[..len], &[1]);
        let p13 = CString::new("above:13:0").unwrap();
        assert_eq!(
            rcprod_rayclass_class_of(h, p13.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut len),
            RcprodStatus::Ok
        );
        assert_eq!(&buf[..len], &[0]);

        // Non-coprime ideal → InvalidArgument.
        let bad = CString::new("(3)").unwrap();
        assert_eq!(
            rcprod_rayclass_class_of(h, bad.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut len),
            RcprodStatus::InvalidArgument
        );

        rcprod_rayclass_free(h);
        rcprod_rayclass_free(ptr::null_mut());
    }

    #[test]
    fn null_and_malformed_inputs() {
        let mut h: *mut RcprodRayClass = ptr::null_mut();
        assert_eq!(
            rcprod_rayclass_new(-1, ptr::null(), &mut h),
            RcprodStatus::InvalidArgument
        );
        let bad = CString::new("nonsense").unwrap();
        assert_eq!(
            rcprod_rayclass_new(-1, bad.as_ptr(), &mut h),
            RcprodStatus::InvalidArgument
        );
        // d = 0 is not a valid quadratic field.
        let m = CString::new("(3)").unwrap();
        assert_eq!(
            rcprod_rayclass_new(0, m.as_ptr(), &mut h),
            RcprodStatus::InvalidArgument
        );
        assert_eq!(rcprod_rayclass_order(ptr::null()), 0);
    }

    #[test]
    fn json_entry_points() {
        let mut s: *mut c_char = ptr::null_mut();
        assert_eq!(rcprod_field_info_json(-1, &mut s), RcprodStatus::Ok);
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        rcprod_string_free(s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["class_number"], serde_json::json!(1));
        assert_eq!(v["narrow_class_number"], serde_json::json!(1));

        let exp = CString::new("cover").unwrap();
        let m = CString::new("(3)").unwrap();
        let mut s2: *mut c_char = ptr::null_mut();
        assert_eq!(
            rcprod_verify_json(exp.as_ptr(), -1, m.as_ptr(), 14, &mut s2),
            RcprodStatus::Ok
        );
        let text2 = unsafe { CStr::from_ptr(s2) }.to_str().unwrap().to_string();
        rcprod_string_free(s2);
        let v2: serde_json::Value = serde_json::from_str(&text2).unwrap();
        assert_eq!(v2["extrema"]["covered"], serde_json::json!(true));
        assert_eq!(v2["extrema"]["minimal_covering_x"], serde_json::json!(14));
        assert_eq!(v2["runtime_ms"], serde_json::json!(0));

        let unknown = CString::new("bogus").unwrap();
        assert_eq!(
            rcprod_verify_json(unknown.as_ptr(), -1, m.as_ptr(), 14, &mut s2),
            RcprodStatus::InvalidArgument
        );
    }

    #[test]
    fn header_was_generated() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("include")
            .join("rcprod.h");
        let text = std::fs::read_to_string(header).expect("cbindgen header present");
        assert!(text.contains("RCPROD_H"));
        assert!(text.contains("rcprod_rayclass_new"));
        assert!(text.contains("rcprod_string_free"));
        assert!(text.contains("RcprodStatus"));
    }
}
