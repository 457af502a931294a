use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use diagapprox_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { da_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(da_last_error()) }.to_str().unwrap().to_owned()
}

struct Handles {
    places: *mut DaPlaces,
    psi: *mut DaPsi,
}

impl Handles {
    fn new(primes: &[u64]) -> Self {
        let mut places = ptr::null_mut();
        let mut psi = ptr::null_mut();
        let half = CString::new("1/2").unwrap();
        unsafe {
            assert_eq!(da_places_new(primes.as_ptr(), primes.len(), &mut places), DaStatus::Ok);
            assert_eq!(da_psi_scaled_cap(half.as_ptr(), &mut psi), DaStatus::Ok);
        }
        Self { places, psi }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            da_psi_free(self.psi);
            da_places_free(self.places);
        }
    }
}

#[test]
fn level_and_count() {
    let h = Handles::new(&[2, 3]);
    let g = CString::new("5/12").unwrap();
    let (mut level, mut big_l) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { da_level(h.places, g.as_ptr(), &mut level, &mut big_l) }, DaStatus::Ok);
    // |5/12| = 5/12, |5/12|_2 = 4, |5/12|_3 = 3; L = 5 / (5/12)
    assert_eq!(take(level), "4/1");
    assert_eq!(take(big_l), "12/1");
    let mut count = 0u64;
    assert_eq!(unsafe { da_z_n_count(h.places, 4, &mut count) }, DaStatus::Ok);
    // N = 4: 2^2 * 3^1 * 4 + 1
    assert_eq!(count, 49);
}

#[test]
fn measure_overlap_and_bracketing() {
    let h = Handles::new(&[2]);
    let g = CString::new("1").unwrap();
    let (mut e, mut lo, mut hi) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    let mut ok = true;
    let s = unsafe { da_measure(h.places, h.psi, g.as_ptr(), &mut e, &mut lo, &mut hi, &mut ok) };
    assert_eq!(s, DaStatus::Ok);
    assert_eq!((take(e), take(lo), take(hi)), ("1/4".into(), "1/4".into(), "1/2".into()));
    assert!(!ok);

    let (b, c) = (CString::new("4").unwrap(), CString::new("8").unwrap());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { da_overlap(h.places, h.psi, b.as_ptr(), c.as_ptr(), &mut out) }, DaStatus::Ok);
    assert_eq!(take(out), "1/256");
}

#[test]
fn dirichlet_and_montecarlo() {
    let h = Handles::new(&[2]);
    let x = CString::new("5/7,1/7").unwrap();
    let (mut b, mut g, mut d) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { da_dirichlet(h.places, x.as_ptr(), 8, &mut b, &mut g, &mut d) }, DaStatus::Ok);
    assert_eq!((take(b), take(g), take(d)), ("23/8".into(), "33/8".into(), "1/14".into()));

    let gammas = CString::new("3").unwrap();
    let (mut est, mut se) = (0.0, 0.0);
    let s = unsafe { da_montecarlo(h.places, h.psi, gammas.as_ptr(), 20_000, 0, 5, &mut est, &mut se) };
    assert_eq!(s, DaStatus::Ok);
    assert!((est - 1.0 / 36.0).abs() <= 4.0 * se, "{est} ± {se}");
}

#[test]
fn error_codes_and_messages() {
    let mut places = ptr::null_mut();
    assert_eq!(unsafe { da_places_new([6u64].as_ptr(), 1, &mut places) }, DaStatus::InvalidArgument);
    assert!(places.is_null());
    assert!(last_error().contains("not prime"));

    let h = Handles::new(&[2]);
    let bad = CString::new("1/0").unwrap();
    let (mut l, mut big) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { da_level(h.places, bad.as_ptr(), &mut l, &mut big) }, DaStatus::Parse);

    let outside = CString::new("1/3").unwrap();
    assert_eq!(unsafe { da_level(h.places, outside.as_ptr(), &mut l, &mut big) }, DaStatus::InvalidArgument);

    let diag = CString::new("1/3,1/3").unwrap();
    let (mut b, mut g, mut d) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { da_dirichlet(ptr::null(), diag.as_ptr(), 4, &mut b, &mut g, &mut d) }, DaStatus::NullPointer);

    let mut psi = ptr::null_mut();
    let c = CString::new("1").unwrap();
    assert_eq!(unsafe { da_psi_scaled_cap(c.as_ptr(), &mut psi) }, DaStatus::InvalidArgument);
    assert_eq!(unsafe { da_psi_power(c.as_ptr(), 0, &mut psi) }, DaStatus::InvalidArgument);
    unsafe { da_string_free(ptr::null_mut()) };
}

/// Compiles the C smoke test against the generated header and the static
/// library, then runs it.
#[test]
fn c_smoke_test() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/diagapprox.h");
    assert!(header.exists(), "header not generated");
    // target/<profile>/deps/ffi-<hash>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libdiagapprox_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("lambda(A_3) = 1/36"));
}
