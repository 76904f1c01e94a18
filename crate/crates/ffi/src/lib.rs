//! C ABI over `planar_dipoles`.
//!
//! Every fallible function returns a [`PdStatus`]. On failure the message is
//! available from [`pd_last_error_message`] on the same thread. Solved systems
//! are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use planar_dipoles::entanglement::{self, DensityMatrix4, Temperature};
use planar_dipoles::linalg::C64;
use planar_dipoles::nalgebra::Matrix4;
use planar_dipoles::pair::{self, PairEigensystem, PairParams};
use planar_dipoles::rotor::{self, RotorEigensystem, RotorParams};
use planar_dipoles::units::{self, PhysicalParams};
use planar_dipoles::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    GuardRejected = 3,
    NotFound = 4,
    Eigensolver = 5,
    NonPhysical = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PdComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for PdComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<PdComplex> for C64 {
    fn from(z: PdComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Matrix elements of cos θ and sin θ between the two lowest rotor states:
/// `c0 = <0|cos|0>`, `c1 = <1|cos|1>`, `cx = <0|cos|1>`, `cxc = <1|cos|0>`,
/// and likewise for sin.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PdDipoleFactors {
    pub c0: PdComplex,
    pub c1: PdComplex,
    pub cx: PdComplex,
    pub cxc: PdComplex,
    pub s0: PdComplex,
    pub s1: PdComplex,
    pub sx: PdComplex,
    pub sxc: PdComplex,
}

/// Solved single rotor.
pub struct PdRotor(RotorEigensystem);

/// Solved molecule pair.
pub struct PdPair(PairEigensystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> PdStatus {
    match err {
        Error::InvalidParameter(_) | Error::LevelIndex { .. } | Error::AngleCaseMismatch { .. } => {
            PdStatus::InvalidArgument
        }
        Error::GuardRejected { .. } => PdStatus::GuardRejected,
        Error::FeatureNotFound(_) => PdStatus::NotFound,
        Error::Eigensolver { .. } => PdStatus::Eigensolver,
        Error::NotNormalized(_) | Error::NonPhysical(_) => PdStatus::NonPhysical,
        _ => PdStatus::Internal,
    }
}

struct Failure(PdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PdStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status.
fn guarded<F: FnOnce() -> Result<(), Failure>>(f: F) -> PdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PdStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

/// Solve the rotor at field coupling `omega_over_b` and tilt `theta_t_deg`
/// in a basis of `2 m_max + 1` states.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_solve(
    omega_over_b: f64,
    theta_t_deg: f64,
    m_max: usize,
    out: *mut *mut PdRotor,
) -> PdStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = RotorParams::from_degrees(omega_over_b, theta_t_deg, m_max)?;
        let eig = rotor::solve_rotor(&params)?;
        out.write(Box::into_raw(Box::new(PdRotor(eig))));
        Ok(())
    })
}

/// # Safety
/// `rotor` must come from [`pd_rotor_solve`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_free(rotor: *mut PdRotor) {
    if !rotor.is_null() {
        drop(Box::from_raw(rotor));
    }
}

/// Number of rotor levels, `2 m_max + 1`.
///
/// # Safety
/// `rotor` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_level_count(rotor: *const PdRotor, out: *mut usize) -> PdStatus {
    guarded(|| write(out, deref(rotor, "rotor")?.0.levels(), "out"))
}

/// Copy the ascending energies `ε_l/B` into `out[0..len]`. `written`
/// receives the number of levels even when `len` is too small.
///
/// # Safety
/// `out` must be valid for `len` doubles; `written` may be null.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_energies(
    rotor: *const PdRotor,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> PdStatus {
    guarded(|| {
        let eig = &deref(rotor, "rotor")?.0;
        let n = eig.levels();
        if !written.is_null() {
            written.write(n);
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if len < n {
            return Err(Failure(PdStatus::BufferTooSmall, format!("need {n} doubles, got {len}")));
        }
        ptr::copy_nonoverlapping(eig.energies.as_ptr(), out, n);
        Ok(())
    })
}

/// `ε_j - ε_i` in units of B, for `i < j`.
///
/// # Safety
/// `rotor` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_level_gap(rotor: *const PdRotor, i: usize, j: usize, out: *mut f64) -> PdStatus {
    guarded(|| write(out, deref(rotor, "rotor")?.0.level_gap(i, j)?, "out"))
}

/// `PD_STATUS_OK` if the two lowest levels are separated from the third by
/// at least `tolerance · max(1, |ε_1|)`, otherwise `PD_STATUS_GUARD_REJECTED`.
///
/// # Safety
/// `rotor` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_guard(rotor: *const PdRotor, tolerance: f64) -> PdStatus {
    guarded(|| {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Failure(PdStatus::InvalidArgument, "tolerance must be finite and >= 0".into()));
        }
        rotor::two_level_guard(&deref(rotor, "rotor")?.0, tolerance).into_result()?;
        Ok(())
    })
}

/// Dipole factors of the two lowest states; fails with
/// `PD_STATUS_GUARD_REJECTED` when the truncation is invalid.
///
/// # Safety
/// `rotor` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn pd_rotor_factors(rotor: *const PdRotor, out: *mut PdDipoleFactors) -> PdStatus {
    guarded(|| {
        let f = rotor::dipole_factors(&deref(rotor, "rotor")?.0)?;
        let factors = PdDipoleFactors {
            c0: f.c0.into(),
            c1: f.c1.into(),
            cx: f.cx.into(),
            cxc: f.cxc.into(),
            s0: f.s0.into(),
            s1: f.s1.into(),
            sx: f.sx.into(),
            sxc: f.sxc.into(),
        };
        write(out, factors, "out")
    })
}

/// Solve the coupled pair.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_pair_solve(
    omega_over_b: f64,
    theta_t_deg: f64,
    coupling_over_b: f64,
    m_max: usize,
    out: *mut *mut PdPair,
) -> PdStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rotor = RotorParams::from_degrees(omega_over_b, theta_t_deg, m_max)?;
        let eig = pair::solve_pair(&PairParams::new(rotor, coupling_over_b)?)?;
        out.write(Box::into_raw(Box::new(PdPair(eig))));
        Ok(())
    })
}

/// # Safety
/// `pair` must come from [`pd_pair_solve`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pd_pair_free(pair: *mut PdPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// The four energies `E_n/B`, ascending.
///
/// # Safety
/// `out` must be valid for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn pd_pair_energies(pair: *const PdPair, out: *mut f64) -> PdStatus {
    guarded(|| {
        let e = deref(pair, "pair")?.0.energies;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(e.as_ptr(), out, 4);
        Ok(())
    })
}

/// Coefficients `(d1, d2, d3, d4)` on |00>, |01>, |10>, |11> of the
/// `level`-th lowest state (0-based).
///
/// # Safety
/// `out` must be valid for 4 `PdComplex`.
#[no_mangle]
pub unsafe extern "C" fn pd_pair_state(pair: *const PdPair, level: usize, out: *mut PdComplex) -> PdStatus {
    guarded(|| {
        let p = &deref(pair, "pair")?.0;
        if level >= 4 {
            return Err(Failure(PdStatus::InvalidArgument, format!("level {level} is not in 0..4")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        for (k, z) in p.states[level].iter().enumerate() {
            out.add(k).write((*z).into());
        }
        Ok(())
    })
}

/// Whether two adjacent pair levels coincide (their states are then not unique).
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn pd_pair_is_degenerate(pair: *const PdPair, out: *mut bool) -> PdStatus {
    guarded(|| write(out, deref(pair, "pair")?.0.degenerate, "out"))
}

/// Concurrence of the Boltzmann mixture at `kt_over_b >= 0`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn pd_pair_thermal_concurrence(pair: *const PdPair, kt_over_b: f64, out: *mut f64) -> PdStatus {
    guarded(|| {
        let p = &deref(pair, "pair")?.0;
        let c = entanglement::thermal_concurrence(p, Temperature::new(kt_over_b)?)?;
        write(out, c, "out")
    })
}

/// `2 |d2 d3 - d1 d4|` for a normalized state.
///
/// # Safety
/// `state` must be valid for 4 `PdComplex`.
#[no_mangle]
pub unsafe extern "C" fn pd_pure_concurrence(state: *const PdComplex, out: *mut f64) -> PdStatus {
    guarded(|| {
        if state.is_null() {
            return Err(null("state"));
        }
        let d: [C64; 4] = std::array::from_fn(|k| (*state.add(k)).into());
        write(out, entanglement::pure_concurrence(&d)?, "out")
    })
}

/// Wootters concurrence of a two-qubit density matrix given row-major.
///
/// # Safety
/// `rho` must be valid for 16 `PdComplex`.
#[no_mangle]
pub unsafe extern "C" fn pd_wootters_concurrence(rho: *const PdComplex, out: *mut f64) -> PdStatus {
    guarded(|| {
        if rho.is_null() {
            return Err(null("rho"));
        }
        let m = Matrix4::from_fn(|r, c| (*rho.add(4 * r + c)).into());
        let rho = DensityMatrix4::new(m)?;
        write(out, entanglement::wootters_concurrence(&rho)?, "out")
    })
}

/// Laboratory units (Debye, kV/cm, nm, cm⁻¹) to `ω/B` and `Ω/B`.
///
/// # Safety
/// Both outputs must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn pd_convert_units(
    dipole_moment_debye: f64,
    field_kv_per_cm: f64,
    separation_nm: f64,
    rotational_constant_per_cm: f64,
    omega_over_b: *mut f64,
    coupling_over_b: *mut f64,
) -> PdStatus {
    guarded(|| {
        if omega_over_b.is_null() || coupling_over_b.is_null() {
            return Err(null("output"));
        }
        let r = units::convert_units(&PhysicalParams {
            dipole_moment: dipole_moment_debye,
            field_strength: field_kv_per_cm,
            separation: separation_nm,
            rotational_constant: rotational_constant_per_cm,
        })?;
        omega_over_b.write(r.omega_over_b);
        coupling_over_b.write(r.coupling_over_b);
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
