//! Plain-text state dumps for inspection and restart.
//!
//! ```text
//! ambec-state 1
//! cutoff_a <N_A>
//! cutoff_b <N_B>
//! omega <value>
//! delta <value>
//! alpha <re> <im>
//! beta <re> <im>
//! time <value>
//! amplitudes <count>
//! <re> <im>
//! ...
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::space::FockSpace;
use crate::fock::state::StateVector;
use crate::model::SystemParams;
use crate::scalar::Real;

const MAGIC: &str = "ambec-state";
const VERSION: u32 = 1;

/// A state together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub params: SystemParams<T>,
    pub state: StateVector<T>,
}

impl<T: Real> Snapshot<T> {
    pub fn dump(&self) -> String {
        let space = self.state.space();
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(out, "{MAGIC} {VERSION}");
        let _ = writeln!(out, "cutoff_a {}", space.cutoff_a());
        let _ = writeln!(out, "cutoff_b {}", space.cutoff_b());
        let _ = writeln!(out, "omega {:e}", p.omega);
        let _ = writeln!(out, "delta {:e}", p.delta);
        let _ = writeln!(out, "alpha {:e} {:e}", p.alpha.re, p.alpha.im);
        let _ = writeln!(out, "beta {:e} {:e}", p.beta.re, p.beta.im);
        let _ = writeln!(out, "time {:e}", self.state.time());
        let _ = writeln!(out, "amplitudes {}", self.state.amplitudes().len());
        for z in self.state.amplitudes() {
            let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |key: &str| -> Result<(usize, Vec<String>)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::Snapshot(format!("missing `{key}` line")))?;
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap_or_default();
            if !key.is_empty() && head != key {
                return Err(Error::Snapshot(format!("line {}: expected `{key}`, found `{head}`", no + 1)));
            }
            let mut rest: Vec<String> = parts.map(str::to_owned).collect();
            if key.is_empty() {
                rest.insert(0, head.to_owned());
            }
            Ok((no + 1, rest))
        };

        let (no, version) = next(MAGIC)?;
        if version.len() != 1 || version[0] != VERSION.to_string() {
            return Err(Error::Snapshot(format!("line {no}: unsupported version {version:?}")));
        }
        let cutoff_a: usize = single(next("cutoff_a")?)?;
        let cutoff_b: usize = single(next("cutoff_b")?)?;
        let omega = real::<T>(single(next("omega")?)?);
        let delta = real::<T>(single(next("delta")?)?);
        let alpha = complex::<T>(next("alpha")?)?;
        let beta = complex::<T>(next("beta")?)?;
        let time = real::<T>(single(next("time")?)?);
        let count: usize = single(next("amplitudes")?)?;

        let mut amplitudes = Vec::with_capacity(count);
        for _ in 0..count {
            amplitudes.push(complex::<T>(next("")?)?);
        }
        if let Some((no, _)) = lines.next() {
            return Err(Error::Snapshot(format!("line {}: trailing data", no + 1)));
        }
        let params = SystemParams::new(omega, delta, alpha, beta)?;
        let space = Arc::new(FockSpace::new(cutoff_a, cutoff_b)?);
        let state = StateVector::from_amplitudes(space, amplitudes, time)?;
        Ok(Self { params, state })
    }
}

fn single<V: std::str::FromStr>((no, fields): (usize, Vec<String>)) -> Result<V> {
    match fields.as_slice() {
        [one] => one
            .parse()
            .map_err(|_| Error::Snapshot(format!("line {no}: cannot parse `{one}`"))),
        _ => Err(Error::Snapshot(format!("line {no}: expected one value"))),
    }
}

fn real<T: Real>(v: f64) -> T {
    T::lit(v)
}

fn complex<T: Real>((no, fields): (usize, Vec<String>)) -> Result<Complex<T>> {
    let parse = |s: &String| {
        s.parse::<f64>()
            .map_err(|_| Error::Snapshot(format!("line {no}: cannot parse `{s}`")))
    };
    match fields.as_slice() {
        [re, im] => Ok(Complex::new(T::lit(parse(re)?), T::lit(parse(im)?))),
        _ => Err(Error::Snapshot(format!("line {no}: expected `re im`"))),
    }
}
