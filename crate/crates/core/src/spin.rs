//! Spin operators for a single giant spin and the labelled product basis of a
//! dimer of two such spins.
//!
//! Half-integers are carried internally as doubled integers so that labels
//! compare exactly. Operators are dimensionless (units of ħ).

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

/// Spin magnitude `s`, stored as `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinQuantumNumber {
    twice: u32,
}

impl SpinQuantumNumber {
    /// The `S = 9/2` giant spin of a Mn4 unit.
    pub const NINE_HALVES: Self = Self { twice: 9 };

    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !twice.is_finite() || twice < 1.0 || twice.fract() != 0.0 || twice > 1.0e6 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Self {
            twice: twice as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Self { twice })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// `2s + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Doubled magnetic quantum numbers in basis order, `2s, 2s-2, ..., -2s`.
    pub fn twice_m_values(self) -> impl Iterator<Item = i32> + Clone {
        let t = self.twice as i32;
        (0..=self.twice).map(move |k| t - 2 * k as i32)
    }

    /// Position of `m` (doubled) in the descending single-spin basis.
    pub fn position(self, twice_m: i32) -> Result<usize> {
        let t = self.twice as i32;
        if twice_m.abs() > t || (t - twice_m) % 2 != 0 {
            return Err(Error::InvalidQuantumNumber {
                m: f64::from(twice_m) / 2.0,
                s: self.value(),
            });
        }
        Ok(((t - twice_m) / 2) as usize)
    }

    /// Checks that `m` is a valid projection for this spin and returns `2m`.
    pub fn twice_m(self, m: f64) -> Result<i32> {
        let twice = 2.0 * m;
        let bad = || Error::InvalidQuantumNumber { m, s: self.value() };
        if !twice.is_finite() || twice.fract() != 0.0 {
            return Err(bad());
        }
        let twice = twice as i32;
        self.position(twice).map_err(|_| bad())?;
        Ok(twice)
    }
}

impl fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_half(self.twice as i32))
    }
}

/// Formats a doubled half-integer as `9/2`, `-7/2`, `3`.
pub fn format_half(twice: i32) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

/// Parses `9/2`, `-9/2`, `−9/2`, `4.5` or `4` into a doubled half-integer.
pub fn parse_half(text: &str) -> Option<i32> {
    let text = text.trim().replace('\u{2212}', "-");
    if let Some((num, den)) = text.split_once('/') {
        let num: i32 = num.trim().parse().ok()?;
        return match den.trim() {
            "2" => Some(num),
            "1" => num.checked_mul(2),
            _ => None,
        };
    }
    let v: f64 = text.parse().ok()?;
    let twice = 2.0 * v;
    (twice.is_finite() && twice.fract() == 0.0 && twice.abs() < 1.0e6).then_some(twice as i32)
}

/// Matrix representations of the spin components for one spin.
#[derive(Clone, Debug)]
pub struct SpinOperatorSet {
    pub s: SpinQuantumNumber,
    pub sz: CMatrix,
    pub s_plus: CMatrix,
    pub s_minus: CMatrix,
    pub sx: CMatrix,
    pub sy: CMatrix,
}

/// `<m-1| S- |m> = sqrt(s(s+1) - m(m-1))`, with `m` given doubled.
pub fn lowering_coefficient(s: SpinQuantumNumber, twice_m: i32) -> f64 {
    let s = s.value();
    let m = f64::from(twice_m) / 2.0;
    (s * (s + 1.0) - m * (m - 1.0)).max(0.0).sqrt()
}

/// Builds `Sz, S+, S-, Sx, Sy` in the descending-`m` basis.
pub fn spin_operators(s: SpinQuantumNumber) -> SpinOperatorSet {
    let n = s.dim();
    let ms: Vec<i32> = s.twice_m_values().collect();

    let sz = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(f64::from(ms[i]) / 2.0)
        } else {
            c(0.0)
        }
    });
    // Row i+1 holds m-1 when column i holds m.
    let s_minus = DMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            c(lowering_coefficient(s, ms[j]))
        } else {
            c(0.0)
        }
    });
    let s_plus = s_minus.adjoint();
    let sx = (&s_plus + &s_minus) * c(0.5);
    let sy = (&s_plus - &s_minus) * Complex64::new(0.0, -0.5);

    SpinOperatorSet {
        s,
        sz,
        s_plus,
        s_minus,
        sx,
        sy,
    }
}

fn check_dim(op: &CMatrix, s: SpinQuantumNumber) -> Result<()> {
    let n = s.dim();
    if op.nrows() != n || op.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if op.nrows() != n {
                op.nrows()
            } else {
                op.ncols()
            },
        });
    }
    Ok(())
}

/// `op ⊗ 1`: acts on the first unit of the dimer.
pub fn embed_first(op: &CMatrix, s: SpinQuantumNumber) -> Result<CMatrix> {
    check_dim(op, s)?;
    Ok(op.kronecker(&CMatrix::identity(s.dim(), s.dim())))
}

/// `1 ⊗ op`: acts on the second unit of the dimer.
pub fn embed_second(op: &CMatrix, s: SpinQuantumNumber) -> Result<CMatrix> {
    check_dim(op, s)?;
    Ok(CMatrix::identity(s.dim(), s.dim()).kronecker(op))
}

/// A product state `|m1, m2>` together with its flat basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    index: usize,
    twice_m1: i32,
    twice_m2: i32,
}

impl ProductState {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn m1(&self) -> f64 {
        f64::from(self.twice_m1) / 2.0
    }

    pub fn m2(&self) -> f64 {
        f64::from(self.twice_m2) / 2.0
    }

    pub fn twice_m1(&self) -> i32 {
        self.twice_m1
    }

    pub fn twice_m2(&self) -> i32 {
        self.twice_m2
    }

    /// Doubled total projection `2(m1 + m2)`.
    pub fn twice_total_m(&self) -> i32 {
        self.twice_m1 + self.twice_m2
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})",
            format_half(self.twice_m1),
            format_half(self.twice_m2)
        )
    }
}

impl Serialize for ProductState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Row-major product basis of two identical spins, `m` descending on each
/// factor, so `(s, s)` is index 0 and `(s, s-1)` is index 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimerBasis {
    pub spin: SpinQuantumNumber,
}

impl DimerBasis {
    pub fn new(spin: SpinQuantumNumber) -> Self {
        Self { spin }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim() * self.spin.dim()
    }

    pub fn state_index(&self, m1: f64, m2: f64) -> Result<usize> {
        Ok(self.state(m1, m2)?.index)
    }

    pub fn index_state(&self, index: usize) -> Result<(f64, f64)> {
        let st = self.state_at(index)?;
        Ok((st.m1(), st.m2()))
    }

    pub fn state(&self, m1: f64, m2: f64) -> Result<ProductState> {
        let t1 = self.spin.twice_m(m1)?;
        let t2 = self.spin.twice_m(m2)?;
        self.state_twice(t1, t2)
    }

    pub fn state_twice(&self, twice_m1: i32, twice_m2: i32) -> Result<ProductState> {
        let p1 = self.spin.position(twice_m1)?;
        let p2 = self.spin.position(twice_m2)?;
        Ok(ProductState {
            index: p1 * self.spin.dim() + p2,
            twice_m1,
            twice_m2,
        })
    }

    pub fn state_at(&self, index: usize) -> Result<ProductState> {
        let n = self.spin.dim();
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            });
        }
        let t = self.spin.twice() as i32;
        Ok(ProductState {
            index,
            twice_m1: t - 2 * (index / n) as i32,
            twice_m2: t - 2 * (index % n) as i32,
        })
    }

    pub fn states(&self) -> impl Iterator<Item = ProductState> + '_ {
        (0..self.dim()).map(move |i| self.state_at(i).expect("index in range"))
    }

    /// Parses a label such as `-9/2,7/2` or `(9/2, 9/2)`.
    pub fn parse_state(&self, text: &str) -> Result<ProductState> {
        let trimmed = text.trim().trim_start_matches('(').trim_end_matches(')');
        let bad = || Error::InvalidParameter {
            name: "state",
            reason: format!("cannot parse `{text}` as (m1,m2)"),
        };
        let (a, b) = trimmed.split_once(',').ok_or_else(bad)?;
        let t1 = parse_half(a).ok_or_else(bad)?;
        let t2 = parse_half(b).ok_or_else(bad)?;
        self.state_twice(t1, t2)
    }
}

/// Dimer-space operators assembled once per spin magnitude.
#[derive(Clone, Debug)]
pub struct DimerOperators {
    pub basis: DimerBasis,
    pub sz1: CMatrix,
    pub sz2: CMatrix,
    pub s_plus1: CMatrix,
    pub s_plus2: CMatrix,
    pub s_minus1: CMatrix,
    pub s_minus2: CMatrix,
}

impl DimerOperators {
    pub fn new(spin: SpinQuantumNumber) -> Self {
        let ops = spin_operators(spin);
        let first = |m: &CMatrix| embed_first(m, spin).expect("matching dimension");
        let second = |m: &CMatrix| embed_second(m, spin).expect("matching dimension");
        Self {
            basis: DimerBasis::new(spin),
            sz1: first(&ops.sz),
            sz2: second(&ops.sz),
            s_plus1: first(&ops.s_plus),
            s_plus2: second(&ops.s_plus),
            s_minus1: first(&ops.s_minus),
            s_minus2: second(&ops.s_minus),
        }
    }

    pub fn sz_total(&self) -> CMatrix {
        &self.sz1 + &self.sz2
    }

    pub fn s_plus_total(&self) -> CMatrix {
        &self.s_plus1 + &self.s_plus2
    }

    pub fn s_minus_total(&self) -> CMatrix {
        &self.s_minus1 + &self.s_minus2
    }
}
