//! Dimer Hamiltonian, its zeroth-order spectrum and the unit bridge between
//! Kelvin and angular frequency.
//!
//! Every operator built here is in Kelvin. Conversion to rad/s happens only
//! in the perturbation and dynamics layers via [`kelvin_to_angular`].

use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::linalg::{c, CMatrix};
use crate::spin::{DimerBasis, DimerOperators, ProductState, SpinQuantumNumber};

pub use crate::linalg::{eigendecompose, Eigensystem};

/// CODATA 2018 values (kB and ħ are exact in the 2019 SI).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// J/T
    pub mu_b: f64,
    /// J/K
    pub k_b: f64,
    /// J s
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        mu_b: 9.274_010_078_3e-24,
        k_b: 1.380_649e-23,
        hbar: 1.054_571_817e-34,
    };

    /// μB/kB in K/T.
    pub fn mu_b_over_k_b(&self) -> f64 {
        self.mu_b / self.k_b
    }

    /// kB/ħ in rad s⁻¹ K⁻¹.
    pub fn k_b_over_hbar(&self) -> f64 {
        self.k_b / self.hbar
    }

    /// μB/ħ in rad s⁻¹ T⁻¹.
    pub fn mu_b_over_hbar(&self) -> f64 {
        self.mu_b / self.hbar
    }
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants::CODATA_2018;

pub fn kelvin_to_angular(kelvin: f64) -> f64 {
    kelvin * CONSTANTS.k_b_over_hbar()
}

pub fn angular_to_kelvin(omega: f64) -> f64 {
    omega / CONSTANTS.k_b_over_hbar()
}

impl Serialize for SpinQuantumNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

/// Physical parameters of the dimer. Energies in Kelvin, fields in Tesla.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub d_kelvin: f64,
    pub g_factor: f64,
    pub bz_tesla: f64,
    pub jz_kelvin: f64,
    pub jxy_kelvin: f64,
    pub spin: SpinQuantumNumber,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            d_kelvin: -0.72,
            g_factor: 2.0,
            bz_tesla: 0.5,
            jz_kelvin: 0.1,
            jxy_kelvin: 0.1,
            spin: SpinQuantumNumber::NINE_HALVES,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("d_kelvin", self.d_kelvin),
            ("g_factor", self.g_factor),
            ("bz_tesla", self.bz_tesla),
            ("jz_kelvin", self.jz_kelvin),
            ("jxy_kelvin", self.jxy_kelvin),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, format!("{v} is not finite")));
            }
        }
        if self.g_factor <= 0.0 {
            return Err(invalid("g_factor", "must be positive"));
        }
        Ok(())
    }

    pub fn with_jxy(mut self, jxy_kelvin: f64) -> Self {
        self.jxy_kelvin = jxy_kelvin;
        self
    }

    pub fn basis(&self) -> DimerBasis {
        DimerBasis::new(self.spin)
    }

    /// Zeeman energy per unit of `Sz`, g μB Bz / kB in Kelvin.
    pub fn zeeman_kelvin(&self) -> f64 {
        self.g_factor * CONSTANTS.mu_b_over_k_b() * self.bz_tesla
    }
}

/// Which Mn4 unit of the dimer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    First,
    Second,
}

impl TryFrom<usize> for Unit {
    type Error = crate::Error;

    fn try_from(v: usize) -> Result<Self> {
        match v {
            1 => Ok(Unit::First),
            2 => Ok(Unit::Second),
            _ => Err(invalid("unit_index", format!("{v} is not 1 or 2"))),
        }
    }
}

/// `D Sz_i² + g μB Bz Sz_i` for one unit, embedded in the dimer space.
pub fn h_single(params: &ModelParams, unit: Unit) -> Result<CMatrix> {
    params.validate()?;
    let ops = DimerOperators::new(params.spin);
    let sz = match unit {
        Unit::First => &ops.sz1,
        Unit::Second => &ops.sz2,
    };
    Ok(sz * sz * c(params.d_kelvin) + sz * c(params.zeeman_kelvin()))
}

/// `H1 + H2 + Jz Sz1 Sz2`, diagonal in the product basis.
pub fn h_zero(params: &ModelParams) -> Result<CMatrix> {
    let ops = DimerOperators::new(params.spin);
    Ok(h_single(params, Unit::First)?
        + h_single(params, Unit::Second)?
        + &ops.sz1 * &ops.sz2 * c(params.jz_kelvin))
}

/// `(Jxy/2)(S1+ S2- + S1- S2+)`.
pub fn h_transverse_exchange(params: &ModelParams) -> Result<CMatrix> {
    params.validate()?;
    let ops = DimerOperators::new(params.spin);
    Ok((&ops.s_plus1 * &ops.s_minus2 + &ops.s_minus1 * &ops.s_plus2) * c(params.jxy_kelvin / 2.0))
}

/// Full dimer Hamiltonian including transverse exchange.
pub fn h_full(params: &ModelParams) -> Result<CMatrix> {
    Ok(h_zero(params)? + h_transverse_exchange(params)?)
}

/// Closed-form zeroth-order energy
/// `(m1² + m2²) D + (m1 + m2) g μB Bz + m1 m2 Jz` in Kelvin.
pub fn analytic_energy(params: &ModelParams, state: &ProductState) -> f64 {
    let (m1, m2) = (state.m1(), state.m2());
    (m1 * m1 + m2 * m2) * params.d_kelvin
        + (m1 + m2) * params.zeeman_kelvin()
        + m1 * m2 * params.jz_kelvin
}

/// Energy gap `E(to) - E(from)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyGapEntry {
    pub from_state: ProductState,
    pub to_state: ProductState,
    pub gap_kelvin: f64,
    pub gap_angular: f64,
}

pub fn gap(params: &ModelParams, from: &ProductState, to: &ProductState) -> EnergyGapEntry {
    let gap_kelvin = analytic_energy(params, to) - analytic_energy(params, from);
    EnergyGapEntry {
        from_state: *from,
        to_state: *to,
        gap_kelvin,
        gap_angular: kelvin_to_angular(gap_kelvin),
    }
}

/// The four product states used as qubits, in logical order
/// `|00>, |01>, |10>, |11>`. The first unit is the control (`m1 = s` is 0,
/// `m1 = -s` is 1), the second the target (`m2 = s` is 0, `m2 = s-1` is 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComputingBasis {
    pub a: ProductState,
    pub b: ProductState,
    pub c: ProductState,
    pub d: ProductState,
}

impl ComputingBasis {
    pub const LOGICAL_LABELS: [&'static str; 4] = ["00", "01", "10", "11"];

    pub fn new(spin: SpinQuantumNumber) -> Self {
        let basis = DimerBasis::new(spin);
        let t = spin.twice() as i32;
        let st = |a, b| basis.state_twice(a, b).expect("extremal labels are valid");
        Self {
            a: st(t, t),
            b: st(t, t - 2),
            c: st(-t, t),
            d: st(-t, t - 2),
        }
    }

    pub fn states(&self) -> [ProductState; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn contains(&self, state: &ProductState) -> bool {
        self.states().contains(state)
    }

    pub fn position(&self, state: &ProductState) -> Option<usize> {
        self.states().iter().position(|s| s == state)
    }
}

/// Angular frequency of the conditional transition `c -> d` (control = 1).
pub fn omega1(params: &ModelParams) -> f64 {
    let cb = ComputingBasis::new(params.spin);
    gap(params, &cb.c, &cb.d).gap_angular
}

/// Angular frequency of the transition `a -> b` (control = 0).
pub fn omega2(params: &ModelParams) -> f64 {
    let cb = ComputingBasis::new(params.spin);
    gap(params, &cb.a, &cb.b).gap_angular
}

/// Splitting of the two target transitions, `9 Jz kB / ħ` for s = 9/2
/// (generally `2 s Jz kB / ħ`).
pub fn delta_omega(params: &ModelParams) -> f64 {
    kelvin_to_angular(params.spin.value() * 2.0 * params.jz_kelvin)
}

/// One row of the zeroth-order gap table for `s = 9/2`. The closed form is
/// `d·D + zeeman·(g μB Bz) + jz·Jz` and is evaluated independently of
/// [`analytic_energy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapTableRow {
    /// Doubled `(m1, m2)` of the lower-labelled state.
    pub from: (i32, i32),
    pub to: (i32, i32),
    pub expression: &'static str,
    pub d: f64,
    pub zeeman: f64,
    pub jz: f64,
}

impl GapTableRow {
    pub fn closed_form(&self, params: &ModelParams) -> f64 {
        self.d * params.d_kelvin + self.zeeman * params.zeeman_kelvin() + self.jz * params.jz_kelvin
    }

    pub fn states(&self, basis: &DimerBasis) -> Result<(ProductState, ProductState)> {
        Ok((
            basis.state_twice(self.from.0, self.from.1)?,
            basis.state_twice(self.to.0, self.to.1)?,
        ))
    }
}

pub const GAP_TABLE: [GapTableRow; 9] = [
    GapTableRow {
        from: (-9, 9),
        to: (-9, 7),
        expression: "-8D - g*muB*Bz + (9/2)Jz",
        d: -8.0,
        zeeman: -1.0,
        jz: 4.5,
    },
    GapTableRow {
        from: (9, 9),
        to: (9, 7),
        expression: "-8D - g*muB*Bz - (9/2)Jz",
        d: -8.0,
        zeeman: -1.0,
        jz: -4.5,
    },
    GapTableRow {
        from: (-9, 7),
        to: (-9, 5),
        expression: "-6D - g*muB*Bz + (9/2)Jz",
        d: -6.0,
        zeeman: -1.0,
        jz: 4.5,
    },
    GapTableRow {
        from: (9, 7),
        to: (9, 5),
        expression: "-6D - g*muB*Bz - (9/2)Jz",
        d: -6.0,
        zeeman: -1.0,
        jz: -4.5,
    },
    GapTableRow {
        from: (9, 9),
        to: (7, 9),
        expression: "-8D - g*muB*Bz - (9/2)Jz",
        d: -8.0,
        zeeman: -1.0,
        jz: -4.5,
    },
    GapTableRow {
        from: (9, 7),
        to: (7, 7),
        expression: "-8D - g*muB*Bz - (7/2)Jz",
        d: -8.0,
        zeeman: -1.0,
        jz: -3.5,
    },
    GapTableRow {
        from: (9, 7),
        to: (7, 9),
        expression: "0",
        d: 0.0,
        zeeman: 0.0,
        jz: 0.0,
    },
    GapTableRow {
        from: (-9, 9),
        to: (-7, 7),
        expression: "-16D + 8Jz",
        d: -16.0,
        zeeman: 0.0,
        jz: 8.0,
    },
    GapTableRow {
        from: (-9, 7),
        to: (-7, 5),
        expression: "-14D + 7Jz",
        d: -14.0,
        zeeman: 0.0,
        jz: 7.0,
    },
];

/// Evaluates every gap-table row with [`gap`]. Requires `s = 9/2`.
pub fn gap_table(params: &ModelParams) -> Result<Vec<(GapTableRow, EnergyGapEntry)>> {
    if params.spin != SpinQuantumNumber::NINE_HALVES {
        return Err(invalid("spin", "the gap table is defined for s = 9/2"));
    }
    let basis = params.basis();
    GAP_TABLE
        .iter()
        .map(|row| {
            let (from, to) = row.states(&basis)?;
            Ok((*row, gap(params, &from, &to)))
        })
        .collect()
}
