//! Closed-form Lamé potentials V(x) = j(j+1)·m·sn²(x, m) and their band-edge
//! eigensystems for j = 1 and j = 2 (units ħ = 2m = 1).
//!
//! For j = 2 the five band edges are, in increasing energy,
//!
//! ```text
//! ψ₀ = b₊ − 3m·sn²   E₀ = 2(1+m) − 2δ      (bottom of band 1)
//! ψ₁ = cn·dn          E₁ = 1 + m            (top of band 1)
//! ψ₂ = sn·dn          E₂ = 1 + 4m           (bottom of band 2)
//! ψ₃ = sn·cn          E₃ = 4 + m            (top of band 2)
//! ψ₄ = b₋ − 3m·sn²   E₄ = 2(1+m) + 2δ      (edge of the continuum)
//! ```
//!
//! with δ = √(1 − m + m²) and b± = 1 + m ± δ. The polynomial edges are fixed
//! by substituting ψ = b − 3m·sn² into the eigenvalue equation, which forces
//! b² − 2(1+m)·b + 3m = 0 and E = 4(1+m) − 2b; published tabulations of these
//! two edges sometimes carry a shifted energy zero, so the quadratic is the
//! ground truth here (each state is residual-checked in the tests). States
//! are kept unnormalized, exactly in the product forms above.

use crate::elliptic::{complete_elliptic_k, jacobi_derivatives, jacobi_elliptic, EllipticModulus};
use crate::error::{Error, Result};

/// Which Lamé problem to solve: the index j and the modulus m.
#[derive(Debug, Clone, Copy)]
pub struct LameConfig {
    j: u32,
    m: EllipticModulus,
}

impl LameConfig {
    pub fn new(j: u32, m: EllipticModulus) -> Result<Self> {
        if j == 1 || j == 2 {
            Ok(Self { j, m })
        } else {
            Err(Error::UnsupportedIndex(j))
        }
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn modulus(&self) -> f64 {
        self.m.get()
    }

    /// Potential period 2K(m).
    pub fn period(&self) -> f64 {
        2.0 * complete_elliptic_k(self.modulus()).expect("modulus validated")
    }
}

/// δ = √(1 − m + m²), the discriminant root that fixes the outermost j = 2
/// band edges: b = 1 + m ± δ solves b² − 2(1+m)·b + 3m = 0.
#[derive(Debug, Clone, Copy)]
pub struct DeltaParam {
    pub delta: f64,
}

impl DeltaParam {
    pub fn new(m: f64) -> Self {
        Self {
            delta: (1.0 - m + m * m).sqrt(),
        }
    }
}

/// Closed-form shape of a band-edge state.
#[derive(Debug, Clone, Copy, PartialEq)]
enum EdgeForm {
    CnDn,
    SnDn,
    SnCn,
    /// b − 3m·sn² with the given constant b.
    SnSqPoly(f64),
    Dn,
    Cn,
    Sn,
}

/// One band-edge eigenfunction with its closed-form evaluators.
#[derive(Debug, Clone)]
pub struct BandEdgeState {
    pub index: usize,
    pub energy: f64,
    pub vanishes_at_origin: bool,
    pub label: String,
    m: f64,
    form: EdgeForm,
}

impl BandEdgeState {
    fn new(index: usize, energy: f64, m: f64, form: EdgeForm) -> Self {
        let vanishes_at_origin = matches!(form, EdgeForm::SnDn | EdgeForm::SnCn | EdgeForm::Sn);
        Self {
            index,
            energy,
            vanishes_at_origin,
            label: format!("psi{index}"),
            m,
            form,
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        let t = jacobi_elliptic(x, self.m).expect("modulus validated");
        let m = self.m;
        match self.form {
            EdgeForm::CnDn => t.cn * t.dn,
            EdgeForm::SnDn => t.sn * t.dn,
            EdgeForm::SnCn => t.sn * t.cn,
            EdgeForm::SnSqPoly(b) => b - 3.0 * m * t.sn * t.sn,
            EdgeForm::Dn => t.dn,
            EdgeForm::Cn => t.cn,
            EdgeForm::Sn => t.sn,
        }
    }

    pub fn psi_deriv(&self, x: f64) -> f64 {
        let t = jacobi_elliptic(x, self.m).expect("modulus validated");
        let (dsn, dcn, ddn) = jacobi_derivatives(t, self.m);
        let m = self.m;
        match self.form {
            EdgeForm::CnDn => dcn * t.dn + t.cn * ddn,
            EdgeForm::SnDn => dsn * t.dn + t.sn * ddn,
            EdgeForm::SnCn => dsn * t.cn + t.sn * dcn,
            EdgeForm::SnSqPoly(_) => -6.0 * m * t.sn * t.cn * t.dn,
            EdgeForm::Dn => ddn,
            EdgeForm::Cn => dcn,
            EdgeForm::Sn => dsn,
        }
    }

    /// Second derivative assembled by the product rule from the derivatives
    /// of sn, cn, dn alone — the Schrödinger equation is never substituted,
    /// so residual tests against it are honest.
    pub fn psi_deriv2(&self, x: f64) -> f64 {
        let t = jacobi_elliptic(x, self.m).expect("modulus validated");
        let m = self.m;
        let (sn, cn, dn) = (t.sn, t.cn, t.dn);
        match self.form {
            EdgeForm::CnDn => -cn * dn * (dn * dn + m * cn * cn - 4.0 * m * sn * sn),
            EdgeForm::SnDn => -sn * dn * (dn * dn - m * sn * sn + 4.0 * m * cn * cn),
            EdgeForm::SnCn => -sn * cn * (m * (cn * cn - sn * sn) + 4.0 * dn * dn),
            EdgeForm::SnSqPoly(_) => {
                -6.0 * m * (cn * cn * dn * dn - sn * sn * dn * dn - m * sn * sn * cn * cn)
            }
            EdgeForm::Dn => -m * dn * (cn * cn - sn * sn),
            EdgeForm::Cn => -cn * (dn * dn - m * sn * sn),
            EdgeForm::Sn => -sn * (dn * dn + m * cn * cn),
        }
    }
}

/// V(x) = j(j+1)·m·sn²(x, m); range [0, j(j+1)·m], period 2K(m).
pub fn lame_potential(cfg: &LameConfig, x: f64) -> f64 {
    let t = jacobi_elliptic(x, cfg.modulus()).expect("modulus validated");
    (cfg.j * (cfg.j + 1)) as f64 * cfg.modulus() * t.sn * t.sn
}

/// All 2j+1 band-edge states in increasing energy order.
pub fn band_edge_states(cfg: &LameConfig) -> Vec<BandEdgeState> {
    let m = cfg.modulus();
    match cfg.j {
        1 => vec![
            BandEdgeState::new(0, m, m, EdgeForm::Dn),
            BandEdgeState::new(1, 1.0, m, EdgeForm::Cn),
            BandEdgeState::new(2, 1.0 + m, m, EdgeForm::Sn),
        ],
        2 => {
            let delta = DeltaParam::new(m).delta;
            let b_plus = 1.0 + m + delta;
            let b_minus = 1.0 + m - delta;
            vec![
                BandEdgeState::new(
                    0,
                    2.0 * (1.0 + m) - 2.0 * delta,
                    m,
                    EdgeForm::SnSqPoly(b_plus),
                ),
                BandEdgeState::new(1, 1.0 + m, m, EdgeForm::CnDn),
                BandEdgeState::new(2, 1.0 + 4.0 * m, m, EdgeForm::SnDn),
                BandEdgeState::new(3, 4.0 + m, m, EdgeForm::SnCn),
                BandEdgeState::new(
                    4,
                    2.0 * (1.0 + m) + 2.0 * delta,
                    m,
                    EdgeForm::SnSqPoly(b_minus),
                ),
            ]
        }
        _ => unreachable!("LameConfig::new validated j"),
    }
}

/// The band-edge states usable as half-line seeds, i.e. those with ψ(0) = 0,
/// in energy order. Errors when none qualifies.
pub fn half_line_seeds(states: &[BandEdgeState]) -> Result<Vec<BandEdgeState>> {
    let seeds: Vec<BandEdgeState> = states
        .iter()
        .filter(|s| s.vanishes_at_origin)
        .cloned()
        .collect();
    if seeds.is_empty() {
        Err(Error::NoHalfLineSeed)
    } else {
        Ok(seeds)
    }
}
