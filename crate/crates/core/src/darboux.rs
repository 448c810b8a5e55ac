//! The deformation engine.
//!
//! Given a potential V and two of its solutions u₀ (the seed, with u₀(0) = 0
//! and energy E₀) and u₁ (the partner, energy E₁), one deformation step with
//! parameter λ > 0 produces
//!
//! ```text
//! I(x)  = ∫₀ˣ u₀²                       (running integral, grows linearly)
//! Ṽ    = V − 4·u₀·u₀′/(I+λ) + 2·u₀⁴/(I+λ)²
//! ũ₀   = u₀ / (I+λ)                    (square integrable, energy E₀)
//! ũ₁   = (E₁−E₀)·u₁ + ũ₀·Wr(u₀,u₁)    (still extended, energy E₁)
//! ```
//!
//! with Wr(a,b) = a·b′ − a′·b. Energies never change: both outputs solve the
//! deformed potential at the seed and partner energies, which is what the
//! residual postconditions verify. Chaining a second step with ũ₁ as the new
//! seed (and ũ₀ as its partner) makes the second state square integrable too
//! and yields a potential supporting two bound states inside the band
//! spectrum of V.
//!
//! Derivatives of the outputs are assembled analytically through the product
//! rule with Wr′ = (E₀−E₁)·u₀·u₁, so chained steps keep derivative data at
//! closed-form accuracy; the only tabulated ingredient is I itself.

use crate::error::{Error, Result};
use crate::grid::{
    check_same_grid, cumulative_integral, log_2nd_derivative_term, Grid, SampledFunction,
};
use crate::lame::BandEdgeState;
use crate::spectral::schrodinger_residual;

/// Residual limit for accepting the inputs of a step as genuine solutions.
const INPUT_RESIDUAL_LIMIT: f64 = 1e-6;
/// Residual limit the outputs of a step must meet against the new potential.
const OUTPUT_RESIDUAL_LIMIT: f64 = 1e-5;

/// A state tabulated on the grid together with analytically evaluated first
/// and second derivatives and its energy.
#[derive(Debug, Clone)]
pub struct StateSample {
    pub psi: SampledFunction,
    pub dpsi: SampledFunction,
    pub d2psi: SampledFunction,
    pub energy: f64,
}

impl StateSample {
    pub fn new(
        psi: SampledFunction,
        dpsi: SampledFunction,
        d2psi: SampledFunction,
        energy: f64,
    ) -> Result<Self> {
        check_same_grid(&psi, &dpsi)?;
        check_same_grid(&psi, &d2psi)?;
        Ok(Self {
            psi,
            dpsi,
            d2psi,
            energy,
        })
    }

    /// Tabulate a closed-form band-edge state on a grid.
    pub fn from_band_edge(state: &BandEdgeState, grid: Grid) -> Self {
        Self {
            psi: SampledFunction::from_fn(grid, &state.label, |x| state.psi(x)),
            dpsi: SampledFunction::from_fn(grid, format!("{}'", state.label), |x| {
                state.psi_deriv(x)
            }),
            d2psi: SampledFunction::from_fn(grid, format!("{}''", state.label), |x| {
                state.psi_deriv2(x)
            }),
            energy: state.energy,
        }
    }

    /// The same state multiplied by a constant.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            psi: self.psi.map(format!("{}·{c}", self.psi.label), |v| c * v),
            dpsi: self.dpsi.map(self.dpsi.label.clone(), |v| c * v),
            d2psi: self.d2psi.map(self.d2psi.label.clone(), |v| c * v),
            energy: self.energy,
        }
    }
}

/// One deformation step: inputs, running integral, and outputs.
#[derive(Debug, Clone)]
pub struct DeformationStep {
    pub lambda: f64,
    pub seed: StateSample,
    pub partner: StateSample,
    /// I(x) = ∫₀ˣ seed², with I(0) = 0, monotone nondecreasing.
    pub running_integral: SampledFunction,
    pub v_in: SampledFunction,
    pub v_out: SampledFunction,
    /// seed/(I+λ): the square-integrable output at the seed energy.
    pub state_bound: StateSample,
    /// (E_partner−E_seed)·partner + bound·Wr(seed, partner): the extended output.
    pub state_partner_out: StateSample,
}

/// A one- or two-step chain; step k+1 deforms step k's output potential.
#[derive(Debug, Clone)]
pub struct DeformationChain {
    pub base_potential: SampledFunction,
    pub steps: Vec<DeformationStep>,
}

impl DeformationChain {
    pub fn final_potential(&self) -> &SampledFunction {
        &self.steps.last().expect("chain has at least one step").v_out
    }

    /// The two states of the last step, in (bound, partner) order.
    pub fn final_states(&self) -> (&StateSample, &StateSample) {
        let last = self.steps.last().expect("chain has at least one step");
        (&last.state_bound, &last.state_partner_out)
    }
}

/// Wr(a, b) = a·b′ − a′·b on the grid, evaluated from the analytic
/// derivatives. For two solutions of one potential, d/dx Wr = (E_a−E_b)·a·b.
pub fn wronskian(a: &StateSample, b: &StateSample) -> SampledFunction {
    let n = a.psi.grid.len();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(a.psi.values[i] * b.dpsi.values[i] - a.dpsi.values[i] * b.psi.values[i]);
    }
    SampledFunction::new(
        a.psi.grid,
        format!("Wr({},{})", a.psi.label, b.psi.label),
        values,
    )
}

/// The superpotential W = −u′/u of a nodeless-on-its-domain state, with grid
/// points too close to a node of u flagged instead of evaluated.
#[derive(Debug, Clone)]
pub struct Superpotential {
    /// W values; NaN at flagged points.
    pub w: SampledFunction,
    /// true where |u| fell below the node tolerance and W is not evaluated.
    pub node_mask: Vec<bool>,
}

/// W(x) = −u′(x)/u(x) where |u| > 1e-8·sup|u|; nodes are flagged, not fatal.
/// Used only by consistency checks, never inside the deformation chain.
pub fn superpotential(state: &StateSample) -> Superpotential {
    let eps = 1e-8 * state.psi.max_abs();
    let n = state.psi.grid.len();
    let mut values = Vec::with_capacity(n);
    let mut node_mask = Vec::with_capacity(n);
    for i in 0..n {
        let u = state.psi.values[i];
        if u.abs() > eps {
            values.push(-state.dpsi.values[i] / u);
            node_mask.push(false);
        } else {
            values.push(f64::NAN);
            node_mask.push(true);
        }
    }
    Superpotential {
        w: SampledFunction::new(
            state.psi.grid,
            format!("W[{}]", state.psi.label),
            values,
        ),
        node_mask,
    }
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 {
        Ok(())
    } else if lambda < -1.0 {
        Err(Error::LambdaSingularRange(lambda))
    } else {
        Err(Error::NonpositiveLambda(lambda))
    }
}

/// One Darboux deformation step. Checks its preconditions (λ > 0, the seed
/// vanishes at the origin, both inputs solve `v` at their stated energies)
/// and verifies its own outputs against the deformed potential before
/// returning.
pub fn deform_once(
    v: &SampledFunction,
    seed: &StateSample,
    partner: &StateSample,
    lambda: f64,
) -> Result<DeformationStep> {
    validate_lambda(lambda)?;
    check_same_grid(v, &seed.psi)?;
    check_same_grid(v, &partner.psi)?;

    let seed_origin = seed.psi.values[0];
    if seed_origin.abs() > 1e-12 * seed.psi.max_abs() {
        return Err(Error::SeedBoundary {
            label: seed.psi.label.clone(),
            value: seed_origin,
        });
    }
    for state in [seed, partner] {
        let residual = schrodinger_residual(&state.psi, Some(&state.d2psi), v, state.energy)?;
        if residual > INPUT_RESIDUAL_LIMIT {
            return Err(Error::InconsistentInput {
                label: state.psi.label.clone(),
                energy: state.energy,
                residual,
                limit: INPUT_RESIDUAL_LIMIT,
            });
        }
    }

    let grid = v.grid;
    let n = grid.len();
    let u = &seed.psi.values;
    let du = &seed.dpsi.values;
    let d2u = &seed.d2psi.values;

    let running_integral =
        cumulative_integral(&seed.psi.map(format!("{}^2", seed.psi.label), |y| y * y));
    let shifted = running_integral.map("I+λ", |y| y + lambda);
    let correction = log_2nd_derivative_term(&seed.psi, &seed.dpsi, &shifted)?;
    let v_out = v.zip_with(&correction, format!("{}~", v.label), |a, b| a + b)?;

    // bound output: u/(I+λ) with quotient-rule derivatives (I' = u² exactly)
    let j = &shifted.values;
    let mut b_psi = Vec::with_capacity(n);
    let mut b_dpsi = Vec::with_capacity(n);
    let mut b_d2psi = Vec::with_capacity(n);
    for i in 0..n {
        let (ui, dui, d2ui, ji) = (u[i], du[i], d2u[i], j[i]);
        let u2 = ui * ui;
        b_psi.push(ui / ji);
        b_dpsi.push(dui / ji - u2 * ui / (ji * ji));
        b_d2psi.push(d2ui / ji - 4.0 * u2 * dui / (ji * ji) + 2.0 * u2 * u2 * ui / (ji * ji * ji));
    }
    let bound_label = format!("{}~", seed.psi.label);
    let state_bound = StateSample::new(
        SampledFunction::new(grid, bound_label.clone(), b_psi),
        SampledFunction::new(grid, format!("{bound_label}'"), b_dpsi),
        SampledFunction::new(grid, format!("{bound_label}''"), b_d2psi),
        seed.energy,
    )?;

    // partner output: (E₁−E₀)·u₁ + ũ₀·Wr, with Wr′ = (E₀−E₁)·u₀·u₁
    let de = partner.energy - seed.energy;
    let p = &partner.psi.values;
    let dp = &partner.dpsi.values;
    let d2p = &partner.d2psi.values;
    let mut q_psi = Vec::with_capacity(n);
    let mut q_dpsi = Vec::with_capacity(n);
    let mut q_d2psi = Vec::with_capacity(n);
    for i in 0..n {
        let w = u[i] * dp[i] - du[i] * p[i];
        let dw = -de * u[i] * p[i];
        let d2w = -de * (du[i] * p[i] + u[i] * dp[i]);
        let (ub, dub, d2ub) = (
            state_bound.psi.values[i],
            state_bound.dpsi.values[i],
            state_bound.d2psi.values[i],
        );
        q_psi.push(de * p[i] + ub * w);
        q_dpsi.push(de * dp[i] + dub * w + ub * dw);
        q_d2psi.push(de * d2p[i] + d2ub * w + 2.0 * dub * dw + ub * d2w);
    }
    let partner_label = format!("{}~", partner.psi.label);
    let state_partner_out = StateSample::new(
        SampledFunction::new(grid, partner_label.clone(), q_psi),
        SampledFunction::new(grid, format!("{partner_label}'"), q_dpsi),
        SampledFunction::new(grid, format!("{partner_label}''"), q_d2psi),
        partner.energy,
    )?;

    for state in [&state_bound, &state_partner_out] {
        let residual =
            schrodinger_residual(&state.psi, Some(&state.d2psi), &v_out, state.energy)?;
        if residual > OUTPUT_RESIDUAL_LIMIT {
            return Err(Error::DeformationResidual {
                label: state.psi.label.clone(),
                residual,
                limit: OUTPUT_RESIDUAL_LIMIT,
            });
        }
    }

    Ok(DeformationStep {
        lambda,
        seed: seed.clone(),
        partner: partner.clone(),
        running_integral,
        v_in: v.clone(),
        v_out,
        state_bound,
        state_partner_out,
    })
}

/// Two chained steps: the first seeded by `seed`, the second seeded by the
/// still-extended partner output of the first (with the first bound state as
/// its partner), so both final states come out square integrable at the
/// unchanged energies.
pub fn deform_twice(
    v: &SampledFunction,
    seed: &StateSample,
    partner: &StateSample,
    lambda: f64,
    lambda1: f64,
) -> Result<DeformationChain> {
    let first = deform_once(v, seed, partner, lambda)?;
    let second = deform_once(
        &first.v_out,
        &first.state_partner_out,
        &first.state_bound,
        lambda1,
    )?;
    Ok(DeformationChain {
        base_potential: v.clone(),
        steps: vec![first, second],
    })
}

/// Build the standard chain for a Lamé configuration: the two origin-vanishing
/// band edges seed the steps (for j = 2 these are ψ₂ and ψ₃).
pub fn lame_chain(
    cfg: &crate::lame::LameConfig,
    grid: Grid,
    lambda: f64,
    lambda1: Option<f64>,
) -> Result<DeformationChain> {
    let states = crate::lame::band_edge_states(cfg);
    let seeds = crate::lame::half_line_seeds(&states)?;
    if seeds.len() < 2 {
        return Err(Error::NeedTwoSeeds(seeds.len()));
    }
    let v = SampledFunction::from_fn(grid, "V", |x| crate::lame::lame_potential(cfg, x));
    let seed = StateSample::from_band_edge(&seeds[0], grid);
    let partner = StateSample::from_band_edge(&seeds[1], grid);
    match lambda1 {
        Some(l1) => deform_twice(&v, &seed, &partner, lambda, l1),
        None => {
            let step = deform_once(&v, &seed, &partner, lambda)?;
            Ok(DeformationChain {
                base_potential: v,
                steps: vec![step],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticModulus;
    use crate::grid::derivative_1st;
    use crate::lame::{band_edge_states, LameConfig};

    fn default_grid() -> Grid {
        Grid::new(40.0, 8001).unwrap()
    }

    fn lame_cfg() -> LameConfig {
        LameConfig::new(2, EllipticModulus::new(0.5).unwrap()).unwrap()
    }

    fn lame_inputs(grid: Grid) -> (SampledFunction, StateSample, StateSample) {
        let cfg = lame_cfg();
        let states = band_edge_states(&cfg);
        let v = SampledFunction::from_fn(grid, "V", |x| crate::lame::lame_potential(&cfg, x));
        (
            v,
            StateSample::from_band_edge(&states[2], grid),
            StateSample::from_band_edge(&states[3], grid),
        )
    }

    #[test]
    fn gaussian_superpotential_is_linear() {
        let g = Grid::new(6.0, 1201).unwrap();
        let psi = SampledFunction::from_fn(g, "gauss", |x| (-0.5 * x * x).exp());
        let dpsi = SampledFunction::from_fn(g, "gauss'", |x| -x * (-0.5 * x * x).exp());
        let d2psi = SampledFunction::from_fn(g, "gauss''", |x| (x * x - 1.0) * (-0.5 * x * x).exp());
        let state = StateSample::new(psi, dpsi, d2psi, 0.0).unwrap();
        let sp = superpotential(&state);
        for (i, &w) in sp.w.values.iter().enumerate() {
            if !sp.node_mask[i] {
                assert!((w - g.point(i)).abs() < 1e-12, "W({}) = {w}", g.point(i));
            }
        }
    }

    /// Away from the nodes of the seed, the superpotential must reconstruct
    /// the input potential: W² − W′ = V − E_seed power (the factorization holds
    /// for the energy-shifted problem). W′ comes from the five-point stencil,
    /// so points near a node are excluded with a wide margin where 1/u blows
    /// up through the stencil.
    #[test]
    fn superpotential_reconstructs_potential() {
        let grid = default_grid();
        let (v, seed, _) = lame_inputs(grid);
        let sp = superpotential(&seed);
        let w_filled = sp.w.map("W", |y| if y.is_nan() { 0.0 } else { y });
        let dw = derivative_1st(&w_filled);
        let period = lame_cfg().period();
        let margin = 0.5;
        let mut checked = 0;
        let mut worst = 0.0f64;
        for i in 0..grid.len() {
            let x = grid.point(i);
            let dist = (x % period).min(period - (x % period));
            if dist <= margin {
                continue;
            }
            let w = sp.w.values[i];
            let err = (w * w - dw.values[i] - (v.values[i] - seed.energy)).abs();
            worst = worst.max(err);
            checked += 1;
        }
        assert!(checked > 4000, "mask too aggressive: {checked} points");
        assert!(worst < 1e-6, "W²−W′ reconstruction error {worst:.3e}");
    }

    /// The deformed superpotential W̃ = W + d/dx ln(I+λ) factorizes the
    /// deformed potential the same way: Ṽ = W̃² − W̃′ + E_seed.
    #[test]
    fn deformed_superpotential_factorizes_deformed_potential() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let step = deform_once(&v, &seed, &partner, 1.0).unwrap();
        let sp = superpotential(&seed);
        let shifted = step.running_integral.map("I+λ", |y| y + 1.0);
        let n = grid.len();
        let mut wt = Vec::with_capacity(n);
        for i in 0..n {
            let base = if sp.node_mask[i] { 0.0 } else { sp.w.values[i] };
            wt.push(base + seed.psi.values[i].powi(2) / shifted.values[i]);
        }
        let wt = SampledFunction::new(grid, "W~", wt);
        let dwt = derivative_1st(&wt);
        let period = lame_cfg().period();
        let mut worst = 0.0f64;
        for i in 0..n {
            let x = grid.point(i);
            let dist = (x % period).min(period - (x % period));
            if dist <= 0.5 {
                continue;
            }
            let lhs = wt.values[i] * wt.values[i] - dwt.values[i] + seed.energy;
            worst = worst.max((lhs - step.v_out.values[i]).abs());
        }
        assert!(worst < 1e-6, "W̃ factorization error {worst:.3e}");
    }

    #[test]
    fn wronskian_identity() {
        let grid = default_grid();
        let (_, seed, partner) = lame_inputs(grid);
        let w = wronskian(&seed, &partner);
        assert_eq!(w.values[0], 0.0, "both seeds vanish at the origin");
        let dw = derivative_1st(&w);
        let de = seed.energy - partner.energy;
        let mut worst = 0.0f64;
        for i in 0..grid.len() {
            let exact = de * seed.psi.values[i] * partner.psi.values[i];
            worst = worst.max((dw.values[i] - exact).abs());
        }
        assert!(worst < 1e-8, "Wronskian identity error {worst:.3e}");
    }

    #[test]
    fn lambda_validation() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        assert!(matches!(
            deform_once(&v, &seed, &partner, 0.0),
            Err(Error::NonpositiveLambda(_))
        ));
        assert!(matches!(
            deform_once(&v, &seed, &partner, -0.5),
            Err(Error::NonpositiveLambda(_))
        ));
        assert!(matches!(
            deform_once(&v, &seed, &partner, -2.0),
            Err(Error::LambdaSingularRange(_))
        ));
    }

    #[test]
    fn seed_must_vanish_at_origin() {
        let grid = default_grid();
        let cfg = lame_cfg();
        let states = band_edge_states(&cfg);
        let v = SampledFunction::from_fn(grid, "V", |x| crate::lame::lame_potential(&cfg, x));
        let bad_seed = StateSample::from_band_edge(&states[1], grid); // cn·dn, ψ(0) ≠ 0
        let partner = StateSample::from_band_edge(&states[3], grid);
        assert!(matches!(
            deform_once(&v, &bad_seed, &partner, 1.0),
            Err(Error::SeedBoundary { .. })
        ));
    }

    #[test]
    fn inputs_must_solve_the_potential() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let mut wrong = seed.clone();
        wrong.energy += 0.25;
        assert!(matches!(
            deform_once(&v, &wrong, &partner, 1.0),
            Err(Error::InconsistentInput { .. })
        ));
    }

    #[test]
    fn running_integral_grows_linearly() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let step = deform_once(&v, &seed, &partner, 1.0).unwrap();
        let i_run = &step.running_integral;
        assert_eq!(i_run.values[0], 0.0);
        for w in i_run.values.windows(2) {
            assert!(w[1] >= w[0]);
        }
        // least-squares slope over the last two quarters of the domain
        let slope = |lo: usize, hi: usize| {
            let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in lo..=hi {
                let (x, y) = (grid.point(i), i_run.values[i]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                n += 1.0;
            }
            (n * sxy - sx * sy) / (n * sxx - sx * sx)
        };
        let q3 = slope(grid.len() / 2, 3 * grid.len() / 4);
        let q4 = slope(3 * grid.len() / 4, grid.len() - 1);
        let rel = (q4 - q3).abs() / q3;
        assert!(rel < 0.02, "quarter slopes {q3} vs {q4}: {rel:.4}");
        assert!(q3 > 0.0);
    }

    #[test]
    fn correction_shrinks_like_one_over_lambda() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let dev = |lambda: f64| {
            let step = deform_once(&v, &seed, &partner, lambda).unwrap();
            step.v_out
                .values
                .iter()
                .zip(&v.values)
                .fold(0.0f64, |acc, (&a, &b)| acc.max((a - b).abs()))
        };
        let at_1 = dev(1.0);
        assert!(dev(1e6) < 1e-4 * at_1, "large-λ recovery");
        let mut prev = at_1;
        for lambda in [3.0, 10.0, 30.0, 100.0] {
            let d = dev(lambda);
            assert!(d < prev, "max|Ṽ−V| not decreasing at λ = {lambda}");
            prev = d;
        }
    }

    /// Rescaling the seed by c with λ → c²λ is an exact algebraic symmetry:
    /// the potential is untouched and the bound state just picks up 1/c.
    #[test]
    fn seed_rescaling_covariance() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let base = deform_once(&v, &seed, &partner, 1.0).unwrap();
        for c in [0.5, 2.0, 7.0] {
            let scaled = deform_once(&v, &seed.scaled(c), &partner, c * c).unwrap();
            for i in 0..grid.len() {
                assert!(
                    (scaled.v_out.values[i] - base.v_out.values[i]).abs() < 1e-10,
                    "potential changed under rescaling c = {c}"
                );
                assert!(
                    (c * scaled.state_bound.psi.values[i] - base.state_bound.psi.values[i]).abs()
                        < 1e-10,
                    "bound state not scaled by 1/c at c = {c}"
                );
            }
        }
    }

    #[test]
    fn two_step_chain_preserves_energies_and_continuity() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let chain = deform_twice(&v, &seed, &partner, 1.0, 1.0).unwrap();
        assert_eq!(chain.steps.len(), 2);
        let (bound, partner_out) = chain.final_states();
        // the second step seeds with ũ₃, so its bound output carries E₃
        assert_eq!(bound.energy, 4.5);
        assert_eq!(partner_out.energy, 3.0);
        for i in 0..grid.len() {
            assert_eq!(
                chain.steps[0].v_out.values[i], chain.steps[1].v_in.values[i],
                "chain potentials must connect pointwise"
            );
        }
    }

    #[test]
    fn larger_lambda_tracks_the_undeformed_states_closer() {
        let grid = default_grid();
        let (v, seed, partner) = lame_inputs(grid);
        let window = (4.0 * lame_cfg().period() / grid.spacing()).floor() as usize;
        let dev = |lambda: f64| {
            let chain = deform_twice(&v, &seed, &partner, lambda, lambda).unwrap();
            let (_, final_partner) = chain.final_states();
            crate::spectral::normalized_shape_deviation(&final_partner.psi, &seed.psi, window)
                .unwrap()
        };
        assert!(dev(10.0) < dev(1.0), "λ = 10 should sit closer to ψ₂");
    }
}
