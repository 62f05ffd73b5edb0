use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{
    enhancement_ratio, fisher_from_distribution, EstimationError, FisherEstimate, P_FLOOR,
};
use crate::quantum_stats::{
    bs_point, click_distribution, coherent_output_means, coherent_pair_table,
    hom_pair_distribution, BsPoint, ClickDistribution, CoherentInput, CoherentMeans, L_MAX,
};
use crate::tmm::{
    response_derivatives, stack_response, LayerStack, Polarization, ResponseDerivatives,
    StackResponse, DEFAULT_NS_STEP,
};

/// Points of the coarse φ_αβ grid over `[−π, π)`.
pub const PHASE_SCAN_POINTS: usize = 721;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Hom,
    Classical,
}

/// Which φ_tr the decomposition partials are evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseAssumption {
    /// The stack's own φ_tr.
    Actual,
    /// φ_tr = π/2 with the stack's T and R.
    Quadrature,
}

/// `I_τρ` over the ordered basis `(T, R, φ_tr)` and the response
/// derivatives that contract it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub matrix: [[f64; 3]; 3],
    pub derivs: [f64; 3],
}

impl Decomposition {
    /// `Σ_τρ I_τρ (∂τ/∂n_s)(∂ρ/∂n_s)`.
    pub fn contract(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                total += self.matrix[i][j] * self.derivs[i] * self.derivs[j];
            }
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub n_s: f64,
    pub i_hom: f64,
    pub i_classical: f64,
    pub phi_ab_used: f64,
    /// `None` where the classical information is below the floor.
    pub g: Option<f64>,
    pub decomposition: [[f64; 3]; 3],
    pub derivs: [f64; 3],
    pub near_singular: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    pub phases: Vec<f64>,
    pub information: Vec<f64>,
    /// Refined local maxima, in increasing phase.
    pub peaks: Vec<(f64, f64)>,
}

/// Stack plus illumination: everything needed to evaluate outcome
/// distributions as functions of n_s.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    pub stack: LayerStack,
    pub wavelength_nm: f64,
    pub theta_deg: f64,
    pub pol: Polarization,
    pub fd_step: f64,
    pub alpha_sq: f64,
    pub beta_sq: f64,
}

impl Interferometer {
    pub fn new(stack: LayerStack, wavelength_nm: f64, theta_deg: f64) -> Self {
        Self {
            stack,
            wavelength_nm,
            theta_deg,
            pol: Polarization::Tm,
            fd_step: DEFAULT_NS_STEP,
            alpha_sq: 1.0,
            beta_sq: 1.0,
        }
    }

    pub fn with_wavelength(&self, wavelength_nm: f64) -> Self {
        Self {
            wavelength_nm,
            ..self.clone()
        }
    }

    pub fn coherent_input(&self, phi_ab: f64) -> CoherentInput {
        CoherentInput {
            alpha_sq: self.alpha_sq,
            beta_sq: self.beta_sq,
            phi_ab,
        }
    }

    pub fn response(&self, n_s: f64) -> Result<StackResponse, EstimationError> {
        Ok(stack_response(
            &self.stack.with_sample_n(n_s),
            self.wavelength_nm,
            self.theta_deg,
            self.pol,
        )?)
    }

    pub fn bs_point(&self, n_s: f64) -> Result<BsPoint, EstimationError> {
        Ok(bs_point(&self.response(n_s)?)?)
    }

    pub fn derivatives(&self, n_s: f64) -> Result<ResponseDerivatives, EstimationError> {
        Ok(response_derivatives(
            &self.stack.with_sample_n(n_s),
            self.wavelength_nm,
            self.theta_deg,
            self.pol,
            self.fd_step,
        )?)
    }

    pub fn click_distribution(&self, n_s: f64) -> Result<ClickDistribution, EstimationError> {
        Ok(click_distribution(&hom_pair_distribution(
            &self.bs_point(n_s)?,
        )?))
    }

    /// The six distinct two-photon outcomes.
    pub fn pair_outcomes(&self, n_s: f64) -> Result<[f64; 6], EstimationError> {
        Ok(hom_pair_distribution(&self.bs_point(n_s)?)?.outcomes())
    }

    pub fn coherent_means(&self, n_s: f64, phi_ab: f64) -> Result<CoherentMeans, EstimationError> {
        Ok(coherent_output_means(
            &self.bs_point(n_s)?,
            &self.coherent_input(phi_ab),
        )?)
    }

    /// Information in the three-outcome click statistics.
    pub fn fisher_hom(&self, n_s: f64) -> Result<FisherEstimate, EstimationError> {
        fisher_from_distribution(
            |x| Ok(self.click_distribution(x)?.as_array().to_vec()),
            n_s,
            self.fd_step,
        )
    }

    /// Information in the unmerged two-photon outcomes.
    pub fn fisher_hom_pairs(&self, n_s: f64) -> Result<FisherEstimate, EstimationError> {
        fisher_from_distribution(|x| Ok(self.pair_outcomes(x)?.to_vec()), n_s, self.fd_step)
    }

    /// Product-Poisson information `Σ_j (∂μ_j)²/μ_j`.
    pub fn fisher_classical(&self, n_s: f64, phi_ab: f64) -> Result<f64, EstimationError> {
        let points = self.stencil(n_s)?;
        self.classical_on_stencil(&points, phi_ab)
    }

    /// Beamsplitter points at `n_s`, `n_s + h`, `n_s − h`.
    fn stencil(&self, n_s: f64) -> Result<[BsPoint; 3], EstimationError> {
        let h = self.fd_step;
        Ok([
            self.bs_point(n_s)?,
            self.bs_point(n_s + h)?,
            self.bs_point(n_s - h)?,
        ])
    }

    fn classical_on_stencil(
        &self,
        points: &[BsPoint; 3],
        phi_ab: f64,
    ) -> Result<f64, EstimationError> {
        let input = self.coherent_input(phi_ab);
        let [c, p, m] = [
            coherent_output_means(&points[0], &input)?,
            coherent_output_means(&points[1], &input)?,
            coherent_output_means(&points[2], &input)?,
        ];
        let h = self.fd_step;
        let mut total = 0.0;
        for (mu, (hi, lo)) in [(c.mu1, (p.mu1, m.mu1)), (c.mu2, (p.mu2, m.mu2))] {
            if mu >= P_FLOOR {
                let d = (hi - lo) / (2.0 * h);
                total += d * d / mu;
            }
        }
        Ok(total)
    }

    /// The same information from the photon-number table truncated at
    /// `l_max` per port.
    pub fn fisher_classical_truncated(
        &self,
        n_s: f64,
        phi_ab: f64,
        l_max: u32,
    ) -> Result<FisherEstimate, EstimationError> {
        fisher_from_distribution(
            |x| Ok(coherent_pair_table(&self.coherent_means(x, phi_ab)?, l_max)),
            n_s,
            self.fd_step,
        )
    }

    /// Information of the equal mixture of the φ_αβ = ±π/2 photon-number
    /// distributions.
    pub fn mixed_phase_classical_fisher(
        &self,
        n_s: f64,
    ) -> Result<FisherEstimate, EstimationError> {
        self.mixture_fisher(n_s, &[FRAC_PI_2, -FRAC_PI_2])
    }

    /// Information of an equal mixture over several φ_αβ values.
    pub fn mixture_fisher(
        &self,
        n_s: f64,
        phases: &[f64],
    ) -> Result<FisherEstimate, EstimationError> {
        let weight = 1.0 / phases.len() as f64;
        fisher_from_distribution(
            |x| {
                let mut mix = vec![0.0; ((L_MAX + 1) * (L_MAX + 1)) as usize];
                for &phi in phases {
                    let table = coherent_pair_table(&self.coherent_means(x, phi)?, L_MAX);
                    for (m, p) in mix.iter_mut().zip(table) {
                        *m += weight * p;
                    }
                }
                Ok(mix)
            },
            n_s,
            self.fd_step,
        )
    }

    /// Chain-rule decomposition of the information of `scheme`.
    pub fn fisher_decomposition(
        &self,
        n_s: f64,
        scheme: Scheme,
        phase: PhaseAssumption,
        phi_ab: f64,
    ) -> Result<Decomposition, EstimationError> {
        let bs = self.bs_point(n_s)?;
        let phi = match phase {
            PhaseAssumption::Actual => bs.phi_tr,
            PhaseAssumption::Quadrature => FRAC_PI_2,
        };
        let (values, grads) = match scheme {
            Scheme::Hom => click_partials(bs.t, bs.r, phi),
            Scheme::Classical => {
                let input = self.coherent_input(phi_ab);
                let (mut v, mut g) = poisson_mean_partials(bs.t, bs.r, phi, &input);
                dark_port_limit(bs.t, bs.r, phi, &input, &mut v, &mut g);
                (v.to_vec(), g.to_vec())
            }
        };
        Ok(Decomposition {
            matrix: information_matrix(&values, &grads),
            derivs: self.derivatives(n_s)?.as_array(),
        })
    }

    pub fn fisher_report(&self, n_s: f64, phi_ab: f64) -> Result<FisherReport, EstimationError> {
        let hom = self.fisher_hom(n_s)?;
        let i_classical = self.fisher_classical(n_s, phi_ab)?;
        let dec = self.fisher_decomposition(n_s, Scheme::Hom, PhaseAssumption::Actual, phi_ab)?;
        Ok(FisherReport {
            n_s,
            i_hom: hom.information,
            i_classical,
            phi_ab_used: phi_ab,
            g: enhancement_ratio(hom.information, i_classical).ok(),
            decomposition: dec.matrix,
            derivs: dec.derivs,
            near_singular: hom.near_singular,
        })
    }

    /// Classical information over φ_αβ on a uniform grid of `[−π, π)`, with
    /// every local maximum refined on a second grid spanning one coarse step
    /// either side.
    pub fn phase_scan(&self, n_s: f64, points: usize) -> Result<PhaseScan, EstimationError> {
        let stencil = self.stencil(n_s)?;
        let step = 2.0 * PI / points as f64;
        let phases: Vec<f64> = (0..points).map(|i| -PI + step * i as f64).collect();
        let information = phases
            .iter()
            .map(|&p| self.classical_on_stencil(&stencil, p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut peaks = Vec::new();
        for i in 0..points {
            let prev = information[(i + points - 1) % points];
            let next = information[(i + 1) % points];
            if information[i] > prev && information[i] >= next {
                let fine: Vec<f64> = (0..points)
                    .map(|k| phases[i] - step + 2.0 * step * k as f64 / (points - 1) as f64)
                    .collect();
                let mut best = (phases[i], information[i]);
                for p in fine {
                    let v = self.classical_on_stencil(&stencil, p)?;
                    if v > best.1 {
                        best = (p, v);
                    }
                }
                peaks.push((crate::tmm::wrap_phase(best.0), best.1));
            }
        }
        peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(PhaseScan {
            phases,
            information,
            peaks,
        })
    }
}

/// `I_τρ = Σ_m ∂_τP_m ∂_ρP_m / P_m`, skipping outcomes below the floor.
fn information_matrix(values: &[f64], grads: &[[f64; 3]]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (p, g) in values.iter().zip(grads) {
        if *p < P_FLOOR {
            continue;
        }
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += g[i] * g[j] / p;
            }
        }
    }
    out
}

/// Click probabilities and their partials in `(T, R, φ_tr)`.
pub(crate) fn click_partials(t: f64, r: f64, phi: f64) -> (Vec<f64>, Vec<[f64; 3]>) {
    let (c2, s2) = ((2.0 * phi).cos(), (2.0 * phi).sin());
    let p11 = t * t + r * r + 2.0 * t * r * c2;
    let d11 = [
        2.0 * t + 2.0 * r * c2,
        2.0 * r + 2.0 * t * c2,
        -4.0 * t * r * s2,
    ];
    let p0 = 1.0 - 2.0 * (t + r) + p11 + 4.0 * t * r;
    let d0 = [-2.0 + d11[0] + 4.0 * r, -2.0 + d11[1] + 4.0 * t, d11[2]];
    let p1 = 2.0 * (t + r) - 4.0 * t * r - 2.0 * p11;
    let d1 = [
        2.0 - 4.0 * r - 2.0 * d11[0],
        2.0 - 4.0 * t - 2.0 * d11[1],
        -2.0 * d11[2],
    ];
    (vec![p0, p1, p11], vec![d0, d1, d11])
}

/// A mean that vanishes because `μ = (√(aT) − √(bR))²` still carries the
/// finite information `4 ∂√μ ∂√μ`; it is rewritten as value 1 with gradient
/// `2 ∂√μ` so the generic sum keeps it.
fn dark_port_limit(
    t: f64,
    r: f64,
    phi: f64,
    input: &CoherentInput,
    values: &mut [f64; 2],
    grads: &mut [[f64; 3]; 2],
) {
    for (j, arg) in [phi - input.phi_ab, phi + input.phi_ab]
        .into_iter()
        .enumerate()
    {
        if values[j] >= P_FLOOR || (arg.cos() + 1.0).abs() > 1e-12 || t <= 0.0 || r <= 0.0 {
            continue;
        }
        values[j] = 1.0;
        grads[j] = [
            input.alpha_sq.sqrt() / t.sqrt(),
            -input.beta_sq.sqrt() / r.sqrt(),
            0.0,
        ];
    }
}

/// Poisson means and their partials in `(T, R, φ_tr)`. For product-Poisson
/// statistics the information matrix takes the same `Σ_j ∂μ_j ∂μ_j / μ_j`
/// form as a finite distribution.
pub(crate) fn poisson_mean_partials(
    t: f64,
    r: f64,
    phi: f64,
    input: &CoherentInput,
) -> ([f64; 2], [[f64; 3]; 2]) {
    let (a, b) = (input.alpha_sq, input.beta_sq);
    let amp = (a * b).sqrt();
    let tr = (t * r).sqrt();
    let mut values = [0.0; 2];
    let mut grads = [[0.0; 3]; 2];
    for (j, arg) in [phi - input.phi_ab, phi + input.phi_ab]
        .into_iter()
        .enumerate()
    {
        let (c, s) = (arg.cos(), arg.sin());
        values[j] = t * a + r * b + 2.0 * amp * tr * c;
        grads[j] = [
            a + amp * (r / t).sqrt() * c,
            b + amp * (t / r).sqrt() * c,
            -2.0 * amp * tr * s,
        ];
    }
    (values, grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::precision_bound;
    use crate::quantum_stats::BsPoint;
    use crate::tmm::{calibrate_stack, CalibrationBounds, CalibrationTarget};
    use approx::assert_relative_eq;

    fn sensor() -> Interferometer {
        let cal = calibrate_stack(
            &LayerStack::default_sensor(),
            &CalibrationTarget::default(),
            &CalibrationBounds::default(),
        )
        .unwrap();
        Interferometer::new(cal.stack, 800.0, 70.0)
    }

    /// Central differences of a model in one of its three parameters.
    fn fd_partials<F: Fn([f64; 3]) -> Vec<f64>>(f: F, x: [f64; 3], h: f64) -> Vec<[f64; 3]> {
        let n = f(x).len();
        let mut out = vec![[0.0; 3]; n];
        for k in 0..3 {
            let (mut hi, mut lo) = (x, x);
            hi[k] += h;
            lo[k] -= h;
            let (a, b) = (f(hi), f(lo));
            for m in 0..n {
                out[m][k] = (a[m] - b[m]) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn analytic_partials_match_finite_differences() {
        let x = [0.21, 0.17, -1.4];
        let click = |v: [f64; 3]| {
            let bs = BsPoint::new_unchecked(v[0], v[1], v[2]);
            click_distribution(&hom_pair_distribution(&bs).unwrap())
                .as_array()
                .to_vec()
        };
        let (_, grads) = click_partials(x[0], x[1], x[2]);
        for (a, b) in grads.iter().zip(fd_partials(click, x, 1e-5)) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-8, "{a:?} {b:?}");
            }
        }
        let input = CoherentInput::with_phase(0.7);
        let means = |v: [f64; 3]| {
            let m =
                coherent_output_means(&BsPoint::new_unchecked(v[0], v[1], v[2]), &input).unwrap();
            vec![m.mu1, m.mu2]
        };
        let (_, grads) = poisson_mean_partials(x[0], x[1], x[2], &input);
        for (a, b) in grads.iter().zip(fd_partials(means, x, 1e-5)) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-8, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn decomposition_contracts_to_direct_information() {
        let s = sensor();
        for n_s in [1.26, 1.29, 1.305, 1.315, 1.33] {
            let direct = s.fisher_hom(n_s).unwrap().information;
            let dec = s
                .fisher_decomposition(n_s, Scheme::Hom, PhaseAssumption::Actual, FRAC_PI_2)
                .unwrap();
            assert_relative_eq!(dec.contract(), direct, max_relative = 1e-6);

            let direct = s.fisher_classical(n_s, FRAC_PI_2).unwrap();
            let dec = s
                .fisher_decomposition(n_s, Scheme::Classical, PhaseAssumption::Actual, FRAC_PI_2)
                .unwrap();
            assert_relative_eq!(dec.contract(), direct, max_relative = 1e-6);
            for i in 0..3 {
                assert!(dec.matrix[i][i] >= 0.0);
            }
        }
    }

    #[test]
    fn classical_cross_term_vanishes_in_quadrature() {
        let s = sensor();
        for n_s in [1.25, 1.28, 1.3, 1.31, 1.32, 1.34] {
            let dec = s
                .fisher_decomposition(
                    n_s,
                    Scheme::Classical,
                    PhaseAssumption::Quadrature,
                    FRAC_PI_2,
                )
                .unwrap();
            assert!(dec.matrix[0][1].abs() < 1e-9, "{}", dec.matrix[0][1]);
        }
    }

    #[test]
    fn vanishing_mean_keeps_its_limit() {
        let input = CoherentInput::with_phase(FRAC_PI_2);
        let (t, r) = (0.4, 0.4);
        let (mut v, mut g) = poisson_mean_partials(t, r, FRAC_PI_2, &input);
        assert!(v[1] < P_FLOOR);
        dark_port_limit(t, r, FRAC_PI_2, &input, &mut v, &mut g);
        let m = information_matrix(&v, &g);
        assert!(m[0][1].abs() < 1e-12);
        // the same matrix slightly off balance, where nothing is floored
        let (v2, g2) = poisson_mean_partials(t, r * (1.0 + 1e-3), FRAC_PI_2, &input);
        let m2 = information_matrix(&v2, &g2);
        assert_relative_eq!(m[0][0], m2[0][0], max_relative = 1e-6);
    }

    #[test]
    fn closed_form_matches_truncated_poisson() {
        let s = sensor();
        for n_s in [1.27, 1.3, 1.325] {
            for phi in [FRAC_PI_2, 0.3, -2.0] {
                let closed = s.fisher_classical(n_s, phi).unwrap();
                let table = s.fisher_classical_truncated(n_s, phi, L_MAX).unwrap();
                assert_relative_eq!(closed, table.information, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn merging_outcomes_loses_information() {
        let s = sensor();
        for i in 0..=18 {
            let n_s = 1.25 + 0.005 * i as f64;
            let click = s.fisher_hom(n_s).unwrap().information;
            let pairs = s.fisher_hom_pairs(n_s).unwrap().information;
            assert!(click <= pairs * (1.0 + 1e-9), "{n_s}: {click} > {pairs}");
        }
    }

    #[test]
    fn phase_mixture_does_not_help() {
        let s = sensor();
        for i in 0..=9 {
            let n_s = 1.25 + 0.01 * i as f64;
            let mixed = s.mixed_phase_classical_fisher(n_s).unwrap().information;
            let fixed = s.fisher_classical(n_s, FRAC_PI_2).unwrap();
            assert!(mixed <= fixed * (1.0 + 1e-9));
            let same = s
                .mixture_fisher(n_s, &[FRAC_PI_2, FRAC_PI_2])
                .unwrap()
                .information;
            assert_relative_eq!(same, fixed, max_relative = 1e-8);
        }
    }

    #[test]
    fn flat_stack_carries_no_information() {
        // a zero-thickness sample leaves the response independent of n_s
        let stack = LayerStack::dual_kretschmann(20.0, 0.0, 1.31).unwrap();
        let s = Interferometer::new(stack, 800.0, 70.0);
        assert!(s.fisher_hom(1.31).unwrap().information < 1e-9);
        assert!(s.fisher_classical(1.31, FRAC_PI_2).unwrap() < 1e-9);
    }

    #[test]
    fn bound_near_the_dip() {
        let s = sensor();
        let best = (0..=300)
            .map(|i| s.fisher_hom(1.30 + 1e-4 * i as f64).unwrap().information)
            .fold(0.0, f64::max);
        let bound = precision_bound(best);
        assert!((0.011..=0.020).contains(&bound), "{bound}");
    }

    #[test]
    fn phase_scan_peaks_are_symmetric() {
        let s = sensor();
        let scan = s.phase_scan(1.32, PHASE_SCAN_POINTS).unwrap();
        assert_eq!(scan.phases.len(), PHASE_SCAN_POINTS);
        assert_eq!(scan.peaks.len(), 2);
        assert_relative_eq!(scan.peaks[0].0, -scan.peaks[1].0, epsilon = 1e-3);
        // refinement never loses to the coarse grid or to the quadrature phase
        let coarse = scan.information.iter().cloned().fold(0.0, f64::max);
        assert!(scan.peaks[1].1 >= coarse);
        assert!(scan.peaks[1].1 >= s.fisher_classical(1.32, FRAC_PI_2).unwrap());
    }
}
