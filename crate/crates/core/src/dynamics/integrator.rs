//! Time stepping for the truncated system `û_t = i n² û + iσ P_M N(u)`.
//!
//! Both schemes are Runge–Kutta in the nonlinear part and therefore commute
//! with linear changes of variables. That is what makes the coupled solve of
//! the low flow `u` and the difference flow `v` (driven by `N(u+v) − N(u)`)
//! agree with a single solve of `u + v` up to the stage-iteration tolerance.
//!
//! In the split scheme the Wick mean term `−2u∮|u|²` is not integrated: the
//! nonlinear substep conserves `∮|u|²`, so that term is the exact phase
//! rotation `e^{∓2i∮|u|²h}`, which commutes with the cubic substep. The plain
//! and Wick-ordered discrete flows are then related by the gauge exactly.

use num_complex::Complex64;

use super::config::{EvolutionConfig, Integrator};
use super::nonlinearity::{mean_square, CubicKernel};
use super::Equation;
use crate::error::{Error, Result};
use crate::spectral::{FourierState, Trajectory, Window};

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // √3 / 6
const GAUSS_A: [[f64; 2]; 2] = [[0.25, 0.25 - SQRT3_6], [0.25 + SQRT3_6, 0.25]];
const STAGE_TOL: f64 = 2e-15;
const STAGNATION_TOL: f64 = 1e-11;
const MAX_STAGE_ITERATIONS: usize = 60;

type Buf = Vec<Complex64>;

/// What the difference solve needs from one step of the driving solution:
/// the stage values, and for the split scheme the nonlinear substep's input
/// and its output before the Wick phase rotation.
#[derive(Default)]
pub(crate) struct LowRecord {
    stages: Vec<Buf>,
    start: Buf,
    end: Buf,
}

/// Right-hand side selector; `Difference` carries the record of the driving
/// low-frequency solution over the same step.
pub(crate) enum Rhs<'a> {
    Full,
    Difference(&'a LowRecord),
}

pub(crate) struct Stepper {
    kernel: CubicKernel,
    h: f64,
    half_phase: Buf,
    /// `iσ · coupling`
    factor: Complex64,
    /// Wick mean term evaluated inside the right-hand side (RK4) rather than
    /// applied as an exact phase after the nonlinear substep (split scheme).
    inline_wick: bool,
    rotate_wick: bool,
    integrator: Integrator,
    sum: Buf,
}

fn l2(v: &[Complex64]) -> f64 {
    mean_square(v).sqrt()
}

fn l2_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

impl Stepper {
    pub(crate) fn new(config: &EvolutionConfig, cutoff: usize, h: f64) -> Result<Self> {
        config.validate()?;
        let kernel = CubicKernel::new(cutoff, config.dealias)?;
        let m = cutoff as i64;
        let half_phase = (-m..=m)
            .map(|n| Complex64::from_polar(1.0, (n * n) as f64 * h * 0.5))
            .collect();
        let wick = config.equation == Equation::WickNls;
        let split = config.integrator == Integrator::StrangSplit;
        Ok(Self {
            kernel,
            h,
            half_phase,
            factor: Complex64::new(0.0, config.sign.value() * config.coupling),
            inline_wick: wick && !split,
            rotate_wick: wick && split,
            integrator: config.integrator,
            sum: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1],
        })
    }

    fn linear_half(&self, y: &mut [Complex64]) {
        for (c, p) in y.iter_mut().zip(&self.half_phase) {
            *c *= p;
        }
    }

    /// `e^{−2iσ·coupling·m·h}`: the exact flow of the Wick mean term over one
    /// step, `m` being conserved by the nonlinear substep.
    fn wick_rotation(&self, m: f64) -> Complex64 {
        (self.factor * (-2.0 * m * self.h)).exp()
    }

    fn eval(&mut self, rhs: &Rhs, stage: usize, y: &[Complex64], out: &mut [Complex64]) {
        match rhs {
            Rhs::Full => {
                self.kernel.cubic(y, out);
                if self.inline_wick {
                    let m2 = 2.0 * mean_square(y);
                    for (o, c) in out.iter_mut().zip(y) {
                        *o -= c * m2;
                    }
                }
            }
            Rhs::Difference(low) => {
                let u = &low.stages[stage];
                self.kernel.cubic_difference(u, y, out);
                if self.inline_wick {
                    for ((s, a), b) in self.sum.iter_mut().zip(u.iter()).zip(y) {
                        *s = a + b;
                    }
                    let total = 2.0 * mean_square(&self.sum);
                    let low_only = 2.0 * mean_square(u);
                    for ((o, s), a) in out.iter_mut().zip(&self.sum).zip(u.iter()) {
                        *o -= s * total - a * low_only;
                    }
                }
            }
        }
        for o in out.iter_mut() {
            *o *= self.factor;
        }
    }

    /// Advances `y` by one step; optionally records what a difference solve
    /// driven by this step needs.
    pub(crate) fn step(
        &mut self,
        y: &mut [Complex64],
        rhs: &Rhs,
        record: Option<&mut LowRecord>,
    ) -> std::result::Result<(), String> {
        match self.integrator {
            Integrator::StrangSplit => {
                self.linear_half(y);
                let start = y.to_vec();
                let stages = self.gauss_legendre(y, rhs)?;
                if let Some(rec) = record {
                    rec.stages = stages;
                    rec.start.clone_from(&start);
                    rec.end.clear();
                    rec.end.extend_from_slice(y);
                }
                if self.rotate_wick {
                    self.apply_wick_rotation(y, rhs, &start);
                }
                self.linear_half(y);
                Ok(())
            }
            Integrator::Rk4InteractionPicture => self.rk4_ip(y, rhs, record),
        }
    }

    /// For the full flow `y ← e^{iθ(m)}y`. For the difference flow with
    /// `U = u + v`, `v ← e^{iθ(m_U)}(u_end + v) − e^{iθ(m_u)}u_end`, which is
    /// the rotated `U` minus the rotated `u`.
    fn apply_wick_rotation(&mut self, y: &mut [Complex64], rhs: &Rhs, start: &[Complex64]) {
        match rhs {
            Rhs::Full => {
                let r = self.wick_rotation(mean_square(start));
                for c in y.iter_mut() {
                    *c *= r;
                }
            }
            Rhs::Difference(low) => {
                for ((s, a), b) in self.sum.iter_mut().zip(&low.start).zip(start) {
                    *s = a + b;
                }
                let r_total = self.wick_rotation(mean_square(&self.sum));
                let r_low = self.wick_rotation(mean_square(&low.start));
                for (c, e) in y.iter_mut().zip(&low.end) {
                    *c = r_total * *c + (r_total - r_low) * e;
                }
            }
        }
    }

    /// Solves the nonlinear substep by the two-stage Gauss-Legendre rule and
    /// returns its stage values.
    fn gauss_legendre(&mut self, y: &mut [Complex64], rhs: &Rhs) -> std::result::Result<Vec<Buf>, String> {
        let h = self.h;
        let len = y.len();
        let y0 = y.to_vec();
        let scale = l2(&y0);
        let zero = Complex64::new(0.0, 0.0);
        let mut k = [vec![zero; len], vec![zero; len]];
        let mut k_new = [vec![zero; len], vec![zero; len]];
        let mut ys = [vec![zero; len], vec![zero; len]];
        self.eval(rhs, 0, &y0, &mut k[0]);
        let (k0, k1) = k.split_at_mut(1);
        k1[0].copy_from_slice(&k0[0]);

        let fill_stages = |ys: &mut [Buf; 2], k: &[Buf; 2]| {
            for (i, yi) in ys.iter_mut().enumerate() {
                for j in 0..len {
                    yi[j] = y0[j] + h * (GAUSS_A[i][0] * k[0][j] + GAUSS_A[i][1] * k[1][j]);
                }
            }
        };

        let mut previous = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_STAGE_ITERATIONS {
            fill_stages(&mut ys, &k);
            for i in 0..2 {
                let (yi, ki) = (&ys[i], &mut k_new[i]);
                self.eval(rhs, i, yi, ki);
            }
            let change = h * l2_dist(&k_new[0], &k[0]).max(l2_dist(&k_new[1], &k[1]));
            std::mem::swap(&mut k, &mut k_new);
            if !change.is_finite() {
                return Err("non-finite stage values".into());
            }
            if change <= STAGE_TOL * scale
                || (change >= previous && change <= STAGNATION_TOL * scale)
            {
                converged = true;
                break;
            }
            previous = change;
        }
        if !converged {
            return Err("Gauss-Legendre stage iteration did not converge".into());
        }
        fill_stages(&mut ys, &k);
        for j in 0..len {
            y[j] = y0[j] + 0.5 * h * (k[0][j] + k[1][j]);
        }
        Ok(ys.into())
    }

    fn rk4_ip(
        &mut self,
        y: &mut [Complex64],
        rhs: &Rhs,
        record: Option<&mut LowRecord>,
    ) -> std::result::Result<(), String> {
        let h = self.h;
        let len = y.len();
        let zero = Complex64::new(0.0, 0.0);
        let y0 = y.to_vec();
        let mut ui = y0.clone();
        self.linear_half(&mut ui);

        let mut k1 = vec![zero; len];
        self.eval(rhs, 0, &y0, &mut k1);
        self.linear_half(&mut k1);

        let a2: Buf = ui.iter().zip(&k1).map(|(u, k)| u + 0.5 * h * k).collect();
        let mut k2 = vec![zero; len];
        self.eval(rhs, 1, &a2, &mut k2);

        let a3: Buf = ui.iter().zip(&k2).map(|(u, k)| u + 0.5 * h * k).collect();
        let mut k3 = vec![zero; len];
        self.eval(rhs, 2, &a3, &mut k3);

        let mut a4: Buf = ui.iter().zip(&k3).map(|(u, k)| u + h * k).collect();
        self.linear_half(&mut a4);
        let mut k4 = vec![zero; len];
        self.eval(rhs, 3, &a4, &mut k4);

        for j in 0..len {
            y[j] = ui[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j]);
        }
        self.linear_half(y);
        for j in 0..len {
            y[j] += h / 6.0 * k4[j];
        }
        if let Some(rec) = record {
            rec.stages = vec![y0, a2, a3, a4];
        }
        Ok(())
    }
}

/// `û(n) ↦ e^{in²t} û(n)`, the flow of `S(t) = e^{−i∂ₓ²t}`; advances the time stamp.
pub fn linear_propagate(state: &FourierState, t: f64) -> FourierState {
    state
        .map_modes(|n, c| c * Complex64::from_polar(1.0, (n * n) as f64 * t))
        .with_time(state.time() + t)
}

fn blow_up(time: f64, reason: String, last: &[Complex64], cutoff: usize) -> Error {
    Error::BlowUp {
        time,
        reason,
        last_state: Box::new(
            FourierState::from_coefficients(cutoff, time, last.to_vec()).expect("length preserved"),
        ),
    }
}

fn is_finite(v: &[Complex64]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// One step of size `config.dt`.
pub fn step(state: &FourierState, config: &EvolutionConfig) -> Result<FourierState> {
    let mut stepper = Stepper::new(config, state.cutoff(), config.dt)?;
    let mut y = state.coefficients().to_vec();
    stepper
        .step(&mut y, &Rhs::Full, None)
        .map_err(|r| blow_up(state.time(), r, state.coefficients(), state.cutoff()))?;
    if !is_finite(&y) {
        return Err(blow_up(state.time(), "non-finite coefficient".into(), state.coefficients(), state.cutoff()));
    }
    FourierState::from_coefficients(state.cutoff(), state.time() + config.dt, y)
}

/// Number of integrator steps and their size for an interval of length `span`:
/// the step count is a multiple of `record_every` and the size is within one
/// rounding of `config.dt`, so the final time is hit exactly.
pub fn step_plan(span: f64, config: &EvolutionConfig) -> (usize, f64) {
    let r = config.record_every;
    let records = ((span / (config.dt * r as f64)) - 1e-9).ceil().max(1.0) as usize;
    let steps = records * r;
    (steps, span / steps as f64)
}

/// Integrates from `state.time()` to `t_final`, recording every
/// `config.record_every` steps (the initial state included).
pub fn evolve(state: &FourierState, t_final: f64, config: &EvolutionConfig) -> Result<Trajectory> {
    config.validate()?;
    let span = t_final - state.time();
    if !(span > 0.0) {
        return Err(Error::invalid(format!(
            "t_final = {t_final} must exceed the start time {}",
            state.time()
        )));
    }
    let (steps, h) = step_plan(span, config);
    evolve_steps(state, h, steps, config)
}

/// `steps` steps of exact size `h`.
pub fn evolve_steps(
    state: &FourierState,
    h: f64,
    steps: usize,
    config: &EvolutionConfig,
) -> Result<Trajectory> {
    let cutoff = state.cutoff();
    let r = config.record_every;
    let mut stepper = Stepper::new(config, cutoff, h)?;
    let t0 = state.time();
    let mut y = state.coefficients().to_vec();
    let mut last = y.clone();
    let mut states = Vec::with_capacity(steps / r + 1);
    states.push(state.clone());
    for k in 1..=steps {
        last.copy_from_slice(&y);
        let t_prev = t0 + (k - 1) as f64 * h;
        stepper
            .step(&mut y, &Rhs::Full, None)
            .map_err(|reason| blow_up(t_prev, reason, &last, cutoff))?;
        if !is_finite(&y) {
            return Err(blow_up(t_prev, "non-finite coefficient".into(), &last, cutoff));
        }
        if k % r == 0 {
            states.push(FourierState::from_coefficients(cutoff, t0 + k as f64 * h, y.clone())?);
        }
    }
    Trajectory::new(states, h * r as f64, Window::default())
}

/// Solves `i v_t − v_xx ± (N(u + v) − N(u)) = 0`, `v(t_start) = psi`, where
/// `u` is the supplied trajectory, which must be recorded at every integrator
/// step (its spacing is used as the step size).
pub fn evolve_difference(
    low: &Trajectory,
    psi: &FourierState,
    config: &EvolutionConfig,
) -> Result<Trajectory> {
    let cutoff = low.cutoff();
    if psi.cutoff() != cutoff {
        return Err(Error::CutoffMismatch {
            expected: cutoff,
            found: psi.cutoff(),
        });
    }
    if (psi.time() - low.t_start()).abs() > 1e-9 * (1.0 + low.t_start().abs()) {
        return Err(Error::TimeMismatch {
            expected: low.t_start(),
            found: psi.time(),
        });
    }
    let h = low.dt();
    let mut stepper = Stepper::new(config, cutoff, h)?;
    let mut v = psi.coefficients().to_vec();
    let mut last = v.clone();
    let mut low_record = LowRecord::default();
    let mut states = Vec::with_capacity(low.len());
    states.push(psi.clone().with_time(low.t_start()));
    for pair in low.states().windows(2) {
        let (start, end) = (&pair[0], &pair[1]);
        let mut u = start.coefficients().to_vec();
        stepper
            .step(&mut u, &Rhs::Full, Some(&mut low_record))
            .map_err(|reason| blow_up(start.time(), reason, start.coefficients(), cutoff))?;
        last.copy_from_slice(&v);
        stepper
            .step(&mut v, &Rhs::Difference(&low_record), None)
            .map_err(|reason| blow_up(start.time(), reason, &last, cutoff))?;
        if !is_finite(&v) {
            return Err(blow_up(start.time(), "non-finite coefficient".into(), &last, cutoff));
        }
        states.push(FourierState::from_coefficients(cutoff, end.time(), v.clone())?);
    }
    Trajectory::new(states, h, low.window())
}
