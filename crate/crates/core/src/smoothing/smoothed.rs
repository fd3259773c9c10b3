use crate::error::{invalid, Error, Result};
use crate::ou::kernel::ln_kernel_parts;
use crate::ou::KernelPoint;
use crate::schedule::AnnulusSchedule;
use crate::smoothing::EmpiricalSample;

/// Mixture `f(y) = (1/n) Σ p_{T_i}(X_i, y)` of Mehler kernels launched from
/// the atoms `X_i` with per-atom times `T_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedEmpirical {
    d: usize,
    atoms: Vec<f64>,
    norms_sq: Vec<f64>,
    times: Vec<f64>,
    schedule: Option<AnnulusSchedule>,
}

/// `T_i = t_k` for `X_i ∈ D_k`; every atom must lie in the open ball `B_R`.
pub fn assign_times(sample: &EmpiricalSample, schedule: &AnnulusSchedule) -> Result<SmoothedEmpirical> {
    if sample.dim() != schedule.d {
        return Err(Error::DimensionMismatch { expected: schedule.d, found: sample.dim() });
    }
    let mut times = Vec::with_capacity(sample.len());
    for i in 0..sample.len() {
        let r = sample.norm(i);
        let t = schedule
            .time_of(r)
            .ok_or_else(|| invalid(format!("atom {i} has |x| = {r} ≥ R = {}; localize first", schedule.radius)))?;
        times.push(t);
    }
    let mut sm = SmoothedEmpirical::from_parts(sample.dim(), sample.points().to_vec(), times)?;
    sm.schedule = Some(schedule.clone());
    Ok(sm)
}

impl SmoothedEmpirical {
    /// Atoms with explicit times, not tied to a schedule.
    pub fn from_parts(d: usize, atoms: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if d == 0 || atoms.len() != times.len() * d || times.is_empty() {
            return Err(Error::DimensionMismatch { expected: times.len() * d, found: atoms.len() });
        }
        if times.iter().any(|t| !(*t >= 0.0)) {
            return Err(invalid("times must be ≥ 0"));
        }
        let norms_sq = atoms.chunks(d).map(|x| x.iter().map(|v| v * v).sum()).collect();
        Ok(Self { d, atoms, norms_sq, times, schedule: None })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.d..(i + 1) * self.d]
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn norm_sq(&self, i: usize) -> f64 {
        self.norms_sq[i]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn schedule(&self) -> Option<&AnnulusSchedule> {
        self.schedule.as_ref()
    }

    fn check_point(&self, y: &KernelPoint) -> Result<()> {
        if y.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: y.dim() });
        }
        Ok(())
    }

    /// `(1/n) Σ_i p_{T_i + s}(X_i, y)`, log-sum-exp stabilized.
    fn mixture(&self, y: &KernelPoint, s: f64) -> Result<f64> {
        self.check_point(y)?;
        if self.times.iter().any(|t| t + s == 0.0) {
            return Err(invalid("a zero smoothing time has no density"));
        }
        let yy = y.norm_sq();
        let logs: Vec<f64> = (0..self.len())
            .map(|i| {
                let xy: f64 = self.atom(i).iter().zip(y.coords()).map(|(a, b)| a * b).sum();
                ln_kernel_parts(self.d, self.times[i] + s, self.norms_sq[i], yy, xy)
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(top.exp() * logs.iter().map(|l| (l - top).exp()).sum::<f64>() / self.len() as f64)
    }

    /// Density `f(y)` with respect to `μ`.
    pub fn density_eval(&self, y: &KernelPoint) -> Result<f64> {
        self.mixture(y, 0.0)
    }

    /// `P_s g(y) = (1/n) Σ [p_{s+T_i}(X_i, y) - 1]`, with `g = f - 1`.
    pub fn fluctuation_eval(&self, y: &KernelPoint, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(invalid(format!("s must be ≥ 0, got {s}")));
        }
        if s.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.mixture(y, s)? - 1.0)
    }
}
