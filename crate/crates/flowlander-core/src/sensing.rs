//! Flow-divergence observables and filtered output-rate estimation.
//!
//! Each downward-tilted camera measures the divergence of the optical flow it
//! sees, which for a flat surface equals the ratio of clearance rate to
//! clearance: `theta = ḣ/h`. The ventral flow `Ẏ/h` comes from the same
//! imagery. Three scalar outputs feed the controller:
//!
//! ```text
//! y1 = (θR + θL)/2    average divergence   → thrust channel
//! y2 =  θR − θL       divergence split     → roll channel
//! y3 =  Ẏ/h           ventral flow         → lateral-drift channel
//! ```
//!
//! Output rates are produced by backward differences smoothed with a
//! first-order low-pass, mirroring how flow derivatives are obtained from a
//! camera stream.

use crate::dynamics::{Clearances, VehicleState};
use crate::Error;

/// Instantaneous visual observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observations {
    /// Left-camera flow divergence (1/s).
    pub theta_l: f64,
    /// Right-camera flow divergence (1/s).
    pub theta_r: f64,
    /// Ventral flow (1/s).
    pub theta_y: f64,
    /// Mean divergence (1/s).
    pub y1: f64,
    /// Divergence split (1/s).
    pub y2: f64,
    /// Drift output, equal to the ventral flow (1/s).
    pub y3: f64,
}

impl Observations {
    pub fn is_finite(&self) -> bool {
        self.theta_l.is_finite()
            && self.theta_r.is_finite()
            && self.theta_y.is_finite()
            && self.y1.is_finite()
            && self.y2.is_finite()
            && self.y3.is_finite()
    }
}

/// Computes the flow observables from the true clearance geometry.
///
/// Divergences are undefined once any clearance reaches zero, so this fails
/// with [`Error::ObservationUnavailable`] instead of dividing by zero.
pub fn observe(state: &VehicleState, clearances: &Clearances) -> Result<Observations, Error> {
    if !clearances.is_finite() || clearances.h <= 0.0 || clearances.hl <= 0.0 || clearances.hr <= 0.0
    {
        return Err(Error::ObservationUnavailable);
    }
    let theta_l = clearances.hldot / clearances.hl;
    let theta_r = clearances.hrdot / clearances.hr;
    let theta_y = state.ydot / clearances.h;
    Ok(Observations {
        theta_l,
        theta_r,
        theta_y,
        y1: 0.5 * (theta_r + theta_l),
        y2: theta_r - theta_l,
        y3: theta_y,
    })
}

/// Time derivatives of the three controller outputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutputRates {
    pub y1dot: f64,
    pub y2dot: f64,
    pub y3dot: f64,
}

/// Backward-difference output-rate estimator with a first-order low-pass.
///
/// The first sample only primes the differencer, so the estimate is zero
/// until two samples have arrived; [`RateEstimator::is_warm`] gates
/// controllers that must not act on the cold-start zeros.
#[derive(Debug, Clone)]
pub struct RateEstimator {
    /// Low-pass time constant (s); zero disables smoothing.
    tau_f: f64,
    prev: Option<[f64; 3]>,
    filt: [f64; 3],
    samples: u32,
}

impl RateEstimator {
    pub fn new(tau_f: f64) -> Self {
        Self { tau_f, prev: None, filt: [0.0; 3], samples: 0 }
    }

    /// True once enough samples have arrived for a meaningful rate.
    pub fn is_warm(&self) -> bool {
        self.samples >= 2
    }

    /// Ingests one observation and returns the smoothed output rates.
    pub fn estimate_output_rates(&mut self, obs: &Observations, dt: f64) -> OutputRates {
        debug_assert!(dt > 0.0 && dt.is_finite());
        let y = [obs.y1, obs.y2, obs.y3];
        self.samples = self.samples.saturating_add(1);
        if let Some(prev) = self.prev {
            let alpha = dt / (self.tau_f + dt);
            for i in 0..3 {
                let raw = (y[i] - prev[i]) / dt;
                self.filt[i] += alpha * (raw - self.filt[i]);
            }
        }
        self.prev = Some(y);
        OutputRates { y1dot: self.filt[0], y2dot: self.filt[1], y3dot: self.filt[2] }
    }
}
