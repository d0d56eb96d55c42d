use std::time::Duration;

use crate::error::{Error, Result};
use crate::parallel::WorkerPriority;

/// Keeps the long-run active fraction of a run near `duty_cycle` by idling
/// after each sweep burst.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrottleConfig {
    duty_cycle: f64,
    pub worker_priority: WorkerPriority,
}

impl Default for ThrottleConfig {
    fn default() -> Self {
        ThrottleConfig {
            duty_cycle: 1.0,
            worker_priority: WorkerPriority::Normal,
        }
    }
}

impl ThrottleConfig {
    pub fn new(duty_cycle: f64, worker_priority: WorkerPriority) -> Result<Self> {
        if !(duty_cycle > 0.0 && duty_cycle <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "duty cycle must be in (0, 1], got {duty_cycle}"
            )));
        }
        Ok(ThrottleConfig {
            duty_cycle,
            worker_priority,
        })
    }

    pub fn duty_cycle(&self) -> f64 {
        self.duty_cycle
    }
}

/// Idle time to insert after a burst of `active` so that
/// `active / (active + idle) == duty_cycle`.
pub fn throttle(config: &ThrottleConfig, active: Duration) -> Duration {
    let d = config.duty_cycle;
    if d >= 1.0 {
        return Duration::ZERO;
    }
    active.mul_f64((1.0 - d) / d)
}
