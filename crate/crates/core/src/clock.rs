//! Wall-clock injection. The core has no notion of time; callers that want
//! per-phase timings pass a [`Clock`].

pub trait Clock {
    /// Seconds since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

/// A clock that never advances. Timings recorded with it are all zero.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}
