use std::time::{Duration, Instant};

/// Optional wall-clock limit checked cooperatively by the solvers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(budget: Duration) -> Self {
        Deadline(Instant::now().checked_add(budget))
    }

    pub fn at(instant: Instant) -> Self {
        Deadline(Some(instant))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }

    pub fn check(&self) -> Result<(), crate::SolveError> {
        if self.expired() {
            Err(crate::SolveError::Timeout)
        } else {
            Ok(())
        }
    }
}
