pub mod bench;
pub mod train;
pub mod tune;
pub mod verify;

use std::time::Duration;

/// Milliseconds with three decimals.
pub fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}
