//! CPU-time clocks used by the benchmark harness.

use std::time::Duration;

fn clock(id: libc::clockid_t) -> Duration {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: `ts` is a valid, writable timespec for the duration of the call.
    let rc = unsafe { libc::clock_gettime(id, &mut ts) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

/// CPU time consumed by the calling thread.
pub fn thread_cpu_time() -> Duration {
    clock(libc::CLOCK_THREAD_CPUTIME_ID)
}

/// CPU time consumed by the whole process.
pub fn process_cpu_time() -> Duration {
    clock(libc::CLOCK_PROCESS_CPUTIME_ID)
}

/// Accumulating stopwatch over the calling thread's CPU clock.
#[derive(Debug, Default, Clone, Copy)]
pub struct CpuStopwatch {
    total: Duration,
}

impl CpuStopwatch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `f`, adding its thread CPU time to the running total.
    pub fn time<T>(&mut self, f: impl FnOnce() -> T) -> T {
        let start = thread_cpu_time();
        let out = f();
        self.total += thread_cpu_time().saturating_sub(start);
        out
    }

    pub fn elapsed(&self) -> Duration {
        self.total
    }

    pub fn seconds(&self) -> f64 {
        self.total.as_secs_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clocks_are_monotone() {
        let a = thread_cpu_time();
        let mut acc = 0.0f64;
        for i in 0..200_000 {
            acc += (i as f64).sqrt();
        }
        assert!(acc > 0.0);
        let b = thread_cpu_time();
        assert!(b >= a);
        assert!(process_cpu_time() >= b.min(process_cpu_time()));
    }

    #[test]
    fn stopwatch_accumulates() {
        let mut sw = CpuStopwatch::new();
        let v = sw.time(|| (0..100_000).map(|i| i as f64).sum::<f64>());
        assert!(v > 0.0);
        let first = sw.elapsed();
        sw.time(|| (0..100_000).map(|i| i as f64).sum::<f64>());
        assert!(sw.elapsed() >= first);
    }
}
