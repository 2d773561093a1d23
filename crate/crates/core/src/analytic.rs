//! Closed-form mean-latency models for the two spectrum-sharing etiquettes.
//!
//! Listen-before-talk (LBT): every span of `mu` slots brings `n_r` fresh
//! requesters; each contender picks one of `n_v` vacant blocks uniformly at
//! random and backs off a full span on collision. The mean number of
//! contenders per span follows the backlog recursion
//!
//! ```text
//! b[i+1] = n_r + b[i] * (1 - (1 - 1/n_v)^(b[i] - 1)),    b[1] = n_r
//! ```
//!
//! which settles iff `n_r` stays at or below a closed-form threshold (the
//! peak of `x * (1 - 1/n_v)^(x-1)`). Below the threshold the stationary
//! contender count is the smallest root of that curve at height `n_r`, and
//! the mean access latency follows from the per-attempt success probability
//! plus the half-span mean wait for the first attempt. Above it the backlog
//! grows without bound and the latency is reported as divergent.
//!
//! Consensus-before-talk (CBT): each request is flooded by gossip; with
//! `phi` contacts per holder per slot the holder count follows a logistic
//! curve, so pushing one transaction to a fraction `gamma` of `n` users
//! costs a logarithmic number of slots. A span's worth of requests needs
//! two rounds per transaction (spread, then confirmation), giving a latency
//! that is linear in `n_r` and logarithmic in `n`, plus the same half-span
//! mean wait. This never diverges, which is the whole point of the
//! comparison.

use std::ops::RangeInclusive;

use thiserror::Error;

/// Default residual tolerance for [`lbt_fixed_point`].
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    /// The requester load exceeds the contention convergence threshold, so
    /// the backlog recursion has no finite stationary point.
    #[error("requester load exceeds the contention convergence threshold")]
    Divergent,
}

/// Parameters of the listen-before-talk etiquette.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LbtParams {
    /// Fresh requesters per span. Strictly positive, at most `n_v`.
    pub n_r: u32,
    /// Vacant resource blocks per span. At least 2.
    pub n_v: u32,
    /// Slots per span (back-off length and first-attempt alignment).
    pub mu: u32,
}

impl LbtParams {
    pub fn new(n_r: u32, n_v: u32, mu: u32) -> Result<Self, AnalyticError> {
        if n_r == 0 {
            return Err(AnalyticError::InvalidParam("n_r must be positive"));
        }
        if n_v < 2 {
            return Err(AnalyticError::InvalidParam("n_v must be at least 2"));
        }
        if mu == 0 {
            return Err(AnalyticError::InvalidParam("mu must be positive"));
        }
        if n_r > n_v {
            return Err(AnalyticError::InvalidParam("n_r must not exceed n_v"));
        }
        Ok(Self { n_r, n_v, mu })
    }

    /// Per-slot survival base `1 - 1/n_v`.
    fn q(&self) -> f64 {
        1.0 - 1.0 / f64::from(self.n_v)
    }
}

/// Parameters of the consensus-before-talk etiquette.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbtParams {
    /// Total secondary users reachable by gossip. At least 2.
    pub n: u32,
    /// Requesters per span. May be zero (idle network).
    pub n_r: u32,
    /// Gossip fan-out: contacts per holder per slot. At least 1.
    pub phi: u32,
    /// Dissemination level required before consensus, in (0, 1).
    pub gamma: f64,
    /// Slots per span.
    pub mu: u32,
}

impl CbtParams {
    pub fn new(n: u32, n_r: u32, phi: u32, gamma: f64, mu: u32) -> Result<Self, AnalyticError> {
        if n < 2 {
            return Err(AnalyticError::InvalidParam("n must be at least 2"));
        }
        if phi == 0 {
            return Err(AnalyticError::InvalidParam("phi must be positive"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(AnalyticError::InvalidParam("gamma must lie in (0, 1)"));
        }
        if mu == 0 {
            return Err(AnalyticError::InvalidParam("mu must be positive"));
        }
        Ok(Self { n, n_r, phi, gamma, mu })
    }
}

/// Mean access latency of an etiquette, in slots.
///
/// Divergence is a first-class value rather than an error: a sweep over
/// requester loads is expected to cross the convergence threshold and must
/// keep producing rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatencyOutcome {
    Finite {
        /// Mean latency in slots.
        slots: f64,
        /// Mean latency divided by the span length `mu`.
        normalized: f64,
    },
    Divergent,
}

impl LatencyOutcome {
    fn finite(slots: f64, mu: u32) -> Self {
        LatencyOutcome::Finite { slots, normalized: slots / f64::from(mu) }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, LatencyOutcome::Divergent)
    }

    /// Latency in slots, or `None` when divergent.
    pub fn slots(&self) -> Option<f64> {
        match *self {
            LatencyOutcome::Finite { slots, .. } => Some(slots),
            LatencyOutcome::Divergent => None,
        }
    }

    /// Latency in spans, or `None` when divergent.
    pub fn normalized(&self) -> Option<f64> {
        match *self {
            LatencyOutcome::Finite { normalized, .. } => Some(normalized),
            LatencyOutcome::Divergent => None,
        }
    }
}

/// Mean contenders per span for the first `steps` spans.
///
/// Returns the backlog iterates starting from the fresh load `n_r`. The
/// sequence is non-decreasing for every valid parameter set; below the
/// convergence threshold it approaches the fixed point from below, above it
/// it grows without bound.
pub fn lbt_backlog_sequence(p: &LbtParams, steps: usize) -> Result<Vec<f64>, AnalyticError> {
    if steps == 0 {
        return Err(AnalyticError::InvalidParam("steps must be at least 1"));
    }
    let q = p.q();
    let n_r = f64::from(p.n_r);
    let mut seq = Vec::with_capacity(steps);
    let mut b = n_r;
    seq.push(b);
    for _ in 1..steps {
        b = n_r + b * (1.0 - q.powf(b - 1.0));
        seq.push(b);
    }
    Ok(seq)
}

/// Largest sustainable fresh load per span under contention.
///
/// This is the peak of `x * (1 - 1/n_v)^(x - 1)`, i.e. the greatest mean
/// contender throughput the random block choice can serve. Loads at or
/// below the threshold converge; loads strictly above diverge.
pub fn lbt_convergence_threshold(n_v: u32) -> Result<f64, AnalyticError> {
    if n_v < 2 {
        return Err(AnalyticError::InvalidParam("n_v must be at least 2"));
    }
    let q = 1.0 - 1.0 / f64::from(n_v);
    Ok(-1.0 / (std::f64::consts::E * q * q.ln()))
}

/// Stationary mean contender count: the smallest root of
/// `x * (1 - 1/n_v)^(x - 1) = n_r`.
///
/// Errors with [`AnalyticError::Divergent`] when `n_r` exceeds the
/// convergence threshold. Otherwise bisects on `[n_r, x*]`, where
/// `x* = -1/ln(1 - 1/n_v)` maximises the left-hand side, so the bracket is
/// guaranteed to straddle the root; the result satisfies
/// `|x * q^(x-1) - n_r| < tol`.
pub fn lbt_fixed_point(p: &LbtParams, tol: f64) -> Result<f64, AnalyticError> {
    if !(tol > 0.0) {
        return Err(AnalyticError::InvalidParam("tol must be positive"));
    }
    let threshold = lbt_convergence_threshold(p.n_v)?;
    let n_r = f64::from(p.n_r);
    if n_r > threshold {
        return Err(AnalyticError::Divergent);
    }
    let q = p.q();
    let g = |x: f64| x * q.powf(x - 1.0) - n_r;

    let mut lo = n_r;
    let mut hi = -1.0 / q.ln();
    if g(lo) >= 0.0 {
        // n_r = 1 sits exactly on the curve; the root is the load itself.
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    if g(x).abs() >= tol {
        return Err(AnalyticError::InvalidParam("fixed point tolerance not reachable"));
    }
    Ok(x)
}

/// Mean LBT access latency in slots.
///
/// Finite loads pay one expected back-off stretch per failed attempt plus
/// the half-span mean wait before the first attempt:
/// `mu / q^(x - 1) - mu / 2` with `x` the stationary contender count.
/// Loads above the convergence threshold return
/// [`LatencyOutcome::Divergent`].
pub fn lbt_latency(p: &LbtParams) -> LatencyOutcome {
    match lbt_fixed_point(p, DEFAULT_FIXED_POINT_TOL) {
        Ok(x) => {
            let mu = f64::from(p.mu);
            let slots = mu / p.q().powf(x - 1.0) - mu / 2.0;
            LatencyOutcome::finite(slots, p.mu)
        }
        Err(_) => LatencyOutcome::Divergent,
    }
}

/// Fraction of users holding a transaction `t - t0` slots after its
/// injection, under the logistic spread model with one initial holder.
pub fn gossip_fraction(t: f64, t0: f64, c: &CbtParams) -> Result<f64, AnalyticError> {
    if t < t0 {
        return Err(AnalyticError::InvalidParam("t must not precede t0"));
    }
    let n = f64::from(c.n);
    let phi = f64::from(c.phi);
    Ok(1.0 / (1.0 + (n - 1.0) * (-phi * (t - t0)).exp()))
}

/// Slots for one transaction to reach a fraction `gamma` of all users:
/// `(1/phi) * ln((1 + (n-1)*gamma) / (1 - gamma))`.
pub fn gossip_dissemination_delay(c: &CbtParams) -> f64 {
    let n = f64::from(c.n);
    let phi = f64::from(c.phi);
    ((1.0 + (n - 1.0) * c.gamma) / (1.0 - c.gamma)).ln() / phi
}

/// Exact inversion of the logistic spread curve at level `gamma`:
/// `(1/phi) * ln(gamma * (n-1) / (1 - gamma))`.
///
/// [`gossip_dissemination_delay`] keeps an extra `+1` inside the logarithm;
/// the two agree to well under a percent for any realistic `n`, and the
/// published form is the default everywhere. This variant exists so the
/// discrepancy stays measurable.
pub fn gossip_dissemination_delay_exact(c: &CbtParams) -> f64 {
    let n = f64::from(c.n);
    let phi = f64::from(c.phi);
    (c.gamma * (n - 1.0) / (1.0 - c.gamma)).ln() / phi
}

/// Mean CBT access latency in slots: two gossip rounds for each of the
/// span's `n_r` transactions plus the half-span mean wait,
/// `(2 * n_r / phi) * ln((1 + (n-1)*gamma) / (1 - gamma)) + mu / 2`.
///
/// Finite for every valid parameter set.
pub fn cbt_latency(c: &CbtParams) -> LatencyOutcome {
    let rounds = 2.0 * f64::from(c.n_r) * gossip_dissemination_delay(c);
    let slots = rounds + f64::from(c.mu) / 2.0;
    LatencyOutcome::finite(slots, c.mu)
}

/// Smallest `n_r` in `range` for which CBT's mean latency is at or below
/// LBT's, treating a divergent LBT as larger than any finite value.
/// Returns `None` when LBT stays ahead across the whole range.
pub fn crossing_point(
    n: u32,
    n_v: u32,
    phi: u32,
    gamma: f64,
    mu: u32,
    range: RangeInclusive<u32>,
) -> Result<Option<u32>, AnalyticError> {
    let (start, end) = (*range.start(), *range.end());
    if start < 1 || end > n_v || start > end {
        return Err(AnalyticError::InvalidParam("n_r range must be non-empty within [1, n_v]"));
    }
    for n_r in range {
        let lbt = lbt_latency(&LbtParams::new(n_r, n_v, mu)?);
        let cbt = cbt_latency(&CbtParams::new(n, n_r, phi, gamma, mu)?);
        let cbt_slots = cbt.slots().expect("cbt latency is always finite");
        let crossed = match lbt.slots() {
            Some(lbt_slots) => cbt_slots <= lbt_slots,
            None => true,
        };
        if crossed {
            return Ok(Some(n_r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lbt(n_r: u32, n_v: u32, mu: u32) -> LbtParams {
        LbtParams::new(n_r, n_v, mu).unwrap()
    }

    fn cbt(n: u32, n_r: u32, phi: u32, gamma: f64, mu: u32) -> CbtParams {
        CbtParams::new(n, n_r, phi, gamma, mu).unwrap()
    }

    #[test]
    fn params_reject_out_of_domain_values() {
        assert!(LbtParams::new(0, 100, 1000).is_err());
        assert!(LbtParams::new(10, 1, 1000).is_err());
        assert!(LbtParams::new(10, 100, 0).is_err());
        assert!(LbtParams::new(101, 100, 1000).is_err());
        assert!(CbtParams::new(1, 10, 1, 0.999, 1000).is_err());
        assert!(CbtParams::new(1000, 10, 0, 0.999, 1000).is_err());
        assert!(CbtParams::new(1000, 10, 1, 0.0, 1000).is_err());
        assert!(CbtParams::new(1000, 10, 1, 1.0, 1000).is_err());
        assert!(CbtParams::new(1000, 10, 1, 0.999, 0).is_err());
        // Zero requesters are a valid idle CBT network.
        assert!(CbtParams::new(1000, 0, 1, 0.999, 1000).is_ok());
    }

    #[test]
    fn convergence_threshold_matches_closed_form() {
        assert_relative_eq!(
            lbt_convergence_threshold(100).unwrap(),
            36.973430593685953,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lbt_convergence_threshold(2).unwrap(),
            1.0614756908460860,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lbt_convergence_threshold(1000).unwrap(),
            368.06353431321169,
            max_relative = 1e-12
        );
        assert!(lbt_convergence_threshold(1).is_err());
    }

    #[test]
    fn convergence_threshold_grows_with_block_count() {
        let mut prev = lbt_convergence_threshold(2).unwrap();
        for n_v in [5, 10, 50, 100, 500, 1000, 10000] {
            let t = lbt_convergence_threshold(n_v).unwrap();
            assert!(t > prev, "threshold must grow with n_v, got {t} after {prev}");
            prev = t;
        }
    }

    #[test]
    fn backlog_stays_flat_for_a_single_requester() {
        let seq = lbt_backlog_sequence(&lbt(1, 100, 5), 50).unwrap();
        assert_eq!(seq.len(), 50);
        assert!(seq.iter().all(|&b| b == 1.0));
    }

    #[test]
    fn backlog_settles_at_the_fixed_point_below_threshold() {
        let p = lbt(10, 100, 1000);
        let seq = lbt_backlog_sequence(&p, 10_000).unwrap();
        let last = *seq.last().unwrap();
        let prev = seq[seq.len() - 2];
        assert!((last - prev).abs() < 1e-6, "iterates still moving: {prev} -> {last}");
        let fixed = lbt_fixed_point(&p, DEFAULT_FIXED_POINT_TOL).unwrap();
        assert!((last - fixed).abs() < 1e-4, "stationary {last} vs fixed point {fixed}");
    }

    #[test]
    fn backlog_diverges_above_threshold() {
        let seq = lbt_backlog_sequence(&lbt(40, 100, 1000), 500).unwrap();
        assert!(seq.windows(2).all(|w| w[1] >= w[0]));
        assert!(*seq.last().unwrap() > 1000.0, "backlog should blow past any fixed bound");
    }

    #[test]
    fn fixed_point_matches_frozen_values() {
        let x = lbt_fixed_point(&lbt(10, 100, 1000), DEFAULT_FIXED_POINT_TOL).unwrap();
        assert_relative_eq!(x, 11.064436675943106, max_relative = 1e-9);
        let x = lbt_fixed_point(&lbt(34, 100, 1000), DEFAULT_FIXED_POINT_TOL).unwrap();
        assert_relative_eq!(x, 64.116645398090170, max_relative = 1e-9);
        let x = lbt_fixed_point(&lbt(1, 100, 1000), DEFAULT_FIXED_POINT_TOL).unwrap();
        assert_relative_eq!(x, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fixed_point_residual_is_tiny_across_the_convergent_range() {
        for n_r in 1..=36 {
            let p = lbt(n_r, 100, 1000);
            let x = lbt_fixed_point(&p, DEFAULT_FIXED_POINT_TOL).unwrap();
            let residual = (x * p.q().powf(x - 1.0) - f64::from(n_r)).abs();
            assert!(residual < 1e-9, "n_r={n_r}: residual {residual}");
        }
    }

    #[test]
    fn fixed_point_signals_divergence_above_threshold() {
        for n_r in 37..=60 {
            assert_eq!(
                lbt_fixed_point(&lbt(n_r, 100, 1000), DEFAULT_FIXED_POINT_TOL),
                Err(AnalyticError::Divergent),
                "n_r={n_r} should be divergent at n_v=100"
            );
        }
        assert!(lbt_fixed_point(&lbt(36, 100, 1000), DEFAULT_FIXED_POINT_TOL).is_ok());
    }

    #[test]
    fn lbt_latency_matches_frozen_values() {
        // A lone requester never collides: latency is the half-span wait.
        assert_eq!(
            lbt_latency(&lbt(1, 100, 1000)),
            LatencyOutcome::Finite { slots: 500.0, normalized: 0.5 }
        );
        match lbt_latency(&lbt(10, 100, 1000)) {
            LatencyOutcome::Finite { slots, normalized } => {
                assert_relative_eq!(slots, 606.44366759431060, max_relative = 1e-9);
                assert_relative_eq!(normalized, 0.60644366759431060, max_relative = 1e-9);
            }
            LatencyOutcome::Divergent => panic!("n_r=10 must be finite"),
        }
        match lbt_latency(&lbt(34, 100, 1000)) {
            LatencyOutcome::Finite { slots, .. } => {
                assert_relative_eq!(slots, 1385.7836881791226, max_relative = 1e-9);
            }
            LatencyOutcome::Divergent => panic!("n_r=34 must be finite"),
        }
        assert!(lbt_latency(&lbt(40, 100, 1000)).is_divergent());
    }

    #[test]
    fn lbt_latency_is_monotone_in_load_over_the_convergent_range() {
        let mut prev = 0.0;
        for n_r in 1..=36 {
            let slots = lbt_latency(&lbt(n_r, 100, 1000)).slots().unwrap();
            assert!(slots >= prev, "latency fell from {prev} to {slots} at n_r={n_r}");
            prev = slots;
        }
    }

    #[test]
    fn gossip_fraction_starts_at_one_holder_and_saturates() {
        let c = cbt(1000, 10, 1, 0.999, 1000);
        assert_relative_eq!(gossip_fraction(5.0, 5.0, &c).unwrap(), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(
            gossip_fraction(13.815, 0.0, &c).unwrap(),
            0.99900148784542813,
            max_relative = 1e-12
        );
        assert!(gossip_fraction(200.0, 0.0, &c).unwrap() > 1.0 - 1e-12);
        assert!(gossip_fraction(1.0, 2.0, &c).is_err());
    }

    #[test]
    fn dissemination_delay_matches_frozen_values() {
        assert_relative_eq!(
            gossip_dissemination_delay(&cbt(1000, 10, 1, 0.999, 1000)),
            13.814511058631191,
            max_relative = 1e-12
        );
        // Fan-out divides the delay exactly.
        assert_relative_eq!(
            gossip_dissemination_delay(&cbt(1000, 10, 2, 0.999, 1000)),
            13.814511058631191 / 2.0,
            max_relative = 1e-12
        );
        // Two users at half coverage: ln((1 + 0.5) / 0.5) = ln 3.
        assert_relative_eq!(
            gossip_dissemination_delay(&cbt(2, 1, 1, 0.5, 1000)),
            3.0_f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn dissemination_delay_tracks_the_exact_inversion_at_scale() {
        for n in [100, 1000, 10_000, 100_000] {
            for gamma in [0.5, 0.9, 0.99, 0.999, 0.9999] {
                let c = cbt(n, 10, 1, gamma, 1000);
                let printed = gossip_dissemination_delay(&c);
                let exact = gossip_dissemination_delay_exact(&c);
                let rel = (printed - exact).abs() / exact;
                assert!(rel < 0.01, "n={n} gamma={gamma}: relative gap {rel}");
            }
        }
    }

    #[test]
    fn cbt_latency_matches_frozen_values() {
        // No requesters: nothing to disseminate, only the half-span wait.
        assert_eq!(
            cbt_latency(&cbt(1000, 0, 1, 0.999, 2500)),
            LatencyOutcome::Finite { slots: 1250.0, normalized: 0.5 }
        );
        match cbt_latency(&cbt(1000, 10, 1, 0.999, 2500)) {
            LatencyOutcome::Finite { slots, normalized } => {
                assert_relative_eq!(slots, 1526.2902211726238, max_relative = 1e-12);
                assert_relative_eq!(normalized, 0.61051608846904952, max_relative = 1e-12);
            }
            LatencyOutcome::Divergent => panic!("cbt latency is always finite"),
        }
        match cbt_latency(&cbt(1000, 34, 1, 0.999, 1000)) {
            LatencyOutcome::Finite { slots, normalized } => {
                assert_relative_eq!(slots, 1439.3867519869210, max_relative = 1e-12);
                assert_relative_eq!(normalized, 1.4393867519869210, max_relative = 1e-12);
            }
            LatencyOutcome::Divergent => panic!("cbt latency is always finite"),
        }
    }

    #[test]
    fn cbt_latency_grows_with_load_and_population() {
        let mut prev = 0.0;
        for n_r in 1..=40 {
            let slots = cbt_latency(&cbt(1000, n_r, 1, 0.999, 1000)).slots().unwrap();
            assert!(slots > prev);
            prev = slots;
        }
        let small = cbt_latency(&cbt(100, 10, 1, 0.999, 2500)).slots().unwrap();
        let mid = cbt_latency(&cbt(1000, 10, 1, 0.999, 2500)).slots().unwrap();
        let large = cbt_latency(&cbt(10_000, 10, 1, 0.999, 2500)).slots().unwrap();
        assert!(small < mid && mid < large);
    }

    #[test]
    fn crossing_point_matches_frozen_values() {
        // Short spans: contention wins at light load, consensus from n_r = 35.
        assert_eq!(crossing_point(1000, 100, 1, 0.999, 1000, 1..=40).unwrap(), Some(35));
        // Long spans: the single gossip overhead at n_r = 1 still exceeds the
        // collision-free half-span, so the first win is n_r = 2.
        assert_eq!(crossing_point(1000, 100, 1, 0.999, 10_000, 1..=40).unwrap(), Some(2));
        // A range that stops before the crossing reports no winner.
        assert_eq!(crossing_point(1000, 100, 1, 0.999, 1000, 1..=20).unwrap(), None);
        assert!(crossing_point(1000, 100, 1, 0.999, 1000, 0..=40).is_err());
        assert!(crossing_point(1000, 100, 1, 0.999, 1000, 1..=200).is_err());
        assert!(crossing_point(1000, 100, 1, 0.999, 1000, 30..=20).is_err());
    }

    #[test]
    fn normalized_latency_is_slots_over_span() {
        for mu in [1, 1000, 2500, 10_000] {
            if let LatencyOutcome::Finite { slots, normalized } =
                cbt_latency(&cbt(1000, 10, 1, 0.999, mu))
            {
                assert_relative_eq!(normalized * f64::from(mu), slots, max_relative = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn backlog_sequence_never_decreases(
            n_v in 2u32..500,
            n_r_frac in 0.0f64..1.0,
            steps in 1usize..120,
        ) {
            let n_r = 1 + (n_r_frac * f64::from(n_v - 1)) as u32;
            let p = lbt(n_r, n_v, 1000);
            let seq = lbt_backlog_sequence(&p, steps).unwrap();
            prop_assert!(seq.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(seq.iter().all(|b| b.is_finite()));
        }

        #[test]
        fn fixed_point_residual_honours_the_tolerance(
            n_v in 2u32..1000,
            pick in 0.0f64..1.0,
        ) {
            let threshold = lbt_convergence_threshold(n_v).unwrap();
            let max_nr = (threshold.floor() as u32).min(n_v).max(1);
            let n_r = 1 + (pick * f64::from(max_nr - 1)) as u32;
            let p = lbt(n_r, n_v, 1000);
            let x = lbt_fixed_point(&p, DEFAULT_FIXED_POINT_TOL).unwrap();
            let residual = (x * p.q().powf(x - 1.0) - f64::from(n_r)).abs();
            prop_assert!(residual < DEFAULT_FIXED_POINT_TOL);
            prop_assert!(x >= f64::from(n_r));
        }
    }
}
