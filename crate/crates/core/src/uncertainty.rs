//! Advisory uncertainty around measured proportions.
//!
//! Sharp decision rules sit uneasily next to sampling uncertainty: an
//! interval around the measured proportion widens the set of situations in
//! which counts on the two sides of a threshold are effectively equal.
//! Everything here is advisory — intervals and turnout flags never alter a
//! decision outcome, they are reported alongside it.
//!
//! Of the many sources of uncertainty in a vote (miscast votes, unclear
//! marks, recording errors, fraud), only sampling-style uncertainty is
//! modeled; the rest are out of scope.

use num_bigint::BigInt;
use num_rational::BigRational;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ConsensusError, Result};
use crate::Rational;

/// Wilson score interval around a measured proportion.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionInterval {
    /// The exact measured proportion of yes votes.
    pub point: Rational,
    pub low: f64,
    pub high: f64,
    pub confidence: f64,
}

impl ProportionInterval {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

/// Wilson score interval for the binomial proportion `p = votes_y / n`,
/// `n = votes_y + votes_n`.
///
/// With `z` the standard normal quantile at `(1 + confidence) / 2`:
///
/// ```text
/// center    = p + z^2 / 2n
/// half      = z * sqrt(p(1 - p)/n + z^2 / 4n^2)
/// low, high = (center -+ half) / (1 + z^2 / n)
/// ```
///
/// Unlike the Wald interval, this stays inside [0, 1] and does not collapse
/// to zero width at unanimous tallies.
pub fn proportion_interval(
    votes_y: u64,
    votes_n: u64,
    confidence: f64,
) -> Result<ProportionInterval> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(ConsensusError::InvalidParameter(format!(
            "confidence must be strictly between 0 and 1, got {confidence}"
        )));
    }
    let total = votes_y + votes_n;
    if total == 0 {
        return Err(ConsensusError::DivisionUndefined);
    }
    let n = total as f64;
    let p = votes_y as f64 / n;
    let z = Normal::standard().inverse_cdf((1.0 + confidence) / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // at a unanimous tally the corresponding bound is exactly the endpoint
    let low = if votes_y == 0 {
        0.0
    } else {
        ((center - half) / denom).clamp(0.0, 1.0)
    };
    let high = if votes_n == 0 {
        1.0
    } else {
        ((center + half) / denom).clamp(0.0, 1.0)
    };
    Ok(ProportionInterval {
        point: Rational::new(votes_y, total),
        low,
        high,
        confidence,
    })
}

/// Which side of the threshold an interval clears.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Above,
    Below,
}

/// Verdict on a threshold decision once uncertainty is taken into account.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginClass {
    /// The whole interval is on one side of the threshold.
    Clear(Direction),
    /// The threshold falls inside the interval: the counts on its two
    /// sides are effectively equal at this confidence.
    Marginal,
}

/// Compare an interval against an exact threshold.
///
/// The interval endpoints are binary floats and are compared as the exact
/// rationals they are, so the verdict never depends on a rounded threshold.
pub fn classify_margin(interval: &ProportionInterval, threshold: Rational) -> MarginClass {
    let t = BigRational::new(
        BigInt::from(*threshold.numer()),
        BigInt::from(*threshold.denom()),
    );
    let low = BigRational::from_float(interval.low).expect("interval bounds are finite");
    let high = BigRational::from_float(interval.high).expect("interval bounds are finite");
    if low > t {
        MarginClass::Clear(Direction::Above)
    } else if high < t {
        MarginClass::Clear(Direction::Below)
    } else {
        MarginClass::Marginal
    }
}

/// Turnout as an exact ratio, with an advisory boycott flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TurnoutReport {
    /// `voting / population`, exact.
    pub ratio: Rational,
    /// The configured floor the ratio was checked against.
    pub floor: Rational,
    /// Turnout fell below the floor. One cannot claim evidence of consensus
    /// from a widely boycotted poll.
    pub flagged: bool,
}

/// The conventional floor: half the population should vote.
pub fn default_boycott_floor() -> Rational {
    Rational::new(1, 2)
}

/// Report turnout against an advisory floor.
pub fn turnout_report(voting: u64, population: u64, floor: Rational) -> Result<TurnoutReport> {
    if population < 1 {
        return Err(ConsensusError::InvalidParameter(
            "population must be at least 1".into(),
        ));
    }
    if voting > population {
        return Err(ConsensusError::InconsistentCounts(format!(
            "number voting ({voting}) exceeds population ({population})"
        )));
    }
    let ratio = Rational::new(voting, population);
    Ok(TurnoutReport {
        ratio,
        floor,
        flagged: ratio < floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_example_straddles_half() {
        // cross-checked against scipy and statsmodels before freezing
        let interval = proportion_interval(52, 48, 0.95).unwrap();
        assert_eq!(interval.point, Rational::new(13, 25));
        assert!((interval.low - 0.4231657776522396).abs() < 1e-12);
        assert!((interval.high - 0.615354482419481).abs() < 1e-12);
        assert!(interval.low < 0.50 && 0.50 < interval.high);
        assert!(interval.low < 0.52 && 0.52 < interval.high);
    }

    #[test]
    fn unanimous_tally_touches_the_boundary() {
        let interval = proportion_interval(100, 0, 0.95).unwrap();
        assert_eq!(interval.high, 1.0);
        assert!(interval.low < 1.0);
        assert!((interval.low - 0.9630065017930143).abs() < 1e-12);

        let opposite = proportion_interval(0, 7, 0.95).unwrap();
        assert_eq!(opposite.low, 0.0);
        assert!(opposite.high > 0.0);
    }

    #[test]
    fn single_vote_each_way_is_symmetric() {
        let interval = proportion_interval(1, 1, 0.95).unwrap();
        assert!((interval.low + interval.high - 1.0).abs() < 1e-12);
        assert_eq!(interval.point, Rational::new(1, 2));
    }

    #[test]
    fn interval_validates_inputs() {
        assert_eq!(
            proportion_interval(0, 0, 0.95),
            Err(ConsensusError::DivisionUndefined)
        );
        assert!(matches!(
            proportion_interval(1, 1, 0.0),
            Err(ConsensusError::InvalidParameter(_))
        ));
        assert!(matches!(
            proportion_interval(1, 1, 1.0),
            Err(ConsensusError::InvalidParameter(_))
        ));
    }

    #[test]
    fn margin_classification() {
        let clear = ProportionInterval {
            point: Rational::new(5, 8),
            low: 0.55,
            high: 0.70,
            confidence: 0.95,
        };
        assert_eq!(
            classify_margin(&clear, Rational::new(1, 2)),
            MarginClass::Clear(Direction::Above)
        );

        let marginal = proportion_interval(52, 48, 0.95).unwrap();
        assert_eq!(
            classify_margin(&marginal, Rational::new(1, 2)),
            MarginClass::Marginal
        );

        let below = ProportionInterval {
            point: Rational::new(1, 5),
            low: 0.10,
            high: 0.30,
            confidence: 0.95,
        };
        assert_eq!(
            classify_margin(&below, Rational::new(2, 3)),
            MarginClass::Clear(Direction::Below)
        );
    }

    #[test]
    fn endpoint_exactly_on_threshold_is_marginal() {
        let interval = ProportionInterval {
            point: Rational::new(3, 5),
            low: 0.5,
            high: 0.75,
            confidence: 0.95,
        };
        // 0.5 is exactly representable, so low == t and the interval
        // does not clear the threshold
        assert_eq!(
            classify_margin(&interval, Rational::new(1, 2)),
            MarginClass::Marginal
        );
    }

    #[test]
    fn turnout_flagging() {
        let floor = default_boycott_floor();
        let healthy = turnout_report(9, 10, floor).unwrap();
        assert_eq!(healthy.ratio, Rational::new(9, 10));
        assert!(!healthy.flagged);

        let boycotted = turnout_report(3, 10, floor).unwrap();
        assert_eq!(boycotted.ratio, Rational::new(3, 10));
        assert!(boycotted.flagged);

        let silent = turnout_report(0, 10, floor).unwrap();
        assert_eq!(silent.ratio, Rational::from_integer(0));
        assert!(silent.flagged);
    }

    #[test]
    fn turnout_validates_counts() {
        let floor = default_boycott_floor();
        assert!(matches!(
            turnout_report(1, 0, floor),
            Err(ConsensusError::InvalidParameter(_))
        ));
        assert!(matches!(
            turnout_report(11, 10, floor),
            Err(ConsensusError::InconsistentCounts(_))
        ));
    }
}
