//! Streaming extraction of record times and record values.
//!
//! The first observation is always the first record. Afterwards an
//! observation is a record iff it beats the current record under the
//! space's order. Observations incomparable with the current record are
//! skipped and leave it unchanged.

use serde::Serialize;
use thiserror::Error;

use crate::order::{OrderError, OrderedSpace, RecordKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("invalid element at observation {index}: {source}")]
    InvalidElement { index: u64, source: OrderError },
    #[error("empty input sequence")]
    EmptyInput,
    #[error("at least two records are needed, found {0}")]
    TooFewRecords(usize),
}

/// The `n`-th record, observed at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordEvent<E> {
    #[serde(rename = "n")]
    pub ordinal: u64,
    #[serde(rename = "t")]
    pub time_index: u64,
    pub value: E,
}

/// Records extracted from a finite prefix of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordSequence<E> {
    pub kind: RecordKind,
    pub events: Vec<RecordEvent<E>>,
    pub observations_consumed: u64,
    /// `U(n) - U(n-1)` for `n >= 2`.
    pub deltas: Vec<u64>,
    pub count: usize,
}

impl<E> RecordSequence<E> {
    pub fn new(kind: RecordKind, events: Vec<RecordEvent<E>>, observations_consumed: u64) -> Self {
        let deltas = events.windows(2).map(|w| w[1].time_index - w[0].time_index).collect();
        let count = events.len();
        RecordSequence { kind, events, observations_consumed, deltas, count }
    }

    pub fn times(&self) -> impl Iterator<Item = u64> + '_ {
        self.events.iter().map(|e| e.time_index)
    }

    pub fn values(&self) -> impl Iterator<Item = &E> + '_ {
        self.events.iter().map(|e| &e.value)
    }

    /// Time of the `n`-th record (1-based), if it was observed.
    pub fn record_time(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.events.get(i)).map(|e| e.time_index)
    }

    pub fn record_value(&self, n: usize) -> Option<&E> {
        n.checked_sub(1).and_then(|i| self.events.get(i)).map(|e| &e.value)
    }
}

/// Inter-record gaps `U(n) - U(n-1)`, `n >= 2`.
pub fn inter_record_gaps<E>(rs: &RecordSequence<E>) -> Result<Vec<u64>, ExtractError> {
    if rs.count < 2 {
        return Err(ExtractError::TooFewRecords(rs.count));
    }
    Ok(rs.deltas.clone())
}

/// Incremental record detector for one sequence.
#[derive(Debug, Clone)]
pub struct ExtractorState<S: OrderedSpace> {
    kind: RecordKind,
    space: S,
    incumbent: Option<S::Element>,
    next_ordinal: u64,
    clock: u64,
}

impl<S: OrderedSpace> ExtractorState<S> {
    pub fn new(space: S, kind: RecordKind) -> Self {
        ExtractorState { kind, space, incumbent: None, next_ordinal: 1, clock: 0 }
    }

    pub fn kind(&self) -> RecordKind {
        self.kind
    }

    /// Number of observations fed so far.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Number of records emitted so far.
    pub fn records(&self) -> u64 {
        self.next_ordinal - 1
    }

    /// Value of the current record, if any.
    pub fn incumbent(&self) -> Option<&S::Element> {
        self.incumbent.as_ref()
    }

    /// Consumes one observation; returns the record event it creates, if any.
    /// Invalid observations are rejected without touching the state.
    pub fn feed(&mut self, x: S::Element) -> Result<Option<RecordEvent<S::Element>>, ExtractError> {
        let index = self.clock + 1;
        self.space.validate(&x).map_err(|source| ExtractError::InvalidElement { index, source })?;
        let is_record = match &self.incumbent {
            None => true,
            Some(inc) => {
                self.space.beats(self.kind, &x, inc).map_err(|source| ExtractError::InvalidElement { index, source })?
            }
        };
        self.clock = index;
        if !is_record {
            return Ok(None);
        }
        let event = RecordEvent { ordinal: self.next_ordinal, time_index: index, value: x.clone() };
        self.next_ordinal += 1;
        self.incumbent = Some(x);
        Ok(Some(event))
    }
}

/// Extracts all records of `kind` from a nonempty sequence.
pub fn extract_all<S, I>(seq: I, kind: RecordKind, space: S) -> Result<RecordSequence<S::Element>, ExtractError>
where
    S: OrderedSpace,
    I: IntoIterator<Item = S::Element>,
{
    let mut state = ExtractorState::new(space, kind);
    let mut events = Vec::new();
    for x in seq {
        if let Some(ev) = state.feed(x)? {
            events.push(ev);
        }
    }
    if state.clock() == 0 {
        return Err(ExtractError::EmptyInput);
    }
    Ok(RecordSequence::new(kind, events, state.clock()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{ProductOrder, RealLine};
    use proptest::prelude::*;

    fn times<E>(rs: &RecordSequence<E>) -> Vec<u64> {
        rs.times().collect()
    }

    #[test]
    fn strong_upper_example() {
        let rs = extract_all([3.0, 1.0, 4.0, 1.0, 5.0], RecordKind::StrongUpper, RealLine).unwrap();
        assert_eq!(times(&rs), vec![1, 3, 5]);
        assert_eq!(rs.values().copied().collect::<Vec<_>>(), vec![3.0, 4.0, 5.0]);
        assert_eq!(rs.deltas, vec![2, 2]);
        assert_eq!(rs.count, 3);
        assert_eq!(rs.observations_consumed, 5);
        assert_eq!(inter_record_gaps(&rs).unwrap(), vec![2, 2]);
    }

    #[test]
    fn weak_upper_repeats() {
        let rs = extract_all([2.0, 2.0, 2.0], RecordKind::WeakUpper, RealLine).unwrap();
        assert_eq!(times(&rs), vec![1, 2, 3]);
        assert_eq!(rs.events[2].ordinal, 3);
    }

    #[test]
    fn incomparable_observations_are_skipped() {
        let seq = vec![vec![1.0, 1.0], vec![2.0, 0.0], vec![2.0, 2.0]];
        let rs = extract_all(seq, RecordKind::StrongUpper, ProductOrder::new(2)).unwrap();
        assert_eq!(times(&rs), vec![1, 3]);
        let seq = vec![vec![1.0, 1.0], vec![2.0, 0.0], vec![0.5, 1.0]];
        let rs = extract_all(seq, RecordKind::StrongLower, ProductOrder::new(2)).unwrap();
        assert_eq!(times(&rs), vec![1, 3]);
    }

    #[test]
    fn strong_lower_example() {
        let rs = extract_all([3.0, 1.0, 4.0, 0.0], RecordKind::StrongLower, RealLine).unwrap();
        assert_eq!(times(&rs), vec![1, 2, 4]);
        assert_eq!(rs.values().copied().collect::<Vec<_>>(), vec![3.0, 1.0, 0.0]);
    }

    #[test]
    fn constant_and_increasing_streams() {
        let rs = extract_all([7.0; 5], RecordKind::StrongUpper, RealLine).unwrap();
        assert_eq!(rs.count, 1);
        assert_eq!(rs.events[0], RecordEvent { ordinal: 1, time_index: 1, value: 7.0 });
        assert!(matches!(inter_record_gaps(&rs), Err(ExtractError::TooFewRecords(1))));
        let rs = extract_all((1..=9).map(f64::from), RecordKind::StrongUpper, RealLine).unwrap();
        assert_eq!(rs.count, 9);
        assert!(rs.deltas.iter().all(|&d| d == 1));
    }

    #[test]
    fn gaps_of_two_records() {
        let rs = extract_all([1.0, 2.0], RecordKind::StrongUpper, RealLine).unwrap();
        assert_eq!(inter_record_gaps(&rs).unwrap(), vec![1]);
    }

    #[test]
    fn errors() {
        assert_eq!(extract_all(Vec::<f64>::new(), RecordKind::StrongUpper, RealLine), Err(ExtractError::EmptyInput));
        let mut st = ExtractorState::new(RealLine, RecordKind::StrongUpper);
        st.feed(1.0).unwrap();
        assert!(matches!(st.feed(f64::NAN), Err(ExtractError::InvalidElement { index: 2, .. })));
        assert_eq!(st.clock(), 1);
        let mut st = ExtractorState::new(ProductOrder::new(2), RecordKind::StrongUpper);
        assert!(st.feed(vec![1.0]).is_err());
        assert_eq!(st.records(), 0);
    }

    fn negate(v: &[f64]) -> Vec<f64> {
        v.iter().map(|x| -x).collect()
    }

    fn small_reals() -> impl Strategy<Value = Vec<f64>> {
        // a coarse grid so that ties are frequent
        prop::collection::vec((-8i32..8).prop_map(|v| v as f64 * 0.5), 1..60)
    }

    proptest! {
        #[test]
        fn chain_is_monotone(seq in small_reals()) {
            for kind in RecordKind::ALL {
                let rs = extract_all(seq.clone(), kind, RealLine).unwrap();
                prop_assert_eq!(rs.events[0].time_index, 1);
                for w in rs.events.windows(2) {
                    prop_assert!(w[0].time_index < w[1].time_index);
                    prop_assert_eq!(w[1].ordinal, w[0].ordinal + 1);
                    let (a, b) = (w[0].value, w[1].value);
                    match kind {
                        RecordKind::StrongUpper => prop_assert!(b > a),
                        RecordKind::WeakUpper => prop_assert!(b >= a),
                        RecordKind::StrongLower => prop_assert!(b < a),
                        RecordKind::WeakLower => prop_assert!(b <= a),
                    }
                }
                prop_assert!(rs.deltas.iter().all(|&d| d >= 1));
            }
        }

        #[test]
        fn negation_swaps_upper_and_lower(seq in small_reals()) {
            for kind in RecordKind::ALL {
                let a = extract_all(seq.clone(), kind, RealLine).unwrap();
                let b = extract_all(negate(&seq), kind.dual(), RealLine).unwrap();
                prop_assert_eq!(times(&a), times(&b));
                let neg: Vec<f64> = b.values().map(|v| -v).collect();
                prop_assert_eq!(a.values().copied().collect::<Vec<_>>(), neg);
            }
        }

        #[test]
        fn reciprocal_swaps_for_positive_data(seq in prop::collection::vec(1u32..50, 1..60)) {
            let xs: Vec<f64> = seq.iter().map(|&v| v as f64).collect();
            let inv: Vec<f64> = xs.iter().map(|v| 1.0 / v).collect();
            let a = extract_all(xs, RecordKind::StrongLower, RealLine).unwrap();
            let b = extract_all(inv, RecordKind::StrongUpper, RealLine).unwrap();
            prop_assert_eq!(times(&a), times(&b));
        }

        #[test]
        fn increasing_maps_preserve_records(seq in prop::collection::vec(-3.0f64..3.0, 1..60)) {
            let maps: [fn(f64) -> f64; 3] = [f64::exp, |x| 2.5 * x - 1.0, |x| x * x * x];
            for h in maps {
                let mapped: Vec<f64> = seq.iter().map(|&x| h(x)).collect();
                for kind in RecordKind::ALL {
                    let a = extract_all(seq.clone(), kind, RealLine).unwrap();
                    let b = extract_all(mapped.clone(), kind, RealLine).unwrap();
                    prop_assert_eq!(times(&a), times(&b));
                    let hv: Vec<f64> = a.values().map(|&v| h(v)).collect();
                    prop_assert_eq!(hv, b.values().copied().collect::<Vec<_>>());
                }
            }
        }

        #[test]
        fn one_dimensional_product_order_is_the_real_line(seq in small_reals()) {
            for kind in RecordKind::ALL {
                let a = extract_all(seq.clone(), kind, RealLine).unwrap();
                let b = extract_all(seq.iter().map(|&x| vec![x]), kind, ProductOrder::new(1)).unwrap();
                prop_assert_eq!(times(&a), times(&b));
            }
        }

        #[test]
        fn feeding_matches_extract_all(seq in small_reals()) {
            let mut st = ExtractorState::new(RealLine, RecordKind::WeakLower);
            let mut events = Vec::new();
            for &x in &seq {
                events.extend(st.feed(x).unwrap());
            }
            let streamed = RecordSequence::new(RecordKind::WeakLower, events, st.clock());
            prop_assert_eq!(streamed, extract_all(seq, RecordKind::WeakLower, RealLine).unwrap());
        }

        #[test]
        fn product_chain_is_dominating(seq in prop::collection::vec(prop::collection::vec(0u8..4, 2), 1..40)) {
            let pts: Vec<Vec<f64>> = seq.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
            let rs = extract_all(pts, RecordKind::StrongUpper, ProductOrder::new(2)).unwrap();
            for w in rs.events.windows(2) {
                prop_assert!(w[1].value.iter().zip(&w[0].value).all(|(b, a)| b >= a));
                prop_assert!(w[1].value != w[0].value);
            }
        }
    }
}
