use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observations `(x, y)` with a cached ordering by distance to 0.
///
/// The ordering is total: `|x|` ascending, then `x` ascending, then input index.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pairs: Vec<(f64, f64)>,
    order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    x: f64,
    y: f64,
}

/// The fixed tie order for nearest neighbours of 0.
#[inline]
pub(crate) fn distance_order(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.abs()
        .total_cmp(&b.0.abs())
        .then(a.0.total_cmp(&b.0))
        .then(a.1.cmp(&b.1))
}

impl Sample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = pairs.iter().position(|(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(Error::Parse {
                line: i + 1,
                reason: "non-finite observation".into(),
            });
        }
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.sort_unstable_by(|&i, &j| distance_order((pairs[i].0, i), (pairs[j].0, j)));
        Ok(Sample { pairs, order })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Permutation sorting the pairs by distance to 0.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Pairs in nearest-to-0 order.
    pub fn sorted(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.order.iter().map(move |&i| self.pairs[i])
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
            return Err(Error::Parse {
                line: 1,
                reason: format!(
                    "expected header `x,y`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut pairs = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            // header is line 1
            let row = row.map_err(|e| Error::Parse {
                line: i + 2,
                reason: e.to_string(),
            })?;
            if !(row.x.is_finite() && row.y.is_finite()) {
                return Err(Error::Parse {
                    line: i + 2,
                    reason: "non-finite value".into(),
                });
            }
            pairs.push((row.x, row.y));
        }
        Sample::new(pairs)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for &(x, y) in &self.pairs {
            wtr.serialize(Row { x, y })?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_sample_is_rejected() {
        assert!(matches!(Sample::new(vec![]), Err(Error::EmptySample)));
    }

    #[test]
    fn ties_break_by_sign_then_index() {
        let s = Sample::new(vec![(0.2, 0.0), (-0.2, 1.0), (0.1, 2.0), (0.2, 3.0)]).unwrap();
        assert_eq!(s.order(), &[2, 1, 0, 3]);
    }

    #[test]
    fn csv_round_trip() {
        let s = Sample::new(vec![(0.3, 1.0), (-0.1, 2.0), (0.2, 4.0)]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("x,y\n"));
        assert_eq!(Sample::read_csv(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let err = Sample::read_csv("x,y\n0.1,2\n0.2,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = Sample::read_csv("a,b\n0.1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    proptest! {
        #[test]
        fn order_is_sorted_permutation(xs in prop::collection::vec(-1.0f64..1.0, 1..40)) {
            let pairs: Vec<_> = xs.iter().map(|&x| (x, 0.0)).collect();
            let s = Sample::new(pairs).unwrap();
            let mut seen = s.order().to_vec();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..xs.len()).collect::<Vec<_>>());
            let abs: Vec<f64> = s.sorted().map(|(x, _)| x.abs()).collect();
            prop_assert!(abs.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
