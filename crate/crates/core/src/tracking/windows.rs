use crate::error::{Error, Result};

/// Row ranges of one rolling window; the test slice starts right after the
/// training slice ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BacktestWindow {
    pub train_start: usize,
    /// Exclusive end of the training slice and first test row.
    pub train_end: usize,
    /// Exclusive end of the test slice.
    pub test_end: usize,
}

impl BacktestWindow {
    pub fn train(&self) -> std::ops::Range<usize> {
        self.train_start..self.train_end
    }

    pub fn test(&self) -> std::ops::Range<usize> {
        self.train_end..self.test_end
    }
}

/// All windows whose test slices step back from the last row by `stride`,
/// returned in chronological order.
pub fn make_windows(t: usize, n_train: usize, n_test: usize, stride: usize) -> Result<Vec<BacktestWindow>> {
    if n_train < 2 || n_test == 0 || stride == 0 {
        return Err(Error::invalid("n_train must be >= 2, n_test and stride >= 1"));
    }
    let span = n_train + n_test;
    if t < span {
        return Err(Error::invalid(format!(
            "panel has {t} rows, fewer than n_train + n_test = {span}"
        )));
    }
    let count = (t - span) / stride + 1;
    Ok((0..count)
        .rev()
        .map(|w| {
            let test_end = t - w * stride;
            BacktestWindow {
                train_start: test_end - span,
                train_end: test_end - n_test,
                test_end,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_alignment() {
        let one = make_windows(118, 98, 20, 20).unwrap();
        assert_eq!(one, vec![BacktestWindow { train_start: 0, train_end: 98, test_end: 118 }]);
        let two = make_windows(138, 98, 20, 20).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].test_end, two[1].train_end);
        let long = make_windows(508, 98, 20, 20).unwrap();
        assert_eq!(long.len(), 20);
        assert_eq!(long.last().unwrap().test_end, 508);
        assert!(long.windows(2).all(|w| w[1].train_end == w[0].test_end));
        assert!(make_windows(117, 98, 20, 20).is_err());
    }
}
