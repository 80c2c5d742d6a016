use super::lars::RegularizationPath;
use crate::error::{Error, Result};
use crate::model::{CoefficientVector, SupportSet};

/// Support of size `k` read off a path.
///
/// Takes the first (largest λ₁) breakpoint with exactly `k` nonzeros. When a
/// drop step skips size `k`, the first larger support is cut down to its `k`
/// largest coefficients in magnitude (ties broken by lower index).
pub fn select_k(path: &RegularizationPath, k: usize) -> Result<SupportSet> {
    select_k_with_coefficients(path, k).map(|(s, _)| s)
}

/// [`select_k`] together with the breakpoint coefficients restricted to the
/// returned support.
pub fn select_k_with_coefficients(path: &RegularizationPath, k: usize) -> Result<(SupportSet, CoefficientVector)> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if let Some(bp) = path.breakpoints.iter().find(|b| b.support.len() == k) {
        return Ok((bp.support.clone(), bp.beta.clone()));
    }
    let Some(bp) = path.breakpoints.iter().find(|b| b.support.len() > k) else {
        return Err(Error::BudgetUnreachable {
            requested: k,
            attainable: path.max_support_size(),
        });
    };
    let mut ranked: Vec<usize> = bp.support.indices().to_vec();
    ranked.sort_by(|&a, &b| {
        bp.beta
            .get(b)
            .abs()
            .total_cmp(&bp.beta.get(a).abs())
            .then(a.cmp(&b))
    });
    ranked.truncate(k);
    let support = SupportSet::from_unsorted(ranked);
    let values: Vec<f64> = support.iter().map(|&j| bp.beta.get(j)).collect();
    let beta = CoefficientVector::scatter(bp.beta.len(), &support, &values);
    Ok((support, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::lars::Breakpoint;

    fn bp(lambda1: f64, beta: Vec<f64>) -> Breakpoint {
        let beta = CoefficientVector::from_vec(beta);
        Breakpoint {
            lambda1,
            support: beta.support(),
            beta,
        }
    }

    fn path_with_drop() -> RegularizationPath {
        RegularizationPath {
            breakpoints: vec![
                bp(10.0, vec![0.0, 0.0, 0.0, 0.0]),
                bp(8.0, vec![1.0, 0.0, 0.0, 0.0]),
                bp(6.0, vec![2.0, -0.5, 0.0, 0.0]),
                // size 3 skipped: one enters, one leaves then two enter at once
                bp(4.0, vec![3.0, 0.0, 0.2, 0.0]),
                bp(2.0, vec![4.0, 0.3, 0.5, -1.5]),
            ],
            truncated: false,
        }
    }

    #[test]
    fn exact_size_found_on_path() {
        let path = path_with_drop();
        assert_eq!(select_k(&path, 1).unwrap().indices(), &[0]);
        assert_eq!(select_k(&path, 2).unwrap().indices(), &[0, 1]);
        assert_eq!(select_k(&path, 4).unwrap().indices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn skipped_size_truncates_by_magnitude() {
        let path = path_with_drop();
        let (support, beta) = select_k_with_coefficients(&path, 3).unwrap();
        assert_eq!(support.indices(), &[0, 2, 3]);
        assert_eq!(beta.as_slice(), &[4.0, 0.0, 0.5, -1.5]);
    }

    #[test]
    fn invalid_and_unreachable_budgets() {
        let path = path_with_drop();
        assert!(select_k(&path, 0).is_err());
        assert!(matches!(
            select_k(&path, 5),
            Err(Error::BudgetUnreachable { requested: 5, attainable: 4 })
        ));
    }
}
