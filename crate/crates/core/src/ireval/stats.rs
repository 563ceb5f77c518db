use std::fmt;

use statrs::function::beta::beta_reg;

use crate::report::KvBlock;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceResult {
    pub n: usize,
    pub mean_difference: f64,
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub alpha: f64,
    pub comparisons: usize,
    /// Bonferroni-corrected threshold `alpha / comparisons`.
    pub threshold: f64,
    pub significant: bool,
}

impl SignificanceResult {
    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("test", "paired-t")
            .push("n", self.n)
            .push("mean_difference", self.mean_difference)
            .push("t", self.t)
            .push("df", self.df)
            .push("p_value", self.p_value)
            .push("alpha", self.alpha)
            .push("comparisons", self.comparisons)
            .push("threshold", self.threshold)
            .push("significant", self.significant);
        kv
    }
}

impl fmt::Display for SignificanceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "paired t-test: n={} t={:.4} df={} p={:.3e} threshold={:.3e} (alpha={} / m={}) -> {}",
            self.n,
            self.t,
            self.df,
            self.p_value,
            self.threshold,
            self.alpha,
            self.comparisons,
            if self.significant { "significant" } else { "not significant" }
        )
    }
}

/// Two-sided tail probability of Student's t with `df` degrees of freedom,
/// `P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x)
}

/// Two-sided paired t-test of `a - b` with a Bonferroni threshold.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64, comparisons: usize) -> Result<SignificanceResult> {
    if a.len() != b.len() {
        return Err(Error::Degenerate(format!(
            "score vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Degenerate("need at least two paired values".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) || comparisons == 0 {
        return Err(Error::Invalid(format!(
            "alpha must lie in (0, 1) and comparisons be positive (alpha={alpha}, m={comparisons})"
        )));
    }
    let n = a.len();
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::Degenerate(
            "differences have zero variance; t is undefined".into(),
        ));
    }
    let t = mean / (var.sqrt() / (n as f64).sqrt());
    let df = (n - 1) as f64;
    let p_value = student_t_two_sided(t, df);
    let threshold = alpha / comparisons as f64;
    Ok(SignificanceResult {
        n,
        mean_difference: mean,
        t,
        df,
        p_value,
        alpha,
        comparisons,
        threshold,
        significant: p_value < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degenerate_inputs() {
        let a = [0.1, 0.5, 1.0];
        assert!(matches!(paired_t_test(&a, &a, 0.05, 1), Err(Error::Degenerate(_))));
        let b = [1.1, 1.5, 2.0];
        assert!(matches!(paired_t_test(&b, &a, 0.05, 1), Err(Error::Degenerate(_))));
        assert!(paired_t_test(&[1.0], &[0.0], 0.05, 1).is_err());
        assert!(paired_t_test(&a, &b[..2], 0.05, 1).is_err());
        assert!(paired_t_test(&a, &[0.0, 0.0, 0.3], 0.0, 1).is_err());
    }

    #[test]
    fn tail_matches_closed_forms() {
        // df = 1 is Cauchy: p = 1 - (2/pi) atan|t|
        // df = 2: p = 1 - |t| / sqrt(2 + t^2)
        for t in [0.1, 0.5, 1.0, 2.5, 10.0, 40.0] {
            let cauchy = 1.0 - 2.0 / std::f64::consts::PI * f64::atan(t);
            assert!((student_t_two_sided(t, 1.0) - cauchy).abs() < 1e-12, "t={t}");
            let df2 = 1.0 - t / (2.0 + t * t).sqrt();
            assert!((student_t_two_sided(t, 2.0) - df2).abs() < 1e-12, "t={t}");
        }
        assert!((student_t_two_sided(0.0, 7.0) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn swapping_flips_t(a in proptest::collection::vec(0.0f64..1.0, 3..20), shift in proptest::collection::vec(-0.5f64..0.5, 20)) {
            let b: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + s).collect();
            let ab = paired_t_test(&a, &b, 0.05, 1);
            prop_assume!(ab.is_ok());
            let ab = ab.unwrap();
            let ba = paired_t_test(&b, &a, 0.05, 1).unwrap();
            prop_assert!((ab.t + ba.t).abs() < 1e-9 * ab.t.abs().max(1.0));
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
        }
    }
}
