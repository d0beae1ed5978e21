use std::fmt;

/// Polynomial with integer coefficients, `coefficients[i]` multiplying `t^i`.
/// Trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntPolynomial {
    coefficients: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<i64>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        IntPolynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn coefficient(&self, degree: usize) -> i64 {
        self.coefficients.get(degree).copied().unwrap_or(0)
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval(&self, t: i64) -> i64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * t + c)
    }

    /// Coefficient-wise absolute value.
    pub fn abs(&self) -> IntPolynomial {
        IntPolynomial::new(self.coefficients.iter().map(|c| c.abs()).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (deg, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            first = false;
            match (deg, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "t")?,
                (1, m) => write!(f, "{m}t")?,
                (d, 1) => write!(f, "t^{d}")?,
                (d, m) => write!(f, "{m}t^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
