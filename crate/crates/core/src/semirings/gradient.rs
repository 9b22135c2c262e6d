use super::instances::close;
use super::{LabelingSemiring, ResolvedLabel, Semiring, SemiringError};

/// A probability together with its gradient over the learnable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientValue {
    pub p: f64,
    pub grad: Vec<f64>,
}

impl GradientValue {
    pub fn new(p: f64, grad: Vec<f64>) -> Self {
        GradientValue { p, grad }
    }

    pub fn constant(p: f64, dim: usize) -> Self {
        GradientValue { p, grad: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }
}

fn check_dims(a: &GradientValue, b: &GradientValue) -> Result<(), SemiringError> {
    if a.dim() != b.dim() {
        return Err(SemiringError::Dimension { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// `(p1 + p2, ∇p1 + ∇p2)`.
pub fn grad_plus(a: &GradientValue, b: &GradientValue) -> Result<GradientValue, SemiringError> {
    check_dims(a, b)?;
    Ok(GradientValue { p: a.p + b.p, grad: a.grad.iter().zip(&b.grad).map(|(x, y)| x + y).collect() })
}

/// `(p1 p2, p2 ∇p1 + p1 ∇p2)`.
pub fn grad_times(a: &GradientValue, b: &GradientValue) -> Result<GradientValue, SemiringError> {
    check_dims(a, b)?;
    Ok(GradientValue { p: a.p * b.p, grad: a.grad.iter().zip(&b.grad).map(|(x, y)| b.p * x + a.p * y).collect() })
}

/// Gradient semiring over `dim` learnable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradientSemiring {
    pub dim: usize,
}

impl GradientSemiring {
    pub fn new(dim: usize) -> Self {
        GradientSemiring { dim }
    }

    fn basis(&self, p: f64, slot: usize, sign: f64) -> Result<GradientValue, SemiringError> {
        if slot >= self.dim {
            return Err(SemiringError::Dimension { left: self.dim, right: slot + 1 });
        }
        let mut g = GradientValue::constant(p, self.dim);
        g.grad[slot] = sign;
        Ok(g)
    }
}

impl Semiring for GradientSemiring {
    type Value = GradientValue;
    fn name(&self) -> &str {
        "gradient"
    }
    fn zero(&self) -> GradientValue {
        GradientValue::constant(0.0, self.dim)
    }
    fn one(&self) -> GradientValue {
        GradientValue::constant(1.0, self.dim)
    }
    fn plus(&self, a: &GradientValue, b: &GradientValue) -> GradientValue {
        grad_plus(a, b).expect("labels are validated before evaluation")
    }
    fn times(&self, a: &GradientValue, b: &GradientValue) -> GradientValue {
        grad_times(a, b).expect("labels are validated before evaluation")
    }
    fn approx_eq(&self, a: &GradientValue, b: &GradientValue) -> bool {
        a.dim() == b.dim() && close(a.p, b.p) && a.grad.iter().zip(&b.grad).all(|(x, y)| close(*x, *y))
    }
    fn validate(&self, v: &GradientValue) -> Result<(), SemiringError> {
        if v.dim() != self.dim {
            return Err(SemiringError::Dimension { left: self.dim, right: v.dim() });
        }
        Ok(())
    }
}

impl LabelingSemiring for GradientSemiring {
    /// Fixed facts get `(p, 0)`, a learnable or neural fact in slot `i` gets `(p, e_i)`, and
    /// the negative literal gets `(1 - p, -∇p)`.
    fn label(&self, l: &ResolvedLabel) -> Result<(GradientValue, GradientValue), SemiringError> {
        match l {
            ResolvedLabel::Fixed(p) => {
                Ok((GradientValue::constant(*p, self.dim), GradientValue::constant(1.0 - p, self.dim)))
            }
            ResolvedLabel::Learnable { p, slot } | ResolvedLabel::Neural { p, slot } => {
                Ok((self.basis(*p, *slot, 1.0)?, self.basis(1.0 - p, *slot, -1.0)?))
            }
            ResolvedLabel::Algebraic(_) => {
                let (p, n) = super::ProbabilitySemiring.label(l)?;
                Ok((GradientValue::constant(p, self.dim), GradientValue::constant(n, self.dim)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_example() {
        let a = GradientValue::new(0.5, vec![1.0, 0.0]);
        let b = GradientValue::new(0.8, vec![0.0, 1.0]);
        let c = grad_times(&a, &b).unwrap();
        assert!((c.p - 0.4).abs() < 1e-12);
        assert_eq!(c.grad, vec![0.8, 0.5]);
    }

    #[test]
    fn zero_is_neutral_for_plus() {
        let s = GradientSemiring::new(2);
        let x = GradientValue::new(0.3, vec![0.1, -2.0]);
        assert_eq!(grad_plus(&x, &s.zero()).unwrap(), x);
        assert_eq!(grad_times(&x, &s.one()).unwrap(), x);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = GradientValue::new(0.5, vec![1.0]);
        let b = GradientValue::new(0.5, vec![1.0, 0.0]);
        assert!(matches!(grad_plus(&a, &b), Err(SemiringError::Dimension { left: 1, right: 2 })));
    }

    #[test]
    fn learnable_label_uses_basis_vector() {
        let s = GradientSemiring::new(2);
        let (pos, neg) = s.label(&ResolvedLabel::Learnable { p: 0.8, slot: 1 }).unwrap();
        assert_eq!(pos, GradientValue::new(0.8, vec![0.0, 1.0]));
        assert!((neg.p - 0.2).abs() < 1e-12);
        assert_eq!(neg.grad, vec![0.0, -1.0]);
        let (pos, _) = s.label(&ResolvedLabel::Fixed(0.25)).unwrap();
        assert_eq!(pos, GradientValue::new(0.25, vec![0.0, 0.0]));
    }
}
