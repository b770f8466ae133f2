//! Truncated power series in `t` whose coefficients are Fourier fields.

use crate::clifford::drho_matrix_raw;
use crate::exec::Exec;
use crate::linalg::{c, CMat};
use crate::torus::{apply_operator_field, multiply_matrix_fields, Coefficient, FourierField, MatrixField, SpinorField};

/// `Σ_{j=0}^{K} t^j f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    m: usize,
    orders: Vec<FourierField<T>>,
}

/// Series of `so(V ⊕ V*)`-valued fields (`2m × 2m` coefficients).
pub type SoSeries = Series<CMat>;
/// Series of operators on forms (`2^m × 2^m` coefficients).
pub type OperatorSeries = Series<CMat>;
pub type SpinorSeries = Series<crate::clifford::Spinor>;

impl<T: Coefficient> Series<T> {
    pub fn zeros(m: usize, order: usize) -> Self {
        Self {
            m,
            orders: (0..=order).map(|_| FourierField::new(m)).collect(),
        }
    }

    pub fn from_orders(m: usize, orders: Vec<FourierField<T>>) -> Self {
        Self { m, orders }
    }

    /// `t · f`.
    pub fn linear(f: FourierField<T>, order: usize) -> Self {
        let mut s = Self::zeros(f.dim(), order);
        if order >= 1 {
            s.orders[1] = f;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.orders.len() - 1
    }

    /// Coefficient of `t^j`; empty beyond the truncation order.
    pub fn coeff(&self, j: usize) -> FourierField<T> {
        self.orders.get(j).cloned().unwrap_or_else(|| FourierField::new(self.m))
    }

    pub fn coeff_ref(&self, j: usize) -> Option<&FourierField<T>> {
        self.orders.get(j)
    }

    pub fn set(&mut self, j: usize, f: FourierField<T>) {
        if j >= self.orders.len() {
            self.orders.resize_with(j + 1, || FourierField::new(self.m));
        }
        self.orders[j] = f;
    }

    pub fn orders(&self) -> &[FourierField<T>] {
        &self.orders
    }

    /// Keeps orders `0..=order`.
    pub fn truncated(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.orders.truncate(order + 1);
        out.orders.resize_with(order + 1, || FourierField::new(self.m));
        out
    }

    pub fn scale(&self, z: crate::C64) -> Self {
        Self {
            m: self.m,
            orders: self.orders.iter().map(|f| f.scale(z)).collect(),
        }
    }

    /// True when the `t^0` coefficient vanishes.
    pub fn starts_at_first_order(&self) -> bool {
        self.orders.first().is_none_or(|f| f.norm() == 0.0)
    }

    /// `Σ_j t^j f_j(x)` at a point.
    pub fn evaluate(&self, t: f64, x: &[f64]) -> Option<T> {
        let mut acc: Option<T> = None;
        for (j, f) in self.orders.iter().enumerate() {
            if let Some(v) = f.evaluate(x) {
                let term = v.scaled(c(t.powi(j as i32)));
                match acc.as_mut() {
                    Some(a) => a.accumulate(&term),
                    None => acc = Some(term),
                }
            }
        }
        acc
    }
}

/// Spin representation applied coefficientwise.
pub fn spin_series(exec: Exec, a: &SoSeries) -> OperatorSeries {
    Series::from_orders(
        a.dim(),
        a.orders().iter().map(|f| f.map(exec, |_, mat| drho_matrix_raw(mat))).collect(),
    )
}

/// Product of an operator series and a form series, truncated at `order`.
pub fn apply_series(exec: Exec, op: &OperatorSeries, x: &SpinorSeries, order: usize) -> SpinorSeries {
    let mut out = SpinorSeries::zeros(x.dim(), order);
    for n in 0..=order {
        let mut acc = SpinorField::new(x.dim());
        for i in 0..=n {
            let (Some(a), Some(b)) = (op.coeff_ref(i), x.coeff_ref(n - i)) else {
                continue;
            };
            if a.is_empty() || b.is_empty() {
                continue;
            }
            acc = acc.add(&apply_operator_field(exec, a, b));
        }
        out.set(n, acc);
    }
    out
}

/// Product of two matrix series, truncated at `order`.
pub fn multiply_series(exec: Exec, a: &Series<CMat>, b: &Series<CMat>, order: usize) -> Series<CMat> {
    let mut out = Series::zeros(a.dim(), order);
    for n in 0..=order {
        let mut acc = MatrixField::new(a.dim());
        for i in 0..=n {
            let (Some(x), Some(y)) = (a.coeff_ref(i), b.coeff_ref(n - i)) else {
                continue;
            };
            if x.is_empty() || y.is_empty() {
                continue;
            }
            acc = acc.add(&multiply_matrix_fields(exec, x, y));
        }
        out.set(n, acc);
    }
    out
}

/// `e^{D(t)} x` for an operator series with `D(0) = 0`; exact to `order`
/// since `D^n` starts at `t^n`.
pub fn exp_apply(exec: Exec, d: &OperatorSeries, x: &SpinorSeries, order: usize) -> SpinorSeries {
    debug_assert!(d.starts_at_first_order());
    let mut sum = x.truncated(order);
    let mut term = sum.clone();
    for n in 1..=order {
        term = apply_series(exec, d, &term, order).scale(c(1.0 / n as f64));
        sum = add_series(&sum, &term);
    }
    sum
}

/// `e^{A(t)}` as a matrix series, for `A(0) = 0`.
pub fn exp_matrix_series(exec: Exec, a: &Series<CMat>, size: usize, order: usize) -> Series<CMat> {
    debug_assert!(a.starts_at_first_order());
    let m = a.dim();
    let identity = Series::from_orders(m, vec![MatrixField::constant(m, CMat::identity(size, size))]).truncated(order);
    let mut sum = identity.clone();
    let mut term = identity;
    for n in 1..=order {
        term = multiply_series(exec, a, &term, order).scale(c(1.0 / n as f64));
        sum = add_series(&sum, &term);
    }
    sum
}

pub fn add_series<T: Coefficient>(a: &Series<T>, b: &Series<T>) -> Series<T> {
    let len = a.orders.len().max(b.orders.len());
    Series {
        m: a.m,
        orders: (0..len).map(|j| a.coeff(j).add(&b.coeff(j))).collect(),
    }
}

/// `e^{A_1} ⋯ e^{A_r} e^{B} ψ` for a constant form `ψ`.
pub fn series_exp_action(
    exec: Exec,
    factors: &[SoSeries],
    b: &SoSeries,
    psi: &SpinorField,
    order: usize,
) -> SpinorSeries {
    let start = Series::from_orders(psi.dim(), vec![psi.clone()]).truncated(order);
    let mut acc = exp_apply(exec, &spin_series(exec, b), &start, order);
    for a in factors.iter().rev() {
        acc = exp_apply(exec, &spin_series(exec, a), &acc, order);
    }
    acc
}

/// `e^{-A_r} ⋯ e^{-A_1} x`, the inverse of the factor product.
pub fn inverse_factors_apply(exec: Exec, factors: &[SoSeries], x: &SpinorSeries, order: usize) -> SpinorSeries {
    let mut acc = x.clone();
    for a in factors {
        acc = exp_apply(exec, &spin_series(exec, &a.scale(c(-1.0))), &acc, order);
    }
    acc
}
