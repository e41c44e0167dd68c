//! Dense complex linear algebra over labeled tensor-product spaces.
//!
//! Storage is row-major; the last factor of a [`SpaceLayout`] varies fastest.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

// Float supplies sqrt, exp and friends without std; with std linked the
// inherent methods win and the import goes unused.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of uniquely labeled tensor factors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    pub fn new<L: Into<String>>(factors: impl IntoIterator<Item = (L, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (label, dim) in factors {
            let label = label.into();
            if dim == 0 {
                return Err(Error::DimensionMismatch(format!("factor `{label}` has dimension 0")));
            }
            if out.iter().any(|f: &Factor| f.label == label) {
                return Err(Error::LabelCollision(label));
            }
            out.push(Factor { label, dim });
        }
        Ok(Self { factors: out })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total dimension; an empty layout is the one-dimensional scalar space.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|f| f.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors.iter().position(|f| f.label == label).ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].dim)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.factors[i + 1].dim;
        }
        s
    }

    pub fn concat(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        Self::new(self.factors.iter().chain(&other.factors).map(|f| (f.label.clone(), f.dim)))
    }

    pub fn without(&self, label: &str) -> Result<SpaceLayout> {
        self.position(label)?;
        Ok(Self { factors: self.factors.iter().filter(|f| f.label != label).cloned().collect() })
    }

    /// Sub-layout holding the given labels, in this layout's order.
    pub fn select(&self, keep: &[&str]) -> Result<SpaceLayout> {
        for k in keep {
            self.position(k)?;
        }
        Ok(Self { factors: self.factors.iter().filter(|f| keep.contains(&f.label.as_str())).cloned().collect() })
    }

    /// Same labels with one factor's dimension replaced.
    pub fn with_dim(&self, label: &str, dim: usize) -> Result<SpaceLayout> {
        let p = self.position(label)?;
        let mut out = self.clone();
        out.factors[p].dim = dim;
        Ok(out)
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut d = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            d[i] = index % f.dim;
            index /= f.dim;
        }
        d
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.factors).fold(0, |acc, (&d, f)| acc * f.dim + d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: SpaceLayout,
    amps: Vec<C64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(layout: SpaceLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a layout of dimension {}",
                amps.len(),
                layout.dim()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { layout, amps, normalized: false })
    }

    pub fn basis(layout: SpaceLayout, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; layout.dim()];
        *amps.get_mut(index).ok_or_else(|| Error::DimensionMismatch(format!("basis index {index} out of range")))? =
            ONE;
        Ok(Self { layout, amps, normalized: true })
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let n = layout.dim();
        Self { layout, amps: vec![ZERO; n], normalized: false }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Unit-norm copy with the normalized flag set. A zero vector is an error.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        Ok(Self { layout: self.layout.clone(), amps: self.amps.iter().map(|a| a / n).collect(), normalized: true })
    }

    /// Marks the vector as normalized after checking its norm to 1e-12.
    pub fn assert_normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("norm {n} is not 1")));
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
            normalized: self.normalized && (c.norm() - 1.0).abs() < 1e-15,
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        same_layout(&self.layout, &other.layout)?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn kron(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Vec::with_capacity(layout.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { layout, amps, normalized: self.normalized && other.normalized })
    }

    pub fn projector(&self) -> Operator {
        let n = self.amps.len();
        let mut data = Vec::with_capacity(n * n);
        for a in &self.amps {
            for b in &self.amps {
                data.push(a * b.conj());
            }
        }
        Operator { layout: self.layout.clone(), data, hermitian_hint: true }
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn same_layout(a: &SpaceLayout, b: &SpaceLayout) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("layouts differ: {a:?} vs {b:?}")));
    }
    Ok(())
}

/// Square complex matrix over a [`SpaceLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: SpaceLayout,
    data: Vec<C64>,
    hermitian_hint: bool,
}

impl Operator {
    /// Row-major entries. With `hermitian` set the Hermiticity is verified.
    pub fn new(layout: SpaceLayout, data: Vec<C64>, hermitian: bool) -> Result<Self> {
        let n = layout.dim();
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for a {n}x{n} operator", data.len())));
        }
        let op = Self { layout, data, hermitian_hint: false };
        if hermitian {
            op.into_hermitian()
        } else {
            Ok(op)
        }
    }

    pub fn from_fn(layout: SpaceLayout, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let n = layout.dim();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { layout, data, hermitian_hint: false }
    }

    /// Builds a single-factor operator from nested rows.
    pub fn from_rows(label: &str, rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let layout = SpaceLayout::single(label, n)?;
        Ok(Self::from_fn(layout, |i, j| rows[i][j]))
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let mut op = Self::from_fn(layout, |i, j| if i == j { ONE } else { ZERO });
        op.hermitian_hint = true;
        op
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let mut op = Self::from_fn(layout, |_, _| ZERO);
        op.hermitian_hint = true;
        op
    }

    pub fn diagonal(layout: SpaceLayout, diag: &[f64]) -> Result<Self> {
        if diag.len() != layout.dim() {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        let mut op = Self::from_fn(layout, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO });
        op.hermitian_hint = true;
        Ok(op)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                m = m.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        m
    }

    /// Verifies Hermiticity to 1e-12 (relative to the largest entry when that exceeds 1)
    /// and sets the hint.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL * self.norm_max().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        self.hermitian_hint = true;
        Ok(self)
    }

    /// Same entries on a layout of equal total dimension.
    pub fn relabel(&self, layout: SpaceLayout) -> Result<Self> {
        if layout.dim() != self.dim() {
            return Err(Error::DimensionMismatch("relabel to a different dimension".into()));
        }
        Ok(Self { layout, data: self.data.clone(), hermitian_hint: self.hermitian_hint })
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        same_layout(&self.layout, &other.layout)?;
        let n = self.dim();
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { layout: self.layout.clone(), data: out, hermitian_hint: false })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        same_layout(&self.layout, &other.layout)?;
        Ok(Self {
            layout: self.layout.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        same_layout(&self.layout, &other.layout)?;
        Ok(Self {
            layout: self.layout.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
        })
    }

    pub fn scale(&self, c: C64) -> Operator {
        Self {
            layout: self.layout.clone(),
            data: self.data.iter().map(|a| a * c).collect(),
            hermitian_hint: self.hermitian_hint && c.im == 0.0,
        }
    }

    pub fn scale_real(&self, c: f64) -> Operator {
        self.scale(C64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim();
        Self {
            layout: self.layout.clone(),
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n].conj()).collect(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// A X A† for any operator X on the same layout.
    pub fn conjugate(&self, x: &Operator) -> Result<Operator> {
        let mut out = self.matmul(x)?.matmul(&self.adjoint())?;
        out.hermitian_hint = false;
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        let n = self.dim();
        (0..n).map(|i| self.data[i * n + i]).sum()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        norm(&self.data)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        same_layout(&self.layout, &v.layout)?;
        Ok(StateVector { layout: self.layout.clone(), amps: self.apply_slice(&v.amps), normalized: false })
    }

    pub fn apply_slice(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        debug_assert_eq!(v.len(), n);
        (0..n).map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// ⟨a|self|b⟩.
    pub fn expectation(&self, a: &[C64], b: &[C64]) -> C64 {
        inner(a, &self.apply_slice(b))
    }

    /// Lifts an operator on a subset of factors to `full`, tensoring identities
    /// on the rest. The subset need not be contiguous or ordered like `full`.
    pub fn embed(&self, full: &SpaceLayout) -> Result<Operator> {
        let n = full.dim();
        let mut out = vec![ZERO; n * n];
        let map = self.factor_map(full)?;
        let sub = &self.layout;
        let m = sub.dim();
        let mut rest_dims = Vec::new();
        let mut rest_pos = Vec::new();
        for (i, f) in full.factors().iter().enumerate() {
            if !map.contains(&i) {
                rest_dims.push(f.dim);
                rest_pos.push(i);
            }
        }
        let rest_total: usize = rest_dims.iter().product();
        let strides = full.strides();
        let sub_offsets: Vec<usize> =
            (0..m).map(|a| sub.digits(a).iter().zip(&map).map(|(d, &p)| d * strides[p]).sum()).collect();
        let mut rest_digits = vec![0; rest_dims.len()];
        for r in 0..rest_total {
            let mut rem = r;
            for k in (0..rest_dims.len()).rev() {
                rest_digits[k] = rem % rest_dims[k];
                rem /= rest_dims[k];
            }
            let base: usize = rest_digits.iter().zip(&rest_pos).map(|(d, &p)| d * strides[p]).sum();
            for a in 0..m {
                for b in 0..m {
                    let v = self.data[a * m + b];
                    if v != ZERO {
                        out[(base + sub_offsets[a]) * n + base + sub_offsets[b]] = v;
                    }
                }
            }
        }
        Ok(Self { layout: full.clone(), data: out, hermitian_hint: self.hermitian_hint })
    }

    /// Applies this operator, defined on a subset of the factors of `full`,
    /// to a vector on `full` without forming the embedded matrix.
    pub fn apply_embedded(&self, full: &SpaceLayout, v: &[C64]) -> Result<Vec<C64>> {
        let map = self.factor_map(full)?;
        let strides = full.strides();
        let m = self.dim();
        let sub_offsets: Vec<usize> =
            (0..m).map(|a| self.layout.digits(a).iter().zip(&map).map(|(d, &p)| d * strides[p]).sum()).collect();
        let mut out = vec![ZERO; v.len()];
        let mut gathered = vec![ZERO; m];
        for base in 0..full.dim() {
            // A base index has zero digits on every mapped factor.
            let digits = full.digits(base);
            if map.iter().any(|&p| digits[p] != 0) {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&sub_offsets) {
                *g = v[base + off];
            }
            for a in 0..m {
                let row = &self.data[a * m..(a + 1) * m];
                out[base + sub_offsets[a]] = row.iter().zip(&gathered).map(|(x, y)| x * y).sum();
            }
        }
        Ok(out)
    }

    fn factor_map(&self, full: &SpaceLayout) -> Result<Vec<usize>> {
        self.layout
            .factors()
            .iter()
            .map(|f| {
                let p = full.position(&f.label)?;
                if full.factors()[p].dim != f.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "factor `{}` has dimension {} here and {} in the target",
                        f.label,
                        f.dim,
                        full.factors()[p].dim
                    )));
                }
                Ok(p)
            })
            .collect()
    }
}

pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let layout = a.layout.concat(&b.layout)?;
    let (n, m) = (a.dim(), b.dim());
    let nm = n * m;
    let mut data = vec![ZERO; nm * nm];
    for i in 0..n {
        for j in 0..n {
            let x = a.data[i * n + j];
            if x == ZERO {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    data[(i * m + k) * nm + j * m + l] = x * b.data[k * m + l];
                }
            }
        }
    }
    Ok(Operator { layout, data, hermitian_hint: a.hermitian_hint && b.hermitian_hint })
}

/// Kronecker product of a non-empty list, left to right.
pub fn kron_all(ops: &[&Operator]) -> Result<Operator> {
    let (first, rest) = ops.split_first().ok_or_else(|| Error::InvalidArgument("empty Kronecker product".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, op| kron(&acc, op))
}

/// Contracts the factor `label` of a vector on `layout` with the bra ⟨bra|.
/// Returns the remaining layout and amplitudes.
pub fn contract_factor(layout: &SpaceLayout, v: &[C64], label: &str, bra: &[C64]) -> Result<(SpaceLayout, Vec<C64>)> {
    let p = layout.position(label)?;
    let fd = layout.factors()[p].dim;
    if bra.len() != fd || v.len() != layout.dim() {
        return Err(Error::DimensionMismatch(format!("contraction on `{label}`")));
    }
    let rest = layout.without(label)?;
    let inner_block: usize = layout.factors()[p + 1..].iter().map(|f| f.dim).product();
    let outer = layout.dim() / (fd * inner_block);
    let mut out = vec![ZERO; rest.dim()];
    for o in 0..outer {
        for (n, b) in bra.iter().enumerate() {
            let bc = b.conj();
            if bc == ZERO {
                continue;
            }
            let src = &v[(o * fd + n) * inner_block..(o * fd + n + 1) * inner_block];
            let dst = &mut out[o * inner_block..(o + 1) * inner_block];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += bc * s;
            }
        }
    }
    Ok((rest, out))
}

/// Inverse of [`contract_factor`]: |ket⟩_label ⊗ rest placed at the factor's
/// position in `full`.
pub fn insert_factor(full: &SpaceLayout, label: &str, ket: &[C64], rest: &[C64]) -> Result<Vec<C64>> {
    let p = full.position(label)?;
    let fd = full.factors()[p].dim;
    if ket.len() != fd || rest.len() * fd != full.dim() {
        return Err(Error::DimensionMismatch(format!("insertion on `{label}`")));
    }
    let inner_block: usize = full.factors()[p + 1..].iter().map(|f| f.dim).product();
    let outer = full.dim() / (fd * inner_block);
    let mut out = vec![ZERO; full.dim()];
    for o in 0..outer {
        let src = &rest[o * inner_block..(o + 1) * inner_block];
        for (n, k) in ket.iter().enumerate() {
            let dst = &mut out[(o * fd + n) * inner_block..(o * fd + n + 1) * inner_block];
            for (d, s) in dst.iter_mut().zip(src) {
                *d = k * s;
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix Tr_{¬keep}|v⟩⟨v| of a pure state, without forming |v⟩⟨v|.
pub fn reduced_density(layout: &SpaceLayout, v: &[C64], keep: &[&str]) -> Result<Operator> {
    let kept = layout.select(keep)?;
    let keep_pos: Vec<usize> = kept.labels().map(|l| layout.position(l).unwrap()).collect();
    let m = kept.dim();
    let r = layout.dim() / m;
    // Gather v into an m × r matrix, then ρ = M M†.
    let mut mat = vec![ZERO; m * r];
    for (idx, a) in v.iter().enumerate() {
        let d = layout.digits(idx);
        let (mut k, mut t) = (0, 0);
        for (i, f) in layout.factors().iter().enumerate() {
            if keep_pos.contains(&i) {
                k = k * f.dim + d[i];
            } else {
                t = t * f.dim + d[i];
            }
        }
        mat[k * r + t] = *a;
    }
    let mut rho = vec![ZERO; m * m];
    for i in 0..m {
        for j in i..m {
            let s: C64 = (0..r).map(|t| mat[i * r + t] * mat[j * r + t].conj()).sum();
            rho[i * m + j] = s;
            rho[j * m + i] = s.conj();
        }
    }
    Ok(Operator { layout: kept, data: rho, hermitian_hint: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    /// Input must be a density operator: Hermitian and positive semidefinite to 1e-10.
    Density,
    /// Any square operator.
    General,
}

/// Traces out every factor not named in `keep`. The result keeps the
/// factor order of `rho`.
pub fn partial_trace(rho: &Operator, keep: &[&str], mode: TraceMode) -> Result<Operator> {
    let kept = rho.layout.select(keep)?;
    if mode == TraceMode::Density {
        let defect = rho.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        let e = eigh(&Operator { hermitian_hint: true, ..rho.clone() }.symmetrized())?;
        if let Some(&min) = e.values.first() {
            if min < -1e-10 {
                return Err(Error::NotPositive(min));
            }
        }
    }
    let full = &rho.layout;
    let n = full.dim();
    let m = kept.dim();
    let keep_pos: Vec<usize> = kept.labels().map(|l| full.position(l).unwrap()).collect();
    // For every full index: (kept index, traced index).
    let mut traced_dims = Vec::new();
    for (i, f) in full.factors().iter().enumerate() {
        if !keep_pos.contains(&i) {
            traced_dims.push(f.dim);
        }
    }
    let split: Vec<(usize, usize)> = (0..n)
        .map(|idx| {
            let d = full.digits(idx);
            let (mut k, mut t) = (0, 0);
            let mut ti = 0;
            for (i, f) in full.factors().iter().enumerate() {
                if keep_pos.contains(&i) {
                    k = k * f.dim + d[i];
                } else {
                    t = t * traced_dims[ti] + d[i];
                    ti += 1;
                }
            }
            (k, t)
        })
        .collect();
    let mut out = vec![ZERO; m * m];
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[ki * m + kj] += rho.data[i * n + j];
            }
        }
    }
    Ok(Operator { layout: kept, data: out, hermitian_hint: rho.hermitian_hint })
}

impl Operator {
    /// (A + A†)/2, flagged Hermitian.
    pub fn symmetrized(&self) -> Operator {
        let n = self.dim();
        let data = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
            })
            .collect();
        Self { layout: self.layout.clone(), data, hermitian_hint: true }
    }
}

/// Spectral decomposition A = V diag(values) V†, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl Eigh {
    /// V f(Λ) V†.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> Operator {
        let n = self.values.len();
        let v = &self.vectors.data;
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    s += v[i * n + k] * fv[k] * v[j * n + k].conj();
                }
                out[i * n + j] = s;
            }
        }
        Operator { layout: self.vectors.layout.clone(), data: out, hermitian_hint: false }
    }

    /// e^{-itA}.
    pub fn propagator(&self, t: f64) -> Operator {
        self.apply_fn(|x| {
            let (s, c) = (-t * x).sin_cos();
            C64::new(c, s)
        })
    }

    pub fn reconstruct(&self) -> Operator {
        let mut op = self.apply_fn(|x| C64::new(x, 0.0));
        op.hermitian_hint = true;
        op
    }

    /// Column `k` of V.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.values.len();
        (0..n).map(|i| self.vectors.data[i * n + k]).collect()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(a: &Operator) -> Result<Eigh> {
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL * a.norm_max().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.dim();
    let mut m = a.data.clone();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
        m[i * n + i] = C64::new(m[i * n + i].re, 0.0);
    }
    let threshold = 1e-14 * a.norm_fro();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE || r < 1e-18 * threshold {
                    continue;
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                // The phase e^{iφ} of a_pq is rotated away, then a real Jacobi step.
                let ph = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let phc = ph.conj();
                // Columns: A <- A J.
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * c - akq * phc * s;
                    m[k * n + q] = akp * s + akq * phc * c;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c - vkq * phc * s;
                    v[k * n + q] = vkp * s + vkq * phc * c;
                }
                // Rows: A <- J† A.
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = apk * c - aqk * ph * s;
                    m[q * n + k] = apk * s + aqk * ph * c;
                }
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;
                m[p * n + p] = C64::new(app - t * r, 0.0);
                m[q * n + q] = C64::new(aqq + t * r, 0.0);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let data = (0..n * n).map(|k| v[(k / n) * n + order[k % n]]).collect();
    Ok(Eigh { values, vectors: Operator { layout: a.layout.clone(), data, hermitian_hint: false } })
}

/// e^{-itH} for Hermitian H.
pub fn expm_hermitian_generator(h: &Operator, t: f64) -> Result<Operator> {
    Ok(eigh(h)?.propagator(t))
}

/// Largest singular value.
pub fn spectral_norm(op: &Operator) -> f64 {
    let g = op.adjoint().matmul(op).expect("same layout").symmetrized();
    let e = eigh(&g).expect("Gram matrix is Hermitian");
    e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Largest entry of U†U − 1.
pub fn unitarity_defect(u: &Operator) -> f64 {
    let n = u.dim();
    let d = u.data();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = ZERO;
            for k in 0..n {
                s += d[k * n + i].conj() * d[k * n + j];
            }
            if i == j {
                s -= ONE;
            }
            m = m.max(s.norm());
        }
    }
    m
}

/// Common single-qubit and two-qubit matrices.
pub mod gates {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn pauli_x(label: &str) -> Operator {
        Operator::from_rows(label, &[&[ZERO, ONE], &[ONE, ZERO]]).unwrap().into_hermitian().unwrap()
    }

    pub fn pauli_y(label: &str) -> Operator {
        Operator::from_rows(label, &[&[ZERO, c(0.0, -1.0)], &[I, ZERO]]).unwrap().into_hermitian().unwrap()
    }

    pub fn pauli_z(label: &str) -> Operator {
        Operator::from_rows(label, &[&[ONE, ZERO], &[ZERO, c(-1.0, 0.0)]]).unwrap().into_hermitian().unwrap()
    }

    pub fn hadamard(label: &str) -> Operator {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        Operator::from_rows(label, &[&[c(h, 0.0), c(h, 0.0)], &[c(h, 0.0), c(-h, 0.0)]])
            .unwrap()
            .into_hermitian()
            .unwrap()
    }

    pub fn phase_s(label: &str) -> Operator {
        Operator::from_rows(label, &[&[ONE, ZERO], &[ZERO, I]]).unwrap()
    }

    pub fn identity(label: &str, dim: usize) -> Operator {
        Operator::identity(SpaceLayout::single(label, dim).unwrap())
    }

    /// |v⟩⟨v| on a single factor.
    pub fn projector(label: &str, v: &[C64]) -> Operator {
        let layout = SpaceLayout::single(label, v.len()).unwrap();
        let mut p = Operator::from_fn(layout, |i, j| v[i] * v[j].conj());
        p.hermitian_hint = true;
        p
    }

    /// |±y⟩ = (|0⟩ ± i|1⟩)/√2.
    pub fn plus_y() -> [C64; 2] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        [c(h, 0.0), c(0.0, h)]
    }

    pub fn minus_y() -> [C64; 2] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        [c(h, 0.0), c(0.0, -h)]
    }
}
