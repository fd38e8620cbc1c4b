//! Pointwise exterior algebra over a small coordinate frame.
//!
//! Forms live at a single point: their coefficients carry no spatial
//! dependence, only an optional polynomial dependence on the path
//! parameter `t` used by the transgression construction. The frame
//! dimension is capped at 5 (up to `t` plus four space coordinates),
//! which keeps every combinatorial sum trivial.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{HopfError, Result};

pub const MAX_FRAME_DIM: usize = 5;

/// Ordered list of coordinate labels. If the path coordinate `t` is
/// present it must come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordFrame {
    labels: Vec<String>,
}

impl CoordFrame {
    pub fn new<S: Into<String>>(labels: Vec<S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_FRAME_DIM {
            return Err(HopfError::Input(format!(
                "frame dimension must be in 1..={MAX_FRAME_DIM}, got {}",
                labels.len()
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            for b in labels.iter().skip(i + 1) {
                if a == b {
                    return Err(HopfError::Input(format!("duplicate label {a:?}")));
                }
            }
        }
        if let Some(pos) = labels.iter().position(|l| l == "t") {
            if pos != 0 {
                return Err(HopfError::Input("label t must come first".into()));
            }
        }
        Ok(CoordFrame { labels })
    }

    /// Frame `u1, ..., ud` of space coordinates only.
    pub fn space(dim: usize) -> Self {
        let labels = (1..=dim).map(|i| format!("u{i}")).collect();
        CoordFrame::new::<String>(labels).expect("valid space frame")
    }

    /// Frame `t, u1, ..., ud`.
    pub fn with_t(space_dim: usize) -> Self {
        let mut labels = vec!["t".to_string()];
        labels.extend((1..=space_dim).map(|i| format!("u{i}")));
        CoordFrame::new(labels).expect("valid t-frame")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn has_t(&self) -> bool {
        self.labels[0] == "t"
    }

    /// The same frame with the leading `t` removed.
    pub fn without_t(&self) -> Result<Self> {
        if !self.has_t() {
            return Err(HopfError::Input("frame has no t coordinate".into()));
        }
        CoordFrame::new(self.labels[1..].to_vec())
    }
}

/// Real polynomial in the path parameter `t`, dense coefficients in
/// increasing degree. The zero polynomial is the empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct TPoly {
    coeffs: Vec<f64>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        TPoly { coeffs: vec![c] }.normalized()
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        TPoly { coeffs: vec![0.0, 1.0] }
    }

    /// `1 - t`.
    pub fn one_minus_t() -> Self {
        TPoly { coeffs: vec![1.0, -1.0] }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        TPoly { coeffs }.normalized()
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        TPoly { coeffs }.normalized()
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        if self.is_zero() || other.is_zero() {
            return TPoly::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TPoly { coeffs }.normalized()
    }

    pub fn scale(&self, s: f64) -> TPoly {
        TPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
        .normalized()
    }

    pub fn neg(&self) -> TPoly {
        self.scale(-1.0)
    }

    /// d/dt of the polynomial.
    pub fn derivative(&self) -> TPoly {
        if self.coeffs.len() <= 1 {
            return TPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        TPoly { coeffs }.normalized()
    }

    /// Exact integral over t in [0, 1]: sum c_k / (k + 1).
    pub fn integral01(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k as f64 + 1.0))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Parity of the permutation sorting `seq` ascending: +1 even, -1 odd.
/// Entries must be distinct.
pub fn permutation_parity(seq: &[u8]) -> i32 {
    let mut v = seq.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        let mut m = i;
        for j in i + 1..v.len() {
            if v[j] < v[m] {
                m = j;
            }
        }
        if m != i {
            v.swap(i, m);
            sign = -sign;
        }
    }
    sign
}

/// Homogeneous exterior-algebra element at a point. Basis monomials are
/// keyed by strictly increasing index tuples into the frame; zero
/// coefficients are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialForm {
    frame: CoordFrame,
    grade: usize,
    terms: BTreeMap<Vec<u8>, TPoly>,
}

impl DifferentialForm {
    pub fn zero(frame: CoordFrame, grade: usize) -> Self {
        assert!(grade <= frame.dim(), "grade exceeds frame dimension");
        DifferentialForm {
            frame,
            grade,
            terms: BTreeMap::new(),
        }
    }

    /// Grade-0 form with the given coefficient.
    pub fn scalar(frame: CoordFrame, c: TPoly) -> Self {
        let mut f = DifferentialForm::zero(frame, 0);
        f.insert(vec![], c);
        f
    }

    /// Basis monomial dx_{i1} ^ ... ^ dx_{ik} with coefficient `c`.
    /// Indices need not be sorted; the sign is absorbed.
    pub fn monomial(frame: CoordFrame, indices: &[u8], c: TPoly) -> Result<Self> {
        for &i in indices {
            if i as usize >= frame.dim() {
                return Err(HopfError::Input(format!(
                    "index {i} out of range for frame of dim {}",
                    frame.dim()
                )));
            }
        }
        for (k, &i) in indices.iter().enumerate() {
            if indices[k + 1..].contains(&i) {
                return Ok(DifferentialForm::zero(frame, indices.len()));
            }
        }
        let sign = permutation_parity(indices);
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        let mut f = DifferentialForm::zero(frame, sorted.len());
        f.insert(sorted, c.scale(sign as f64));
        Ok(f)
    }

    fn insert(&mut self, key: Vec<u8>, c: TPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn frame(&self) -> &CoordFrame {
        &self.frame
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &TPoly)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coeff(&self, indices: &[u8]) -> TPoly {
        self.terms.get(indices).cloned().unwrap_or_else(TPoly::zero)
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        if self.frame != other.frame {
            return Err(HopfError::Input("frame mismatch in add".into()));
        }
        if self.grade != other.grade && !self.is_zero() && !other.is_zero() {
            return Err(HopfError::Input(format!(
                "grade mismatch in add: {} vs {}",
                self.grade, other.grade
            )));
        }
        let grade = if self.is_zero() { other.grade } else { self.grade };
        let mut out = DifferentialForm::zero(self.frame.clone(), grade);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.clone());
        }
        for (k, v) in &other.terms {
            out.insert(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DifferentialForm {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.frame.clone(), self.grade);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.scale(s));
        }
        out
    }

    pub fn scale_poly(&self, p: &TPoly) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.frame.clone(), self.grade);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.mul(p));
        }
        out
    }

    /// Largest absolute coefficient over all terms and all t-powers.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .fold(0.0, |m, v| m.max(v.max_abs_coeff()))
    }

    /// Exterior product. Grade adds; results beyond the frame dimension
    /// collapse to the zero form of top grade.
    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        if self.frame != other.frame {
            return Err(HopfError::Input("frame mismatch in wedge".into()));
        }
        let dim = self.frame.dim();
        let grade = self.grade + other.grade;
        if grade > dim {
            return Ok(DifferentialForm::zero(self.frame.clone(), dim));
        }
        let mut out = DifferentialForm::zero(self.frame.clone(), grade);
        for (ka, va) in &self.terms {
            'next: for (kb, vb) in &other.terms {
                for i in kb {
                    if ka.contains(i) {
                        continue 'next;
                    }
                }
                let mut joined: Vec<u8> = ka.iter().chain(kb.iter()).copied().collect();
                let sign = permutation_parity(&joined);
                joined.sort_unstable();
                out.insert(joined, va.mul(vb).scale(sign as f64));
            }
        }
        Ok(out)
    }

    /// Interior product with d/dt: keeps terms whose tuple starts with
    /// the t index (0), strips it. Grade drops by one.
    pub fn interior_dt(&self) -> Result<DifferentialForm> {
        if !self.frame.has_t() {
            return Err(HopfError::Input("frame has no t coordinate".into()));
        }
        let grade = self.grade.saturating_sub(1);
        let mut out = DifferentialForm::zero(self.frame.clone(), grade);
        for (k, v) in &self.terms {
            if k.first() == Some(&0) {
                out.insert(k[1..].to_vec(), v.clone());
            }
        }
        Ok(out)
    }

    /// Exact integration of the t-dependence over [0, 1]. The input must
    /// already be contracted (no dt factors); the result lives in the
    /// frame without t.
    pub fn integrate_t(&self) -> Result<DifferentialForm> {
        if !self.frame.has_t() {
            return Err(HopfError::Input("frame has no t coordinate".into()));
        }
        for k in self.terms.keys() {
            if k.first() == Some(&0) {
                return Err(HopfError::Input(
                    "residual dt-terms: apply interior_dt first".into(),
                ));
            }
        }
        let frame = self.frame.without_t()?;
        let mut out = DifferentialForm::zero(frame, self.grade);
        for (k, v) in &self.terms {
            let shifted: Vec<u8> = k.iter().map(|i| i - 1).collect();
            out.insert(shifted, TPoly::constant(v.integral01()));
        }
        Ok(out)
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let labels = self.frame.labels();
        let mut first = true;
        for (k, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})", v.coeffs())?;
            for &i in k {
                write!(f, " d{}", labels[i as usize])?;
            }
        }
        Ok(())
    }
}

/// Square matrix of forms sharing one frame and grade, antisymmetric in
/// its indices. Row-major storage.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    size: usize,
    frame: CoordFrame,
    grade: usize,
    entries: Vec<DifferentialForm>,
}

impl FormMatrix {
    /// Build from the strict upper triangle; the lower triangle and
    /// diagonal are filled by antisymmetry.
    pub fn from_upper_triangle<F>(
        frame: CoordFrame,
        grade: usize,
        size: usize,
        mut f: F,
    ) -> Result<FormMatrix>
    where
        F: FnMut(usize, usize) -> Result<DifferentialForm>,
    {
        let zero = DifferentialForm::zero(frame.clone(), grade);
        let mut entries = vec![zero; size * size];
        for i in 0..size {
            for j in i + 1..size {
                let e = f(i, j)?;
                if e.frame() != &frame || (!e.is_zero() && e.grade() != grade) {
                    return Err(HopfError::Input(
                        "entry frame/grade mismatch in FormMatrix".into(),
                    ));
                }
                entries[j * size + i] = e.neg();
                entries[i * size + j] = e;
            }
        }
        Ok(FormMatrix {
            size,
            frame,
            grade,
            entries,
        })
    }

    /// Build from full entries, checking antisymmetry within `tol` on
    /// coefficients (the residual is measured on a_ij + a_ji).
    pub fn from_entries(
        frame: CoordFrame,
        grade: usize,
        entries: Vec<Vec<DifferentialForm>>,
        tol: f64,
    ) -> Result<FormMatrix> {
        let size = entries.len();
        for row in &entries {
            if row.len() != size {
                return Err(HopfError::Input("FormMatrix entries not square".into()));
            }
        }
        for i in 0..size {
            for j in i..size {
                let resid = entries[i][j].add(&entries[j][i])?.max_abs_coeff();
                if resid > tol {
                    return Err(HopfError::Input(format!(
                        "matrix not antisymmetric: residual {resid:.3e} at ({i},{j})"
                    )));
                }
            }
        }
        let flat: Vec<DifferentialForm> = entries.into_iter().flatten().collect();
        Ok(FormMatrix {
            size,
            frame,
            grade,
            entries: flat,
        })
    }

    pub fn zero(frame: CoordFrame, grade: usize, size: usize) -> FormMatrix {
        let zero = DifferentialForm::zero(frame.clone(), grade);
        FormMatrix {
            size,
            frame,
            grade,
            entries: vec![zero; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn frame(&self) -> &CoordFrame {
        &self.frame
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn get(&self, i: usize, j: usize) -> &DifferentialForm {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, form: DifferentialForm) {
        self.entries[i * self.size + j] = form;
    }

    pub fn add(&self, other: &FormMatrix) -> Result<FormMatrix> {
        if self.size != other.size {
            return Err(HopfError::Input("size mismatch in FormMatrix add".into()));
        }
        let mut out = FormMatrix::zero(self.frame.clone(), self.grade, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                out.set(i, j, self.get(i, j).add(other.get(i, j))?);
            }
        }
        Ok(out)
    }

    pub fn scale_poly(&self, p: &TPoly) -> FormMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.scale_poly(p);
        }
        out
    }

    pub fn scale(&self, s: f64) -> FormMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.scale(s);
        }
        out
    }

    /// Matrix product with wedge multiplication of entries.
    pub fn wedge_mul(&self, other: &FormMatrix) -> Result<FormMatrix> {
        if self.size != other.size {
            return Err(HopfError::Input("size mismatch in wedge_mul".into()));
        }
        let grade = (self.grade + other.grade).min(self.frame.dim());
        let mut out = FormMatrix::zero(self.frame.clone(), grade, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let mut acc = DifferentialForm::zero(self.frame.clone(), grade);
                for m in 0..self.size {
                    acc = acc.add(&self.get(i, m).wedge(other.get(m, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs_coeff()))
    }

    /// Pfaffian by the direct perfect-matching sum. For odd size this is
    /// the zero form by definition.
    pub fn pfaffian(&self) -> Result<DifferentialForm> {
        let n = self.size;
        let m = n / 2;
        let result_grade = (m * self.grade).min(self.frame.dim());
        if n % 2 == 1 {
            return Ok(DifferentialForm::zero(self.frame.clone(), result_grade));
        }
        // Antisymmetry sanity on the diagonal and one random off pair is
        // cheap; full check happens at construction for from_entries.
        let mut acc = DifferentialForm::zero(self.frame.clone(), result_grade);
        let indices: Vec<u8> = (0..n as u8).collect();
        let mut pairs = Vec::with_capacity(m);
        self.pfaffian_rec(&indices, &mut pairs, &mut acc)?;
        Ok(acc)
    }

    fn pfaffian_rec(
        &self,
        remaining: &[u8],
        pairs: &mut Vec<(u8, u8)>,
        acc: &mut DifferentialForm,
    ) -> Result<()> {
        if remaining.is_empty() {
            let seq: Vec<u8> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            let sign = permutation_parity(&seq) as f64;
            let mut prod: Option<DifferentialForm> = None;
            for &(a, b) in pairs.iter() {
                let e = self.get(a as usize, b as usize);
                prod = Some(match prod {
                    None => e.clone(),
                    Some(p) => p.wedge(e)?,
                });
            }
            let prod = prod.expect("nonempty matching");
            *acc = acc.add(&prod.scale(sign))?;
            return Ok(());
        }
        let first = remaining[0];
        for (k, &other) in remaining.iter().enumerate().skip(1) {
            let rest: Vec<u8> = remaining
                .iter()
                .enumerate()
                .filter(|&(idx, _)| idx != 0 && idx != k)
                .map(|(_, &v)| v)
                .collect();
            pairs.push((first, other));
            self.pfaffian_rec(&rest, pairs, acc)?;
            pairs.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f3() -> CoordFrame {
        CoordFrame::space(3)
    }

    #[test]
    fn parity_basics() {
        assert_eq!(permutation_parity(&[0, 1, 2]), 1);
        assert_eq!(permutation_parity(&[1, 0, 2]), -1);
        assert_eq!(permutation_parity(&[2, 0, 1]), 1);
        assert_eq!(permutation_parity(&[3, 2, 1, 0]), 1);
        assert_eq!(permutation_parity(&[0]), 1);
        assert_eq!(permutation_parity(&[]), 1);
    }

    #[test]
    fn tpoly_arithmetic() {
        let p = TPoly::from_coeffs(vec![1.0, -2.0, 1.0]); // (1-t)^2
        assert_relative_eq!(p.integral01(), 1.0 / 3.0);
        assert_relative_eq!(TPoly::constant(1.0).integral01(), 1.0);
        assert_relative_eq!(TPoly::t().integral01(), 0.5);
        let q = TPoly::one_minus_t().mul(&TPoly::one_minus_t());
        assert_eq!(p, q);
        assert!(TPoly::constant(0.0).is_zero());
        assert_eq!(TPoly::t().derivative(), TPoly::constant(1.0));
    }

    #[test]
    fn wedge_basis_cases() {
        let fr = f3();
        let one = TPoly::constant(1.0);
        let du1 = DifferentialForm::monomial(fr.clone(), &[0], one.clone()).unwrap();
        let du2 = DifferentialForm::monomial(fr.clone(), &[1], one.clone()).unwrap();
        let du12 = du1.wedge(&du2).unwrap();
        assert_eq!(du12.coeff(&[0, 1]).eval(0.0), 1.0);
        let du21 = du2.wedge(&du1).unwrap();
        assert_eq!(du21.coeff(&[0, 1]).eval(0.0), -1.0);
        // repeated factor vanishes
        let du13 = DifferentialForm::monomial(fr.clone(), &[0, 2], one.clone()).unwrap();
        assert!(du12.wedge(&du13).unwrap().is_zero());
    }

    #[test]
    fn wedge_frame_mismatch_is_error() {
        let a = DifferentialForm::monomial(f3(), &[0], TPoly::constant(1.0)).unwrap();
        let b =
            DifferentialForm::monomial(CoordFrame::space(2), &[0], TPoly::constant(1.0)).unwrap();
        assert!(a.wedge(&b).is_err());
    }

    #[test]
    fn interior_and_integrate() {
        let fr = CoordFrame::with_t(2);
        let one = TPoly::constant(1.0);
        // dt ^ du1 -> du1
        let a = DifferentialForm::monomial(fr.clone(), &[0, 1], one.clone()).unwrap();
        let c = a.interior_dt().unwrap();
        assert_eq!(c.coeff(&[1]).eval(0.0), 1.0);
        // du1 ^ du2 -> 0
        let b = DifferentialForm::monomial(fr.clone(), &[1, 2], one.clone()).unwrap();
        assert!(b.interior_dt().unwrap().is_zero());
        // t^2 dt^du1^du2 -> t^2 du1^du2, then integrate -> 1/3 du1^du2
        let p = TPoly::from_coeffs(vec![0.0, 0.0, 1.0]);
        let c3 = DifferentialForm::monomial(fr.clone(), &[0, 1, 2], p).unwrap();
        let contracted = c3.interior_dt().unwrap();
        assert_eq!(contracted.coeff(&[1, 2]).eval(2.0), 4.0);
        let integrated = contracted.integrate_t().unwrap();
        assert_relative_eq!(integrated.coeff(&[0, 1]).eval(0.0), 1.0 / 3.0);
        assert!(!integrated.frame().has_t());
        // residual dt-terms are an input error
        assert!(a.integrate_t().is_err());
    }

    #[test]
    fn integrate_after_interior_is_identity_for_constant_coeffs() {
        let fr = CoordFrame::with_t(2);
        let beta = DifferentialForm::monomial(fr.clone(), &[1, 2], TPoly::constant(3.5)).unwrap();
        let dt = DifferentialForm::monomial(fr.clone(), &[0], TPoly::constant(1.0)).unwrap();
        let prod = dt.wedge(&beta).unwrap();
        let back = prod.interior_dt().unwrap().integrate_t().unwrap();
        assert_relative_eq!(back.coeff(&[0, 1]).eval(0.0), 3.5);
    }

    fn scalar_matrix(frame: &CoordFrame, m: &[Vec<f64>]) -> FormMatrix {
        let n = m.len();
        FormMatrix::from_upper_triangle(frame.clone(), 0, n, |i, j| {
            Ok(DifferentialForm::scalar(
                frame.clone(),
                TPoly::constant(m[i][j]),
            ))
        })
        .unwrap()
    }

    #[test]
    fn pfaffian_two_by_two() {
        let fr = f3();
        let alpha = DifferentialForm::monomial(fr.clone(), &[0, 1], TPoly::constant(2.0)).unwrap();
        let m = FormMatrix::from_upper_triangle(fr.clone(), 2, 2, |_, _| Ok(alpha.clone())).unwrap();
        let pf = m.pfaffian().unwrap();
        assert_eq!(pf.coeff(&[0, 1]).eval(0.0), 2.0);
    }

    #[test]
    fn pfaffian_odd_size_is_zero() {
        let fr = f3();
        let m = FormMatrix::from_upper_triangle(fr.clone(), 0, 3, |i, j| {
            Ok(DifferentialForm::scalar(
                fr.clone(),
                TPoly::constant((i + 2 * j) as f64),
            ))
        })
        .unwrap();
        assert!(m.pfaffian().unwrap().is_zero());
    }

    #[test]
    fn pfaffian_four_by_four_expansion() {
        // Pf = a01 a23 - a02 a13 + a03 a12 for scalar entries.
        let fr = f3();
        let a = vec![
            vec![0.0, 1.5, -2.0, 0.5],
            vec![0.0, 0.0, 3.0, -1.0],
            vec![0.0, 0.0, 0.0, 2.5],
            vec![0.0, 0.0, 0.0, 0.0],
        ];
        let m = scalar_matrix(&fr, &a);
        let pf = m.pfaffian().unwrap().coeff(&[]).eval(0.0);
        let expected = 1.5 * 2.5 - (-2.0) * (-1.0) + 0.5 * 3.0;
        assert_relative_eq!(pf, expected);
    }

    #[test]
    fn from_entries_rejects_non_antisymmetric() {
        let fr = f3();
        let s = |c: f64| DifferentialForm::scalar(fr.clone(), TPoly::constant(c));
        let entries = vec![vec![s(0.0), s(1.0)], vec![s(1.0), s(0.0)]];
        assert!(FormMatrix::from_entries(fr.clone(), 0, entries, 1e-12).is_err());
    }

    #[test]
    fn frame_validation() {
        assert!(CoordFrame::new(vec!["u1", "t"]).is_err());
        assert!(CoordFrame::new(vec!["a", "a"]).is_err());
        assert!(CoordFrame::new(vec!["a", "b", "c", "d", "e", "f"]).is_err());
        let fr = CoordFrame::with_t(3);
        assert!(fr.has_t());
        assert_eq!(fr.without_t().unwrap().dim(), 3);
    }
}
