//! Finite carrier spaces, subsets and point functions.
//!
//! Points are addressed by index `0..d`; labels are opaque strings used only
//! at the serialization boundary. A subset is a `d`-bit mask.

use std::collections::HashMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported carrier. Full capacity tables hold `2^d` entries.
pub const MAX_POINTS: usize = 24;

/// Cyclic group structure `ℤ_n^dim` attached to a carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Torus {
    pub n: usize,
    pub dim: usize,
}

impl Torus {
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Coordinates of point `i` (row-major, last coordinate fastest).
    pub fn coords(&self, mut i: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            c[k] = i % self.n;
            i /= self.n;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.n + c % self.n)
    }

    /// Index of `coords(i) + v` with the shift reduced modulo `n`.
    pub fn translate(&self, i: usize, v: &[i64]) -> usize {
        let n = self.n as i64;
        let c: Vec<usize> = self
            .coords(i)
            .iter()
            .zip(v)
            .map(|(&c, &s)| (c as i64 + s).rem_euclid(n) as usize)
            .collect();
        self.index(&c)
    }

    /// All group elements as shift vectors.
    pub fn shifts(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.points()).map(|i| self.coords(i).into_iter().map(|c| c as i64).collect())
    }

    /// The translate `K + v` of a subset.
    pub fn shift_mask(&self, k: SubsetMask, v: &[i64]) -> SubsetMask {
        k.points().fold(SubsetMask::EMPTY, |acc, i| acc.with(self.translate(i, v)))
    }
}

/// An ordered set of distinct labelled points, `1 ≤ d ≤ 24`.
#[derive(Debug, Clone)]
pub struct Carrier {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    torus: Option<Torus>,
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.torus == other.torus
    }
}

impl Carrier {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        if labels.len() > MAX_POINTS {
            return Err(Error::CarrierTooLarge { d: labels.len(), max: MAX_POINTS });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(',') {
                return Err(Error::InvalidLabel(l.clone()));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Carrier { labels, index, torus: None })
    }

    /// Carrier with labels `"1"`, …, `"d"`.
    pub fn numbered(d: usize) -> Result<Self> {
        Carrier::new((1..=d).map(|i| i.to_string()))
    }

    /// Carrier of the discrete torus `ℤ_n^dim`. Labels are the coordinates
    /// joined by `_` (`"3"` in one dimension, `"1_2"` in two).
    pub fn torus(n: usize, dim: usize) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::EmptyCarrier);
        }
        let t = Torus { n, dim };
        let size = n.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if size > MAX_POINTS {
            return Err(Error::CarrierTooLarge { d: size, max: MAX_POINTS });
        }
        let labels = (0..size).map(|i| {
            t.coords(i).iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_")
        });
        let mut c = Carrier::new(labels)?;
        c.torus = Some(t);
        Ok(c)
    }

    pub fn with_torus(mut self, torus: Torus) -> Result<Self> {
        if torus.points() != self.len() {
            return Err(Error::CarrierMismatch { expected: torus.points(), found: self.len() });
        }
        self.torus = Some(torus);
        Ok(self)
    }

    pub fn torus_structure(&self) -> Option<Torus> {
        self.torus
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    /// Number of subsets, `2^d`.
    pub fn subset_count(&self) -> usize {
        1usize << self.len()
    }

    pub fn mask_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetMask> {
        labels
            .iter()
            .try_fold(SubsetMask::EMPTY, |m, l| Ok(m.with(self.index_of(l.as_ref())?)))
    }

    pub fn check_mask(&self, k: SubsetMask) -> Result<()> {
        if k.0 >> self.len() != 0 {
            return Err(Error::MaskOutOfRange { mask: k.0, d: self.len() });
        }
        Ok(())
    }

    /// Labels of `k`, sorted lexicographically.
    pub fn mask_labels(&self, k: SubsetMask) -> Vec<String> {
        let mut v: Vec<String> = k.points().map(|i| self.labels[i].clone()).collect();
        v.sort();
        v
    }

    /// Comma-joined sorted labels; the key used in capacity tables.
    pub fn subset_key(&self, k: SubsetMask) -> String {
        self.mask_labels(k).join(",")
    }

    pub fn mask_from_key(&self, key: &str) -> Result<SubsetMask> {
        if key.is_empty() {
            return Ok(SubsetMask::EMPTY);
        }
        let parts: Vec<&str> = key.split(',').map(str::trim).collect();
        self.mask_from_labels(&parts)
    }

    pub fn check_same(&self, other: &Carrier) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::CarrierMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    pub fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::CarrierMismatch { expected: self.len(), found });
        }
        Ok(())
    }
}

/// A subset of the carrier: bit `i` set iff point `i` belongs to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(d: usize) -> Self {
        SubsetMask(((1u64 << d) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        SubsetMask(1 << i)
    }

    pub fn from_points(points: impl IntoIterator<Item = usize>) -> Self {
        points.into_iter().fold(Self::EMPTY, Self::with)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn with(self, i: usize) -> Self {
        SubsetMask(self.0 | (1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: SubsetMask) -> bool {
        self.0 & other.0 != 0
    }

    /// Complement within a carrier of `d` points.
    pub fn complement(self, d: usize) -> Self {
        SubsetMask(!self.0 & Self::full(d).0)
    }

    /// Indices of the points in increasing order.
    pub fn points(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl BitOr for SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: Self) -> Self {
        SubsetMask(self.0 | rhs.0)
    }
}

impl BitAnd for SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: Self) -> Self {
        SubsetMask(self.0 & rhs.0)
    }
}

impl Not for SubsetMask {
    type Output = SubsetMask;
    fn not(self) -> Self {
        SubsetMask(!self.0)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.points().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// All subsets of a `d`-point carrier in increasing bit order.
pub fn enumerate_subsets(c: &Carrier, nonempty_only: bool) -> impl Iterator<Item = SubsetMask> {
    let start = u32::from(nonempty_only);
    (start..(1u32 << c.len())).map(SubsetMask)
}

/// `max_{x∈K} g(x)`, with the empty maximum equal to 0.
pub fn sup_integral(g: &[f64], k: SubsetMask) -> f64 {
    k.points().map(|i| g[i]).fold(0.0, f64::max)
}

/// A nonnegative finite function on the carrier points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFunction(Vec<f64>);

impl PointFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!("point function value {v} at point {i} is not a finite nonnegative number")));
        }
        Ok(PointFunction(values))
    }

    /// `c · 1_K` on a carrier of `d` points.
    pub fn indicator(d: usize, k: SubsetMask, c: f64) -> Self {
        PointFunction((0..d).map(|i| if k.contains(i) { c } else { 0.0 }).collect())
    }

    pub fn constant(d: usize, c: f64) -> Self {
        PointFunction(vec![c; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        PointFunction(self.0.iter().map(|v| v * c).collect())
    }

    pub fn sup(&self, k: SubsetMask) -> f64 {
        sup_integral(&self.0, k)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A sup-measure on a finite carrier, stored by its singleton values.
#[derive(Debug, Clone, PartialEq)]
pub struct SupMeasureVector(pub Vec<f64>);

impl SupMeasureVector {
    pub fn eval(&self, k: SubsetMask) -> f64 {
        sup_integral(&self.0, k)
    }

    pub fn total(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl From<PointFunction> for SupMeasureVector {
    fn from(f: PointFunction) -> Self {
        SupMeasureVector(f.0)
    }
}
