//! Exceptional objects, mutations and the braid moves on collections.
//!
//! An [`ExcObject`] is a sheaf-normalized class together with a shift, so the
//! signed K-class is `(-1)^shift · cls`. Hom-complexes between exceptional
//! objects on a del Pezzo surface live in a single degree; [`hom_profile`]
//! recovers that degree from the slope order and the Euler pairing.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::klattice::{
    euler_pairing, sheaf_normalize, slope_compare, ChernClass, LatticeError, SlopeOrder, Surface,
};
use crate::scalar::{self, Overflow, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExcError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("objects have equal sheaf classes and do not form a pair")]
    EqualClasses,
    #[error("not an exceptional pair: backward Euler pairing is {0}")]
    NotExceptionalPair(i128),
    #[error("mutation undefined: object is not orthogonal on the required side (χ = {0})")]
    MutationUndefined(i128),
    #[error("Euler pairing {chi} is inconsistent with slope order {order:?}")]
    Inconsistent { order: SlopeOrder, chi: i128 },
    #[error("object {0} is not sheaf-normalized")]
    NotNormalized(usize),
    #[error("objects {later} and {earlier} violate the exceptional ordering (χ = {chi})")]
    NotExceptionalCollection { earlier: usize, later: usize, chi: i128 },
    #[error("index {index} out of range 2..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid block structure: {0}")]
    InvalidBlocks(String),
    #[error("collection of length {len} is not numerically full (determinant {det})")]
    NotFull { len: usize, det: i128 },
}

impl From<Overflow> for ExcError {
    fn from(e: Overflow) -> Self {
        ExcError::Lattice(LatticeError::Overflow(e))
    }
}

/// A sheaf class with an integer shift; the numerical shadow of an exceptional object.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExcObject<T: Scalar> {
    pub cls: ChernClass<T>,
    pub shift: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ObjectRepr<T: Scalar> {
    rank: T,
    c1: Vec<T>,
    ch2_x2: T,
    #[serde(default)]
    shift: i64,
}

impl<T: Scalar> Serialize for ExcObject<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ObjectRepr {
            rank: self.cls.rank,
            c1: self.cls.c1.clone(),
            ch2_x2: self.cls.ch2_x2,
            shift: self.shift,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ExcObject<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = ObjectRepr::<T>::deserialize(deserializer)?;
        Ok(ExcObject {
            cls: ChernClass::new(r.rank, r.c1, r.ch2_x2),
            shift: r.shift,
        })
    }
}

impl<T: Scalar> ExcObject<T> {
    /// Validates exceptionality and normalization.
    pub fn new(s: &Surface, cls: ChernClass<T>, shift: i64) -> Result<Self, ExcError> {
        let (norm, flipped) = sheaf_normalize(s, &cls)?;
        if flipped || norm != cls {
            return Err(ExcError::NotNormalized(0));
        }
        Ok(ExcObject { cls, shift })
    }

    pub fn sheaf(cls: ChernClass<T>) -> Self {
        ExcObject { cls, shift: 0 }
    }

    pub fn line_bundle(s: &Surface, d: &[T]) -> Result<Self, ExcError> {
        Ok(ExcObject::sheaf(ChernClass::line_bundle(s, d)?))
    }

    /// Builds the object whose K-class is `signed`, sitting at shift `base` or `base + 1`.
    pub fn from_signed(s: &Surface, signed: &ChernClass<T>, base: i64) -> Result<Self, ExcError> {
        let (cls, flipped) = sheaf_normalize(s, signed)?;
        Ok(ExcObject { cls, shift: base + flipped as i64 })
    }

    pub fn shifted(&self, k: i64) -> Self {
        ExcObject { cls: self.cls.clone(), shift: self.shift + k }
    }

    pub fn signed_class(&self) -> Result<ChernClass<T>, ExcError> {
        Ok(self.cls.signed(self.shift)?)
    }

    pub fn is_sheaf(&self) -> bool {
        self.shift == 0
    }

    pub fn label(&self, s: &Surface) -> String {
        if self.shift == 0 {
            self.cls.label(s)
        } else {
            format!("{}[{}]", self.cls.label(s), self.shift)
        }
    }

    pub fn twisted(&self, s: &Surface, p: i64) -> Result<Self, ExcError> {
        Ok(ExcObject {
            cls: crate::klattice::serre_twist(s, &self.cls, p)?,
            shift: self.shift,
        })
    }
}

/// `χ(A, B)` of the shifted objects: `(-1)^{m+n} χ` of the sheaf classes.
pub fn chi<T: Scalar>(s: &Surface, a: &ExcObject<T>, b: &ExcObject<T>) -> Result<T, ExcError> {
    let raw = euler_pairing(s, &a.cls, &b.cls)?;
    Ok(scalar::mul(raw, scalar::sign_of_parity(a.shift + b.shift))?)
}

/// Shape of `Hom•(A, B)`: either zero or a single nonzero degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", bound = "T: Scalar")]
pub enum HomProfile<T: Scalar> {
    Zero,
    Concentrated { degree: i64, dim: T },
}

impl<T: Scalar> HomProfile<T> {
    /// True if the complex vanishes outside degree `p` (vacuous for `Zero`).
    pub fn concentrated_in(&self, p: i64) -> bool {
        match self {
            HomProfile::Zero => true,
            HomProfile::Concentrated { degree, .. } => *degree == p,
        }
    }

    pub fn degree(&self) -> Option<i64> {
        match self {
            HomProfile::Zero => None,
            HomProfile::Concentrated { degree, .. } => Some(*degree),
        }
    }

    pub fn dim_in(&self, p: i64) -> T {
        match self {
            HomProfile::Concentrated { degree, dim } if *degree == p => *dim,
            _ => T::zero(),
        }
    }
}

fn profile_from_slope<T: Scalar>(
    order: SlopeOrder,
    m: i64,
    n: i64,
    chi_ab: T,
) -> Result<HomProfile<T>, ExcError> {
    if chi_ab.is_zero() {
        return Ok(HomProfile::Zero);
    }
    let delta = match order {
        SlopeOrder::Less => 0,
        SlopeOrder::Greater => 1,
        SlopeOrder::Incomparable | SlopeOrder::Equal => {
            return Err(ExcError::Inconsistent { order, chi: chi_ab.to_wide() })
        }
    };
    let degree = m - n + delta;
    let dim = chi_ab.abs();
    if scalar::mul(dim, scalar::sign_of_parity(degree))? != chi_ab {
        return Err(ExcError::Inconsistent { order, chi: chi_ab.to_wide() });
    }
    Ok(HomProfile::Concentrated { degree, dim })
}

/// `Hom•(A, B)` for a numerically exceptional pair.
///
/// Either order of the pair is accepted: if `χ(A, B) = 0` the complex is
/// zero regardless of which way round the pair is exceptional.
pub fn hom_profile<T: Scalar>(
    s: &Surface,
    a: &ExcObject<T>,
    b: &ExcObject<T>,
) -> Result<HomProfile<T>, ExcError> {
    let order = slope_compare(s, &a.cls, &b.cls)?;
    if order == SlopeOrder::Equal {
        return Err(ExcError::EqualClasses);
    }
    let chi_ab = chi(s, a, b)?;
    let chi_ba = chi(s, b, a)?;
    if !chi_ab.is_zero() && !chi_ba.is_zero() {
        return Err(ExcError::NotExceptionalPair(chi_ba.to_wide()));
    }
    profile_from_slope(order, a.shift, b.shift, chi_ab)
}

/// Slope-rule profile for objects that are not required to form an exceptional pair
/// (e.g. far apart in a helix). Returns `None` when the numerical data do not
/// pin down a single degree.
pub fn slope_rule_profile<T: Scalar>(
    s: &Surface,
    a: &ExcObject<T>,
    b: &ExcObject<T>,
) -> Result<Option<HomProfile<T>>, ExcError> {
    let order = slope_compare(s, &a.cls, &b.cls)?;
    let chi_ab = chi(s, a, b)?;
    match profile_from_slope(order, a.shift, b.shift, chi_ab) {
        Ok(p) => Ok(Some(p)),
        Err(ExcError::Inconsistent { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `L_E(X)`: class `[X] - χ(E, X)[E]`, computed on sheaves and shifted back by `shift(X)`.
pub fn left_mutate<T: Scalar>(
    s: &Surface,
    e: &ExcObject<T>,
    x: &ExcObject<T>,
) -> Result<ExcObject<T>, ExcError> {
    let back = euler_pairing(s, &x.cls, &e.cls)?;
    if !back.is_zero() {
        return Err(ExcError::MutationUndefined(back.to_wide()));
    }
    let c = euler_pairing(s, &e.cls, &x.cls)?;
    if c.is_zero() {
        return Ok(x.clone());
    }
    let signed = x.cls.add_scaled(-c, &e.cls)?;
    ExcObject::from_signed(s, &signed, x.shift)
}

/// `R_F(Y)`: class `[Y] - χ(Y, F)[F]`; the sheaf-level shift is `0` or `-1`.
pub fn right_mutate<T: Scalar>(
    s: &Surface,
    f: &ExcObject<T>,
    y: &ExcObject<T>,
) -> Result<ExcObject<T>, ExcError> {
    let back = euler_pairing(s, &f.cls, &y.cls)?;
    if !back.is_zero() {
        return Err(ExcError::MutationUndefined(back.to_wide()));
    }
    let c = euler_pairing(s, &y.cls, &f.cls)?;
    if c.is_zero() {
        return Ok(y.clone());
    }
    let signed = y.cls.add_scaled(-c, &f.cls)?;
    let (cls, flipped) = sheaf_normalize(s, &signed)?;
    Ok(ExcObject { cls, shift: y.shift - flipped as i64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Left: `L_{E1}···L_{Ek}(X)`, innermost `L_{Ek}` first. Right: `R_{Ek}···R_{E1}(X)`, innermost `R_{E1}` first.
pub fn mutate_through<T: Scalar>(
    s: &Surface,
    sub: &[ExcObject<T>],
    x: &ExcObject<T>,
    side: Side,
) -> Result<ExcObject<T>, ExcError> {
    let mut cur = x.clone();
    match side {
        Side::Left => {
            for e in sub.iter().rev() {
                cur = left_mutate(s, e, &cur)?;
            }
        }
        Side::Right => {
            for f in sub {
                cur = right_mutate(s, f, &cur)?;
            }
        }
    }
    Ok(cur)
}

/// A validated exceptional collection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "CollectionRepr<T>")]
pub struct Collection<T: Scalar> {
    surface: Surface,
    objects: Vec<ExcObject<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct CollectionRepr<T: Scalar> {
    surface: Surface,
    objects: Vec<ExcObject<T>>,
}

impl<T: Scalar> TryFrom<CollectionRepr<T>> for Collection<T> {
    type Error = ExcError;

    fn try_from(r: CollectionRepr<T>) -> Result<Self, Self::Error> {
        Collection::new(r.surface, r.objects)
    }
}

impl<T: Scalar> Collection<T> {
    pub fn new(surface: Surface, objects: Vec<ExcObject<T>>) -> Result<Self, ExcError> {
        for (i, o) in objects.iter().enumerate() {
            o.cls.check_integral(&surface)?;
            let (norm, flipped) = sheaf_normalize(&surface, &o.cls)?;
            if flipped || norm != o.cls {
                return Err(ExcError::NotNormalized(i));
            }
        }
        for j in 0..objects.len() {
            for i in 0..j {
                let back = chi(&surface, &objects[j], &objects[i])?;
                if !back.is_zero() {
                    return Err(ExcError::NotExceptionalCollection {
                        earlier: i,
                        later: j,
                        chi: back.to_wide(),
                    });
                }
            }
        }
        Ok(Collection { surface, objects })
    }

    pub fn of_sheaves(surface: Surface, classes: Vec<ChernClass<T>>) -> Result<Self, ExcError> {
        Collection::new(surface, classes.into_iter().map(ExcObject::sheaf).collect())
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn objects(&self) -> &[ExcObject<T>] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn into_objects(self) -> Vec<ExcObject<T>> {
        self.objects
    }

    /// Determinant of the class matrix in `(rank, c1, χ(O, -))` coordinates.
    pub fn class_determinant(&self) -> Result<T, ExcError> {
        let rows = self
            .objects
            .iter()
            .map(|o| o.cls.lattice_coordinates(&self.surface))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(scalar::determinant(&rows).map_err(LatticeError::from)?)
    }

    pub fn is_numerically_full(&self) -> bool {
        self.len() == self.surface.k_rank()
            && self.class_determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub fn require_full(&self) -> Result<(), ExcError> {
        if self.is_numerically_full() {
            return Ok(());
        }
        let det = if self.len() == self.surface.k_rank() {
            self.class_determinant()?.to_wide()
        } else {
            0
        };
        Err(ExcError::NotFull { len: self.len(), det })
    }

    pub fn is_pure(&self) -> bool {
        self.objects.iter().all(ExcObject::is_sheaf)
    }

    /// Every forward Hom-complex sits in degree zero.
    pub fn is_strong(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                matches!(
                    hom_profile(&self.surface, &self.objects[i], &self.objects[j]),
                    Ok(p) if p.concentrated_in(0)
                )
            })
        })
    }

    pub fn first_non_strong_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                match hom_profile(&self.surface, &self.objects[i], &self.objects[j]) {
                    Ok(p) if p.concentrated_in(0) => {}
                    _ => return Some((i, j)),
                }
            }
        }
        None
    }

    pub fn is_block(&self, blocks: &BlockStructure) -> bool {
        blocks.validate(self).is_ok()
    }

    /// `σ_i` for `i` in `2..=n`.
    pub fn sigma(&self, i: usize) -> Result<Self, ExcError> {
        self.check_index(i)?;
        let mut objs = self.objects.clone();
        let (a, b) = (&self.objects[i - 2], &self.objects[i - 1]);
        objs[i - 2] = left_mutate(&self.surface, a, b)?.shifted(-1);
        objs[i - 1] = a.clone();
        Collection::new(self.surface, objs)
    }

    pub fn sigma_inverse(&self, i: usize) -> Result<Self, ExcError> {
        self.check_index(i)?;
        let mut objs = self.objects.clone();
        let (a, b) = (&self.objects[i - 2], &self.objects[i - 1]);
        objs[i - 2] = b.clone();
        objs[i - 1] = right_mutate(&self.surface, b, a)?.shifted(1);
        Collection::new(self.surface, objs)
    }

    fn check_index(&self, i: usize) -> Result<(), ExcError> {
        if i < 2 || i > self.len() {
            return Err(ExcError::IndexOutOfRange { index: i, max: self.len() });
        }
        Ok(())
    }

    /// The dual collection `(F_n, …, F_1)` with `F_j = L_{E1}···L_{E_{j-1}}(E_j)`.
    pub fn dual(&self) -> Result<Self, ExcError> {
        let mut duals = self.dual_objects()?;
        duals.reverse();
        Collection::new(self.surface, duals)
    }

    /// `F_j` indexed like the `E_j` they are dual to.
    pub fn dual_objects(&self) -> Result<Vec<ExcObject<T>>, ExcError> {
        (0..self.len())
            .map(|j| mutate_through(&self.surface, &self.objects[..j], &self.objects[j], Side::Left))
            .collect()
    }

    pub fn with_objects(&self, objects: Vec<ExcObject<T>>) -> Result<Self, ExcError> {
        Collection::new(self.surface, objects)
    }

    pub fn labels(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.label(&self.surface)).collect()
    }
}

impl<T: Scalar> fmt::Display for Collection<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.labels().join(", "))
    }
}

/// Partition of a collection into consecutive, mutually orthogonal blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockStructure {
    pub blocks: Vec<Vec<usize>>,
}

impl BlockStructure {
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut next = 0;
        let blocks = sizes
            .iter()
            .map(|&k| {
                let b: Vec<usize> = (next..next + k).collect();
                next += k;
                b
            })
            .collect();
        BlockStructure { blocks }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn validate<T: Scalar>(&self, c: &Collection<T>) -> Result<(), ExcError> {
        let mut next = 0;
        for b in &self.blocks {
            if b.is_empty() {
                return Err(ExcError::InvalidBlocks("empty block".into()));
            }
            for &k in b {
                if k != next {
                    return Err(ExcError::InvalidBlocks(format!(
                        "blocks must list consecutive indices, expected {next} found {k}"
                    )));
                }
                next += 1;
            }
        }
        if next != c.len() {
            return Err(ExcError::InvalidBlocks(format!(
                "blocks cover {next} objects, collection has {}",
                c.len()
            )));
        }
        let s = c.surface();
        for b in &self.blocks {
            for (x, &i) in b.iter().enumerate() {
                for &j in &b[x + 1..] {
                    let (ei, ej) = (&c.objects()[i], &c.objects()[j]);
                    if !chi(&s, ei, ej)?.is_zero() || !chi(&s, ej, ei)?.is_zero() {
                        return Err(ExcError::InvalidBlocks(format!(
                            "objects {i} and {j} in one block are not orthogonal"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `τ_i` for `i` in `2..=d`: block `i` is mutated objectwise through block `i - 1`,
/// shifted by `-1`, and the two blocks swap places.
pub fn tau<T: Scalar>(
    c: &Collection<T>,
    blocks: &BlockStructure,
    i: usize,
) -> Result<(Collection<T>, BlockStructure), ExcError> {
    blocks.validate(c)?;
    let d = blocks.blocks.len();
    if i < 2 || i > d {
        return Err(ExcError::IndexOutOfRange { index: i, max: d });
    }
    let s = c.surface();
    let objs = c.objects();
    let prev: Vec<_> = blocks.blocks[i - 2].iter().map(|&k| objs[k].clone()).collect();
    let cur: Vec<_> = blocks.blocks[i - 1].iter().map(|&k| objs[k].clone()).collect();
    let moved = cur
        .iter()
        .map(|x| Ok(mutate_through(&s, &prev, x, Side::Left)?.shifted(-1)))
        .collect::<Result<Vec<_>, ExcError>>()?;
    rebuild_blocks(c, blocks, i, moved, prev)
}

pub fn tau_inverse<T: Scalar>(
    c: &Collection<T>,
    blocks: &BlockStructure,
    i: usize,
) -> Result<(Collection<T>, BlockStructure), ExcError> {
    blocks.validate(c)?;
    let d = blocks.blocks.len();
    if i < 2 || i > d {
        return Err(ExcError::IndexOutOfRange { index: i, max: d });
    }
    let s = c.surface();
    let objs = c.objects();
    let prev: Vec<_> = blocks.blocks[i - 2].iter().map(|&k| objs[k].clone()).collect();
    let cur: Vec<_> = blocks.blocks[i - 1].iter().map(|&k| objs[k].clone()).collect();
    let moved = prev
        .iter()
        .map(|x| Ok(mutate_through(&s, &cur, x, Side::Right)?.shifted(1)))
        .collect::<Result<Vec<_>, ExcError>>()?;
    rebuild_blocks(c, blocks, i, cur, moved)
}

fn rebuild_blocks<T: Scalar>(
    c: &Collection<T>,
    blocks: &BlockStructure,
    i: usize,
    first: Vec<ExcObject<T>>,
    second: Vec<ExcObject<T>>,
) -> Result<(Collection<T>, BlockStructure), ExcError> {
    let mut sizes = blocks.sizes();
    sizes.swap(i - 2, i - 1);
    let start = blocks.blocks[i - 2][0];
    let mut objs = c.objects().to_vec();
    for (k, o) in first.into_iter().chain(second).enumerate() {
        objs[start + k] = o;
    }
    let out = c.with_objects(objs)?;
    let bs = BlockStructure::from_sizes(&sizes);
    bs.validate(&out)?;
    Ok((out, bs))
}
