//! Helices of type `(n, 3)` on del Pezzo surfaces.
//!
//! A helix is stored as one thread `E_0, …, E_{n-1}`; every other object is
//! `E_{i + kn} = E_i ⊗ ω^{-k}` with the same shift. Levellings are stored over
//! the same period and extended by `φ(E_{i+n}) = φ(E_i) + 3`.

use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::excol::{
    chi, hom_profile, mutate_through, slope_rule_profile, Collection, ExcError, ExcObject,
    HomProfile, Side,
};
use crate::klattice::{serre_twist, slope_compare, LatticeError, SlopeOrder, Surface};
use crate::scalar::Scalar;

/// `d` for helices on surfaces.
pub const HELIX_D: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HelixError {
    #[error(transparent)]
    Collection(#[from] ExcError),
    #[error("helix type (n, {0}) is not supported; surfaces only carry d = 3")]
    UnsupportedType(i64),
    #[error("declared period {declared} differs from thread length {actual}")]
    PeriodMismatch { declared: usize, actual: usize },
    #[error("helix is not strong: objects {0} and {1} have higher Hom")]
    NotStrong(i64, i64),
    #[error("helix is not geometric: objects {0} and {1} have Hom outside degree zero")]
    NotGeometric(i64, i64),
    #[error("invalid levelling: {0}")]
    InvalidLevelling(String),
    #[error("level {0} does not fit in a single thread")]
    NoContainingThread(i64),
    #[error("vertex {vertex} out of range for period {period}")]
    VertexOutOfRange { vertex: usize, period: usize },
    #[error("no height function: {0}")]
    NoHeightFunction(String),
    #[error("reordering failed: {0}")]
    Reorder(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

impl From<LatticeError> for HelixError {
    fn from(e: LatticeError) -> Self {
        HelixError::Collection(e.into())
    }
}

/// A helix generated by a numerically full exceptional collection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Helix<T: Scalar> {
    thread: Collection<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct HelixRepr<T: Scalar> {
    surface: Surface,
    objects: Vec<ExcObject<T>>,
    #[serde(default)]
    period: Option<usize>,
    #[serde(default)]
    d: Option<i64>,
}

impl<T: Scalar> Serialize for Helix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HelixRepr {
            surface: self.surface(),
            objects: self.thread.objects().to_vec(),
            period: Some(self.period()),
            d: Some(HELIX_D),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Helix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = HelixRepr::<T>::deserialize(deserializer)?;
        Helix::from_parts(r.surface, r.objects, r.period, r.d).map_err(serde::de::Error::custom)
    }
}

impl<T: Scalar> Helix<T> {
    pub fn new(thread: Collection<T>) -> Result<Self, HelixError> {
        thread.require_full()?;
        Ok(Helix { thread })
    }

    pub fn from_parts(
        surface: Surface,
        objects: Vec<ExcObject<T>>,
        period: Option<usize>,
        d: Option<i64>,
    ) -> Result<Self, HelixError> {
        if let Some(d) = d {
            if d != HELIX_D {
                return Err(HelixError::UnsupportedType(d));
            }
        }
        if let Some(p) = period {
            if p != objects.len() {
                return Err(HelixError::PeriodMismatch { declared: p, actual: objects.len() });
            }
        }
        Helix::new(Collection::new(surface, objects)?)
    }

    pub fn surface(&self) -> Surface {
        self.thread.surface()
    }

    pub fn period(&self) -> usize {
        self.thread.len()
    }

    pub fn thread(&self) -> &Collection<T> {
        &self.thread
    }

    fn n(&self) -> i64 {
        self.period() as i64
    }

    /// `E_i` for any integer `i`.
    pub fn object_at(&self, i: i64) -> Result<ExcObject<T>, HelixError> {
        let n = self.n();
        let base = &self.thread.objects()[i.rem_euclid(n) as usize];
        let periods = i.div_euclid(n);
        if periods == 0 {
            return Ok(base.clone());
        }
        Ok(base.twisted(&self.surface(), -periods)?)
    }

    pub fn window(&self, start: i64, len: usize) -> Result<Vec<ExcObject<T>>, HelixError> {
        (start..start + len as i64).map(|i| self.object_at(i)).collect()
    }

    /// The thread `(E_start, …, E_{start+n-1})`.
    pub fn thread_from(&self, start: i64) -> Result<Collection<T>, HelixError> {
        Ok(Collection::new(self.surface(), self.window(start, self.period())?)?)
    }

    /// The helix whose objects at positions `start..start+n` are `window`, re-based to start at `0`.
    pub fn from_window(
        surface: Surface,
        start: i64,
        window: Vec<ExcObject<T>>,
    ) -> Result<Self, HelixError> {
        let n = window.len() as i64;
        let mut objs = Vec::with_capacity(window.len());
        for p in 0..n {
            let j = start + (p - start).rem_euclid(n);
            let k = (j - p) / n;
            objs.push(window[(j - start) as usize].twisted(&surface, k)?);
        }
        Helix::new(Collection::new(surface, objs)?)
    }

    pub fn rebased(&self, start: i64) -> Result<Self, HelixError> {
        Helix::new(self.thread_from(start)?)
    }

    /// Turning the screw: the new `E_i` is the old `E_{i+1}`.
    pub fn rho(&self) -> Result<Self, HelixError> {
        self.rebased(1)
    }

    pub fn rho_inverse(&self) -> Result<Self, HelixError> {
        self.rebased(-1)
    }

    /// Replaces `(E_{i-1}, E_i)` by `(L_{E_{i-1}}(E_i)[-1], E_{i-1})` in every period.
    pub fn sigma(&self, i: i64) -> Result<Self, HelixError> {
        let start = i - 1;
        let t = self.thread_from(start)?.sigma(2)?;
        Helix::from_window(self.surface(), start, t.into_objects())
    }

    pub fn sigma_inverse(&self, i: i64) -> Result<Self, HelixError> {
        let start = i - 1;
        let t = self.thread_from(start)?.sigma_inverse(2)?;
        Helix::from_window(self.surface(), start, t.into_objects())
    }

    /// `Some(k)` if `other.object_at(p) == self.object_at(p + k)` for all `p`.
    pub fn reindexing_offset(&self, other: &Self) -> Option<i64> {
        if self.surface() != other.surface() || self.period() != other.period() {
            return None;
        }
        let s = self.surface();
        let n = self.n();
        let head = &other.thread.objects()[0];
        self.thread.objects().iter().enumerate().find_map(|(p, o)| {
            let t = twist_offset(&s, o, head)?;
            let k = p as i64 - t * n;
            let same = self
                .thread_from(k)
                .map(|c| c.objects() == other.thread.objects())
                .unwrap_or(false);
            same.then_some(k)
        })
    }

    pub fn same_up_to_reindexing(&self, other: &Self) -> bool {
        self.reindexing_offset(other).is_some()
    }

    /// Every thread is strong: pairs at distance `< n` have Hom only in degree zero.
    pub fn is_strong(&self) -> bool {
        self.strong_violation().is_none()
    }

    pub fn strong_violation(&self) -> Option<(i64, i64)> {
        let n = self.n();
        let s = self.surface();
        let objs = self.window(0, 2 * self.period()).ok()?;
        for p in 0..n {
            for q in p + 1..p + n {
                let ok = matches!(
                    hom_profile(&s, &objs[p as usize], &objs[q as usize]),
                    Ok(h) if h.concentrated_in(0)
                );
                if !ok {
                    return Some((p, q));
                }
            }
        }
        None
    }

    /// Number of extra periods past which the slope gap forces degree-zero Homs.
    pub fn twist_bound(&self) -> i64 {
        let s = self.surface();
        let bundles: Vec<(i128, i128)> = self
            .thread
            .objects()
            .iter()
            .filter(|o| o.cls.rank > T::zero())
            .filter_map(|o| Some((o.cls.degree(&s).ok()?.to_wide(), o.cls.rank.to_wide())))
            .collect();
        let by_slope = |a: &(i128, i128), b: &(i128, i128)| (a.0 * b.1).cmp(&(b.0 * a.1));
        let (Some(max), Some(min)) =
            (bundles.iter().max_by(|a, b| by_slope(a, b)), bundles.iter().min_by(|a, b| by_slope(a, b)))
        else {
            return 1;
        };
        let num = max.0 * min.1 - min.0 * max.1;
        let den = max.1 * min.1 * s.degree() as i128;
        let ceil = (num + den - 1).div_euclid(den);
        ceil as i64 + 1
    }

    /// Strong, and all pairs `E_p, E_q` with `q - p >= n` up to the twist bound
    /// have Hom in degree zero by the slope rule.
    pub fn is_geometric(&self) -> bool {
        self.geometric_violation().is_none()
    }

    pub fn geometric_violation(&self) -> Option<(i64, i64)> {
        if let Some(v) = self.strong_violation() {
            return Some(v);
        }
        let n = self.n();
        let s = self.surface();
        let reach = (self.twist_bound() + 1) * n;
        let objs = self.window(0, (n + reach) as usize).ok()?;
        for p in 0..n {
            for q in p + n..p + reach {
                let ok = matches!(
                    slope_rule_profile(&s, &objs[p as usize], &objs[q as usize]),
                    Ok(Some(h)) if h.concentrated_in(0)
                );
                if !ok {
                    return Some((p, q));
                }
            }
        }
        None
    }

    pub fn require_geometric(&self) -> Result<(), HelixError> {
        match self.geometric_violation() {
            None => Ok(()),
            Some((p, q)) if q - p < self.n() => Err(HelixError::NotStrong(p, q)),
            Some((p, q)) => Err(HelixError::NotGeometric(p, q)),
        }
    }

    /// Lattice automorphism swapping the two rulings of the quadric.
    pub fn ruling_swapped(&self) -> Result<Self, HelixError> {
        let s = self.surface();
        if s != Surface::Quadric {
            return Err(HelixError::Invariant("ruling swap only exists on the quadric".into()));
        }
        let objs = self
            .thread
            .objects()
            .iter()
            .map(|o| {
                let mut o = o.clone();
                o.cls.c1.swap(0, 1);
                o
            })
            .collect();
        Helix::new(Collection::new(s, objs)?)
    }
}

/// `Some(k)` with `b = a ⊗ ω^k`, same shift.
pub fn twist_offset<T: Scalar>(s: &Surface, a: &ExcObject<T>, b: &ExcObject<T>) -> Option<i64> {
    if a.shift != b.shift || a.cls.rank != b.cls.rank {
        return None;
    }
    let r = a.cls.rank.to_wide();
    let k = if r > 0 {
        let kk = s.canonical::<T>();
        let diff: Vec<T> = b.cls.c1.iter().zip(&a.cls.c1).map(|(&x, &y)| x - y).collect();
        let dot = s.intersection(&diff, &kk).ok()?.to_wide();
        let unit = r * s.degree() as i128;
        if dot % unit != 0 {
            return None;
        }
        dot / unit
    } else {
        let diff = (a.cls.ch2_x2 - b.cls.ch2_x2).to_wide();
        if diff % 2 != 0 {
            return None;
        }
        diff / 2
    };
    let k = i64::try_from(k).ok()?;
    (serre_twist(s, &a.cls, k).ok()? == b.cls).then_some(k)
}

/// Monotone labelling of one period, extended by `+3` per period.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Levelling {
    pub values: Vec<i64>,
}

impl Levelling {
    pub fn new(values: Vec<i64>) -> Result<Self, HelixError> {
        let l = Levelling { values };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<(), HelixError> {
        let v = &self.values;
        if v.is_empty() {
            return Err(HelixError::InvalidLevelling("empty".into()));
        }
        if let Some(w) = v.windows(2).find(|w| w[0] > w[1]) {
            return Err(HelixError::InvalidLevelling(format!("{} followed by {}", w[0], w[1])));
        }
        if v[v.len() - 1] > v[0] + HELIX_D {
            return Err(HelixError::InvalidLevelling(format!(
                "last value {} exceeds first value {} plus {HELIX_D}",
                v[v.len() - 1],
                v[0]
            )));
        }
        Ok(())
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, p: i64) -> i64 {
        let n = self.values.len() as i64;
        self.values[p.rem_euclid(n) as usize] + HELIX_D * p.div_euclid(n)
    }

    pub fn shifted(&self, k: i64) -> Self {
        Levelling { values: self.values.iter().map(|v| v + k).collect() }
    }

    /// Sorted helix positions at level `m`.
    pub fn level_positions(&self, m: i64) -> Vec<i64> {
        let n = self.values.len() as i64;
        let mut out: Vec<i64> = (0..n)
            .filter(|&p| (m - self.values[p as usize]).rem_euclid(HELIX_D) == 0)
            .map(|p| p + n * (m - self.values[p as usize]).div_euclid(HELIX_D))
            .collect();
        out.sort_unstable();
        out
    }

    /// Values over positions `start..start+n`.
    pub fn window(&self, start: i64) -> Vec<i64> {
        (start..start + self.values.len() as i64).map(|p| self.at(p)).collect()
    }

    /// The levelling whose values at `start..start+n` are `window`.
    pub fn from_window(start: i64, window: &[i64]) -> Result<Self, HelixError> {
        let n = window.len() as i64;
        let values = (0..n)
            .map(|p| {
                let j = start + (p - start).rem_euclid(n);
                window[(j - start) as usize] - HELIX_D * ((j - p) / n)
            })
            .collect();
        Levelling::new(values)
    }
}

/// A levelling tilting at level zero with a single object at that level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeightFunction {
    pub vertex: usize,
    pub levelling: Levelling,
}

/// `Hom•(F_j, F_i)` for `i <= j`, where `F` is the dual collection.
pub fn p_relatedness<T: Scalar>(
    c: &Collection<T>,
    i: usize,
    j: usize,
) -> Result<HomProfile<T>, HelixError> {
    let duals = c.dual_objects()?;
    relatedness_from_duals(&c.surface(), &duals, i, j)
}

fn relatedness_from_duals<T: Scalar>(
    s: &Surface,
    duals: &[ExcObject<T>],
    i: usize,
    j: usize,
) -> Result<HomProfile<T>, HelixError> {
    debug_assert!(i <= j);
    if i == j {
        return Ok(HomProfile::Concentrated { degree: 0, dim: T::one() });
    }
    Ok(hom_profile(s, &duals[j], &duals[i])?)
}

fn tilting_with_duals<T: Scalar>(
    s: &Surface,
    duals: &[ExcObject<T>],
    phi: &[i64],
    m: i64,
) -> Result<bool, HelixError> {
    let n = phi.len();
    for i in (0..n).filter(|&i| phi[i] == m) {
        for j in 0..n {
            let p = phi[j];
            let ok = if i <= j {
                relatedness_from_duals(s, duals, i, j)?.concentrated_in(p - m)
            } else {
                relatedness_from_duals(s, duals, j, i)?.concentrated_in(m - p)
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn require_monotone(phi: &[i64]) -> Result<(), HelixError> {
    if let Some(w) = phi.windows(2).find(|w| w[0] > w[1]) {
        return Err(HelixError::InvalidLevelling(format!("{} followed by {}", w[0], w[1])));
    }
    Ok(())
}

/// Whether a levelling of a full strong collection is tilting at level `m`.
pub fn is_tilting_at_level_collection<T: Scalar>(
    c: &Collection<T>,
    phi: &[i64],
    m: i64,
) -> Result<bool, HelixError> {
    if phi.len() != c.len() {
        return Err(HelixError::InvalidLevelling(format!(
            "{} values for {} objects",
            phi.len(),
            c.len()
        )));
    }
    require_monotone(phi)?;
    let duals = c.dual_objects()?;
    tilting_with_duals(&c.surface(), &duals, phi, m)
}

/// Helix version: checks the thread that starts at the first object of level `m`.
pub fn is_tilting_at_level<T: Scalar>(
    h: &Helix<T>,
    phi: &Levelling,
    m: i64,
) -> Result<bool, HelixError> {
    is_tilting_at_level_from(h, phi, m, None)
}

/// As [`is_tilting_at_level`] but using the thread starting at `start`, which must contain level `m`.
pub fn is_tilting_at_level_from<T: Scalar>(
    h: &Helix<T>,
    phi: &Levelling,
    m: i64,
    start: Option<i64>,
) -> Result<bool, HelixError> {
    check_levelling(h, phi)?;
    let level = phi.level_positions(m);
    let (Some(&first), Some(&last)) = (level.first(), level.last()) else {
        return Ok(true);
    };
    let n = h.n();
    let start = start.unwrap_or(first);
    if first < start || last >= start + n {
        return Err(HelixError::NoContainingThread(m));
    }
    let thread = h.thread_from(start)?;
    is_tilting_at_level_collection(&thread, &phi.window(start), m)
}

fn check_levelling<T: Scalar>(h: &Helix<T>, phi: &Levelling) -> Result<(), HelixError> {
    phi.validate()?;
    if phi.period() != h.period() {
        return Err(HelixError::InvalidLevelling(format!(
            "levelling has period {}, helix has {}",
            phi.period(),
            h.period()
        )));
    }
    Ok(())
}

/// All height functions for object `e` with values in `[-bound, bound]`.
pub fn enumerate_height_functions<T: Scalar>(
    c: &Collection<T>,
    e: usize,
    bound: i64,
) -> Result<Vec<Vec<i64>>, HelixError> {
    let n = c.len();
    if e >= n {
        return Err(HelixError::VertexOutOfRange { vertex: e, period: n });
    }
    let duals = c.dual_objects()?;
    let s = c.surface();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec<T: Scalar>(
        s: &Surface,
        duals: &[ExcObject<T>],
        e: usize,
        bound: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<(), HelixError> {
        let n = duals.len();
        if cur.len() == n {
            if tilting_with_duals(s, duals, cur, 0)? {
                out.push(cur.clone());
            }
            return Ok(());
        }
        let k = cur.len();
        let lo = cur.last().copied().unwrap_or(-bound);
        for v in lo..=bound {
            if (k == e) != (v == 0) {
                continue;
            }
            cur.push(v);
            rec(s, duals, e, bound, cur, out)?;
            cur.pop();
        }
        Ok(())
    }
    rec(&s, &duals, e, bound, &mut cur, &mut out)?;
    Ok(out)
}

/// Herzog order on the dual: for `i > j`, `f(F_i) >= f(F_j)`, and on ties `F_i` is not below `F_j`.
pub fn herzog_order_violation<T: Scalar>(
    c: &Collection<T>,
) -> Result<Option<(usize, usize)>, HelixError> {
    let duals = c.dual_objects()?;
    let s = c.surface();
    for i in 0..duals.len() {
        for j in 0..i {
            let (fi, fj) = (&duals[i], &duals[j]);
            if fi.shift < fj.shift {
                return Ok(Some((j, i)));
            }
            if fi.shift == fj.shift && slope_compare(&s, &fi.cls, &fj.cls)? == SlopeOrder::Less {
                return Ok(Some((j, i)));
            }
        }
    }
    Ok(None)
}

/// Reorders a full strong collection by swapping adjacent orthogonal pairs until
/// the Herzog order holds on the dual collection.
pub fn reorder_collection<T: Scalar>(c: &Collection<T>) -> Result<Collection<T>, HelixError> {
    let s = c.surface();
    let n = c.len();
    let mut cur = c.clone();
    let cap = n * n + 1;
    for _ in 0..cap {
        let duals = cur.dual_objects()?;
        let mut swapped = false;
        for i in 0..n.saturating_sub(1) {
            let (fi, fj) = (&duals[i], &duals[i + 1]);
            let bad = fj.shift < fi.shift
                || (fj.shift == fi.shift && slope_compare(&s, &fj.cls, &fi.cls)? == SlopeOrder::Less);
            if !bad {
                continue;
            }
            let objs = cur.objects();
            let orthogonal = chi(&s, &objs[i], &objs[i + 1])?.is_zero()
                && chi(&s, &objs[i + 1], &objs[i])?.is_zero();
            if orthogonal {
                let mut o = objs.to_vec();
                o.swap(i, i + 1);
                cur = Collection::new(s, o)?;
                swapped = true;
                break;
            }
        }
        if !swapped {
            break;
        }
    }
    match herzog_order_violation(&cur)? {
        None => Ok(cur),
        Some((j, i)) => Err(HelixError::Reorder(format!(
            "dual objects {j} and {i} remain out of order in {cur}"
        ))),
    }
}

/// Minimal height function for the object at `vertex`, built on the thread that starts there.
///
/// Each later object `E_j` of that thread is pinned to the degree of
/// `Hom•(F_j, F_0)`; orthogonal ones take the running maximum.
pub fn build_height_function<T: Scalar>(
    h: &Helix<T>,
    vertex: usize,
) -> Result<HeightFunction, HelixError> {
    let n = h.period();
    if vertex >= n {
        return Err(HelixError::VertexOutOfRange { vertex, period: n });
    }
    if let Some((p, q)) = h.strong_violation() {
        return Err(HelixError::NotStrong(p, q));
    }
    let start = vertex as i64;
    let thread = h.thread_from(start)?;
    let duals = thread.dual_objects()?;
    let s = h.surface();
    let mut phi = vec![0i64; n];
    let mut floor = 1;
    for j in 1..n {
        match relatedness_from_duals(&s, &duals, 0, j)? {
            HomProfile::Zero => phi[j] = floor,
            HomProfile::Concentrated { degree, .. } => {
                if degree < floor {
                    return Err(HelixError::NoHeightFunction(format!(
                        "object {j} of {thread} is pinned to level {degree} below {floor}"
                    )));
                }
                phi[j] = degree;
                floor = degree;
            }
        }
    }
    if phi[n - 1] > HELIX_D - 1 {
        return Err(HelixError::NoHeightFunction(format!(
            "last level {} exceeds {}",
            phi[n - 1],
            HELIX_D - 1
        )));
    }
    let levelling = Levelling::from_window(start, &phi)?;
    if !is_tilting_at_level(h, &levelling, 0)? {
        return Err(HelixError::Invariant(format!(
            "constructed levelling {:?} is not tilting at level 0",
            levelling.values
        )));
    }
    Ok(HeightFunction { vertex, levelling })
}

/// Levelled mutation `σ_m(H, φ)`: level `m` is mutated through level `m - 1`,
/// shifted by `-1` and placed before it.
pub fn levelled_sigma<T: Scalar>(
    h: &Helix<T>,
    phi: &Levelling,
    m: i64,
) -> Result<(Helix<T>, Levelling), HelixError> {
    levelled_move(h, phi, m, Side::Left)
}

/// Inverse of [`levelled_sigma`]: level `m - 1` is right-mutated through level `m`,
/// shifted by `+1` and placed after it.
pub fn levelled_sigma_inverse<T: Scalar>(
    h: &Helix<T>,
    phi: &Levelling,
    m: i64,
) -> Result<(Helix<T>, Levelling), HelixError> {
    levelled_move(h, phi, m, Side::Right)
}

fn levelled_move<T: Scalar>(
    h: &Helix<T>,
    phi: &Levelling,
    m: i64,
    side: Side,
) -> Result<(Helix<T>, Levelling), HelixError> {
    check_levelling(h, phi)?;
    let lower = phi.level_positions(m - 1);
    let upper = phi.level_positions(m);
    let start = match (lower.first(), upper.first()) {
        (Some(&a), _) => a,
        (None, Some(&b)) => b,
        (None, None) => return Ok((h.clone(), phi.clone())),
    };
    let n = h.n();
    let end = upper.last().or(lower.last()).copied().unwrap_or(start);
    if end >= start + n {
        return Err(HelixError::NoContainingThread(m));
    }
    let s = h.surface();
    let window = h.window(start, h.period())?;
    let mut values = phi.window(start);
    let (k_low, k_up) = (lower.len(), upper.len());
    let low: Vec<_> = window[..k_low].to_vec();
    let up: Vec<_> = window[k_low..k_low + k_up].to_vec();
    let (first, second) = match side {
        Side::Left => {
            let moved = up
                .iter()
                .map(|x| Ok(mutate_through(&s, &low, x, Side::Left)?.shifted(-1)))
                .collect::<Result<Vec<_>, ExcError>>()?;
            (moved, low)
        }
        Side::Right => {
            let moved = low
                .iter()
                .map(|x| Ok(mutate_through(&s, &up, x, Side::Right)?.shifted(1)))
                .collect::<Result<Vec<_>, ExcError>>()?;
            (up, moved)
        }
    };
    let (k1, k2) = (first.len(), second.len());
    let mut new_window = first;
    new_window.extend(second);
    new_window.extend_from_slice(&window[k_low + k_up..]);
    for v in values.iter_mut().take(k1) {
        *v = m - 1;
    }
    for v in values.iter_mut().skip(k1).take(k2) {
        *v = m;
    }
    let helix = Helix::from_window(s, start, new_window)?;
    let levelling = Levelling::from_window(start, &values)?;
    Ok((helix, levelling))
}

/// Result of tilting a helix at a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiltOutcome<T: Scalar> {
    pub helix: Helix<T>,
    pub height: HeightFunction,
    /// The helix the height function lives on (differs from the input only after reordering).
    pub source: Helix<T>,
    /// `psi[v]` is the vertex of the output corresponding to vertex `v` of the input.
    pub psi: Vec<usize>,
}

/// Vertex tilt. Left is `σ_0(H, φ)`; right moves the vertex's object past level one
/// by right mutation. Both are computed and must agree up to reindexing.
pub fn tilt<T: Scalar>(
    h: &Helix<T>,
    vertex: usize,
    direction: Side,
) -> Result<TiltOutcome<T>, HelixError> {
    let n = h.period();
    if vertex >= n {
        return Err(HelixError::VertexOutOfRange { vertex, period: n });
    }
    h.require_geometric()?;
    let (source, hf) = match build_height_function(h, vertex) {
        Ok(hf) => (h.clone(), hf),
        Err(HelixError::NoHeightFunction(first)) => reordered_height_function(h, vertex)
            .map_err(|e| HelixError::NoHeightFunction(format!("{first}; after reordering: {e}")))?,
        Err(e) => return Err(e),
    };
    let (left, _) = levelled_sigma(&source, &hf.levelling, 0)?;
    let (right, _) = levelled_sigma_inverse(&source, &hf.levelling, 1)?;
    if !left.same_up_to_reindexing(&right) {
        return Err(HelixError::Invariant(format!(
            "left tilt {} and right tilt {} differ",
            left.thread(),
            right.thread()
        )));
    }
    let out = match direction {
        Side::Left => left,
        Side::Right => right,
    };
    if let Some((p, q)) = out.geometric_violation() {
        return Err(HelixError::Invariant(format!(
            "tilted helix {} is not geometric at ({p}, {q})",
            out.thread()
        )));
    }
    let psi = vertex_bijection(h, &out, vertex)?;
    Ok(TiltOutcome { helix: out, height: hf, source, psi })
}

fn reordered_height_function<T: Scalar>(
    h: &Helix<T>,
    vertex: usize,
) -> Result<(Helix<T>, HeightFunction), HelixError> {
    let s = h.surface();
    let target = h.object_at(vertex as i64)?;
    let start = vertex as i64;
    let reordered = reorder_collection(&h.thread_from(start)?)?;
    let pos = reordered
        .objects()
        .iter()
        .position(|o| *o == target)
        .ok_or_else(|| HelixError::Invariant("object lost while reordering".into()))?;
    let helix = Helix::from_window(s, start, reordered.into_objects())?;
    let v = (start + pos as i64).rem_euclid(h.n()) as usize;
    let hf = build_height_function(&helix, v)?;
    Ok((helix, hf))
}

/// Matches vertices of two helices by ω-orbit; the one unmatched vertex on each side is paired up.
pub fn vertex_bijection<T: Scalar>(
    from: &Helix<T>,
    to: &Helix<T>,
    vertex: usize,
) -> Result<Vec<usize>, HelixError> {
    let s = from.surface();
    let n = from.period();
    let mut psi = vec![usize::MAX; n];
    let mut used = HashSet::new();
    for (p, a) in from.thread().objects().iter().enumerate() {
        if let Some(q) = to
            .thread()
            .objects()
            .iter()
            .position(|b| twist_offset(&s, a, b).is_some())
        {
            if used.insert(q) {
                psi[p] = q;
            }
        }
    }
    let free_from: Vec<usize> = (0..n).filter(|&p| psi[p] == usize::MAX).collect();
    let free_to: Vec<usize> = (0..n).filter(|q| !used.contains(q)).collect();
    match (free_from.as_slice(), free_to.as_slice()) {
        ([p], [q]) if *p == vertex => {
            psi[*p] = *q;
            Ok(psi)
        }
        ([], []) => Ok(psi),
        _ => Err(HelixError::Invariant(format!(
            "vertex bijection is ambiguous: unmatched {free_from:?} -> {free_to:?}"
        ))),
    }
}

/// `L_{E_1} L_{E_2}(X)` style helpers used by property checks on block helices.
pub fn left_through_levels<T: Scalar>(
    s: &Surface,
    levels: &[Vec<ExcObject<T>>],
    x: &ExcObject<T>,
) -> Result<ExcObject<T>, HelixError> {
    let mut cur = x.clone();
    for level in levels.iter().rev() {
        cur = mutate_through(s, level, &cur, Side::Left)?;
    }
    Ok(cur)
}

pub fn right_through_levels<T: Scalar>(
    s: &Surface,
    levels: &[Vec<ExcObject<T>>],
    x: &ExcObject<T>,
) -> Result<ExcObject<T>, HelixError> {
    let mut cur = x.clone();
    for level in levels {
        cur = mutate_through(s, level, &cur, Side::Right)?;
    }
    Ok(cur)
}

/// Signed class sanity: `χ(A, B) = χ(B, A ⊗ ω)` for sheaf classes.
pub fn serre_pairing_holds<T: Scalar>(
    s: &Surface,
    a: &ExcObject<T>,
    b: &ExcObject<T>,
) -> Result<bool, HelixError> {
    let lhs = chi(s, a, b)?;
    let rhs = chi(s, b, &a.twisted(s, 1)?)?;
    Ok(lhs == rhs)
}
