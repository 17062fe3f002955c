#![allow(dead_code)]

//! Deterministic identity checks shared by the property and acceptance targets.

use helixtilt_core::excol::Side;
use helixtilt_core::helix::{left_through_levels, right_through_levels};
use helixtilt_core::seeds::{seed_blocks, seed_collection, seed_helix};
use helixtilt_core::{
    chi, fz_mutate, left_mutate, levelled_sigma, mutate_through, BMatrix, Collection, Helix,
    Levelling,
};
use rand::Rng;

pub type Check = Result<(), String>;

pub fn collection(name: &str) -> Collection<i64> {
    seed_collection(name).unwrap()
}

pub fn helix(name: &str) -> Helix<i64> {
    seed_helix(name).unwrap().unwrap()
}

pub fn random_word<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<(usize, bool)> {
    (0..len).map(|_| (rng.gen_range(2..=n), rng.gen())).collect()
}

pub fn apply_word(c: &Collection<i64>, word: &[(usize, bool)]) -> Result<Collection<i64>, String> {
    let mut cur = c.clone();
    for &(i, inv) in word {
        cur = if inv { cur.sigma_inverse(i) } else { cur.sigma(i) }.map_err(|e| e.to_string())?;
    }
    Ok(cur)
}

/// Braid and commutation relations after `words` random prefixes of length at most 4.
pub fn braid_relations<R: Rng>(rng: &mut R, name: &str, words: usize) -> Check {
    let base = collection(name);
    let n = base.len();
    for _ in 0..words {
        let len = rng.gen_range(0..=4);
        let w = random_word(rng, n, len);
        let c = apply_word(&base, &w)?;
        for i in 2..n {
            let lhs = apply_word(&c, &[(i, false), (i + 1, false), (i, false)])?;
            let rhs = apply_word(&c, &[(i + 1, false), (i, false), (i + 1, false)])?;
            if lhs != rhs {
                return Err(format!("{name}: braid at {i} after {w:?}"));
            }
        }
        for i in 2..=n {
            for j in i + 2..=n {
                let lhs = apply_word(&c, &[(i, false), (j, false)])?;
                let rhs = apply_word(&c, &[(j, false), (i, false)])?;
                if lhs != rhs {
                    return Err(format!("{name}: commutation of {i},{j} after {w:?}"));
                }
            }
        }
    }
    Ok(())
}

/// Affine braid relations on helices after random prefixes.
pub fn affine_braid_relations<R: Rng>(rng: &mut R, name: &str, words: usize) -> Check {
    let err = |e: helixtilt_core::HelixError| e.to_string();
    for _ in 0..words {
        let mut h = helix(name);
        for _ in 0..rng.gen_range(0..=3) {
            let k = rng.gen_range(-6..6);
            h = if rng.gen() { h.sigma(k) } else { h.sigma_inverse(k) }.map_err(err)?;
        }
        let i = rng.gen_range(-6..6);
        let lhs = h.sigma(i).and_then(|x| x.sigma(i + 1)).and_then(|x| x.sigma(i)).map_err(err)?;
        let rhs = h.sigma(i + 1).and_then(|x| x.sigma(i)).and_then(|x| x.sigma(i + 1)).map_err(err)?;
        if lhs != rhs {
            return Err(format!("{name}: affine braid at {i} on {}", h.thread()));
        }
    }
    Ok(())
}

/// `L_{E_1}···L_{E_{n-1}}(E_n) = E_n ⊗ ω [2]` on the seed and on random mutations of it.
pub fn serre_identity<R: Rng>(rng: &mut R, name: &str, words: usize) -> Check {
    let base = collection(name);
    let n = base.len();
    for k in 0..=words {
        let w = if k == 0 { Vec::new() } else { random_word(rng, n, 3) };
        let c = apply_word(&base, &w)?;
        let s = c.surface();
        let objs = c.objects();
        let last = &objs[n - 1];
        let lhs = mutate_through(&s, &objs[..n - 1], last, Side::Left).map_err(|e| e.to_string())?;
        let rhs = last.twisted(&s, 1).map_err(|e| e.to_string())?.shifted(2);
        if lhs != rhs {
            return Err(format!("{name}: {c}"));
        }
    }
    Ok(())
}

/// `χ(E_i, F_j) = δ_ij` on every collection reachable by at most `depth` mutations.
pub fn dual_pairing(name: &str, depth: usize) -> Check {
    let base = collection(name);
    let n = base.len();
    let mut frontier = vec![base];
    for level in 0..=depth {
        let mut next = Vec::new();
        for c in &frontier {
            let s = c.surface();
            let e = c.objects();
            let f = c.dual_objects().map_err(|e| e.to_string())?;
            for i in 0..n {
                for j in 0..n {
                    let x = chi(&s, &e[i], &f[j]).map_err(|e| e.to_string())?;
                    if x != i64::from(i == j) {
                        return Err(format!("{name}: χ(E_{i}, F_{j}) = {x} on {c}"));
                    }
                }
            }
            if level < depth {
                for k in 2..=n {
                    next.push(c.sigma(k).map_err(|e| e.to_string())?);
                    next.push(c.sigma_inverse(k).map_err(|e| e.to_string())?);
                }
            }
        }
        frontier = next;
    }
    Ok(())
}

pub fn fz_involution<R: Rng>(rng: &mut R, count: usize) -> Check {
    for _ in 0..count {
        let n = rng.gen_range(1..=8);
        let mut b = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.gen_range(-9..=9);
                b[i][j] = x;
                b[j][i] = -x;
            }
        }
        let b = BMatrix::new(b).map_err(|e| e.to_string())?;
        for k in 0..n {
            let m = fz_mutate(&b, k).map_err(|e| e.to_string())?;
            BMatrix::new(m.rows().to_vec()).map_err(|e| format!("mutation not skew: {e}"))?;
            if fz_mutate(&m, k).map_err(|e| e.to_string())? != b {
                return Err(format!("not an involution at {k}: {b:?}"));
            }
        }
    }
    Ok(())
}

pub fn block_levelling(name: &str) -> Levelling {
    let b = seed_blocks(name).unwrap();
    let mut values = Vec::new();
    for (level, block) in b.blocks.iter().enumerate() {
        values.extend(std::iter::repeat_n(level as i64, block.len()));
    }
    Levelling::new(values).unwrap()
}

/// `σ_{m-1} σ_m (H, φ) = (H, φ + 1)` for every level `m`.
pub fn double_sigma_raises_levels(name: &str) -> Check {
    let h = helix(name);
    let phi = block_levelling(name);
    for m in -3..6 {
        let (h1, p1) = levelled_sigma(&h, &phi, m).map_err(|e| e.to_string())?;
        let (h2, p2) = levelled_sigma(&h1, &p1, m - 1).map_err(|e| e.to_string())?;
        let k = h
            .reindexing_offset(&h2)
            .ok_or_else(|| format!("{name} m={m}: helix changed to {}", h2.thread()))?;
        for p in -8..8 {
            if h2.object_at(p).unwrap() != h.object_at(p + k).unwrap() {
                return Err(format!("{name} m={m}: object at {p}"));
            }
            if p2.at(p) != phi.at(p + k) + 1 {
                return Err(format!("{name} m={m}: level at {p} is {}", p2.at(p)));
            }
        }
    }
    Ok(())
}

/// `L_{E_k}···L_{E_2}(E_3)[k-3] = R_{E_{k-1}}···R_{E_1}(E_0)[k-1]` for `k = 1, 2`, objectwise.
pub fn level_mutations_agree(name: &str) -> Check {
    let h = helix(name);
    let s = h.surface();
    let phi = block_levelling(name);
    let levels: Vec<Vec<_>> = (0..=3)
        .map(|m| phi.level_positions(m).iter().map(|&p| h.object_at(p).unwrap()).collect())
        .collect();
    for k in 1..=2usize {
        for (x, y) in levels[3].iter().zip(&levels[0]) {
            let lhs = left_through_levels(&s, &levels[k..3], x).map_err(|e| e.to_string())?;
            let rhs = right_through_levels(&s, &levels[1..k], y).map_err(|e| e.to_string())?;
            if lhs.shifted(k as i64 - 3) != rhs.shifted(k as i64 - 1) {
                return Err(format!("{name} k={k}: {x:?}"));
            }
        }
    }
    Ok(())
}

/// Dual of the thread `(E_0..E_{n-1})` from the dual `(F_n..F_1)` of `(E_1..E_n)`.
pub fn neighbouring_thread_dual(name: &str) -> Check {
    let h = helix(name);
    let s = h.surface();
    let n = h.period();
    let d1 = h.thread_from(1).unwrap().dual().unwrap();
    let d1 = d1.objects();
    let mut want: Vec<_> = (1..n).map(|k| left_mutate(&s, &d1[0], &d1[k]).unwrap()).collect();
    want.push(d1[0].shifted(-2));
    let got = h.thread_from(0).unwrap().dual().unwrap();
    if got.objects() != &want[..] {
        return Err(format!("{name}: got {got}"));
    }
    Ok(())
}
