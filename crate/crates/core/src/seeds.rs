//! Built-in collections of line bundles.

use crate::excol::{BlockStructure, Collection, ExcError, ExcObject};
use crate::helix::{Helix, HelixError};
use crate::klattice::Surface;
use crate::scalar::Scalar;

pub const SEED_NAMES: [&str; 4] = ["p2", "quadric", "dp1", "dp2"];

fn thread<T: Scalar>(s: Surface, divisors: &[&[i64]]) -> Result<Collection<T>, ExcError> {
    let objects = divisors
        .iter()
        .map(|d| {
            let d: Vec<T> = d.iter().map(|&x| T::lit(x)).collect();
            ExcObject::line_bundle(&s, &d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Collection::new(s, objects)
}

/// Thread of a named seed, or `None` for an unknown name.
pub fn seed_collection<T: Scalar>(name: &str) -> Option<Collection<T>> {
    let c = match name {
        "p2" => thread(Surface::plane(), &[&[0], &[1], &[2]]),
        "quadric" => thread(Surface::Quadric, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]),
        "dp1" => thread(Surface::Blowup { points: 1 }, &[&[0, 0], &[1, -1], &[1, 0], &[2, -1]]),
        "dp2" => thread(
            Surface::Blowup { points: 2 },
            &[&[0, 0, 0], &[1, -1, 0], &[1, 0, -1], &[1, 0, 0], &[2, -1, -1]],
        ),
        _ => return None,
    };
    Some(c.expect("builtin seed is exceptional and full"))
}

pub fn seed_helix<T: Scalar>(name: &str) -> Option<Result<Helix<T>, HelixError>> {
    seed_collection(name).map(Helix::new)
}

/// Three-block structures of the seeds that have one.
pub fn seed_blocks(name: &str) -> Option<BlockStructure> {
    match name {
        "p2" => Some(BlockStructure::from_sizes(&[1, 1, 1])),
        "quadric" => Some(BlockStructure::from_sizes(&[1, 2, 1])),
        _ => None,
    }
}

/// Thread `(O, O(1,0), O(3,1), O(4,1))` of a quadric helix that is not strong.
pub fn non_strong_quadric<T: Scalar>() -> Collection<T> {
    thread(Surface::Quadric, &[&[0, 0], &[1, 0], &[3, 1], &[4, 1]]).expect("exceptional and full")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klattice::euler_pairing;

    #[test]
    fn seeds_are_exceptional_full_and_strong() {
        for name in SEED_NAMES {
            let c = seed_collection::<i64>(name).unwrap();
            let s = c.surface();
            assert_eq!(c.len(), s.picard_rank() + 2);
            for o in c.objects() {
                let v = o.signed_class().unwrap();
                assert_eq!(euler_pairing(&s, &v, &v).unwrap(), 1);
            }
            assert!(c.is_strong(), "{name}");
            assert!(seed_helix::<i64>(name).unwrap().unwrap().is_geometric(), "{name}");
        }
        assert!(seed_collection::<i64>("dp9").is_none());
    }

    #[test]
    fn non_strong_example() {
        let h = Helix::new(non_strong_quadric::<i64>()).unwrap();
        assert!(!h.is_strong());
        assert!(!h.is_geometric());
    }

    #[test]
    fn block_seeds_validate() {
        for name in ["p2", "quadric"] {
            let c = seed_collection::<i64>(name).unwrap();
            seed_blocks(name).unwrap().validate(&c).unwrap();
        }
    }
}
