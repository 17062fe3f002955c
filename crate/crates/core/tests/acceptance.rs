//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see them.

mod common;

use std::time::{Duration, Instant};

use common::{collection, helix};
use helixtilt_core::excol::Side;
use helixtilt_core::explorer::key_hex;
use helixtilt_core::seeds::non_strong_quadric;
use helixtilt_core::{
    canonical_quiver_key, enumerate_height_functions, rolled_b_matrix, rolled_quiver, tau,
    tilt, web_bfs, BlockStructure, Collection, ExcObject, Helix, Quiver, Surface, WebGraph,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED_QUIVER_BUDGET: Duration = Duration::from_millis(1);
const WEB_BUDGET: Duration = Duration::from_secs(60);
const WEB_DEPTH: usize = 3;
const FIGURE_DEPTH: usize = 4;
const BRAID_WORDS: usize = 200;
const AFFINE_WORDS: usize = 100;
const SERRE_WORDS: usize = 50;
const FZ_MATRICES: usize = 1000;
const HEIGHT_BOUND: i64 = 3;

/// Criteria that cannot hold as stated. They must still fail; if one starts
/// passing the list is stale.
const UNATTAINABLE: &[(u32, &str)] = &[(
    2,
    "the displayed tilted thread (O, O(1,0), O(1,1), O(1,2)) is not exceptional, so no helix has it as a thread",
)];

fn q(a: i64, b: i64) -> ExcObject<i64> {
    ExcObject::line_bundle(&Surface::Quadric, &[a, b]).unwrap()
}

fn quiver(arrows: Vec<Vec<i64>>) -> Quiver<i64> {
    Quiver { vertices: (0..arrows.len()).map(|i| i.to_string()).collect(), arrows }
}

fn seed_figure() -> Quiver<i64> {
    // Square O -> O(1,0), O -> O(0,1), both -> O(1,1), with four arrows O(1,1) -> O.
    quiver(vec![vec![0, 2, 2, 0], vec![0, 0, 0, 2], vec![0, 0, 0, 2], vec![4, 0, 0, 0]])
}

fn cycle_figure() -> Quiver<i64> {
    quiver(vec![vec![0, 2, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 0, 2], vec![2, 0, 0, 0]])
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn from_check(r: Result<String, String>) -> Outcome {
    match r {
        Ok(d) => outcome(true, d),
        Err(e) => outcome(false, e),
    }
}

fn seed_quiver() -> Outcome {
    let h = helix("quadric");
    let mut times = Vec::new();
    let mut result = None;
    for _ in 0..5 {
        let t = Instant::now();
        let b = rolled_b_matrix(&h).unwrap();
        result = Some(rolled_quiver(&b));
        times.push(t.elapsed());
    }
    times.sort();
    let median = times[2];
    let got = result.unwrap();
    let exact = got.arrows == seed_figure().arrows;
    outcome(
        exact && median < SEED_QUIVER_BUDGET,
        format!("arrows {:?}, exact={exact}, median {median:?}", got.arrows),
    )
}

fn tilt_example() -> Outcome {
    let h = helix("quadric");
    let cycle_key = canonical_quiver_key(&cycle_figure());
    let mut notes = Vec::new();
    let mut quiver_ok = true;
    let mut results = Vec::new();
    for v in [2, 1] {
        let out = tilt(&h, v, Side::Left).unwrap();
        let b = rolled_b_matrix(&out.helix).unwrap();
        let ok = canonical_quiver_key(&rolled_quiver(&b)) == cycle_key;
        quiver_ok &= ok;
        notes.push(format!("vertex {v}: {} 4-cycle={ok}", out.helix.thread()));
        results.push(out.helix);
    }
    let displayed = Collection::new(Surface::Quadric, vec![q(0, 0), q(1, 0), q(1, 1), q(1, 2)]);
    let helix_ok = match displayed.map_err(|e| e.to_string()).and_then(|c| Helix::new(c).map_err(|e| e.to_string())) {
        Ok(p) => {
            let swapped = p.ruling_swapped().unwrap();
            results.iter().any(|r| r.same_up_to_reindexing(&p) || r.same_up_to_reindexing(&swapped))
        }
        Err(e) => {
            notes.push(format!("displayed thread rejected: {e}"));
            false
        }
    };
    outcome(quiver_ok && helix_ok, format!("quiver={quiver_ok} helix={helix_ok}; {}", notes.join("; ")))
}

fn dual_example() -> Outcome {
    let d = collection("quadric").dual().unwrap();
    let want = [q(-1, -1).shifted(2), q(0, -1).shifted(1), q(-1, 0).shifted(1), q(0, 0)];
    outcome(d.objects() == want, format!("{d} shifts {:?}", d.objects().iter().map(|o| o.shift).collect::<Vec<_>>()))
}

fn mutation_examples() -> Outcome {
    let c = collection("quadric");
    let s3 = c.sigma(3).unwrap();
    let s4 = c.sigma(4).unwrap();
    let blocks = BlockStructure { blocks: vec![vec![0], vec![1, 2], vec![3]] };
    let (t2, _) = tau(&c, &blocks, 2).unwrap();
    let ok3 = s3.objects() == [q(0, 0), q(0, 1).shifted(-1), q(1, 0), q(1, 1)];
    let ok4 = s4.objects() == [q(0, 0), q(1, 0), q(-1, 1), q(0, 1)];
    let okt = t2.objects() == [q(-1, 0), q(0, -1), q(0, 0), q(1, 1)];
    outcome(
        ok3 && ok4 && okt && !s4.is_strong() && t2.is_strong() && t2.is_pure(),
        format!("σ3={ok3} σ4={ok4} τ2={okt}"),
    )
}

fn height_examples() -> Outcome {
    let e = Collection::new(Surface::Quadric, vec![q(0, 0), q(1, 0), q(1, 1), q(2, 1)]).unwrap();
    let top = enumerate_height_functions(&e, 3, HEIGHT_BOUND).unwrap();
    let second = enumerate_height_functions(&e, 1, HEIGHT_BOUND).unwrap();
    let ok_top = top == vec![vec![-2, -2, -1, 0], vec![-2, -1, -1, 0]];
    let ok_second = second == (1..=3).map(|a| vec![-1, 0, 1, a]).collect::<Vec<_>>();
    outcome(ok_top && ok_second, format!("O(2,1): {top:?}; O(1,0): {second:?}"))
}

struct Webs {
    graphs: Vec<(&'static str, Result<WebGraph<i64>, String>)>,
    elapsed: Duration,
}

fn build_webs() -> Webs {
    let t = Instant::now();
    let graphs = ["quadric", "p2", "dp1", "dp2"]
        .into_iter()
        .map(|name| (name, web_bfs(&helix(name), WEB_DEPTH).map_err(|e| e.to_string())))
        .collect();
    Webs { graphs, elapsed: t.elapsed() }
}

fn web_cross_check(webs: &Webs) -> Outcome {
    // web_bfs aborts on the first edge whose tilt disagrees with matrix mutation.
    let mut edges = 0;
    let mut errors = Vec::new();
    for (name, g) in &webs.graphs {
        match g {
            Ok(g) => edges += g.edges.len(),
            Err(e) => errors.push(format!("{name}: {e}")),
        }
    }
    outcome(
        errors.is_empty() && webs.elapsed < WEB_BUDGET,
        format!("{edges} edges checked, mismatches: {}, {:?} {}", errors.len(), webs.elapsed, errors.join("; ")),
    )
}

fn web_quiver_shape(webs: &Webs) -> Outcome {
    let mut nodes = 0;
    let mut bad = Vec::new();
    for (name, g) in &webs.graphs {
        let Ok(g) = g else {
            bad.push(format!("{name}: no web"));
            continue;
        };
        for n in &g.nodes {
            nodes += 1;
            if n.quiver.has_loops() || n.quiver.has_two_cycles() {
                bad.push(format!("{name} node {}", n.id));
            }
        }
    }
    outcome(bad.is_empty(), format!("{nodes} quivers, offending: {bad:?}"))
}

fn web_geometric(webs: &Webs) -> Outcome {
    let mut nodes = 0;
    let mut bad = Vec::new();
    for (name, g) in &webs.graphs {
        let Ok(g) = g else {
            bad.push(format!("{name}: no web"));
            continue;
        };
        for n in &g.nodes {
            nodes += 1;
            if !n.helix.is_geometric() {
                bad.push(format!("{name}: {}", n.helix.thread()));
            }
        }
    }
    let flagged = Helix::new(non_strong_quadric::<i64>()).map(|h| !h.is_strong()).unwrap_or(false);
    outcome(bad.is_empty() && flagged, format!("{nodes} helices geometric, non-strong example flagged={flagged} {bad:?}"))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let r = (|| -> Result<String, String> {
        for name in ["p2", "quadric", "dp1", "dp2"] {
            common::braid_relations(&mut rng, name, BRAID_WORDS)?;
            common::affine_braid_relations(&mut rng, name, AFFINE_WORDS)?;
            common::serre_identity(&mut rng, name, SERRE_WORDS)?;
            common::dual_pairing(name, 3)?;
            common::neighbouring_thread_dual(name)?;
        }
        for name in ["p2", "quadric"] {
            common::double_sigma_raises_levels(name)?;
            common::level_mutations_agree(name)?;
        }
        common::fz_involution(&mut rng, FZ_MATRICES)?;
        Ok(format!(
            "braid {BRAID_WORDS} words/seed, affine {AFFINE_WORDS}, serre, level identities, δ pairing depth 3, fz {FZ_MATRICES}"
        ))
    })();
    from_check(r)
}

fn figure_web() -> Outcome {
    let t = Instant::now();
    match web_bfs(&helix("quadric"), FIGURE_DEPTH) {
        Ok(g) => {
            let a = key_hex(&canonical_quiver_key(&seed_figure()));
            let b = key_hex(&canonical_quiver_key(&cycle_figure()));
            let ok = a != b && g.node_by_key(&a).is_some() && g.node_by_key(&b).is_some();
            outcome(ok, format!("{} nodes, {} edges in {:?}", g.nodes.len(), g.edges.len(), t.elapsed()))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

#[test]
fn acceptance() {
    let webs = build_webs();
    let criteria: Vec<(u32, &str, Outcome)> = vec![
        (1, "seed quiver of the quadric helix", seed_quiver()),
        (2, "tilt at O(0,1) / O(1,0) of the quadric helix", tilt_example()),
        (3, "dual of (O, O(1,0), O(0,1), O(1,1))", dual_example()),
        (4, "σ3, σ4, τ2 on the quadric collection", mutation_examples()),
        (5, "height functions of (O, O(1,0), O(1,1), O(2,1))", height_examples()),
        (6, "tilt vs matrix mutation on depth-3 webs", web_cross_check(&webs)),
        (7, "web quivers have no loops or 2-cycles", web_quiver_shape(&webs)),
        (8, "web helices geometric, non-strong example flagged", web_geometric(&webs)),
        (9, "property suites", property_suites()),
        (10, "depth-4 quadric web", figure_web()),
    ];
    let mut unexpected = Vec::new();
    for (id, name, o) in &criteria {
        println!("{} [{id}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        let known = UNATTAINABLE.iter().find(|(k, _)| k == id);
        match (o.pass, known) {
            (false, Some((_, why))) => println!("     known unattainable: {why}"),
            (true, Some(_)) => unexpected.push(format!("[{id}] passes but is listed as unattainable")),
            (false, None) => unexpected.push(format!("[{id}] {name}")),
            (true, None) => {}
        }
    }
    assert!(unexpected.is_empty(), "{unexpected:?}");
}
