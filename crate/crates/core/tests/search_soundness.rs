mod common;

use common::*;
use mimome_tas::baselines::{exhaustive_select, SubsetEnumerator, DEFAULT_ES_CAP};
use mimome_tas::capacity::NormalizedSnr;
use mimome_tas::channel::{generate_rayleigh, ChannelMatrix, Seed};
use mimome_tas::csie::{select_csie_observed, CsieDriver};
use mimome_tas::ncsie::{select_ncsie_observed, NcsieDriver};
use mimome_tas::search::{
    path_adjusted_objective, PruneEvent, ScenarioDriver, ScoreEvent, SearchObserver,
    SearchTreeShape,
};
use mimome_tas::selection::{SelectOptions, SelectionProblem};

fn snr(v: f64) -> NormalizedSnr {
    NormalizedSnr::new(v).unwrap()
}

/// Records every scored node and every pruned sibling group.
#[derive(Default)]
struct Recorder {
    scored: Vec<(Vec<usize>, f64, f64, f64)>,
    pruned: Vec<(Vec<usize>, Vec<usize>)>,
    incumbents: Vec<f64>,
}

impl SearchObserver for Recorder {
    fn on_score(&mut self, e: &ScoreEvent<'_>) {
        let mut path = e.prefix.to_vec();
        path.push(e.candidate);
        self.scored
            .push((path, e.parent_adjusted, e.delta, e.level_bound));
        assert!((e.score - (e.parent_adjusted + e.delta - e.level_bound)).abs() < 1e-12);
    }

    fn on_prune(&mut self, e: &PruneEvent<'_>) {
        for &(k, score) in e.skipped {
            assert!(score <= e.bound);
            let mut path = e.prefix.to_vec();
            path.push(k);
            self.pruned.push((path, e.prefix.to_vec()));
        }
    }

    fn on_incumbent(&mut self, _path: &[usize], bound: f64) {
        if let Some(&last) = self.incumbents.last() {
            assert!(bound > last);
        }
        self.incumbents.push(bound);
    }
}

/// Every complete path extending `prefix`.
fn completions(shape: SearchTreeShape, prefix: &[usize]) -> Vec<Vec<usize>> {
    SubsetEnumerator::new(shape)
        .filter(|s| s.starts_with(prefix))
        .collect()
}

fn check_pruning<D: ScenarioDriver>(driver: &D, rec: &Recorder, final_bound: f64) {
    for (node, _) in &rec.pruned {
        for leaf in completions(driver.shape(), node) {
            let v = path_adjusted_objective(driver, &leaf).unwrap();
            assert!(
                v <= final_bound + 1e-9,
                "pruned {node:?} hides {leaf:?} at {v} > {final_bound}"
            );
        }
    }
}

fn check_monotone(rec: &Recorder) {
    for (path, parent, delta, z) in &rec.scored {
        assert!(*delta <= z + 1e-9, "delta {delta} > Z {z} at {path:?}");
        assert!(parent + delta - z <= parent + 1e-9);
    }
}

#[test]
fn ncsie_pruned_subtrees_hold_nothing_better() {
    let mut pick = Picker::new(11);
    for _ in 0..40 {
        let nt = pick.choose(&[6, 8, 10]);
        let l = 1 + pick.below(4);
        let rho = pick.choose(&[0.3, 1.0, 8.0]);
        let h = generate_rayleigh(4, nt, Seed(pick.seed())).unwrap();
        let mut rec = Recorder::default();
        let r =
            select_ncsie_observed(&h, l, snr(rho), &SelectOptions::default(), &mut rec).unwrap();
        let driver = NcsieDriver::new(&h, l, snr(rho)).unwrap();
        check_monotone(&rec);
        check_pruning(&driver, &rec, r.adjusted_objective);
        assert_eq!(rec.scored.len() as u64, r.visited_nodes);
        assert_eq!(*rec.incumbents.last().unwrap(), r.adjusted_objective);
    }
}

#[test]
fn csie_pruned_subtrees_hold_nothing_better() {
    let mut pick = Picker::new(12);
    for _ in 0..40 {
        let nt = pick.choose(&[6, 8, 10]);
        let l = 1 + pick.below(4);
        let (rm, re) = (pick.choose(&[0.3, 1.0, 8.0]), pick.choose(&[0.5, 3.0]));
        let hm = generate_rayleigh(4, nt, Seed(pick.seed())).unwrap();
        let he = generate_rayleigh(pick.choose(&[2, 4, 8]), nt, Seed(pick.seed())).unwrap();
        let mut rec = Recorder::default();
        let r = select_csie_observed(
            &hm,
            &he,
            l,
            snr(rm),
            snr(re),
            &SelectOptions::default(),
            &mut rec,
        )
        .unwrap();
        let driver = CsieDriver::new(&hm, &he, l, snr(rm), snr(re)).unwrap();
        check_monotone(&rec);
        check_pruning(&driver, &rec, r.adjusted_objective);
        assert_eq!(rec.scored.len() as u64, r.visited_nodes);
    }
}

#[test]
fn random_ncsie_10_choose_3_matches_brute_force() {
    let h = generate_rayleigh(4, 10, Seed(2024)).unwrap();
    let p = SelectionProblem::ncsie(&h, 3, snr(2.0)).unwrap();
    let bab = p.select(&SelectOptions::default()).unwrap();
    let best = SubsetEnumerator::new(p.shape())
        .map(|s| eigen_capacity(&columns(&h, &s), 2.0))
        .fold(f64::MIN, f64::max);
    assert!(close(bab.objective, best, 1e-9));
}

#[test]
fn scalar_channel_picks_largest_gains() {
    let h = generate_rayleigh(1, 12, Seed(77)).unwrap();
    let norms = h.column_norms_sqr();
    let mut order: Vec<usize> = (1..=12).collect();
    order.sort_by(|&a, &b| norms[b - 1].total_cmp(&norms[a - 1]));
    for l in 1..=5 {
        let p = SelectionProblem::ncsie(&h, l, snr(3.0)).unwrap();
        let mut want = order[..l].to_vec();
        want.sort_unstable();
        assert_eq!(p.select(&SelectOptions::default()).unwrap().indices, want);
    }
}

#[test]
fn full_selection_and_degenerate_inputs() {
    let h = generate_rayleigh(3, 5, Seed(4)).unwrap();
    let p = SelectionProblem::ncsie(&h, 5, snr(2.0)).unwrap();
    let r = p.select(&SelectOptions::default()).unwrap();
    assert_eq!(r.indices, vec![1, 2, 3, 4, 5]);
    assert_eq!(r.visited_nodes, 5);
    assert!(close(
        r.objective,
        eigen_capacity(&to_dmatrix(&h), 2.0),
        1e-9
    ));

    // Identical links: every subset has zero secrecy.
    let q = SelectionProblem::csie(&h, &h, 2, snr(2.0), snr(2.0)).unwrap();
    let r = q.select(&SelectOptions::default()).unwrap();
    assert!(r.objective.abs() < 1e-9);
    assert_eq!(r.secrecy_capacity, Some(r.objective.max(0.0)));

    // Silent eavesdropper: same subset and value as the legitimate-only search.
    let zeros = ChannelMatrix::zeros(4, 5).unwrap();
    let a = SelectionProblem::csie(&h, &zeros, 3, snr(2.0), snr(5.0)).unwrap();
    let b = SelectionProblem::ncsie(&h, 3, snr(2.0)).unwrap();
    let (ra, rb) = (
        a.select(&SelectOptions::default()).unwrap(),
        b.select(&SelectOptions::default()).unwrap(),
    );
    assert_eq!(ra.indices, rb.indices);
    assert_eq!(ra.visited_nodes, rb.visited_nodes);
    assert!(close(ra.objective, rb.objective, 1e-12));

    // Silent legitimate link: clamped to zero.
    let silent = ChannelMatrix::zeros(3, 5).unwrap();
    let c = SelectionProblem::csie(&silent, &h, 2, snr(2.0), snr(2.0)).unwrap();
    let r = c.select(&SelectOptions::default()).unwrap();
    assert!(r.objective < 0.0);
    assert_eq!(r.secrecy_capacity, Some(0.0));
    let es = exhaustive_select(&c, DEFAULT_ES_CAP).unwrap();
    assert!(close(r.objective, es.objective, 1e-9));
}

#[test]
fn warm_start_never_changes_the_optimum() {
    let mut pick = Picker::new(13);
    for _ in 0..50 {
        let nt = pick.choose(&[8, 12, 16]);
        let hm = generate_rayleigh(4, nt, Seed(pick.seed())).unwrap();
        let he = generate_rayleigh(4, nt, Seed(pick.seed())).unwrap();
        let p = SelectionProblem::csie(&hm, &he, 3, snr(4.0), snr(1.5)).unwrap();
        let cold = p.select(&SelectOptions::default()).unwrap();
        let warm = p
            .select(&SelectOptions {
                warm_start: true,
                ..Default::default()
            })
            .unwrap();
        assert!(close(cold.objective, warm.objective, 1e-9));
        assert!(warm.visited_nodes <= cold.visited_nodes);
    }
}
