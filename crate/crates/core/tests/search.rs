mod oracle;

use std::sync::OnceLock;

use ordgeo::corpus::sequent_matches;
use ordgeo::geometry::axiom;
use ordgeo::kernel::{check_proof, Report, Sequent};
use ordgeo::search::{max_depth, prove, prove_staged, suggested_lemmas, SearchConfig, SearchStatus};
use ordgeo::{parse_formula, Formula};
use proptest::prelude::*;

fn ax(names: &[&str]) -> Vec<Formula> {
    names.iter().map(|n| axiom(n).unwrap()).collect()
}

fn cfg(depth: usize, term_depth: usize) -> SearchConfig {
    SearchConfig { max_depth: depth, max_term_depth: term_depth, ..SearchConfig::default() }
}

fn assert_certifies(p: &ordgeo::kernel::Proof, premises: &[Formula], goal: &Formula) {
    match check_proof(p) {
        Report::Valid { sequent } => {
            let want = Sequent { premises: premises.to_vec(), conclusion: goal.clone() };
            assert!(sequent_matches(&sequent, &want), "certified {sequent}");
        }
        Report::FirstFailure(v) => panic!("kernel rejects search output: {v}"),
    }
}

#[test]
fn w1_from_i6_is_short() {
    let (prem, goal) = (ax(&["I6"]), axiom("W1").unwrap());
    let r = prove(&prem, &goal, &cfg(2, 1));
    let p = r.proof().expect("proved");
    assert_certifies(p, &prem, &goal);
    assert!(p.lines.len() <= 20, "{} lines", p.lines.len());
    assert!(max_depth(p) <= 2);
}

#[test]
fn oo_from_i5_odo_at_depth_one() {
    let (prem, goal) = (ax(&["I5", "ODO"]), axiom("OO").unwrap());
    let r = prove(&prem, &goal, &cfg(1, 1));
    assert_certifies(r.proof().expect("proved"), &prem, &goal);
}

#[test]
fn w4_from_i6() {
    let (prem, goal) = (ax(&["I6"]), axiom("W4").unwrap());
    let r = prove(&prem, &goal, &SearchConfig::default());
    assert_certifies(r.proof().expect("proved"), &prem, &goal);
}

#[test]
fn w2_w3_from_oo_directly() {
    let prem = ax(&["I5", "I6", "OO"]);
    for w in ["W2", "W3"] {
        let goal = axiom(w).unwrap();
        let r = prove(&prem, &goal, &SearchConfig::default());
        assert_certifies(r.proof().expect(w), &prem, &goal);
    }
}

#[test]
fn w2_w3_staged_through_oo() {
    let prem = ax(&["I5", "I6", "ODO"]);
    for w in ["W2", "W3"] {
        let goal = axiom(w).unwrap();
        let lemmas = suggested_lemmas(&prem, &goal);
        assert_eq!(lemmas, ax(&["OO"]));
        let r = prove_staged(&prem, &lemmas, &goal, &SearchConfig::default());
        let p = r.proof().expect(w);
        assert_certifies(p, &prem, &goal);
        assert_eq!(p.premises, prem);
    }
}

#[test]
fn i6_from_i7_i8_odo() {
    let (prem, goal) = (ax(&["I7", "I8", "ODO"]), axiom("I6").unwrap());
    let r = prove(&prem, &goal, &cfg(6, 3));
    assert_certifies(r.proof().expect("proved"), &prem, &goal);
}

#[test]
fn non_theorems_are_not_proved() {
    for (prem, goal) in [(vec!["I6"], "W2"), (vec!["I6"], "W3"), (vec!["I5", "I6"], "W2"), (vec![], "I5")] {
        for c in [cfg(2, 1), cfg(6, 3)] {
            let r = prove(&ax(&prem), &axiom(goal).unwrap(), &c);
            assert!(r.proof().is_none(), "{prem:?} |- {goal}");
        }
    }
}

#[test]
fn empty_premises_exhaust() {
    let r = prove(&[], &axiom("I5").unwrap(), &cfg(1, 1));
    assert_eq!(r.status, SearchStatus::Exhausted);
}

#[test]
fn unsupported_goal_shapes_exhaust() {
    let goal = parse_formula("(Ex)UNDIR x x").unwrap();
    let r = prove(&ax(&["I8"]), &goal, &SearchConfig::default());
    assert_eq!(r.status, SearchStatus::Exhausted);
}

#[test]
fn tiny_budgets_report_budget_exceeded() {
    let c = SearchConfig { max_lines: 5, ..SearchConfig::default() };
    let r = prove(&ax(&["I6"]), &axiom("W1").unwrap(), &c);
    assert_eq!(r.status, SearchStatus::BudgetExceeded);
    let c = SearchConfig { max_instances: 10, ..SearchConfig::default() };
    let r = prove(&ax(&["I6"]), &axiom("W1").unwrap(), &c);
    assert_eq!(r.status, SearchStatus::BudgetExceeded);
}

#[test]
fn search_is_deterministic() {
    let prem = ax(&["I7", "I8", "ODO"]);
    let goal = axiom("I6").unwrap();
    let a = prove(&prem, &goal, &cfg(6, 2));
    let b = prove(&prem, &goal, &cfg(6, 2));
    assert_eq!(a.status, b.status);
    assert_eq!(a.stats.lines_generated, b.stats.lines_generated);
    assert_eq!(a.stats.instantiations, b.stats.instantiations);
}

#[test]
fn proofs_of_implications_and_literals() {
    let prem = ax(&["I5"]);
    let goal = parse_formula("(Ax)[UNDIR x [rev x] -> ~UNDIR [rev x] [rev x]]").unwrap();
    let r = prove(&prem, &goal, &SearchConfig::default());
    assert_certifies(r.proof().expect("proved"), &prem, &goal);
    let goal = parse_formula("~UNDIR a a").unwrap();
    let r = prove(&prem, &goal, &SearchConfig::default());
    assert_certifies(r.proof().expect("proved"), &prem, &goal);
}

const NAMES: [&str; 11] = ["I5", "I6", "I7", "I8", "ODO", "OO", "W1", "W2", "W3", "W4", "I6"];

/// Truth of each catalog formula on every structure of size 1 to 3.
fn truth() -> &'static Vec<Vec<bool>> {
    static T: OnceLock<Vec<Vec<bool>>> = OnceLock::new();
    T.get_or_init(|| {
        let all: Vec<(usize, Vec<Vec<bool>>, Vec<usize>)> =
            (1..=3).flat_map(|n| oracle::all_structures(n).into_iter().map(move |(u, r)| (n, u, r))).collect();
        NAMES.iter().map(|name| all.iter().map(|(n, u, r)| oracle::by_name(name)(*n, u, r)).collect()).collect()
    })
}

fn oracle_countermodel(prem: &[usize], goal: usize) -> bool {
    let t = truth();
    (0..t[goal].len()).any(|s| !t[goal][s] && prem.iter().all(|&p| t[p][s]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn proved_sequents_have_no_small_countermodel(mask in 0u32..1024, goal in 0usize..10) {
        let prem: Vec<usize> = (0..10).filter(|i| mask & (1 << i) != 0).collect();
        let names: Vec<&str> = prem.iter().map(|&i| NAMES[i]).collect();
        let c = SearchConfig { max_depth: 4, max_term_depth: 1, max_splits_tried: 200, ..SearchConfig::default() };
        let g = axiom(NAMES[goal]).unwrap();
        let r = prove(&ax(&names), &g, &c);
        if let Some(p) = r.proof() {
            prop_assert!(check_proof(p).is_valid());
            prop_assert!(!oracle_countermodel(&prem, goal), "{names:?} |- {}", NAMES[goal]);
        }
    }
}
