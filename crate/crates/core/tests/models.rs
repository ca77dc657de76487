mod oracle;

use ordgeo::formula::{negated_quantifier_view, parse_formula, Formula};
use ordgeo::geometry::{axiom, close_over, dir_opp_forms, expand_defs, i7_con_form, to_xyz, w_decomposition};
use ordgeo::models::*;

fn to_lib(n: usize, u: &[Vec<bool>], r: &[usize]) -> Structure {
    Structure::from_fn(n, |i| r[i], |a, b| u[a][b])
}

fn small_structures() -> impl Iterator<Item = Structure> {
    (1..=3).flat_map(enumerate_structures)
}

#[test]
fn library_eval_agrees_with_oracle_on_catalog() {
    for name in ["I5", "I6", "I7", "I7conv", "I8", "ODO", "OO", "W1", "W2", "W3", "W4"] {
        let f = expand_defs(&axiom(name).unwrap()).unwrap();
        let c = Compiled::new(&f).unwrap();
        let o = oracle::by_name(name);
        for n in 1..=3 {
            for (u, r) in oracle::all_structures(n) {
                assert_eq!(c.holds(&to_lib(n, &u, &r)), o(n, &u, &r), "{name}");
            }
        }
    }
}

#[test]
fn enumeration_order_matches_oracle() {
    for n in 1..=2 {
        let lib: Vec<Structure> = enumerate_structures(n).collect();
        let ora: Vec<Structure> = oracle::all_structures(n).iter().map(|(u, r)| to_lib(n, u, r)).collect();
        assert_eq!(lib, ora);
    }
}

#[test]
fn eval_examples() {
    let none = Assignment::new();
    let neq_swap = Structure::from_fn(2, |d| 1 - d, |a, b| a != b);
    assert!(eval(&neq_swap, &axiom("I5").unwrap(), &none).unwrap());
    let neq_id = Structure::from_fn(2, |d| d, |a, b| a != b);
    assert!(!eval(&neq_id, &axiom("I8").unwrap(), &none).unwrap());
    let open = parse_formula("UNDIR x y | UNDIR x [rev y]").unwrap();
    let at = |x, y| Assignment::from([("x".to_string(), x), ("y".to_string(), y)]);
    assert!(!eval(&neq_id, &open, &at(1, 1)).unwrap());
    assert!(eval(&neq_id, &open, &at(0, 1)).unwrap());
    let circle = Structure::from_fn(4, |d| (d + 2) % 4, |a, b| a != b);
    for name in ["I5", "I6", "I7", "I8", "ODO"] {
        assert!(eval(&circle, &axiom(name).unwrap(), &none).unwrap(), "{name}");
    }
}

#[test]
fn w_conjunction_matches_i7_and_con_form() {
    let ws: Vec<Compiled> = w_decomposition().iter().map(|w| Compiled::new(w).unwrap()).collect();
    let i7 = Compiled::new(&axiom("I7").unwrap()).unwrap();
    let con = close_over(&to_xyz(&expand_defs(&i7_con_form()).unwrap()), &["x", "y", "z"]);
    let con = Compiled::new(&con).unwrap();
    for s in small_structures() {
        let v = i7.holds(&s);
        assert_eq!(ws.iter().all(|w| w.holds(&s)), v);
        assert_eq!(con.holds(&s), v);
    }
    let swap_neq = Structure::from_fn(2, |d| 1 - d, |a, b| a != b);
    assert!(i7.holds(&swap_neq) && ws.iter().all(|w| w.holds(&swap_neq)));
}

#[test]
fn dir_opp_forms_match_w_forms() {
    for (w, d) in w_decomposition().iter().zip(dir_opp_forms()) {
        let d = close_over(&to_xyz(&expand_defs(&d).unwrap()), &["x", "y", "z"]);
        let (cw, cd) = (Compiled::new(w).unwrap(), Compiled::new(&d).unwrap());
        for s in small_structures() {
            assert_eq!(cw.holds(&s), cd.holds(&s));
        }
    }
}

#[test]
fn negated_quantifier_view_preserves_truth() {
    for src in ["~(Ex)UNDIR x x", "~(Ax)(Ey)UNDIR x [rev y]", "~(Ey)[UNDIR y y & ~UNDIR y [rev y]]"] {
        let f = parse_formula(src).unwrap();
        let g = negated_quantifier_view(&f);
        assert_ne!(f, g);
        let (cf, cg) = (Compiled::new(&f).unwrap(), Compiled::new(&g).unwrap());
        for s in small_structures() {
            assert_eq!(cf.holds(&s), cg.holds(&s), "{src}");
        }
    }
}

#[test]
fn closed_formulas_ignore_assignment() {
    let f = axiom("ODO").unwrap();
    for s in enumerate_structures(2) {
        let base = eval(&s, &f, &Assignment::new()).unwrap();
        let noisy = Assignment::from([("x".to_string(), 1), ("q".to_string(), 0)]);
        assert_eq!(eval(&s, &f, &noisy).unwrap(), base);
    }
}

fn names(ns: &[&str]) -> Vec<Formula> {
    ns.iter().map(|n| axiom(n).unwrap()).collect()
}

#[test]
fn countermodels_agree_with_oracle() {
    let cases: &[(&[&str], &str)] = &[
        (&["I5", "I6"], "W2"),
        (&["I5", "I6"], "W3"),
        (&["I6"], "W2"),
        (&["I6"], "W1"),
        (&["I6"], "W4"),
        (&["I7", "I8", "ODO"], "I6"),
        (&["I5", "ODO"], "OO"),
        (&[], "I5"),
        (&["I5", "I6", "ODO"], "W3"),
    ];
    for (prem, goal) in cases {
        let lib = find_countermodel(&names(prem), &axiom(goal).unwrap(), 3).map(|s| s.record());
        let preds: Vec<oracle::Pred> = prem.iter().map(|n| oracle::by_name(n)).collect();
        let ora = oracle::first_countermodel(&preds, oracle::by_name(goal), 3)
            .map(|(size, rev, undir)| CountermodelRecord { size, rev, undir });
        assert_eq!(lib, ora, "{prem:?} |= {goal}");
    }
}

#[test]
fn known_countermodels() {
    let w2 = find_countermodel(&names(&["I5", "I6"]), &axiom("W2").unwrap(), 3).unwrap();
    assert_eq!(w2.record(), CountermodelRecord { size: 2, rev: vec![0, 0], undir: vec![(0, 1), (1, 0)] });
    // the larger structure is a countermodel too, just not the first one
    let big = Structure::new(4, vec![1, 0, 3, 2], &[(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)]);
    for p in names(&["I5", "I6"]) {
        assert!(eval(&big, &p, &Assignment::new()).unwrap());
    }
    assert!(!eval(&big, &axiom("W2").unwrap(), &Assignment::new()).unwrap());

    let w3 = find_countermodel(&names(&["I5", "I6"]), &axiom("W3").unwrap(), 3).unwrap();
    assert_eq!(
        w3.record(),
        CountermodelRecord { size: 3, rev: vec![0, 0, 1], undir: vec![(0, 1), (1, 0), (1, 2), (2, 1)] }
    );
    let i5 = find_countermodel(&[], &axiom("I5").unwrap(), 1).unwrap();
    assert_eq!(i5.record(), CountermodelRecord { size: 1, rev: vec![0], undir: vec![(0, 0)] });
    assert!(find_countermodel(&names(&["I6"]), &axiom("W1").unwrap(), 3).is_none());
    assert!(find_countermodel(&names(&["I7", "I8", "ODO"]), &axiom("I6").unwrap(), 3).is_none());
}

#[test]
fn worker_count_does_not_change_the_answer() {
    let prem = names(&["I5", "I6"]);
    for goal in ["W2", "W3", "W1"] {
        let g = axiom(goal).unwrap();
        let one = find_countermodel_with(&prem, &g, 3, 1).unwrap();
        for jobs in [2, 3, 8] {
            assert_eq!(find_countermodel_with(&prem, &g, 3, jobs).unwrap(), one, "{goal} jobs={jobs}");
        }
    }
}

#[test]
fn dir_and_opp_exclusive_under_i8() {
    let excl = parse_formula("(Ax)(Ay)~[~UNDIR x y & ~UNDIR x [rev y]]").unwrap();
    assert!(find_countermodel(&names(&["I8"]), &excl, 3).is_none());
    assert!(find_countermodel(&names(&["I5", "I6", "I7", "ODO"]), &excl, 3).is_some());
}

#[test]
fn record_json_round_trip() {
    let s = Structure::new(3, vec![0, 0, 1], &[(0, 1), (1, 2)]);
    let json = serde_json::to_string(&s.record()).unwrap();
    assert_eq!(json, r#"{"size":3,"rev":[0,0,1],"undir":[[0,1],[1,2]]}"#);
    let back: CountermodelRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_structure().unwrap(), s);
}
