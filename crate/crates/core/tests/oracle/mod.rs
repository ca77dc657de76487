//! Hand-written truth functions for the catalog axioms and a naive
//! countermodel scan. Shares nothing with the library's evaluator.
#![allow(dead_code)]

pub type Pred = fn(usize, &[Vec<bool>], &[usize]) -> bool;

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
}

pub fn i5(n: usize, u: &[Vec<bool>], _: &[usize]) -> bool {
    (0..n).all(|x| !u[x][x])
}

pub fn i6(n: usize, u: &[Vec<bool>], _: &[usize]) -> bool {
    triples(n).all(|(x, y, z)| !u[x][y] || u[x][z] || u[y][z])
}

pub fn i7(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    triples(n).all(|(x, y, z)| {
        !(u[x][y] && u[x][r[y]]) || (u[x][z] && u[x][r[z]]) || (u[y][z] && u[y][r[z]])
    })
}

pub fn i8(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    (0..n).all(|x| (0..n).all(|y| u[x][y] || u[x][r[y]]))
}

pub fn odo(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    triples(n).all(|(x, y, z)| !(!u[x][r[y]] && !u[x][z]) || !u[y][r[z]])
}

pub fn oo(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    (0..n).all(|x| (0..n).all(|y| !u[x][r[y]] || u[y][r[x]]))
}

fn w(k: usize, n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    triples(n).all(|(x, y, z)| {
        let a = if k <= 2 { u[x][z] } else { u[x][r[z]] };
        let b = if k % 2 == 1 { u[y][z] } else { u[y][r[z]] };
        !u[x][y] || !u[x][r[y]] || a || b
    })
}

pub fn w1(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    w(1, n, u, r)
}
pub fn w2(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    w(2, n, u, r)
}
pub fn w3(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    w(3, n, u, r)
}
pub fn w4(n: usize, u: &[Vec<bool>], r: &[usize]) -> bool {
    w(4, n, u, r)
}

pub fn by_name(name: &str) -> Pred {
    match name {
        "I5" => i5,
        "I6" => i6,
        "I7" | "I7conv" => i7,
        "I8" => i8,
        "ODO" => odo,
        "OO" => oo,
        "W1" => w1,
        "W2" => w2,
        "W3" => w3,
        "W4" => w4,
        other => panic!("oracle has no `{other}`"),
    }
}

/// Every structure of size `n` as (undir matrix, rev table), in nested-loop order:
/// rev tuples lexicographically, then undir bit strings with cell (0,0) first.
pub fn all_structures(n: usize) -> Vec<(Vec<Vec<bool>>, Vec<usize>)> {
    let mut revs: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        revs = revs.into_iter().flat_map(|p| (0..n).map(move |d| [p.clone(), vec![d]].concat())).collect();
    }
    let mut out = Vec::new();
    for r in revs {
        for bits in 0u32..(1 << (n * n)) {
            let cell = |c: usize| bits >> (n * n - 1 - c) & 1 == 1;
            let u: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| cell(i * n + j)).collect()).collect();
            out.push((u, r.clone()));
        }
    }
    out
}

/// First countermodel as (size, rev, undir pairs).
pub fn first_countermodel(prem: &[Pred], goal: Pred, max_n: usize) -> Option<(usize, Vec<usize>, Vec<(usize, usize)>)> {
    for n in 1..=max_n {
        for (u, r) in all_structures(n) {
            if prem.iter().all(|p| p(n, &u, &r)) && !goal(n, &u, &r) {
                let pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| u[i][j]).collect();
                return Some((n, r, pairs));
            }
        }
    }
    None
}
