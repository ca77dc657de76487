use super::Formula;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn wrap(f: &Formula, bracket: bool, out: &mut String) {
    if bracket {
        out.push('[');
        go(f, out);
        out.push(']');
    } else {
        go(f, out);
    }
}

fn go(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(p, args) => {
            out.push_str(p);
            for a in args {
                out.push(' ');
                out.push_str(&a.to_string());
            }
        }
        Formula::Not(g) => {
            out.push('~');
            wrap(g, prec(g) < 4, out);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let q = if matches!(f, Formula::Forall(..)) { 'A' } else { 'E' };
            out.push('(');
            out.push(q);
            out.push_str(v);
            out.push(')');
            wrap(g, prec(g) < 4, out);
        }
        Formula::And(l, r) => {
            wrap(l, prec(l) < 3, out);
            out.push_str(" & ");
            wrap(r, prec(r) <= 3, out);
        }
        Formula::Or(l, r) => {
            wrap(l, prec(l) < 2, out);
            out.push_str(" | ");
            wrap(r, prec(r) <= 2, out);
        }
        Formula::Implies(l, r) => {
            wrap(l, prec(l) <= 1, out);
            out.push_str(" -> ");
            go(r, out);
        }
    }
}

/// Canonical ASCII rendering with the fewest brackets that still parse back.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    go(f, &mut out);
    out
}
