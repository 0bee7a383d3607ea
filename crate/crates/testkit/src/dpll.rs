//! Plain recursive DPLL, used as a reference for satisfiability.

/// A satisfying assignment (`values[v - 1]`) or `None`.
pub fn solve(clauses: &[Vec<i32>], n_vars: usize) -> Option<Vec<bool>> {
    solve_with(clauses, n_vars, &[])
}

/// As [`solve`], with the given literals forced true.
pub fn solve_with(clauses: &[Vec<i32>], n_vars: usize, units: &[i32]) -> Option<Vec<bool>> {
    let mut assign: Vec<Option<bool>> = vec![None; n_vars];
    for &u in units {
        let v = u.unsigned_abs() as usize - 1;
        match assign[v] {
            Some(b) if b != (u > 0) => return None,
            _ => assign[v] = Some(u > 0),
        }
    }
    if search(clauses, &mut assign) {
        Some(assign.into_iter().map(|x| x.unwrap_or(false)).collect())
    } else {
        None
    }
}

fn value(assign: &[Option<bool>], l: i32) -> Option<bool> {
    assign[l.unsigned_abs() as usize - 1].map(|b| b == (l > 0))
}

fn search(clauses: &[Vec<i32>], assign: &mut Vec<Option<bool>>) -> bool {
    let mut trail = Vec::new();
    // Unit propagation to fixpoint.
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut n_unassigned = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        n_unassigned += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match n_unassigned {
                0 => {
                    undo(assign, &trail);
                    return false;
                }
                1 => {
                    let l = unassigned.unwrap();
                    assign[l.unsigned_abs() as usize - 1] = Some(l > 0);
                    trail.push(l.unsigned_abs() as usize - 1);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    // Pure literals among the open clauses can be set true outright, and
    // the shortest open clause gives the branching literal.
    let mut polarity: Vec<u8> = vec![0; assign.len()];
    let mut branch: Option<(usize, i32)> = None;
    for c in clauses {
        if c.iter().any(|&l| value(assign, l) == Some(true)) {
            continue;
        }
        let open: Vec<i32> = c.iter().copied().filter(|&l| value(assign, l).is_none()).collect();
        for &l in &open {
            polarity[l.unsigned_abs() as usize - 1] |= if l > 0 { 1 } else { 2 };
        }
        if branch.is_none_or(|(n, _)| open.len() < n) {
            branch = Some((open.len(), open[0]));
        }
    }
    let Some((_, l)) = branch else {
        return true;
    };
    let pure: Vec<usize> = (0..assign.len()).filter(|&v| polarity[v] == 1 || polarity[v] == 2).collect();
    if !pure.is_empty() {
        for &v in &pure {
            assign[v] = Some(polarity[v] == 1);
        }
        if search(clauses, assign) {
            return true;
        }
        undo(assign, &pure);
        undo(assign, &trail);
        return false;
    }
    let v = l.unsigned_abs() as usize - 1;
    for b in [l > 0, l < 0] {
        assign[v] = Some(b);
        if search(clauses, assign) {
            return true;
        }
    }
    assign[v] = None;
    undo(assign, &trail);
    false
}

fn undo(assign: &mut [Option<bool>], trail: &[usize]) {
    for &v in trail {
        assign[v] = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert!(solve(&[vec![1], vec![-1]], 1).is_none());
        let m = solve(&[vec![1, 2], vec![-1], vec![-2, 3]], 3).unwrap();
        assert_eq!(m, vec![false, true, true]);
        assert!(solve_with(&[vec![1, 2]], 2, &[-1, -2]).is_none());
    }

    #[test]
    fn pigeonhole_3_2() {
        // p(i,j): pigeon i in hole j, var 2*i + j + 1.
        let v = |i: i32, j: i32| 2 * i + j + 1;
        let mut cs: Vec<Vec<i32>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    cs.push(vec![-v(a, j), -v(b, j)]);
                }
            }
        }
        assert!(solve(&cs, 6).is_none());
    }
}
