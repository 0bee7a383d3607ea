//! Sudoku and Takuzu rule checkers plus a backtracking Sudoku solver.

use std::collections::HashMap;

pub type Grid = [[u8; 9]; 9];

/// Reads 81 characters of digits, with `0` or `.` for blanks.
pub fn parse_sudoku(s: &str) -> Grid {
    let cells: Vec<u8> = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '.' => 0,
            d => d.to_digit(10).expect("digit") as u8,
        })
        .collect();
    assert_eq!(cells.len(), 81, "a sudoku has 81 cells");
    let mut g = [[0; 9]; 9];
    for (i, v) in cells.into_iter().enumerate() {
        g[i / 9][i % 9] = v;
    }
    g
}

/// Checks that `sol` is complete, obeys the row, column and box rules, and
/// agrees with every clue of `puzzle`.
pub fn check_sudoku(puzzle: &Grid, sol: &Grid) -> Result<(), String> {
    for r in 0..9 {
        for c in 0..9 {
            if !(1..=9).contains(&sol[r][c]) {
                return Err(format!("cell ({},{}) holds {}", r + 1, c + 1, sol[r][c]));
            }
            if puzzle[r][c] != 0 && puzzle[r][c] != sol[r][c] {
                return Err(format!("clue at ({},{}) changed", r + 1, c + 1));
            }
        }
    }
    let groups = (0..9).flat_map(|i| {
        let row: Vec<(usize, usize)> = (0..9).map(|j| (i, j)).collect();
        let col: Vec<(usize, usize)> = (0..9).map(|j| (j, i)).collect();
        let bx: Vec<(usize, usize)> = (0..9).map(|j| (i / 3 * 3 + j / 3, i % 3 * 3 + j % 3)).collect();
        [row, col, bx]
    });
    for g in groups {
        let mut seen = [false; 10];
        for (r, c) in g {
            let v = sol[r][c] as usize;
            if seen[v] {
                return Err(format!("digit {v} repeated in a unit containing ({},{})", r + 1, c + 1));
            }
            seen[v] = true;
        }
    }
    Ok(())
}

/// Up to `limit` solutions by backtracking on the most constrained cell.
pub fn solve_sudoku(puzzle: &Grid, limit: usize) -> Vec<Grid> {
    let mut g = *puzzle;
    let mut out = Vec::new();
    backtrack(&mut g, limit, &mut out);
    out
}

fn candidates(g: &Grid, r: usize, c: usize) -> u16 {
    let mut used = 0u16;
    for i in 0..9 {
        used |= 1 << g[r][i];
        used |= 1 << g[i][c];
        used |= 1 << g[r / 3 * 3 + i / 3][c / 3 * 3 + i % 3];
    }
    !used & 0b11_1111_1110
}

fn backtrack(g: &mut Grid, limit: usize, out: &mut Vec<Grid>) {
    if out.len() >= limit {
        return;
    }
    let mut best: Option<(usize, usize, u16)> = None;
    for r in 0..9 {
        for c in 0..9 {
            if g[r][c] == 0 {
                let cand = candidates(g, r, c);
                if best.is_none_or(|b| cand.count_ones() < b.2.count_ones()) {
                    best = Some((r, c, cand));
                }
            }
        }
    }
    let Some((r, c, cand)) = best else {
        out.push(*g);
        return;
    };
    for v in 1..=9u8 {
        if cand >> v & 1 == 1 {
            g[r][c] = v;
            backtrack(g, limit, out);
            g[r][c] = 0;
        }
    }
}

/// Grid from model values of `P(r,c,v)` atoms.
pub fn sudoku_from_model(truth: &HashMap<String, bool>) -> Grid {
    let mut g = [[0; 9]; 9];
    for r in 1..=9 {
        for c in 1..=9 {
            for v in 1..=9 {
                if truth.get(&format!("P({r},{c},{v})")).copied().unwrap_or(false) {
                    g[r - 1][c - 1] = v as u8;
                }
            }
        }
    }
    g
}

/// Checks a square Takuzu grid of 0/1: equal counts per row and column,
/// no three equal neighbours in a line, pairwise distinct rows and
/// columns, and agreement with the clues (`None` is a blank).
pub fn check_takuzu(clues: &[Vec<Option<u8>>], sol: &[Vec<u8>]) -> Result<(), String> {
    let n = sol.len();
    if !n.is_multiple_of(2) || sol.iter().any(|r| r.len() != n) {
        return Err("grid must be square with even side".into());
    }
    let col = |c: usize| -> Vec<u8> { sol.iter().map(|r| r[c]).collect() };
    let lines: Vec<(String, Vec<u8>)> = (0..n)
        .map(|i| (format!("row {}", i + 1), sol[i].clone()))
        .chain((0..n).map(|i| (format!("column {}", i + 1), col(i))))
        .collect();
    for (name, line) in &lines {
        if line.iter().any(|&v| v > 1) {
            return Err(format!("{name} has a value other than 0/1"));
        }
        let ones = line.iter().filter(|&&v| v == 1).count();
        if ones * 2 != n {
            return Err(format!("{name} has {ones} ones"));
        }
        if line.windows(3).any(|w| w[0] == w[1] && w[1] == w[2]) {
            return Err(format!("{name} has three equal neighbours"));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if sol[i] == sol[j] {
                return Err(format!("rows {} and {} are equal", i + 1, j + 1));
            }
            if col(i) == col(j) {
                return Err(format!("columns {} and {} are equal", i + 1, j + 1));
            }
        }
    }
    for (r, row) in clues.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if let Some(v) = v {
                if sol[r][c] != *v {
                    return Err(format!("clue at ({},{}) changed", r + 1, c + 1));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_checks_an_easy_sudoku() {
        let p = parse_sudoku(
            "530070000600195000098000060800060003400803001700020006060000280000419005000080079",
        );
        let sols = solve_sudoku(&p, 2);
        assert_eq!(sols.len(), 1);
        check_sudoku(&p, &sols[0]).unwrap();
        let mut bad = sols[0];
        bad[0].swap(2, 3);
        assert!(check_sudoku(&p, &bad).is_err());
    }

    #[test]
    fn takuzu_rules() {
        let ok: Vec<Vec<u8>> = vec![
            vec![0, 1, 0, 1],
            vec![1, 0, 1, 0],
            vec![0, 0, 1, 1],
            vec![1, 1, 0, 0],
        ];
        check_takuzu(&[], &ok).unwrap();
        let dup = vec![vec![0, 1, 0, 1], vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![1, 0, 1, 0]];
        assert!(check_takuzu(&[], &dup).is_err());
    }
}
