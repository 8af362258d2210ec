//! Dense dictionary simplex.
//!
//! The program is rewritten as `max c·x, A x ≤ b, x ≥ 0` and solved on an
//! `(m+1) × (n+1)` tableau holding only the nonbasic columns. Phase one
//! uses a single auxiliary column. Entering variables follow Dantzig's rule
//! until a run of degenerate pivots, then Bland's rule takes over for the
//! rest of the solve; every tie goes to the smallest variable label.

use std::fmt::Write as _;

use super::{LinearProgram, LpSolution, LpStatus, Relation};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const DEGENERATE_STREAK: usize = 50;

#[derive(Clone, Debug, Default)]
pub struct LpOptions {
    pub tol: Tolerances,
    /// Defaults to `50·(rows + columns) + 1000`.
    pub max_iterations: Option<usize>,
    pub record_tableau: bool,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &LpOptions::default())
}

/// How an original variable is recovered from standard-form columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = offset + sign·col`
    Shifted { col: usize, offset: f64, sign: f64 },
    /// `x = pos − neg`
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    c: Vec<f64>,
    c0: f64,
    rows: Vec<Vec<f64>>,
    b: Vec<f64>,
    map: Vec<VarMap>,
}

fn standardize(lp: &LinearProgram) -> Result<std::result::Result<StandardForm, LpStatus>> {
    let nv = lp.num_vars();
    if let Some((i, _)) = lp.constraints.iter().enumerate().find(|(_, c)| c.coeffs.len() != nv) {
        return Err(Error::Structure(format!("constraint {i} does not have {nv} coefficients")));
    }
    if lp.constraints.iter().any(|c| !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()))
        || lp.objective.iter().any(|c| !c.is_finite())
    {
        return Err(Error::Structure("LP data must be finite".into()));
    }
    let bounds = match &lp.bounds {
        Some(b) if b.len() != nv => {
            return Err(Error::Structure(format!("{} bounds for {nv} variables", b.len())))
        }
        Some(b) => b.clone(),
        None => vec![(f64::NEG_INFINITY, f64::INFINITY); nv],
    };
    if bounds.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(Err(LpStatus::Infeasible));
    }

    let mut map = Vec::with_capacity(nv);
    let mut ncols = 0;
    let mut upper_rows = Vec::new();
    for &(lo, hi) in &bounds {
        if lo.is_finite() {
            map.push(VarMap::Shifted { col: ncols, offset: lo, sign: 1.0 });
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            map.push(VarMap::Shifted { col: ncols, offset: hi, sign: -1.0 });
            ncols += 1;
        } else {
            map.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }

    let expand = |coeffs: &[f64]| -> (Vec<f64>, f64) {
        let mut row = vec![0.0; ncols];
        let mut shift = 0.0;
        for (k, &a) in coeffs.iter().enumerate() {
            match map[k] {
                VarMap::Shifted { col, offset, sign } => {
                    row[col] += a * sign;
                    shift += a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        (row, shift)
    };

    let (c, c0) = expand(&lp.objective);
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for con in &lp.constraints {
        let (row, shift) = expand(&con.coeffs);
        let rhs = con.rhs - shift;
        match con.relation {
            Relation::Le => {
                rows.push(row);
                b.push(rhs);
            }
            Relation::Ge => {
                rows.push(row.iter().map(|a| -a).collect());
                b.push(-rhs);
            }
            Relation::Eq => {
                rows.push(row.iter().map(|a| -a).collect());
                b.push(-rhs);
                rows.push(row);
                b.push(rhs);
            }
        }
    }
    for (col, width) in upper_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        rows.push(row);
        b.push(width);
    }
    Ok(Ok(StandardForm { c, c0, rows, b, map }))
}

/// Dictionary `x_B = b − A_N x_N`, `z = z0 + d·x_N`, stored with the
/// objective row negated so one elimination rule updates every row.
struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    t: Vec<f64>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    iterations: usize,
    max_iterations: usize,
    bland: bool,
    degenerate_run: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Stalled,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.n]
    }

    fn obj(&self, j: usize) -> f64 {
        self.t[self.m * self.width + j]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width;
        let piv = self.t[r * w + s];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for (j, v) in row.iter_mut().enumerate() {
                if j != s {
                    *v /= piv;
                }
            }
            row[s] = 1.0 / piv;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + s];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (j, v) in row.iter_mut().enumerate() {
                if j != s {
                    *v -= f * pivot_row[j];
                }
            }
            row[s] = -f * pivot_row[s];
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
        self.iterations += 1;
    }

    fn entering(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..self.n {
            let e = self.obj(j);
            if e >= -COST_EPS {
                continue;
            }
            best = match best {
                None => Some(j),
                Some(b) if self.bland => {
                    if self.nonbasic[j] < self.nonbasic[b] { Some(j) } else { Some(b) }
                }
                Some(b) => {
                    let eb = self.obj(b);
                    if e < eb || (e == eb && self.nonbasic[j] < self.nonbasic[b]) {
                        Some(j)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    fn leaving(&self, s: usize) -> Option<usize> {
        let mut min_ratio = f64::INFINITY;
        for i in 0..self.m {
            let a = self.at(i, s);
            if a > PIVOT_EPS {
                min_ratio = min_ratio.min(self.rhs(i).max(0.0) / a);
            }
        }
        if !min_ratio.is_finite() {
            return None;
        }
        let slack = 1e-12 * (1.0 + min_ratio);
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            let a = self.at(i, s);
            if a > PIVOT_EPS && self.rhs(i).max(0.0) / a <= min_ratio + slack
                && best.is_none_or(|b| self.basic[i] < self.basic[b]) {
                    best = Some(i);
                }
        }
        best
    }

    fn optimize(&mut self) -> Step {
        loop {
            if self.iterations >= self.max_iterations {
                return Step::Stalled;
            }
            let Some(s) = self.entering() else { return Step::Optimal };
            let Some(r) = self.leaving(s) else { return Step::Unbounded };
            if self.rhs(r).abs() <= PIVOT_EPS {
                self.degenerate_run += 1;
                if self.degenerate_run >= DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, s);
        }
    }

    /// Replace the objective row by `c` (indexed by variable label).
    fn set_objective(&mut self, c: &[f64]) {
        let w = self.width;
        let base = self.m * w;
        for j in 0..self.n {
            let label = self.nonbasic[j];
            self.t[base + j] = -c.get(label).copied().unwrap_or(0.0);
        }
        self.t[base + self.n] = 0.0;
        for i in 0..self.m {
            let cb = c.get(self.basic[i]).copied().unwrap_or(0.0);
            if cb == 0.0 {
                continue;
            }
            for j in 0..=self.n {
                let a = self.t[i * w + j];
                // z = Σ c_B (b − a·x_N): rhs gains c_B·b, reduced cost loses c_B·a
                self.t[base + j] += cb * a;
            }
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.t.drain(r * w..(r + 1) * w);
        self.basic.remove(r);
        self.m -= 1;
    }

    fn remove_column(&mut self, s: usize) {
        let w = self.width;
        let mut t = Vec::with_capacity((self.m + 1) * (w - 1));
        for i in 0..=self.m {
            for j in 0..w {
                if j != s {
                    t.push(self.t[i * w + j]);
                }
            }
        }
        self.t = t;
        self.nonbasic.remove(s);
        self.n -= 1;
        self.width -= 1;
    }

    fn dump(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>8}", "basic");
        for &l in &self.nonbasic {
            let _ = write!(out, " {:>12}", format!("x{l}"));
        }
        let _ = writeln!(out, " {:>12}", "rhs");
        for i in 0..=self.m {
            let label = if i == self.m { "obj".to_string() } else { format!("x{}", self.basic[i]) };
            let _ = write!(out, "{label:>8}");
            for j in 0..=self.n {
                let _ = write!(out, " {:>12.6}", self.t[i * self.width + j]);
            }
            let _ = writeln!(out);
        }
        out
    }
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &LpOptions) -> Result<LpSolution> {
    let sf = match standardize(lp)? {
        Ok(sf) => sf,
        Err(status) => return Ok(failed(status, 0)),
    };
    let m = sf.rows.len();
    let n = sf.c.len();
    let feas = opts.tol.feas;
    let needs_phase_one = sf.b.iter().any(|&v| v < -feas);

    // columns: n structural (+1 auxiliary in phase one); labels: structural
    // 0..n, slacks n..n+m, auxiliary n+m
    let aux_label = n + m;
    let ncols = n + usize::from(needs_phase_one);
    let width = ncols + 1;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        t[i * width..i * width + n].copy_from_slice(&sf.rows[i]);
        if needs_phase_one {
            t[i * width + n] = -1.0;
        }
        t[i * width + ncols] = sf.b[i];
    }
    let mut nonbasic: Vec<usize> = (0..n).collect();
    if needs_phase_one {
        nonbasic.push(aux_label);
    }
    let mut tab = Tableau {
        m,
        n: ncols,
        width,
        t,
        basic: (n..n + m).collect(),
        nonbasic,
        iterations: 0,
        max_iterations: opts.max_iterations.unwrap_or(50 * (m + n) + 1000),
        bland: false,
        degenerate_run: 0,
    };

    if needs_phase_one {
        let mut phase_one_cost = vec![0.0; aux_label + 1];
        phase_one_cost[aux_label] = -1.0;
        tab.set_objective(&phase_one_cost);
        let aux_col = tab.n - 1;
        let mut r = 0;
        for i in 1..m {
            if tab.rhs(i) < tab.rhs(r) {
                r = i;
            }
        }
        tab.pivot(r, aux_col);
        match tab.optimize() {
            Step::Optimal => {}
            Step::Stalled => return Ok(failed(LpStatus::Stalled, tab.iterations)),
            // the auxiliary objective is bounded above by zero
            Step::Unbounded => return Ok(failed(LpStatus::Stalled, tab.iterations)),
        }
        if tab.rhs(tab.m) < -feas {
            return Ok(failed(LpStatus::Infeasible, tab.iterations));
        }
        if let Some(r) = tab.basic.iter().position(|&l| l == aux_label) {
            let mut best: Option<usize> = None;
            for j in 0..tab.n {
                let a = tab.at(r, j).abs();
                if a > PIVOT_EPS && best.is_none_or(|b| a > tab.at(r, b).abs()) {
                    best = Some(j);
                }
            }
            match best {
                Some(s) => tab.pivot(r, s),
                None => tab.remove_row(r),
            }
        }
        let s = tab.nonbasic.iter().position(|&l| l == aux_label).expect("auxiliary is nonbasic");
        tab.remove_column(s);
        tab.bland = false;
        tab.degenerate_run = 0;
    }

    tab.set_objective(&sf.c);
    let status = match tab.optimize() {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
        Step::Stalled => LpStatus::Stalled,
    };
    if status != LpStatus::Optimal {
        return Ok(failed(status, tab.iterations));
    }

    let mut cols = vec![0.0; n];
    for i in 0..tab.m {
        if tab.basic[i] < n {
            cols[tab.basic[i]] = tab.rhs(i).max(0.0);
        }
    }
    let x: Vec<f64> = sf
        .map
        .iter()
        .map(|vm| match *vm {
            VarMap::Shifted { col, offset, sign } => offset + sign * cols[col],
            VarMap::Split { pos, neg } => cols[pos] - cols[neg],
        })
        .collect();
    let value: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    debug_assert!((value - (sf.c0 + tab.rhs(tab.m))).abs() <= 1e-6 * (1.0 + value.abs()));
    Ok(LpSolution {
        status,
        value,
        x,
        iterations: tab.iterations,
        tableau: opts.record_tableau.then(|| tab.dump()),
    })
}

fn failed(status: LpStatus, iterations: usize) -> LpSolution {
    LpSolution { status, value: f64::NAN, x: Vec::new(), iterations, tableau: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opt(lp: &LinearProgram) -> LpSolution {
        let s = solve_lp(lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal, "{lp:?}");
        s
    }

    #[test]
    fn single_upper_bound() {
        let lp = LinearProgram::maximize(vec![1.0]).le(vec![1.0], 1.0);
        let s = opt(&lp);
        assert_eq!(s.value, 1.0);
        assert_eq!(s.x, vec![1.0]);
    }

    #[test]
    fn unbounded_above() {
        let lp = LinearProgram::maximize(vec![1.0]).ge(vec![1.0], 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
        let lp = LinearProgram::maximize(vec![1.0]).with_bounds(vec![(0.0, f64::INFINITY)]);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_system() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0])
            .le(vec![1.0, 1.0], 1.0)
            .ge(vec![1.0, 1.0], 2.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        let lp = LinearProgram::maximize(vec![1.0]).with_bounds(vec![(1.0, 0.0)]);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn textbook_with_phase_one() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18, x + y >= 1, x,y >= 0
        let lp = LinearProgram::maximize(vec![3.0, 5.0])
            .le(vec![1.0, 0.0], 4.0)
            .le(vec![0.0, 2.0], 12.0)
            .le(vec![3.0, 2.0], 18.0)
            .ge(vec![1.0, 1.0], 1.0)
            .with_bounds(vec![(0.0, f64::INFINITY); 2]);
        let s = opt(&lp);
        assert!((s.value - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equalities_and_free_variables() {
        // max x - y  s.t. x + y = 1, x - 2y >= -2, x <= 3 (x, y free)
        let lp = LinearProgram::maximize(vec![1.0, -1.0])
            .eq(vec![1.0, 1.0], 1.0)
            .ge(vec![1.0, -2.0], -2.0)
            .le(vec![1.0, 0.0], 3.0);
        let s = opt(&lp);
        assert!((s.value - 5.0).abs() < 1e-9, "{s:?}");
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn negative_lower_bounds_shift() {
        let lp = LinearProgram::maximize(vec![-1.0, -1.0])
            .ge(vec![1.0, 1.0], -3.0)
            .with_bounds(vec![(-2.0, 2.0), (-2.0, 5.0)]);
        let s = opt(&lp);
        assert!((s.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic Beale cycling example under Dantzig's rule
        let lp = LinearProgram::maximize(vec![0.75, -150.0, 0.02, -6.0])
            .le(vec![0.25, -60.0, -0.04, 9.0], 0.0)
            .le(vec![0.5, -90.0, -0.02, 3.0], 0.0)
            .le(vec![0.0, 0.0, 1.0, 0.0], 1.0)
            .with_bounds(vec![(0.0, f64::INFINITY); 4]);
        let s = opt(&lp);
        assert!((s.value - 0.05).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn iteration_cap_reports_stalled() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0])
            .le(vec![1.0, 0.0], 1.0)
            .le(vec![0.0, 1.0], 1.0)
            .with_bounds(vec![(0.0, f64::INFINITY); 2]);
        let s = solve_lp_with(&lp, &LpOptions { max_iterations: Some(1), ..LpOptions::default() })
            .unwrap();
        assert_eq!(s.status, LpStatus::Stalled);
        assert!(s.value.is_nan() && s.x.is_empty());
    }

    #[test]
    fn ragged_rows_are_structural() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0]).le(vec![1.0], 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::Structure(_))));
    }

    #[test]
    fn tableau_dump_on_request() {
        let lp = LinearProgram::maximize(vec![1.0]).le(vec![1.0], 1.0);
        let s = solve_lp_with(&lp, &LpOptions { record_tableau: true, ..LpOptions::default() })
            .unwrap();
        assert!(s.tableau.unwrap().contains("rhs"));
    }
}
