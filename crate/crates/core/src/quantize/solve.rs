use super::ip::QuantizationProblem;
use crate::dsu::Dsu;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Instances up to this many arcs are solved to proven optimality.
pub const EXACT_ARCS: usize = 64;
const NODE_BUDGET: u64 = 2_000_000;

/// Arcs forced equal by single-arc rows, merged into one variable.
struct Class {
    count: f64,
    target_sum: f64,
}

impl Class {
    fn cost(&self, x: i64) -> f64 {
        let x = x as f64;
        self.count * x * x - 2.0 * self.target_sum * x
    }

    fn best(&self) -> i64 {
        ((self.target_sum / self.count).round() as i64).max(1)
    }
}

struct Search<'a> {
    classes: &'a [Class],
    rows: &'a [Vec<(usize, i64)>],
    var_rows: Vec<Vec<usize>>,
    order: Vec<usize>,
    lo_bound: Vec<f64>,
    hi: Vec<i64>,
    vals: Vec<i64>,
    best: Option<(f64, Vec<i64>)>,
    first_only: bool,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn row_ok(&self, r: usize) -> bool {
        let (mut lo, mut hi) = (0i64, 0i64);
        for &(c, k) in &self.rows[r] {
            let v = self.vals[c];
            if v > 0 {
                lo += k * v;
                hi += k * v;
            } else if k > 0 {
                lo += k;
                hi += k * self.hi[c];
            } else {
                lo += k * self.hi[c];
                hi += k;
            }
        }
        lo <= 0 && 0 <= hi
    }

    /// Assigns variables determined by rows with a single free entry.
    fn propagate(&mut self, c0: usize, trail: &mut Vec<usize>) -> bool {
        let mut stack = vec![c0];
        while let Some(c) = stack.pop() {
            for &r in &self.var_rows[c] {
                let mut free = None;
                let mut n_free = 0;
                let mut rest = 0;
                for &(d, k) in &self.rows[r] {
                    if self.vals[d] > 0 {
                        rest += k * self.vals[d];
                    } else {
                        n_free += 1;
                        free = Some((d, k));
                    }
                }
                match (n_free, free) {
                    (0, _) if rest != 0 => return false,
                    (1, Some((d, k))) => {
                        if rest % k != 0 {
                            return false;
                        }
                        let x = -rest / k;
                        if x < 1 || x > self.hi[d] {
                            return false;
                        }
                        self.vals[d] = x;
                        trail.push(d);
                        stack.push(d);
                    }
                    _ => {}
                }
                if !self.row_ok(r) {
                    return false;
                }
            }
        }
        true
    }

    fn bound(&self) -> f64 {
        (0..self.classes.len())
            .map(|c| if self.vals[c] > 0 { self.classes[c].cost(self.vals[c]) } else { self.lo_bound[c] })
            .sum()
    }

    fn better(&self, cost: f64) -> bool {
        self.best.as_ref().is_none_or(|(b, _)| cost < *b - 1e-9)
    }

    fn dfs(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return true;
        }
        let bound = self.bound();
        if !self.better(bound) {
            return false;
        }
        let Some(&c) = self.order.iter().find(|&&c| self.vals[c] == 0) else {
            self.best = Some((bound, self.vals.clone()));
            return self.first_only;
        };
        let x0 = self.classes[c].best().min(self.hi[c]);
        let slack_base = bound - self.lo_bound[c];
        let (mut down, mut up) = (x0, x0 + 1);
        loop {
            let cd = (down >= 1).then(|| self.classes[c].cost(down));
            let cu = (up <= self.hi[c]).then(|| self.classes[c].cost(up));
            let pick = match (cd, cu) {
                (Some(a), Some(b)) if a <= b => Some((down, a, true)),
                (Some(_), Some(b)) => Some((up, b, false)),
                (Some(a), None) => Some((down, a, true)),
                (None, Some(b)) => Some((up, b, false)),
                (None, None) => None,
            };
            let Some((x, cost, is_down)) = pick else { break };
            if !self.better(slack_base + cost) {
                break;
            }
            if is_down {
                down -= 1;
            } else {
                up += 1;
            }
            let mut trail = vec![c];
            self.vals[c] = x;
            let stop = self.propagate(c, &mut trail) && self.dfs();
            for d in trail {
                self.vals[d] = 0;
            }
            if stop {
                return true;
            }
        }
        false
    }
}

/// Optimal integer arc lengths; exact for up to [`EXACT_ARCS`] arcs, best
/// found within a node budget above that.
pub fn solve_quantization(qp: &QuantizationProblem) -> Result<Vec<i64>> {
    let n = qp.n_vars();
    let mut dsu = Dsu::new(n);
    for (a, b) in qp.rows() {
        if let ([x], [y]) = (a, b) {
            dsu.union(*x, *y);
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Class> = Vec::new();
    let mut root_class = BTreeMap::new();
    for a in 0..n {
        let r = dsu.find(a as u32);
        let c = *root_class.entry(r).or_insert_with(|| {
            classes.push(Class { count: 0.0, target_sum: 0.0 });
            classes.len() - 1
        });
        class_of[a] = c;
        classes[c].count += 1.0;
        classes[c].target_sum += qp.target(a);
    }
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    for (a, b) in qp.rows() {
        let mut coef: BTreeMap<usize, i64> = BTreeMap::new();
        for &x in a {
            *coef.entry(class_of[x as usize]).or_default() += 1;
        }
        for &x in b {
            *coef.entry(class_of[x as usize]).or_default() -= 1;
        }
        let row: Vec<(usize, i64)> = coef.into_iter().filter(|&(_, k)| k != 0).collect();
        if row.len() == 1 {
            return Err(Error::Integrity(format!("wall row forces class {} to zero", row[0].0)));
        }
        if !row.is_empty() && !rows.contains(&row) {
            rows.push(row);
        }
    }
    let nc = classes.len();
    let mut var_rows = vec![Vec::new(); nc];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            var_rows[c].push(r);
        }
    }
    let mut order: Vec<usize> = (0..nc).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(var_rows[c].len()), c));
    let lo_bound: Vec<f64> = classes.iter().map(|c| c.cost(c.best())).collect();
    let peak = classes.iter().map(|c| c.best()).max().unwrap_or(1);
    let mut search = Search {
        classes: &classes,
        rows: &rows,
        var_rows,
        order,
        lo_bound,
        hi: vec![0; nc],
        vals: vec![0; nc],
        best: None,
        first_only: true,
        nodes: 0,
        budget: NODE_BUDGET,
    };

    let mut cap = (2 * peak + 2).max(4);
    while search.best.is_none() {
        if cap > 1 << 24 {
            return Err(Error::Integrity("quantization problem has no feasible solution".into()));
        }
        search.hi = vec![cap; nc];
        search.nodes = 0;
        search.dfs();
        cap *= 2;
    }

    let (incumbent, _) = search.best.clone().unwrap();
    let total_lb: f64 = search.lo_bound.iter().sum();
    search.hi = (0..nc)
        .map(|c| {
            let room = incumbent - (total_lb - search.lo_bound[c]);
            let cl = &classes[c];
            let mut x = cl.best();
            while cl.cost(x + 1) <= room + 1e-9 {
                x += 1;
            }
            x
        })
        .collect();
    search.first_only = false;
    search.nodes = 0;
    search.budget = if n <= EXACT_ARCS { u64::MAX } else { NODE_BUDGET };
    search.dfs();
    if search.nodes > search.budget {
        log::warn!("quantization stopped after {} nodes; returning best found", search.budget);
    }
    let (_, vals) = search.best.unwrap();
    let l: Vec<i64> = class_of.iter().map(|&c| vals[c]).collect();
    if !qp.is_feasible(&l) {
        return Err(Error::Integrity("quantization solution violates a wall row".into()));
    }
    Ok(l)
}

/// Optimum by enumerating every `ℓ` with `|ℓ_a − s‖a‖| ≤ √upper`, skipping
/// prefixes whose cost already exceeds `upper` (any solution at least as good
/// lies in that set). Returns the lowest objective found.
pub fn exhaustive_optimum(qp: &QuantizationProblem, upper: f64) -> Option<(Vec<i64>, f64)> {
    let n = qp.n_vars();
    let upper = upper.max(0.0) + 1e-9;
    let r = upper.sqrt();
    let range: Vec<(i64, i64)> = (0..n)
        .map(|a| {
            let t = qp.target(a);
            (((t - r).ceil() as i64).max(1), ((t + r).floor() as i64).max(1))
        })
        .collect();
    let rows = qp.rows();
    let last_arc: Vec<usize> = rows
        .iter()
        .map(|(a, b)| a.iter().chain(b.iter()).map(|&x| x as usize).max().unwrap_or(0))
        .collect();
    struct Enum<'a> {
        qp: &'a QuantizationProblem,
        range: Vec<(i64, i64)>,
        rows: Vec<(&'a [u32], &'a [u32])>,
        last_arc: Vec<usize>,
        upper: f64,
        l: Vec<i64>,
        best: Option<(Vec<i64>, f64)>,
    }
    impl Enum<'_> {
        fn rec(&mut self, i: usize, partial: f64) {
            if i == self.l.len() {
                let obj = self.qp.objective(&self.l);
                if self.best.as_ref().is_none_or(|(_, b)| obj < *b) {
                    self.best = Some((self.l.clone(), obj));
                }
                return;
            }
            let (lo, hi) = self.range[i];
            for x in lo..=hi {
                let cost = partial + (x as f64 - self.qp.target(i)).powi(2);
                if cost > self.upper {
                    continue;
                }
                self.l[i] = x;
                let l = &self.l;
                let sum = |s: &[u32]| s.iter().map(|&a| l[a as usize]).sum::<i64>();
                let ok = self.rows.iter().zip(&self.last_arc).all(|((a, b), &m)| m != i || sum(a) == sum(b));
                if ok {
                    self.rec(i + 1, cost);
                }
            }
            self.l[i] = 0;
        }
    }
    let mut e = Enum { qp, range, rows, last_arc, upper, l: vec![0; n], best: None };
    e.rec(0, 0.0);
    e.best
}
