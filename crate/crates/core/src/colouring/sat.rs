//! Backtracking search with unit propagation and clause learning, specialised
//! to the clause shapes of 101-colouring: a binary clause per edge and a
//! ternary clause per triangle.
//!
//! Literals are `2 * var + neg`; a positive literal means "value 1".
//! Decisions take the most active unassigned variable (initial activity is
//! the vertex degree, so the first decisions follow descending degree) and
//! try value 0 first. Conflicts are analysed to the first unique implication
//! point and the learnt clause is kept, which keeps refutations of large grid
//! systems tractable.

pub(crate) type Lit = u32;

#[inline]
pub(crate) fn lit(var: usize, value: bool) -> Lit {
    (var as u32) << 1 | (!value) as u32
}

#[inline]
fn var_of(l: Lit) -> usize {
    (l >> 1) as usize
}

const UNDEF: u8 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub learnt: u64,
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

struct ClauseDb {
    lits: Vec<Lit>,
    start: Vec<u32>,
    len: Vec<u32>,
    learnt: Vec<bool>,
    activity: Vec<f64>,
    deleted: Vec<bool>,
}

impl ClauseDb {
    fn push(&mut self, c: &[Lit], learnt: bool) -> u32 {
        let id = self.start.len() as u32;
        self.start.push(self.lits.len() as u32);
        self.len.push(c.len() as u32);
        self.lits.extend_from_slice(c);
        self.learnt.push(learnt);
        self.activity.push(0.0);
        self.deleted.push(false);
        id
    }

    #[inline]
    fn get(&self, c: u32) -> &[Lit] {
        let s = self.start[c as usize] as usize;
        &self.lits[s..s + self.len[c as usize] as usize]
    }

    #[inline]
    fn get_mut(&mut self, c: u32) -> &mut [Lit] {
        let s = self.start[c as usize] as usize;
        let l = self.len[c as usize] as usize;
        &mut self.lits[s..s + l]
    }
}

/// Binary max-heap over variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: Vec::with_capacity(n), pos: vec![NOT_IN_HEAP; n] }
    }

    #[inline]
    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v], act);
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::better(act, v, self.heap[p]) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = i;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
}

pub(crate) struct Solver {
    db: ClauseDb,
    watches: Vec<Vec<Watcher>>,
    assign: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    phase: Vec<bool>,
    heap: VarHeap,
    seen: Vec<bool>,
    ok: bool,
    pub stats: SolveStats,
}

const NO_REASON: u32 = u32::MAX;

impl Solver {
    /// `weights` seeds the initial variable activities.
    pub fn new(nvars: usize, weights: &[f64]) -> Self {
        let mut s = Solver {
            db: ClauseDb {
                lits: Vec::new(),
                start: Vec::new(),
                len: Vec::new(),
                learnt: Vec::new(),
                activity: Vec::new(),
                deleted: Vec::new(),
            },
            watches: vec![Vec::new(); 2 * nvars],
            assign: vec![UNDEF; nvars],
            level: vec![0; nvars],
            reason: vec![NO_REASON; nvars],
            trail: Vec::with_capacity(nvars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: weights.to_vec(),
            var_inc: 1.0,
            cla_inc: 1.0,
            phase: vec![false; nvars],
            heap: VarHeap::new(nvars),
            seen: vec![false; nvars],
            ok: true,
            stats: SolveStats::default(),
        };
        s.activity.resize(nvars, 0.0);
        for v in 0..nvars {
            s.heap.insert(v, &s.activity);
        }
        s
    }

    #[inline]
    fn value(&self, l: Lit) -> u8 {
        let a = self.assign[var_of(l)];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (l & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = var_of(l);
        self.assign[v] = (l & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    pub fn add_clause(&mut self, clause: &[Lit]) {
        if !self.ok {
            return;
        }
        let mut c: Vec<Lit> = clause.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        match c.len() {
            0 => self.ok = false,
            1 => match self.value(c[0]) {
                0 => self.ok = false,
                1 => {}
                _ => {
                    self.enqueue(c[0], NO_REASON);
                    if self.propagate().is_some() {
                        self.ok = false;
                    }
                }
            },
            _ => {
                let id = self.db.push(&c, false);
                self.watch(id);
            }
        }
    }

    fn watch(&mut self, id: u32) {
        let c = self.db.get(id);
        let (a, b) = (c[0], c[1]);
        self.watches[(a ^ 1) as usize].push(Watcher { clause: id, blocker: b });
        self.watches[(b ^ 1) as usize].push(Watcher { clause: id, blocker: a });
    }

    /// Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.db.deleted[w.clause as usize] {
                    continue;
                }
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = self.db.get_mut(w.clause);
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let len = c.len();
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = Watcher { clause: w.clause, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..len {
                    let lk = self.db.get(w.clause)[k];
                    if self.value(lk) != 0 {
                        let c = self.db.get_mut(w.clause);
                        c.swap(1, k);
                        self.watches[(lk ^ 1) as usize].push(Watcher { clause: w.clause, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { clause: w.clause, blocker: first };
                j += 1;
                match self.value(first) {
                    0 => {
                        conflict = Some(w.clause);
                        while i < ws.len() {
                            ws[j] = ws[i];
                            j += 1;
                            i += 1;
                        }
                    }
                    UNDEF => self.enqueue(first, w.clause),
                    _ => {}
                }
            }
            ws.truncate(j);
            // watchers pushed onto this list while it was taken came from
            // other clauses moving their watch here
            let extra = std::mem::take(&mut self.watches[p as usize]);
            ws.extend(extra);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, c: u32) {
        if !self.db.learnt[c as usize] {
            return;
        }
        self.db.activity[c as usize] += self.cla_inc;
        if self.db.activity[c as usize] > 1e20 {
            for a in self.db.activity.iter_mut() {
                *a *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP learnt clause (asserting literal first) and backjump level.
    fn analyse(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let lits: Vec<Lit> = self.db.get(confl).to_vec();
            let skip_first = p.is_some();
            for (k, &q) in lits.iter().enumerate() {
                if skip_first && k == 0 {
                    continue;
                }
                let v = var_of(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            let v = var_of(pl);
            self.seen[v] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = pl ^ 1;
                break;
            }
            confl = self.reason[v];
            // reason clauses keep the implied literal at position 0
            debug_assert_eq!(self.db.get(confl)[0], pl);
        }
        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt.iter().enumerate().map(|(k, &q)| k == 0 || !self.redundant(q)).collect();
        for &q in &learnt[1..] {
            self.seen[var_of(q)] = false;
        }
        let mut out: Vec<Lit> = learnt.iter().zip(keep).filter_map(|(&q, k)| k.then_some(q)).collect();
        let bt = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..out.len() {
                if self.level[var_of(out[k])] > self.level[var_of(out[max_i])] {
                    max_i = k;
                }
            }
            out.swap(1, max_i);
            self.level[var_of(out[1])]
        };
        (out, bt)
    }

    /// Local minimisation: `q` is redundant if its reason's other literals
    /// are all already in the learnt clause or fixed at level 0.
    fn redundant(&self, q: Lit) -> bool {
        let v = var_of(q);
        let r = self.reason[v];
        if r == NO_REASON {
            return false;
        }
        self.db.get(r)[1..].iter().all(|&x| {
            let u = var_of(x);
            self.seen[u] || self.level[u] == 0
        })
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let v = var_of(self.trail[k]);
            self.phase[v] = self.assign[v] == 1;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v] == UNDEF {
                return Some(lit(v, self.phase[v]));
            }
        }
        None
    }

    fn reduce_db(&mut self) {
        let mut learnt: Vec<u32> = (0..self.db.start.len() as u32)
            .filter(|&c| self.db.learnt[c as usize] && !self.db.deleted[c as usize] && self.db.len[c as usize] > 2)
            .collect();
        learnt.sort_by(|&a, &b| {
            self.db.activity[a as usize].partial_cmp(&self.db.activity[b as usize]).unwrap().then(a.cmp(&b))
        });
        let locked = |s: &Self, c: u32| {
            let first = s.db.get(c)[0];
            s.value(first) == 1 && s.reason[var_of(first)] == c
        };
        for &c in learnt.iter().take(learnt.len() / 2) {
            if !locked(self, c) {
                self.db.deleted[c as usize] = true;
            }
        }
    }

    /// Solves; `Some(assignment)` (value per variable) when satisfiable.
    pub fn solve(&mut self) -> Option<Vec<u8>> {
        if !self.ok {
            return None;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return None;
        }
        let mut restart_idx = 0u32;
        let mut max_learnts = (self.db.start.len() as f64 / 3.0).max(5000.0);
        loop {
            let budget = 100 * luby(restart_idx);
            restart_idx += 1;
            let mut conflicts_here = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        self.ok = false;
                        return None;
                    }
                    let (learnt, bt) = self.analyse(confl);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let id = self.db.push(&learnt, true);
                        self.watch(id);
                        self.bump_clause(id);
                        self.stats.learnt += 1;
                        self.enqueue(learnt[0], id);
                    }
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                } else {
                    if conflicts_here >= budget {
                        self.cancel_until(0);
                        break;
                    }
                    let live_learnt = self.stats.learnt as f64;
                    if live_learnt > max_learnts {
                        self.reduce_db();
                        max_learnts *= 1.1;
                    }
                    match self.pick_branch() {
                        None => {
                            let out = self.assign.iter().map(|&a| a.min(1)).collect();
                            return Some(out);
                        }
                        Some(l) => {
                            self.stats.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, NO_REASON);
                        }
                    }
                }
            }
        }
    }
}

/// Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p[i][h]: pigeon i in hole h
        let var = |i: usize, h: usize| i * 2 + h;
        let mut s = Solver::new(6, &[0.0; 6]);
        for i in 0..3 {
            s.add_clause(&[lit(var(i, 0), true), lit(var(i, 1), true)]);
        }
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    s.add_clause(&[lit(var(i, h), false), lit(var(j, h), false)]);
                }
            }
        }
        assert!(s.solve().is_none());
    }

    #[test]
    fn simple_sat() {
        let mut s = Solver::new(3, &[0.0; 3]);
        s.add_clause(&[lit(0, true), lit(1, true)]);
        s.add_clause(&[lit(0, false), lit(2, true)]);
        s.add_clause(&[lit(1, false)]);
        let m = s.solve().unwrap();
        assert_eq!(m[1], 0);
        assert_eq!(m[0], 1);
        assert_eq!(m[2], 1);
    }
}
