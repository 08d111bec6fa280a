//! Embedded conflict-driven clause-learning solver.
//!
//! Two watched literals with blockers (binary clauses get their own watch
//! lists), VSIDS on an indexed heap, phase saving, first-UIP learning with
//! recursive minimisation, LBD-driven restarts alternating with Luby-scheduled
//! stable phases, and tiered learnt-clause reduction.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use web_time::Instant;

use super::{Backend, Model, SatProblem, Verdict};
use crate::error::Result;

type L = u32;
const NO_REASON: u32 = u32::MAX;
const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[inline]
fn var_of(l: L) -> usize {
    (l >> 1) as usize
}

#[inline]
fn neg(l: L) -> L {
    l ^ 1
}

#[inline]
fn mk(v: usize, negated: bool) -> L {
    (v as u32) << 1 | negated as u32
}

/// Knobs for the embedded solver. The defaults are what the scheduler uses.
#[derive(Clone, Debug)]
pub struct Cdcl {
    pub var_decay: f64,
    pub clause_decay: f64,
    pub random_decision_freq: f64,
    pub first_reduce: u64,
    pub reduce_increment: u64,
    /// Conflicts in the first focused phase; later phases grow geometrically.
    pub mode_phase: u64,
}

impl Default for Cdcl {
    fn default() -> Self {
        Self {
            var_decay: 0.95,
            clause_decay: 0.999,
            random_decision_freq: 0.005,
            first_reduce: 2000,
            reduce_increment: 300,
            mode_phase: 2000,
        }
    }
}

impl Backend for Cdcl {
    fn name(&self) -> String {
        "embedded".into()
    }

    fn decide(
        &self,
        problem: &SatProblem,
        timeout: Duration,
        seed: u64,
        cancel: Option<&AtomicBool>,
    ) -> Result<Verdict> {
        let deadline = Instant::now().checked_add(timeout);
        let mut s = Solver::new(self.clone(), problem.num_vars(), seed);
        for c in problem.clauses() {
            let lits: Vec<L> = c
                .iter()
                .map(|l| mk(l.var().index() as usize - 1, !l.is_positive()))
                .collect();
            if !s.add_input_clause(lits) {
                return Ok(Verdict::Unsat);
            }
        }
        Ok(match s.search(deadline, cancel) {
            Some(true) => {
                let mut vals = vec![false; problem.num_vars() + 1];
                for (v, slot) in vals.iter_mut().skip(1).enumerate() {
                    *slot = s.assigns[v] == TRUE;
                }
                Verdict::Sat(Model::new(vals))
            }
            Some(false) => Verdict::Unsat,
            None => Verdict::Timeout,
        })
    }
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: L,
}

#[derive(Clone, Copy)]
struct Header {
    start: u32,
    len: u32,
    lbd: u32,
    activity: f32,
    learnt: bool,
    deleted: bool,
    used: bool,
}

/// Indexed binary max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        Self { heap: Vec::with_capacity(n), pos: vec![NOT_IN_HEAP; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len() as u32;
        self.heap.push(v as u32);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()? as usize;
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as u32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

struct Ema {
    value: f64,
    alpha: f64,
    beta: f64,
    wait: u64,
    period: u64,
}

impl Ema {
    /// Exponential moving average with bias correction during warm-up.
    fn new(alpha: f64) -> Self {
        Self { value: 0.0, alpha, beta: 1.0, wait: 1, period: 1 }
    }

    fn update(&mut self, x: f64) {
        self.value += self.beta * (x - self.value);
        if self.beta <= self.alpha {
            return;
        }
        self.wait -= 1;
        if self.wait == 0 {
            self.period *= 2;
            self.wait = self.period;
            self.beta = (self.beta * 0.5).max(self.alpha);
        }
    }
}

/// `i`-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ...
fn luby(i: u64) -> u64 {
    let mut i = i - 1;
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

struct Solver {
    cfg: Cdcl,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,

    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,

    arena: Vec<L>,
    wasted: usize,
    headers: Vec<Header>,
    free_headers: Vec<u32>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    bins: Vec<Vec<(L, u32)>>,

    seen: Vec<u8>,
    level_stamp: Vec<u64>,
    stamp: u64,
    analyze_stack: Vec<L>,
    analyze_clear: Vec<usize>,

    rng: ChaCha8Rng,
    conflicts: u64,
    ok: bool,
}

impl Solver {
    fn new(cfg: Cdcl, nvars: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let activity: Vec<f64> = (0..nvars).map(|_| rng.gen::<f64>() * 1e-5).collect();
        let mut heap = VarHeap::new(nvars);
        for v in 0..nvars {
            heap.insert(v, &activity);
        }
        Self {
            cfg,
            assigns: vec![UNDEF; nvars],
            level: vec![0; nvars],
            reason: vec![NO_REASON; nvars],
            phase: vec![false; nvars],
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            trail: Vec::with_capacity(nvars),
            trail_lim: Vec::new(),
            qhead: 0,
            arena: Vec::new(),
            wasted: 0,
            headers: Vec::new(),
            free_headers: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * nvars],
            bins: vec![Vec::new(); 2 * nvars],
            seen: vec![0; nvars],
            level_stamp: vec![0; nvars + 1],
            stamp: 0,
            analyze_stack: Vec::new(),
            analyze_clear: Vec::new(),
            rng,
            conflicts: 0,
            ok: true,
        }
    }

    #[inline]
    fn value(&self, l: L) -> i8 {
        let a = self.assigns[var_of(l)];
        if l & 1 == 1 {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: L, reason: u32) {
        let v = var_of(l);
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l & 1 == 1 { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn clause(&self, cref: u32) -> &[L] {
        let h = &self.headers[cref as usize];
        &self.arena[h.start as usize..(h.start + h.len) as usize]
    }

    fn alloc(&mut self, lits: &[L], learnt: bool, lbd: u32) -> u32 {
        let start = self.arena.len() as u32;
        self.arena.extend_from_slice(lits);
        let h = Header {
            start,
            len: lits.len() as u32,
            lbd,
            activity: 0.0,
            learnt,
            deleted: false,
            used: false,
        };
        let cref = match self.free_headers.pop() {
            Some(c) => {
                self.headers[c as usize] = h;
                c
            }
            None => {
                self.headers.push(h);
                (self.headers.len() - 1) as u32
            }
        };
        if lits.len() == 2 {
            self.bins[neg(lits[0]) as usize].push((lits[1], cref));
            self.bins[neg(lits[1]) as usize].push((lits[0], cref));
        } else {
            self.watches[neg(lits[0]) as usize].push(Watch { cref, blocker: lits[1] });
            self.watches[neg(lits[1]) as usize].push(Watch { cref, blocker: lits[0] });
        }
        cref
    }

    /// Adds an original clause at level 0. Returns false once the formula is known unsatisfiable.
    fn add_input_clause(&mut self, mut lits: Vec<L>) -> bool {
        if !self.ok {
            return false;
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == neg(w[1])) {
            return true;
        }
        lits.retain(|&l| self.value(l) != FALSE);
        if lits.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        match lits.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(lits[0], NO_REASON);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.alloc(&lits, false, 0);
                true
            }
        }
    }

    /// Unit propagation. Watches are keyed by the literal whose falsification wakes them.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;

            for i in 0..self.bins[p as usize].len() {
                let (other, cref) = self.bins[p as usize][i];
                match self.value(other) {
                    TRUE => {}
                    FALSE => return Some(cref),
                    _ => self.enqueue(other, cref),
                }
            }

            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let h = self.headers[w.cref as usize];
                if h.deleted {
                    continue;
                }
                let start = h.start as usize;
                let len = h.len as usize;
                if self.arena[start] == false_lit {
                    self.arena.swap(start, start + 1);
                }
                let first = self.arena[start];
                let nw = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..len {
                    let l = self.arena[start + k];
                    if self.value(l) != FALSE {
                        self.arena.swap(start + 1, start + k);
                        self.watches[neg(l) as usize].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let h = &mut self.headers[cref as usize];
        if !h.learnt {
            return;
        }
        h.used = true;
        h.activity += self.cla_inc as f32;
        if h.activity > 1e20 {
            for &c in &self.learnts {
                self.headers[c as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn compute_lbd(&mut self, lits: &[L]) -> u32 {
        self.stamp += 1;
        let mut n = 0;
        for &l in lits {
            let lv = self.level[var_of(l)] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                n += 1;
            }
        }
        n
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting literal first) and the
    /// backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<L>, u32) {
        let mut learnt: Vec<L> = vec![0];
        let mut path = 0usize;
        let mut p: Option<L> = None;
        let mut index = self.trail.len();
        let cur = self.decision_level();
        loop {
            self.bump_clause(confl);
            let h = self.headers[confl as usize];
            if h.learnt && h.lbd > 2 {
                let lits = self.clause(confl).to_vec();
                let lbd = self.compute_lbd(&lits);
                if lbd + 1 < h.lbd {
                    self.headers[confl as usize].lbd = lbd;
                }
            }
            let (start, len) = (h.start as usize, h.len as usize);
            for k in 0..len {
                let q = self.arena[start + k];
                let v = var_of(q);
                if p.is_some_and(|p| var_of(p) == v) {
                    continue;
                }
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.seen[v] = 1;
                    self.bump_var(v);
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[var_of(self.trail[index])] != 0 {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[var_of(pl)] = 0;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[var_of(pl)];
        }
        learnt[0] = neg(p.unwrap());

        // recursive minimisation
        self.analyze_clear.clear();
        let mut abstract_levels = 0u32;
        for &l in &learnt[1..] {
            abstract_levels |= 1 << (self.level[var_of(l)] & 31);
        }
        let mut keep = vec![learnt[0]];
        for idx in 1..learnt.len() {
            let l = learnt[idx];
            if self.reason[var_of(l)] == NO_REASON || !self.redundant(l, abstract_levels) {
                keep.push(l);
            }
        }
        for &l in &learnt[1..] {
            self.seen[var_of(l)] = 0;
        }
        for i in 0..self.analyze_clear.len() {
            let v = self.analyze_clear[i];
            self.seen[v] = 0;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[var_of(learnt[i])] > self.level[var_of(learnt[best])] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            self.level[var_of(learnt[1])]
        };
        (learnt, bt)
    }

    /// True if `p` is implied by other literals already in the learnt clause.
    fn redundant(&mut self, p: L, abstract_levels: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_clear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let cref = self.reason[var_of(q)];
            let h = self.headers[cref as usize];
            for k in 0..h.len as usize {
                let l = self.arena[h.start as usize + k];
                let v = var_of(l);
                if v == var_of(q) || self.seen[v] != 0 || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && (abstract_levels >> (self.level[v] & 31)) & 1 == 1 {
                    self.seen[v] = 1;
                    self.analyze_stack.push(l);
                    self.analyze_clear.push(v);
                } else {
                    for &c in &self.analyze_clear[top..] {
                        self.seen[c] = 0;
                    }
                    self.analyze_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var_of(l);
            self.phase[v] = l & 1 == 0;
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<L> {
        if self.cfg.random_decision_freq > 0.0
            && !self.heap.heap.is_empty()
            && self.rng.gen::<f64>() < self.cfg.random_decision_freq
        {
            let v = self.heap.heap[self.rng.gen_range(0..self.heap.heap.len())] as usize;
            if self.assigns[v] == UNDEF {
                return Some(mk(v, !self.phase[v]));
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(mk(v, !self.phase[v]));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.clause(cref)[0];
        self.value(first) == TRUE && self.reason[var_of(first)] == cref
    }

    /// Keeps glue clauses, recently used mid-tier clauses and the more active half of the rest.
    fn reduce_db(&mut self) {
        let mut candidates = Vec::new();
        let mut kept = Vec::new();
        for &c in &self.learnts {
            let h = &mut self.headers[c as usize];
            if h.len == 2 || h.lbd <= 2 {
                kept.push(c);
            } else if h.lbd <= 6 && h.used {
                h.used = false;
                kept.push(c);
            } else {
                candidates.push(c);
            }
        }
        candidates.sort_by(|&a, &b| {
            let (ha, hb) = (&self.headers[a as usize], &self.headers[b as usize]);
            hb.lbd.cmp(&ha.lbd).then(ha.activity.total_cmp(&hb.activity))
        });
        let remove = candidates.len() / 2;
        for (i, &c) in candidates.iter().enumerate() {
            if i < remove && !self.locked(c) {
                let h = &mut self.headers[c as usize];
                h.deleted = true;
                self.wasted += h.len as usize;
                self.free_headers.push(c);
            } else {
                self.headers[c as usize].used = false;
                kept.push(c);
            }
        }
        self.learnts = kept;
        for ws in &mut self.watches {
            ws.retain(|w| !self.headers[w.cref as usize].deleted);
        }
        if self.wasted > self.arena.len() / 2 {
            self.compact_arena();
        }
    }

    fn compact_arena(&mut self) {
        let mut arena = Vec::with_capacity(self.arena.len() - self.wasted);
        for h in self.headers.iter_mut() {
            if h.deleted {
                continue;
            }
            let start = arena.len() as u32;
            arena.extend_from_slice(&self.arena[h.start as usize..(h.start + h.len) as usize]);
            h.start = start;
        }
        self.arena = arena;
        self.wasted = 0;
    }

    fn out_of_time(&self, deadline: Option<Instant>, cancel: Option<&AtomicBool>) -> bool {
        cancel.is_some_and(|c| c.load(Ordering::Relaxed)) || deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Some(true) = SAT, Some(false) = UNSAT, None = out of budget.
    fn search(&mut self, deadline: Option<Instant>, cancel: Option<&AtomicBool>) -> Option<bool> {
        if !self.ok {
            return Some(false);
        }
        if self.propagate().is_some() {
            return Some(false);
        }
        let mut fast = Ema::new(1.0 / 32.0);
        let mut slow = Ema::new(1.0 / 4096.0);
        let mut since_restart = 0u64;
        let mut next_reduce = self.cfg.first_reduce;
        let mut reductions = 0u64;

        let mut stable = false;
        let mut phase_len = self.cfg.mode_phase;
        let mut phase_end = phase_len;
        let mut luby_index = 1u64;
        let mut luby_limit = 512 * luby(luby_index);

        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    return Some(false);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                    fast.update(1.0);
                    slow.update(1.0);
                } else {
                    let lbd = self.compute_lbd(&learnt);
                    fast.update(lbd as f64);
                    slow.update(lbd as f64);
                    let cref = self.alloc(&learnt, true, lbd);
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.enqueue(learnt[0], cref);
                }
                self.var_inc /= self.cfg.var_decay;
                self.cla_inc /= self.cfg.clause_decay;

                if self.conflicts % 256 == 0 && self.out_of_time(deadline, cancel) {
                    return None;
                }
                if self.conflicts >= phase_end {
                    stable = !stable;
                    phase_len = phase_len * 3 / 2;
                    phase_end = self.conflicts + phase_len;
                    since_restart = 0;
                    self.cancel_until(0);
                }
                continue;
            }

            let restart = if stable {
                since_restart >= luby_limit
            } else {
                since_restart >= 50 && fast.value > 1.15 * slow.value
            };
            if restart {
                if stable {
                    luby_index += 1;
                    luby_limit = 512 * luby(luby_index);
                }
                since_restart = 0;
                self.cancel_until(0);
                if self.out_of_time(deadline, cancel) {
                    return None;
                }
            }
            if self.conflicts >= next_reduce {
                reductions += 1;
                next_reduce = self.conflicts + self.cfg.first_reduce + self.cfg.reduce_increment * reductions;
                self.reduce_db();
            }

            match self.pick_branch() {
                None => return Some(true),
                Some(l) => {
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(l, NO_REASON);
                }
            }
        }
    }
}
