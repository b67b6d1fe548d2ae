//! Backtracking search for natural transformations between finite presheaves.
//!
//! Elements are assigned in schema sort order; every assignment is
//! propagated along the schema arrows, so naturality is enforced as soon as
//! both ends of an equation are known.

use super::Presheaf;

pub(crate) struct Search<'a> {
    src: &'a Presheaf,
    tgt: &'a Presheaf,
    allowed: Option<&'a dyn Fn(usize, usize, usize) -> bool>,
    injective: bool,
    assign: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
    trail: Vec<(usize, usize)>,
    order: Vec<(usize, usize)>,
    out: Vec<Vec<Vec<usize>>>,
}

impl<'a> Search<'a> {
    pub(crate) fn new(src: &'a Presheaf, tgt: &'a Presheaf) -> Self {
        let assign = src.carriers.iter().map(|c| vec![None; c.len()]).collect();
        let used = tgt.carriers.iter().map(|c| vec![false; c.len()]).collect();
        let order = src
            .carriers
            .iter()
            .enumerate()
            .flat_map(|(s, c)| (0..c.len()).map(move |x| (s, x)))
            .collect();
        Search {
            src,
            tgt,
            allowed: None,
            injective: false,
            assign,
            used,
            trail: Vec::new(),
            order,
            out: Vec::new(),
        }
    }

    /// Restrict `sort, src element → tgt element` choices.
    pub(crate) fn allowed(mut self, f: &'a dyn Fn(usize, usize, usize) -> bool) -> Self {
        self.allowed = Some(f);
        self
    }

    pub(crate) fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Pre-assign `sort, x ↦ v`; returns false when inconsistent.
    pub(crate) fn fix(&mut self, sort: usize, x: usize, v: usize) -> bool {
        self.assign(sort, x, v)
    }

    /// Run the search. Results are sorted lexicographically by the flattened
    /// assignment, i.e. by target element identity in sort order.
    pub(crate) fn run(mut self, consistent: bool) -> Vec<Vec<Vec<usize>>> {
        if consistent {
            self.dfs(0);
        }
        let mut out = self.out;
        out.sort();
        out
    }

    fn assign(&mut self, sort: usize, x: usize, v: usize) -> bool {
        if let Some(w) = self.assign[sort][x] {
            return w == v;
        }
        if let Some(ok) = self.allowed {
            if !ok(sort, x, v) {
                return false;
            }
        }
        if self.injective {
            if self.used[sort][v] {
                return false;
            }
            self.used[sort][v] = true;
        }
        self.assign[sort][x] = Some(v);
        self.trail.push((sort, x));
        let schema = &self.src.schema;
        for a in schema.proper_arrows() {
            let arrow = &schema.arrows()[a];
            if arrow.source != sort {
                continue;
            }
            let y = self.src.action[a][x];
            let w = self.tgt.action[a][v];
            if !self.assign(arrow.target, y, w) {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (s, x) = self.trail.pop().expect("trail above mark");
            if let Some(v) = self.assign[s][x].take() {
                if self.injective {
                    self.used[s][v] = false;
                }
            }
        }
    }

    fn dfs(&mut self, from: usize) {
        let next = self.order[from..]
            .iter()
            .position(|&(s, x)| self.assign[s][x].is_none())
            .map(|p| p + from);
        let Some(pos) = next else {
            let maps = self
                .assign
                .iter()
                .map(|row| row.iter().map(|v| v.expect("complete")).collect())
                .collect();
            self.out.push(maps);
            return;
        };
        let (s, x) = self.order[pos];
        for v in 0..self.tgt.carriers[s].len() {
            let mark = self.trail.len();
            if self.assign(s, x, v) {
                self.dfs(pos + 1);
            }
            self.undo_to(mark);
        }
    }
}
