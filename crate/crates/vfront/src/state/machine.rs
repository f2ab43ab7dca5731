//! The machine state: history, per-thread fronts, global SC/NA fronts,
//! operation buffers, acquire-read restrictions and retired locations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::lang::ast::{Dir, Loc, Sym, Tau, ThreadPath, Var};
use crate::state::{BufEntry, Buffer, Front, HistEntry, History};

/// Thread-join policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JoinPolicy {
    /// Children must have drained their buffers before joining.
    Strict,
    /// Children's buffers are merged into the parent, one successor per
    /// interleaving.
    Interleave,
}

/// Which parts of the semantics are active. The base machinery (history and
/// per-thread viewfronts) is always on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AspectConfig {
    pub sc_fronts: bool,
    pub na_fronts: bool,
    pub postponed_ops: bool,
    pub arr: bool,
    pub consume: bool,
    pub write_fronts: bool,
    /// Write promotion out of speculated branches; only meaningful with
    /// `postponed_ops`.
    pub promote: bool,
    pub deallocation: bool,
    pub join_policy: JoinPolicy,
}

impl AspectConfig {
    /// Everything on, strict join.
    pub fn full() -> Self {
        AspectConfig {
            sc_fronts: true,
            na_fronts: true,
            postponed_ops: true,
            arr: true,
            consume: true,
            write_fronts: true,
            promote: true,
            deallocation: true,
            join_policy: JoinPolicy::Strict,
        }
    }

    /// History and viewfronts only.
    pub fn base() -> Self {
        AspectConfig {
            sc_fronts: false,
            na_fronts: false,
            postponed_ops: false,
            arr: false,
            consume: false,
            write_fronts: false,
            promote: false,
            deallocation: false,
            join_policy: JoinPolicy::Strict,
        }
    }

    pub fn with_sc(mut self) -> Self {
        self.sc_fronts = true;
        self
    }

    pub fn with_na(mut self) -> Self {
        self.na_fronts = true;
        self
    }

    pub fn with_po(mut self) -> Self {
        self.postponed_ops = true;
        self.promote = true;
        self
    }

    pub fn with_arr(mut self) -> Self {
        self.arr = true;
        self.postponed_ops = true;
        self.promote = true;
        self
    }

    pub fn with_consume(mut self) -> Self {
        self.consume = true;
        self
    }

    pub fn with_wf(mut self) -> Self {
        self.write_fronts = true;
        self
    }

    pub fn with_dealloc(mut self) -> Self {
        self.deallocation = true;
        self
    }

    pub fn with_join(mut self, policy: JoinPolicy) -> Self {
        self.join_policy = policy;
        if policy == JoinPolicy::Interleave {
            self.postponed_ops = true;
            self.promote = true;
        }
        self
    }

    /// `arr` and the interleaving join policy presuppose operation buffers.
    pub fn validate(&self) -> Result<(), String> {
        if self.arr && !self.postponed_ops {
            return Err("aspect 'arr' requires 'po'".into());
        }
        if self.join_policy == JoinPolicy::Interleave && !self.postponed_ops {
            return Err("join policy 'interleave' requires 'po'".into());
        }
        Ok(())
    }
}

/// An acquire-read restriction: reading `(loc, tau)` with acquiring
/// semantics is blocked until `sym` resolves.
pub type ArrTriple = (Loc, Tau, Sym);

/// The full machine state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MachineState {
    pub history: History,
    pub read_fronts: BTreeMap<ThreadPath, Front>,
    pub sc_front: Front,
    pub na_front: Front,
    pub write_fronts: BTreeMap<ThreadPath, Front>,
    pub buffers: BTreeMap<ThreadPath, Buffer>,
    pub gamma: BTreeSet<ArrTriple>,
    pub retired: BTreeSet<Loc>,
    pub aspects: AspectConfig,
    next_sym: u32,
    next_var: u32,
}

impl MachineState {
    /// The initial state: empty history, a single root thread with empty
    /// fronts and buffer.
    pub fn initial(aspects: AspectConfig) -> Self {
        let root = ThreadPath::root();
        let mut read_fronts = BTreeMap::new();
        read_fronts.insert(root.clone(), Front::bottom());
        let mut write_fronts = BTreeMap::new();
        write_fronts.insert(root.clone(), Front::bottom());
        let mut buffers = BTreeMap::new();
        buffers.insert(root, Buffer::new());
        MachineState {
            history: History::new(),
            read_fronts,
            sc_front: Front::bottom(),
            na_front: Front::bottom(),
            write_fronts,
            buffers,
            gamma: BTreeSet::new(),
            retired: BTreeSet::new(),
            aspects,
            next_sym: 0,
            next_var: 0,
        }
    }

    pub fn fresh_sym(&mut self) -> Sym {
        let s = Sym(self.next_sym);
        self.next_sym += 1;
        s
    }

    pub fn fresh_var(&mut self) -> Var {
        let v = Var::Fresh(self.next_var);
        self.next_var += 1;
        v
    }

    pub fn read_front(&self, path: &ThreadPath) -> &Front {
        self.read_fronts
            .get(path)
            .unwrap_or_else(|| panic!("no read front for thread {path}"))
    }

    pub fn write_front(&self, path: &ThreadPath) -> &Front {
        self.write_fronts
            .get(path)
            .unwrap_or_else(|| panic!("no write front for thread {path}"))
    }

    pub fn buffer(&self, path: &ThreadPath) -> &Buffer {
        self.buffers
            .get(path)
            .unwrap_or_else(|| panic!("no buffer for thread {path}"))
    }

    /// Spawn meta-function: children inherit the parent's viewfront; their
    /// write-fronts and buffers start empty. The parent's entries stay until
    /// join replaces them.
    pub fn spawn_meta(&self, path: &ThreadPath) -> MachineState {
        let mut s = self.clone();
        let parent_front = self.read_front(path).clone();
        for d in [Dir::L, Dir::R] {
            let child = path.child(d);
            s.read_fronts.insert(child.clone(), parent_front.clone());
            s.write_fronts.insert(child.clone(), Front::bottom());
            s.buffers.insert(child, Buffer::new());
        }
        s
    }

    /// Join meta-function; returns one state per admissible buffer merge.
    /// Under the strict policy both child buffers must be empty (else no
    /// result, forcing resolution first). Under the interleaving policy the
    /// children's records are riffled onto the end of the parent's buffer.
    pub fn join_meta(&self, path: &ThreadPath) -> Vec<MachineState> {
        let l = path.child(Dir::L);
        let r = path.child(Dir::R);
        let joined = self.read_front(&l).join(self.read_front(&r));
        let buf_l = self.buffer(&l).clone();
        let buf_r = self.buffer(&r).clone();

        let merged: Vec<Buffer> = match self.aspects.join_policy {
            JoinPolicy::Strict => {
                if !buf_l.is_empty() || !buf_r.is_empty() {
                    return Vec::new();
                }
                vec![self.buffer(path).clone()]
            }
            JoinPolicy::Interleave => {
                let parent = self.buffer(path).clone();
                Buffer::interleavings(&buf_l, &buf_r)
                    .into_iter()
                    .map(|riffle| {
                        let mut b = parent.clone();
                        b.0.extend(riffle.0);
                        b
                    })
                    .collect()
            }
        };

        merged
            .into_iter()
            .map(|buf| {
                let mut s = self.clone();
                s.read_fronts.insert(path.clone(), joined.clone());
                s.write_fronts.insert(path.clone(), Front::bottom());
                s.buffers.insert(path.clone(), buf);
                for c in [&l, &r] {
                    s.read_fronts.remove(c);
                    s.write_fronts.remove(c);
                    s.buffers.remove(c);
                }
                s
            })
            .collect()
    }

    /// Appends a write to the history and returns (timestamp, new history).
    pub fn append_history(&mut self, loc: &Loc, entry: HistEntry) -> Tau {
        self.history.append(loc, entry)
    }

    /// Symbols mentioned in gamma.
    pub fn gamma_syms(&self) -> BTreeSet<Sym> {
        self.gamma.iter().map(|(_, _, s)| *s).collect()
    }

    /// Drops all gamma triples that mention `sym`.
    pub fn gamma_drop_sym(&mut self, sym: Sym) {
        self.gamma.retain(|(_, _, s)| *s != sym);
    }

    /// Is an acquiring read of `(loc, tau)` blocked by a restriction?
    pub fn arr_blocked(&self, loc: &Loc, tau: Tau) -> bool {
        self.aspects.arr
            && self
                .gamma
                .iter()
                .any(|(l, t, _)| l == loc && *t == tau)
    }

    /// Byte-stable textual dump: history rows sorted by (location,
    /// timestamp), fronts sorted by path then location, buffers in sequence
    /// order. Symbol/variable counters are excluded.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "history:").unwrap();
        for (loc, entries) in self.history.iter() {
            for (tau, e) in entries.iter().enumerate() {
                writeln!(out, "  {loc} {tau} = {} ; {}", e.value, e.front).unwrap();
            }
        }
        writeln!(out, "read-fronts:").unwrap();
        for (path, front) in &self.read_fronts {
            writeln!(out, "  {path}: {front}").unwrap();
        }
        writeln!(out, "write-fronts:").unwrap();
        for (path, front) in &self.write_fronts {
            writeln!(out, "  {path}: {front}").unwrap();
        }
        writeln!(out, "sc-front: {}", self.sc_front).unwrap();
        writeln!(out, "na-front: {}", self.na_front).unwrap();
        writeln!(out, "buffers:").unwrap();
        for (path, buf) in &self.buffers {
            writeln!(out, "  {path}: {buf}").unwrap();
        }
        write!(out, "gamma: [").unwrap();
        for (i, (l, t, s)) in self.gamma.iter().enumerate() {
            if i > 0 {
                write!(out, ", ").unwrap();
            }
            write!(out, "({l}, {t}, {s})").unwrap();
        }
        writeln!(out, "]").unwrap();
        write!(out, "retired: [").unwrap();
        for (i, l) in self.retired.iter().enumerate() {
            if i > 0 {
                write!(out, ", ").unwrap();
            }
            write!(out, "{l}").unwrap();
        }
        writeln!(out, "]").unwrap();
        out
    }

    /// All symbols currently alive in buffers, in buffer order by path.
    pub fn buffer_syms(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for buf in self.buffers.values() {
            buf.collect_syms(&mut out);
        }
        out
    }

    /// Applies `f` to the buffer of `path`.
    pub fn map_buffer(&self, path: &ThreadPath, f: impl FnOnce(&Buffer) -> Buffer) -> MachineState {
        let mut s = self.clone();
        let b = f(self.buffer(path));
        s.buffers.insert(path.clone(), b);
        s
    }
}

/// Entries of `buf` paired with the trail addressing their position.
pub fn walk_entries<'a>(
    buf: &'a Buffer,
    trail: &mut Vec<(Sym, Dir)>,
    f: &mut impl FnMut(&[(Sym, Dir)], usize, &'a BufEntry),
) {
    for (i, e) in buf.0.iter().enumerate() {
        f(trail, i, e);
        if let BufEntry::If {
            sym,
            then_buf,
            else_buf,
            ..
        } = e
        {
            trail.push((*sym, Dir::L));
            walk_entries(then_buf, trail, f);
            trail.pop();
            trail.push((*sym, Dir::R));
            walk_entries(else_buf, trail, f);
            trail.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spawn_then_strict_join_restores_front() {
        let mut st = MachineState::initial(AspectConfig::full());
        let root = ThreadPath::root();
        let f = Front::singleton(&Loc::new("x"), 3);
        st.read_fronts.insert(root.clone(), f.clone());
        let spawned = st.spawn_meta(&root);
        assert_eq!(spawned.read_front(&root.child(Dir::L)), &f);
        assert_eq!(spawned.read_front(&root.child(Dir::R)), &f);
        assert!(spawned.write_front(&root.child(Dir::L)).is_bottom());
        let joined = spawned.join_meta(&root);
        assert_eq!(joined.len(), 1);
        assert_eq!(joined[0].read_front(&root), &f);
        assert!(!joined[0].read_fronts.contains_key(&root.child(Dir::L)));
    }

    #[test]
    fn strict_join_requires_empty_buffers() {
        let st = MachineState::initial(AspectConfig::full());
        let root = ThreadPath::root();
        let mut spawned = st.spawn_meta(&root);
        spawned.buffers.insert(
            root.child(Dir::L),
            Buffer(vec![BufEntry::BindE {
                sym: Sym(0),
                expr: crate::lang::ast::Expr::Int(1),
            }]),
        );
        assert!(spawned.join_meta(&root).is_empty());
    }

    #[test]
    fn interleave_join_merges_buffers() {
        let mut aspects = AspectConfig::full();
        aspects.join_policy = JoinPolicy::Interleave;
        let st = MachineState::initial(aspects);
        let root = ThreadPath::root();
        let mut spawned = st.spawn_meta(&root);
        spawned.buffers.insert(
            root.child(Dir::L),
            Buffer(vec![BufEntry::BindE {
                sym: Sym(0),
                expr: crate::lang::ast::Expr::Int(1),
            }]),
        );
        spawned.buffers.insert(
            root.child(Dir::R),
            Buffer(vec![BufEntry::BindE {
                sym: Sym(1),
                expr: crate::lang::ast::Expr::Int(2),
            }]),
        );
        let joined = spawned.join_meta(&root);
        assert_eq!(joined.len(), 2);
        for s in &joined {
            assert_eq!(s.buffer(&root).len(), 2);
        }
    }
}
