//! `b`-modules built from pieces of `g`, their weight bases, and the action
//! of `U(n)` on them.
//!
//! A module is a direct sum of tensor products of factors `Sym^k V`,
//! `∧^k V` or `V^{⊗k}`, where each `V` is one of `g, n, u, b, h` (or the
//! parabolic versions) with the adjoint or coadjoint action.
//!
//! Module spec grammar (whitespace is ignored):
//!
//! ```text
//! spec   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := ('sym' | 'wedge' | 'tensor') '(' base ',' INT ')' | base | 'C'
//! base   := ('ad' | 'coad') '(' name ')' | name
//! name   := ('g' | 'n' | 'u' | 'b' | 'h' | 'p' | 'n_p' | 'u_p') ('[' INT (',' INT)* ']')?
//! ```
//!
//! The bracket lists the simple roots (one-based) of the Levi factor of a
//! parabolic `p ⊇ b`; `n`, `u` and `b` then mean `n_p`, `g/p` and `p`. A name
//! without a bracket uses the default parabolic of the job, which is the
//! Borel subalgebra unless configured otherwise. `p`, `n_p` and `u_p` are
//! synonyms of `b`, `n` and `u`. `u` carries the coadjoint action by default
//! (it models the tangent bundle); everything else is adjoint by default.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use dashu_base::UnsignedAbs;
use dashu_int::IBig;
use rustc_hash::FxHashMap;
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::pbw::{pbw_order, PbwElement};
use crate::root_system::{ChevalleyConstants, GIndex, RootSystem, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("module spec parse error at column {column}: {message}\n  {input}\n  {marker}^")]
    Parse {
        column: usize,
        message: String,
        input: String,
        marker: String,
    },
    #[error("simple root {index} in a parabolic qualifier is out of range 1..={rank}")]
    BadParabolic { index: usize, rank: usize },
    #[error("module has {0} basis elements, more than the supported maximum")]
    TooLarge(u128),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Action {
    Adjoint,
    Coadjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BaseName {
    G,
    N,
    U,
    B,
    H,
}

impl BaseName {
    fn as_str(&self) -> &'static str {
        match self {
            BaseName::G => "g",
            BaseName::N => "n",
            BaseName::U => "u",
            BaseName::B => "b",
            BaseName::H => "h",
        }
    }

    fn default_action(&self) -> Action {
        match self {
            BaseName::U => Action::Coadjoint,
            _ => Action::Adjoint,
        }
    }

    fn takes_parabolic(&self) -> bool {
        matches!(self, BaseName::N | BaseName::U | BaseName::B)
    }
}

/// A base module reference as written in a spec.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BaseRef {
    pub name: BaseName,
    pub action: Action,
    /// One-based Levi simple roots; `None` means the job default.
    pub levi: Option<Vec<usize>>,
}

impl fmt::Display for BaseRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut name = self.name.as_str().to_string();
        if let Some(l) = &self.levi {
            let parts: Vec<String> = l.iter().map(|i| i.to_string()).collect();
            name = format!("{name}[{}]", parts.join(","));
        }
        if self.action == self.name.default_action() {
            write!(f, "{name}")
        } else {
            match self.action {
                Action::Adjoint => write!(f, "ad({name})"),
                Action::Coadjoint => write!(f, "coad({name})"),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PowerKind {
    Sym,
    Wedge,
    Tensor,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Factor {
    /// The trivial one-dimensional module.
    Trivial,
    Plain(BaseRef),
    Power {
        kind: PowerKind,
        base: BaseRef,
        power: usize,
    },
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Trivial => write!(f, "C"),
            Factor::Plain(b) => write!(f, "{b}"),
            Factor::Power { kind, base, power } => {
                let k = match kind {
                    PowerKind::Sym => "sym",
                    PowerKind::Wedge => "wedge",
                    PowerKind::Tensor => "tensor",
                };
                write!(f, "{k}({base},{power})")
            }
        }
    }
}

/// A parsed module spec: a sum of products of factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModuleSpec {
    pub summands: Vec<Vec<Factor>>,
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .summands
            .iter()
            .map(|s| {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                parts.join("*")
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl std::str::FromStr for ModuleSpec {
    type Err = ModuleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModuleSpec::parse(s)
    }
}

struct Parser<'a> {
    input: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> ModuleError {
        let column = self.pos + 1;
        ModuleError::Parse {
            column,
            message: message.into(),
            input: self.input.to_string(),
            marker: " ".repeat(self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ModuleError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ModuleError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok((self.chars[start..self.pos].iter().collect(), start))
    }

    fn int(&mut self) -> Result<usize, ModuleError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a non-negative integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| {
            self.pos = start;
            self.err("integer too large")
        })
    }

    fn spec(&mut self) -> Result<ModuleSpec, ModuleError> {
        let mut summands = vec![self.term()?];
        while self.peek() == Some('+') {
            self.pos += 1;
            summands.push(self.term()?);
        }
        if self.peek().is_some() {
            return Err(self.err("unexpected input"));
        }
        Ok(ModuleSpec { summands })
    }

    fn term(&mut self) -> Result<Vec<Factor>, ModuleError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some('*') {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok(factors)
    }

    fn factor(&mut self) -> Result<Factor, ModuleError> {
        let save = self.pos;
        let (id, _) = self.ident()?;
        let kind = match id.as_str() {
            "sym" => Some(PowerKind::Sym),
            "wedge" => Some(PowerKind::Wedge),
            "tensor" => Some(PowerKind::Tensor),
            "C" => return Ok(Factor::Trivial),
            _ => None,
        };
        match kind {
            Some(kind) => {
                self.expect('(')?;
                let base = self.base()?;
                self.expect(',')?;
                let power = self.int()?;
                self.expect(')')?;
                Ok(Factor::Power { kind, base, power })
            }
            None => {
                self.pos = save;
                Ok(Factor::Plain(self.base()?))
            }
        }
    }

    fn base(&mut self) -> Result<BaseRef, ModuleError> {
        let (id, start) = self.ident()?;
        match id.as_str() {
            "ad" | "coad" => {
                self.expect('(')?;
                let mut b = self.name()?;
                self.expect(')')?;
                b.action = if id == "ad" {
                    Action::Adjoint
                } else {
                    Action::Coadjoint
                };
                Ok(b)
            }
            _ => {
                self.pos = start;
                self.name()
            }
        }
    }

    fn name(&mut self) -> Result<BaseRef, ModuleError> {
        let (id, start) = self.ident()?;
        let name = match id.as_str() {
            "g" => BaseName::G,
            "n" | "n_p" => BaseName::N,
            "u" | "u_p" => BaseName::U,
            "b" | "p" => BaseName::B,
            "h" => BaseName::H,
            _ => {
                self.pos = start;
                return Err(self.err(format!(
                    "unknown module `{id}`; expected one of g, n, u, b, h, p, n_p, u_p"
                )));
            }
        };
        let mut levi = None;
        if self.peek() == Some('[') {
            if !name.takes_parabolic() {
                return Err(self.err(format!("`{id}` does not take a parabolic qualifier")));
            }
            self.pos += 1;
            let mut v = Vec::new();
            if self.peek() != Some(']') {
                v.push(self.int()?);
                while self.peek() == Some(',') {
                    self.pos += 1;
                    v.push(self.int()?);
                }
            }
            self.expect(']')?;
            v.sort_unstable();
            v.dedup();
            levi = Some(v);
        }
        Ok(BaseRef {
            name,
            action: name.default_action(),
            levi,
        })
    }
}

impl ModuleSpec {
    pub fn parse(input: &str) -> Result<Self, ModuleError> {
        let mut p = Parser {
            input,
            chars: input.chars().collect(),
            pos: 0,
        };
        p.spec()
    }

    /// `∧^k u`, the exterior powers of the tangent bundle.
    pub fn wedge_tangent(k: usize) -> Self {
        ModuleSpec {
            summands: vec![vec![Factor::Power {
                kind: PowerKind::Wedge,
                base: BaseRef {
                    name: BaseName::U,
                    action: Action::Coadjoint,
                    levi: None,
                },
                power: k,
            }]],
        }
    }

    /// Fills in the default parabolic for every unqualified `n`, `u`, `b`.
    /// The Borel default leaves them unqualified.
    pub fn with_default_parabolic(&self, levi: &[usize]) -> ModuleSpec {
        let fix = |b: &BaseRef| {
            let mut b = b.clone();
            if b.levi.is_none() && b.name.takes_parabolic() && !levi.is_empty() {
                b.levi = Some(levi.to_vec());
            }
            b
        };
        ModuleSpec {
            summands: self
                .summands
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|f| match f {
                            Factor::Trivial => Factor::Trivial,
                            Factor::Plain(b) => Factor::Plain(fix(b)),
                            Factor::Power { kind, base, power } => Factor::Power {
                                kind: *kind,
                                base: fix(base),
                                power: *power,
                            },
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// A base module: a subquotient of `g` or its dual, with the `n`-action in
/// the Chevalley basis.
#[derive(Clone, Debug)]
pub struct BaseModule {
    pub name: BaseName,
    pub action: Action,
    pub levi: Vec<usize>,
    /// Basis vectors named by elements of `g` (for the coadjoint action,
    /// the basis vector dual to `f_β` is named `e_β` and so on).
    pub labels: Vec<GIndex>,
    pub names: Vec<String>,
    pub weights: Vec<Weight>,
    /// `table[k][j]` is `f_k · v_j`.
    table: Vec<Vec<SmallVec<[(u16, i32); 4]>>>,
}

impl BaseModule {
    pub fn build(
        rs: &RootSystem,
        consts: &ChevalleyConstants,
        name: BaseName,
        action: Action,
        levi: &[usize],
    ) -> Result<Self, ModuleError> {
        let n = rs.rank();
        for &i in levi {
            if i == 0 || i > n {
                return Err(ModuleError::BadParabolic { index: i, rank: n });
            }
        }
        let npos = rs.num_positive_roots();
        // β lies in the Levi iff its support is inside the Levi simple roots
        let in_levi: Vec<bool> = rs
            .positive_roots
            .iter()
            .map(|b| (0..n).all(|i| b[i] == 0 || levi.contains(&(i + 1))))
            .collect();
        let fs = |pred: &dyn Fn(usize) -> bool| -> Vec<GIndex> {
            (0..npos).filter(|&k| pred(k)).map(|k| consts.f_index(k)).collect()
        };
        let es = |pred: &dyn Fn(usize) -> bool| -> Vec<GIndex> {
            (0..npos).filter(|&k| pred(k)).map(|k| consts.e_index(k)).collect()
        };
        let hs: Vec<GIndex> = (0..n).map(|i| consts.h_index(i)).collect();
        let carrier = |nm: BaseName| -> Vec<GIndex> {
            let mut v = match nm {
                BaseName::G => (0..consts.dim_g()).collect(),
                BaseName::N => fs(&|k| !in_levi[k]),
                BaseName::U => es(&|k| !in_levi[k]),
                BaseName::B => {
                    let mut v = fs(&|_| true);
                    v.extend(hs.iter().copied());
                    v.extend(es(&|k| in_levi[k]));
                    v
                }
                BaseName::H => hs.clone(),
            };
            v.sort_unstable();
            v
        };
        let (space, labels): (Vec<GIndex>, Vec<GIndex>) = match action {
            Action::Adjoint => {
                let s = carrier(name);
                (s.clone(), s)
            }
            Action::Coadjoint => {
                // dual of the partner space, whose weights are the negatives
                let partner: Vec<GIndex> = match name {
                    BaseName::G => carrier(BaseName::G),
                    BaseName::N => carrier(BaseName::U),
                    BaseName::U => carrier(BaseName::N),
                    BaseName::H => carrier(BaseName::H),
                    BaseName::B => {
                        // g / n_p
                        let mut v = hs.clone();
                        v.extend(es(&|_| true));
                        v.extend(fs(&|k| in_levi[k]));
                        v.sort_unstable();
                        v
                    }
                };
                let dual = |x: GIndex| -> GIndex {
                    if x < npos {
                        consts.e_index(x)
                    } else if x < npos + n {
                        x
                    } else {
                        consts.f_index(x - npos - n)
                    }
                };
                let mut pairs: Vec<(GIndex, GIndex)> = partner.iter().map(|&x| (dual(x), x)).collect();
                pairs.sort_unstable();
                (
                    pairs.iter().map(|p| p.1).collect(),
                    pairs.iter().map(|p| p.0).collect(),
                )
            }
        };
        let pos_in_space: FxHashMap<GIndex, usize> =
            space.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let dim = space.len();
        let mut table = vec![vec![SmallVec::new(); dim]; npos];
        for (k, row) in table.iter_mut().enumerate() {
            let f = consts.f_index(k);
            match action {
                Action::Adjoint => {
                    for (j, &x) in space.iter().enumerate() {
                        for (y, c) in consts.bracket(f, x) {
                            if let Some(&p) = pos_in_space.get(&y) {
                                row[j].push((p as u16, c));
                            }
                        }
                    }
                }
                Action::Coadjoint => {
                    // f·φ_y = Σ_x -[f,x]_y φ_x
                    for (i, &x) in space.iter().enumerate() {
                        for (y, c) in consts.bracket(f, x) {
                            if let Some(&p) = pos_in_space.get(&y) {
                                row[p].push((i as u16, -c));
                            }
                        }
                    }
                }
            }
            for r in row.iter_mut() {
                r.sort_unstable();
            }
        }
        let weights = labels.iter().map(|&x| consts.g_weight(x)).collect();
        let names = labels.iter().map(|&x| consts.g_name(rs, x)).collect();
        Ok(BaseModule {
            name,
            action,
            levi: levi.to_vec(),
            labels,
            names,
            weights,
            table,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `f_k · v_j`.
    pub fn act(&self, k: usize, j: usize) -> &[(u16, i32)] {
        &self.table[k][j]
    }

    /// Position of the basis vector with a given name such as `e12`.
    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SlotKind {
    Sym,
    Wedge,
    Single,
}

#[derive(Clone, Debug)]
struct FactorLayout {
    base: usize,
    kind: SlotKind,
    offset: usize,
    len: usize,
}

/// A basis element: a summand index and the concatenated factor indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    pub summand: u16,
    pub indices: SmallVec<[u16; 8]>,
}

pub type ElemId = u32;

/// A sparse vector in a weight module.
pub type SparseVec = Vec<(ElemId, IBig)>;

/// Weight-graded basis of a module given by a spec, with the `U(n)` action.
#[derive(Debug)]
pub struct WeightModule {
    pub spec: ModuleSpec,
    pub bases: Vec<BaseModule>,
    layouts: Vec<Vec<FactorLayout>>,
    elems: Vec<BasisKey>,
    index: FxHashMap<BasisKey, ElemId>,
    elem_weights: Vec<Weight>,
    /// Basis elements of each weight, ascending.
    components: BTreeMap<Weight, Vec<ElemId>>,
    npos: usize,
    order: Vec<usize>,
}

/// Largest module that will be enumerated.
pub const MAX_MODULE_DIM: u128 = 20_000_000;

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

impl WeightModule {
    /// Builds the module; unqualified parabolic names use `default_levi`.
    pub fn build(
        rs: &RootSystem,
        consts: &ChevalleyConstants,
        spec: &ModuleSpec,
        default_levi: &[usize],
    ) -> Result<Self, ModuleError> {
        let spec = spec.with_default_parabolic(default_levi);
        let mut bases: Vec<BaseModule> = Vec::new();
        let mut base_ids: FxHashMap<(BaseName, Action, Vec<usize>), usize> = FxHashMap::default();
        let mut get_base = |b: &BaseRef, bases: &mut Vec<BaseModule>| -> Result<usize, ModuleError> {
            let levi = if b.name.takes_parabolic() {
                b.levi.clone().unwrap_or_default()
            } else {
                Vec::new()
            };
            let key = (b.name, b.action, levi.clone());
            if let Some(&i) = base_ids.get(&key) {
                return Ok(i);
            }
            let m = BaseModule::build(rs, consts, b.name, b.action, &levi)?;
            bases.push(m);
            base_ids.insert(key, bases.len() - 1);
            Ok(bases.len() - 1)
        };
        let mut layouts = Vec::new();
        let mut total: u128 = 0;
        for summand in &spec.summands {
            let mut lay = Vec::new();
            let mut offset = 0;
            let mut dim: u128 = 1;
            for f in summand {
                match f {
                    Factor::Trivial => {}
                    Factor::Plain(b) => {
                        let id = get_base(b, &mut bases)?;
                        dim *= bases[id].dim() as u128;
                        lay.push(FactorLayout {
                            base: id,
                            kind: SlotKind::Single,
                            offset,
                            len: 1,
                        });
                        offset += 1;
                    }
                    Factor::Power { kind, base, power } => {
                        let id = get_base(base, &mut bases)?;
                        let d = bases[id].dim() as u128;
                        let k = *power;
                        match kind {
                            PowerKind::Sym => {
                                dim *= binom(d + k as u128 - 1, k as u128);
                                if k > 0 {
                                    lay.push(FactorLayout {
                                        base: id,
                                        kind: SlotKind::Sym,
                                        offset,
                                        len: k,
                                    });
                                }
                                offset += k;
                            }
                            PowerKind::Wedge => {
                                dim *= binom(d, k as u128);
                                if k > 0 {
                                    lay.push(FactorLayout {
                                        base: id,
                                        kind: SlotKind::Wedge,
                                        offset,
                                        len: k,
                                    });
                                }
                                offset += k;
                            }
                            PowerKind::Tensor => {
                                dim *= d.pow(k as u32);
                                for _ in 0..k {
                                    lay.push(FactorLayout {
                                        base: id,
                                        kind: SlotKind::Single,
                                        offset,
                                        len: 1,
                                    });
                                    offset += 1;
                                }
                            }
                        }
                    }
                }
            }
            total += dim;
            layouts.push(lay);
        }
        if total > MAX_MODULE_DIM {
            return Err(ModuleError::TooLarge(total));
        }

        let mut elems = Vec::new();
        for (s, lay) in layouts.iter().enumerate() {
            let mut cur: SmallVec<[u16; 8]> = SmallVec::new();
            enumerate_summand(&bases, lay, 0, &mut cur, &mut |idx| {
                elems.push(BasisKey {
                    summand: s as u16,
                    indices: idx.clone(),
                })
            });
        }
        debug_assert_eq!(elems.len() as u128, total);
        let mut m = WeightModule {
            spec,
            bases,
            layouts,
            elems: Vec::new(),
            index: FxHashMap::default(),
            elem_weights: Vec::new(),
            components: BTreeMap::new(),
            npos: rs.num_positive_roots(),
            order: pbw_order(rs),
        };
        let weights: Vec<Weight> = elems.iter().map(|e| m.key_weight(rs, e)).collect();
        // ids ordered by weight, then key, so each component is a contiguous run
        let mut ids: Vec<usize> = (0..elems.len()).collect();
        ids.sort_by(|&a, &b| weights[a].cmp(&weights[b]).then_with(|| elems[a].cmp(&elems[b])));
        for (new, &old) in ids.iter().enumerate() {
            m.index.insert(elems[old].clone(), new as ElemId);
            m.components
                .entry(weights[old].clone())
                .or_default()
                .push(new as ElemId);
        }
        m.elem_weights = ids.iter().map(|&i| weights[i].clone()).collect();
        m.elems = ids.into_iter().map(|i| elems[i].clone()).collect();
        Ok(m)
    }

    fn key_weight(&self, rs: &RootSystem, key: &BasisKey) -> Weight {
        let mut w = rs.zero();
        for f in &self.layouts[key.summand as usize] {
            for p in f.offset..f.offset + f.len {
                w += &self.bases[f.base].weights[key.indices[p] as usize];
            }
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn num_generators(&self) -> usize {
        self.npos
    }

    /// Basis of the `μ`-weight space (empty if `μ` is not a weight).
    pub fn component(&self, mu: &Weight) -> &[ElemId] {
        self.components.get(mu).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// All weights with their multiplicities.
    pub fn weights(&self) -> impl Iterator<Item = (&Weight, usize)> {
        self.components.iter().map(|(w, v)| (w, v.len()))
    }

    pub fn key(&self, id: ElemId) -> &BasisKey {
        &self.elems[id as usize]
    }

    pub fn weight_of(&self, id: ElemId) -> &Weight {
        &self.elem_weights[id as usize]
    }

    pub fn id_of(&self, key: &BasisKey) -> Option<ElemId> {
        self.index.get(key).copied()
    }

    /// Looks up a basis element of a single-summand module by base vector
    /// names per slot, e.g. `["f2", "f12"]`. Returns the canonical element
    /// and the sign picked up by sorting.
    pub fn element_by_names(&self, summand: usize, names: &[&str]) -> Option<(ElemId, i64)> {
        let lay = &self.layouts[summand];
        let mut idx: SmallVec<[u16; 8]> = SmallVec::new();
        let mut p = 0;
        for f in lay {
            for _ in 0..f.len {
                idx.push(self.bases[f.base].index_of_name(names.get(p)?)? as u16);
                p += 1;
            }
        }
        let sign = canonicalize(lay, &mut idx)?;
        let id = self.id_of(&BasisKey {
            summand: summand as u16,
            indices: idx,
        })?;
        Some((id, sign))
    }

    /// Renders a basis element as e.g. `f2⊙f12` or `e1∧e23`.
    pub fn render_elem(&self, id: ElemId) -> String {
        let key = &self.elems[id as usize];
        let lay = &self.layouts[key.summand as usize];
        if lay.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = lay
            .iter()
            .map(|f| {
                let names: Vec<&str> = (f.offset..f.offset + f.len)
                    .map(|p| self.bases[f.base].names[key.indices[p] as usize].as_str())
                    .collect();
                match f.kind {
                    SlotKind::Sym => names.join("⊙"),
                    SlotKind::Wedge => names.join("∧"),
                    SlotKind::Single => names[0].to_string(),
                }
            })
            .collect();
        parts.join("⊗")
    }

    pub fn render_vec(&self, v: &[(ElemId, IBig)]) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let mut v: Vec<&(ElemId, IBig)> = v.iter().collect();
        v.sort_by_key(|e| e.0);
        let mut out = String::new();
        for (i, (id, c)) in v.into_iter().enumerate() {
            let neg = *c < IBig::ZERO;
            let mag = c.unsigned_abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mag != dashu_int::UBig::ONE {
                out.push_str(&format!("{mag}·"));
            }
            out.push_str(&self.render_elem(*id));
        }
        out
    }

    /// `f_k · b` by the Leibniz rule, computed without caching.
    fn act_generator_raw(&self, k: usize, id: ElemId) -> Vec<(ElemId, i64)> {
        let key = &self.elems[id as usize];
        let lay = &self.layouts[key.summand as usize];
        let mut acc: FxHashMap<ElemId, i64> = FxHashMap::default();
        for f in lay {
            let base = &self.bases[f.base];
            for p in f.offset..f.offset + f.len {
                for &(j, c) in base.act(k, key.indices[p] as usize) {
                    let mut idx = key.indices.clone();
                    idx[p] = j;
                    let Some(sign) = canonicalize_factor(f, &mut idx) else {
                        continue;
                    };
                    let new = BasisKey {
                        summand: key.summand,
                        indices: idx,
                    };
                    let nid = self.index[&new];
                    *acc.entry(nid).or_insert(0) += sign * c as i64;
                }
            }
        }
        let mut out: Vec<(ElemId, i64)> = acc.into_iter().filter(|e| e.1 != 0).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// `f_k · b`, memoised in `cache`.
    pub fn act_generator(&self, cache: &mut ActionCache, k: usize, id: ElemId) -> Arc<[(ElemId, i64)]> {
        if let Some(v) = cache.gen.get(&(k as u16, id)) {
            return v.clone();
        }
        let v: Arc<[(ElemId, i64)]> = self.act_generator_raw(k, id).into();
        cache.gen.insert((k as u16, id), v.clone());
        v
    }

    fn apply_generator(&self, cache: &mut ActionCache, k: usize, v: &[(ElemId, IBig)]) -> SparseVec {
        let mut acc: FxHashMap<ElemId, IBig> = FxHashMap::default();
        for (id, c) in v {
            for &(j, d) in self.act_generator(cache, k, *id).iter() {
                *acc.entry(j).or_default() += c * IBig::from(d);
            }
        }
        let mut out: SparseVec = acc.into_iter().filter(|e| !e.1.is_zero()).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// `x · v` for `x ∈ U(n)`. The PBW factors of each monomial act from
    /// right to left; monomials sharing a right-hand tail share the work.
    pub fn act(&self, cache: &mut ActionCache, x: &PbwElement, v: &[(ElemId, IBig)]) -> SparseVec {
        let plan = ActionPlan::new(x, &self.order);
        self.act_plan(cache, &plan, v)
    }

    /// As `act` with a prepared plan.
    pub fn act_plan(&self, cache: &mut ActionCache, plan: &ActionPlan, v: &[(ElemId, IBig)]) -> SparseVec {
        let mut acc: FxHashMap<ElemId, IBig> = FxHashMap::default();
        // depth-first over the trie of application sequences
        let mut stack: Vec<(usize, SparseVec)> = vec![(0, v.to_vec())];
        while let Some((node, vec)) = stack.pop() {
            let nd = &plan.nodes[node];
            if let Some(c) = &nd.coeff {
                for (id, a) in &vec {
                    *acc.entry(*id).or_default() += a * c;
                }
            }
            if vec.is_empty() {
                continue;
            }
            for &(k, child) in &nd.children {
                let next = self.apply_generator(cache, k, &vec);
                stack.push((child, next));
            }
        }
        let mut out: SparseVec = acc.into_iter().filter(|e| !e.1.is_zero()).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// Applies `x` to every row of a basis matrix, merging equal rows.
    pub fn act_basis_matrix(&self, cache: &mut ActionCache, x: &PbwElement, b: &BasisMatrix) -> BasisMatrix {
        let plan = ActionPlan::new(x, &self.order);
        let mut rows: BTreeMap<(usize, ElemId), IBig> = BTreeMap::new();
        for r in &b.rows {
            let img = self.act_plan(cache, &plan, &[(r.elem, r.coeff.clone())]);
            for (id, c) in img {
                *rows.entry((r.provenance, id)).or_default() += c;
            }
        }
        BasisMatrix {
            rows: rows
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((provenance, elem), coeff)| BasisRow {
                    elem,
                    provenance,
                    coeff,
                })
                .collect(),
        }
    }

    /// The identity basis matrix of a weight component.
    pub fn basis_matrix(&self, mu: &Weight) -> BasisMatrix {
        BasisMatrix {
            rows: self
                .component(mu)
                .iter()
                .enumerate()
                .map(|(i, &elem)| BasisRow {
                    elem,
                    provenance: i,
                    coeff: IBig::ONE,
                })
                .collect(),
        }
    }
}

/// Sorts the slots of every factor into canonical order. Returns the sign
/// of the permutation on wedge factors, or `None` if a wedge has a repeat.
fn canonicalize(lay: &[FactorLayout], idx: &mut SmallVec<[u16; 8]>) -> Option<i64> {
    let mut sign = 1;
    for f in lay {
        sign *= canonicalize_factor(f, idx)?;
    }
    Some(sign)
}

fn canonicalize_factor(f: &FactorLayout, idx: &mut SmallVec<[u16; 8]>) -> Option<i64> {
    let slots = &mut idx[f.offset..f.offset + f.len];
    match f.kind {
        SlotKind::Single => Some(1),
        SlotKind::Sym => {
            slots.sort_unstable();
            Some(1)
        }
        SlotKind::Wedge => {
            // insertion sort counting transpositions
            let mut sign = 1;
            for i in 1..slots.len() {
                let mut j = i;
                while j > 0 && slots[j - 1] > slots[j] {
                    slots.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            if slots.windows(2).any(|w| w[0] == w[1]) {
                None
            } else {
                Some(sign)
            }
        }
    }
}

fn enumerate_summand(
    bases: &[BaseModule],
    lay: &[FactorLayout],
    f: usize,
    cur: &mut SmallVec<[u16; 8]>,
    emit: &mut dyn FnMut(&SmallVec<[u16; 8]>),
) {
    if f == lay.len() {
        emit(cur);
        return;
    }
    let fl = &lay[f];
    let d = bases[fl.base].dim() as u16;
    fn slots(
        bases: &[BaseModule],
        lay: &[FactorLayout],
        f: usize,
        left: usize,
        min: u16,
        d: u16,
        strict: bool,
        cur: &mut SmallVec<[u16; 8]>,
        emit: &mut dyn FnMut(&SmallVec<[u16; 8]>),
    ) {
        if left == 0 {
            enumerate_summand(bases, lay, f + 1, cur, emit);
            return;
        }
        for j in min..d {
            cur.push(j);
            let next = if strict { j + 1 } else { j };
            slots(bases, lay, f, left - 1, next, d, strict, cur, emit);
            cur.pop();
        }
    }
    match fl.kind {
        SlotKind::Single => slots(bases, lay, f, 1, 0, d, false, cur, emit),
        SlotKind::Sym => slots(bases, lay, f, fl.len, 0, d, false, cur, emit),
        SlotKind::Wedge => slots(bases, lay, f, fl.len, 0, d, true, cur, emit),
    }
}

/// Memo of single-generator actions on basis elements.
#[derive(Default, Debug)]
pub struct ActionCache {
    gen: FxHashMap<(u16, ElemId), Arc<[(ElemId, i64)]>>,
}

impl ActionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gen.is_empty()
    }
}

#[derive(Debug, Default)]
struct PlanNode {
    /// Coefficient of the monomial ending here, if any.
    coeff: Option<IBig>,
    children: Vec<(usize, usize)>,
}

/// A trie of the generator sequences of an element of `U(n)`, in the order
/// in which they act (rightmost factor first).
#[derive(Debug)]
pub struct ActionPlan {
    nodes: Vec<PlanNode>,
}

impl ActionPlan {
    pub fn new(x: &PbwElement, order: &[usize]) -> Self {
        let mut nodes = vec![PlanNode::default()];
        let mut terms: Vec<(Vec<usize>, &IBig)> = x
            .iter()
            .map(|(m, c)| {
                let mut f = m.factors(order);
                f.reverse();
                (f, c)
            })
            .collect();
        terms.sort();
        for (seq, c) in terms {
            let mut node = 0;
            for k in seq {
                node = match nodes[node].children.iter().find(|e| e.0 == k) {
                    Some(&(_, child)) => child,
                    None => {
                        nodes.push(PlanNode::default());
                        let child = nodes.len() - 1;
                        nodes[node].children.push((k, child));
                        child
                    }
                };
            }
            nodes[node].coeff = Some(c.clone());
        }
        ActionPlan { nodes }
    }
}

/// Rows `(basis element | provenance | coefficient)`: row `i` of the input
/// to an action becomes all rows with provenance `i` in the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMatrix {
    pub rows: Vec<BasisRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisRow {
    pub elem: ElemId,
    pub provenance: usize,
    pub coeff: IBig,
}
