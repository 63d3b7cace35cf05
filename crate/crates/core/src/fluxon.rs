//! Flux pairs labeled by elements of a finite nonabelian group: pull-through and
//! exchange act by conjugation, flux and charge measurements project, and in A5
//! a pull-through by a fixed pair implements a NOT on two conjugate three-cycles.
//!
//! Permutations compose left to right: `a·b` applies `a` first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};

/// A permutation of `0..n`, stored as the image of each point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm(inv)
    }

    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        let mut transpositions = 0;
        for s in 0..self.0.len() {
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            transpositions += len.max(1) - 1;
        }
        transpositions % 2 == 0
    }

    /// Parse 1-based cycle notation such as `(14)(35)` or `()`. Multi-digit points
    /// are separated by spaces or commas: `(1 10 3)`.
    pub fn parse_cycles(s: &str, degree: usize) -> Result<Perm> {
        let bad = || Error::Parse(format!("bad cycle notation {s:?}"));
        let mut p = Perm::identity(degree);
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body_end = rest.find(')').ok_or_else(bad)?;
            if !rest.starts_with('(') {
                return Err(bad());
            }
            let body = &rest[1..body_end];
            let pts: Vec<usize> = if body.contains([' ', ',']) {
                body.split([' ', ',']).filter(|t| !t.is_empty()).map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?
            } else {
                body.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_>>()?
            };
            if pts.iter().any(|&x| x == 0 || x > degree) {
                return Err(bad());
            }
            // a cycle applied after the ones already read
            let mut c = Perm::identity(degree);
            for w in 0..pts.len() {
                c.0[pts[w] - 1] = (pts[(w + 1) % pts.len()] - 1) as u8;
            }
            p = p.then(&c);
            rest = rest[body_end + 1..].trim_start();
        }
        if p.0.iter().copied().collect::<std::collections::BTreeSet<_>>().len() != degree {
            return Err(bad());
        }
        Ok(p)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len();
        let sep = if n > 9 { " " } else { "" };
        let mut seen = vec![false; n];
        let mut any = false;
        for s in 0..n {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            any = true;
            let mut cyc = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                cyc.push((i + 1).to_string());
                i = self.0[i] as usize;
            }
            write!(f, "({})", cyc.join(sep))?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    /// `table[a][b] = a·b`.
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    labels: Vec<String>,
    perms: Option<Vec<Perm>>,
}

impl FiniteGroup {
    /// Validate a table: closure, a two-sided identity, inverses, and associativity
    /// (exhaustive up to order 60, on a fixed sample of triples beyond).
    pub fn from_table(table: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::InvalidCode(format!("not a group: {m}")));
        if n == 0 || labels.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("table is not square over its elements");
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)) else {
            return bad("no identity");
        };
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverse[a] = b,
                None => return bad("missing inverse"),
            }
        }
        let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n <= 60 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return bad("not associative");
                        }
                    }
                }
            }
        } else {
            for k in 0..100_000usize {
                let (a, b, c) = (k * 7919 % n, k * 104_729 % n, k * 1_299_709 % n);
                if !assoc(a, b, c) {
                    return bad("not associative");
                }
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for u in 0..n {
            if class_of[u] != usize::MAX {
                continue;
            }
            let mut cls: Vec<usize> = (0..n).map(|v| table[table[inverse[v]][u]][v]).collect();
            cls.sort_unstable();
            cls.dedup();
            for &w in &cls {
                class_of[w] = classes.len();
            }
            classes.push(cls);
        }
        Ok(FiniteGroup { table, inverse, identity, classes, class_of, labels, perms: None })
    }

    /// Closure of `generators` under composition.
    pub fn from_generators(degree: usize, generators: &[Perm]) -> Result<Self> {
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::Dimension { expected: degree, found: generators.iter().map(Perm::degree).max().unwrap_or(0) });
        }
        let id = Perm::identity(degree);
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Perm, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in generators {
                let p = elems[i].then(g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let table = elems.iter().map(|a| elems.iter().map(|b| index[&a.then(b)]).collect()).collect();
        let labels = elems.iter().map(|p| p.to_string()).collect();
        let mut g = Self::from_table(table, labels)?;
        g.perms = Some(elems);
        Ok(g)
    }

    /// The alternating group on 5 symbols, generated by `(123)` and `(12345)`.
    pub fn a5() -> Self {
        let gens = [Perm::parse_cycles("(123)", 5).expect("valid"), Perm::parse_cycles("(12345)", 5).expect("valid")];
        Self::from_generators(5, &gens).expect("A5 is a group")
    }

    /// Load a multiplication table from CSV: a header row of element labels, then
    /// one row per element `a` giving the labels of `a·b` for each header `b`.
    pub fn from_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
        let err = |e: csv::Error| Error::Parse(e.to_string());
        let labels: Vec<String> = rd.headers().map_err(err)?.iter().map(str::to_string).collect();
        let pos: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut table = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(err)?;
            let row = rec
                .iter()
                .map(|x| pos.get(x).copied().ok_or_else(|| Error::Parse(format!("unknown element {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        Self::from_table(table, labels.clone())
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `v⁻¹ u v`.
    pub fn conj(&self, u: usize, v: usize) -> usize {
        self.mul(self.mul(self.inv(v), u), v)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    /// Underlying permutations, for groups built from generators.
    pub fn perm(&self, a: usize) -> Option<&Perm> {
        self.perms.as_ref().map(|p| &p[a])
    }

    /// Look an element up by label, or by cycle notation in a permutation group.
    pub fn element(&self, s: &str) -> Result<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == s.trim()) {
            return Ok(i);
        }
        if let Some(perms) = &self.perms {
            let p = Perm::parse_cycles(s, perms[0].degree())?;
            if let Some(i) = perms.iter().position(|q| *q == p) {
                return Ok(i);
            }
        }
        Err(Error::Parse(format!("{s:?} is not an element of the group")))
    }
}

/// `m` flux pairs; the pair `|u, u⁻¹⟩` is stored by `u`.
#[derive(Clone, Debug)]
pub struct FluxRegister {
    pub group: Arc<FiniteGroup>,
    pairs: usize,
    amps: BTreeMap<Vec<usize>, C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChargeSign {
    Plus,
    Minus,
}

impl FluxRegister {
    pub fn basis(group: Arc<FiniteGroup>, fluxes: &[usize]) -> Result<Self> {
        if let Some(&u) = fluxes.iter().find(|&&u| u >= group.order()) {
            return Err(Error::Domain(format!("element {u} out of range")));
        }
        Ok(FluxRegister { group, pairs: fluxes.len(), amps: BTreeMap::from([(fluxes.to_vec(), C64::new(1.0, 0.0))]) })
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(group: Arc<FiniteGroup>, pairs: usize, amps: impl IntoIterator<Item = (Vec<usize>, C64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, a) in amps {
            if k.len() != pairs || k.iter().any(|&u| u >= group.order()) {
                return Err(Error::Domain(format!("bad basis tuple {k:?}")));
            }
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) += a;
        }
        let mut reg = FluxRegister { group, pairs, amps: map };
        reg.prune_and_normalize()?;
        Ok(reg)
    }

    /// Uniform superposition over a conjugacy class: one pair with no detectable charge.
    pub fn charge_zero_pair(group: Arc<FiniteGroup>, class: usize) -> Result<Self> {
        let members = group.classes().get(class).ok_or_else(|| Error::Domain(format!("no class {class}")))?.clone();
        let a = C64::new(1.0 / (members.len() as f64).sqrt(), 0.0);
        Ok(FluxRegister { group, pairs: 1, amps: members.into_iter().map(|u| (vec![u], a)).collect() })
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn amplitude(&self, fluxes: &[usize]) -> C64 {
        self.amps.get(fluxes).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<usize>, &C64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &FluxRegister) -> f64 {
        self.amps.iter().map(|(k, a)| a.conj() * other.amplitude(k)).sum::<C64>().norm()
    }

    fn prune_and_normalize(&mut self) -> Result<()> {
        self.amps.retain(|_, a| a.norm_sqr() > 1e-30);
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::Domain("zero state".into()));
        }
        for a in self.amps.values_mut() {
            *a /= n;
        }
        Ok(())
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.pairs {
            return Err(Error::Domain(format!("pair index {i} out of range for {} pairs", self.pairs)));
        }
        Ok(())
    }

    fn relabel(&mut self, f: impl Fn(&[usize]) -> Vec<usize>) {
        let old = std::mem::take(&mut self.amps);
        for (k, a) in old {
            *self.amps.entry(f(&k)).or_insert(C64::new(0.0, 0.0)) += a;
        }
    }

    /// Carry pair `inner` through pair `outer`: the inner flux is conjugated by the
    /// outer one, `u₁ ↦ u₂⁻¹ u₁ u₂`.
    pub fn pull_through(&mut self, inner: usize, outer: usize) -> Result<()> {
        self.check(inner)?;
        self.check(outer)?;
        if inner == outer {
            return Err(Error::Domain("a pair cannot be pulled through itself".into()));
        }
        let g = self.group.clone();
        self.relabel(|k| {
            let mut k = k.to_vec();
            k[inner] = g.conj(k[inner], k[outer]);
            k
        });
        Ok(())
    }

    /// Exchange neighbors: `|u₁⟩|u₂⟩ ↦ |u₂⟩|u₂⁻¹ u₁ u₂⟩`.
    pub fn exchange(&mut self, left: usize, right: usize) -> Result<()> {
        self.check(left)?;
        self.check(right)?;
        if left == right {
            return Err(Error::Domain("exchange needs two pairs".into()));
        }
        let g = self.group.clone();
        self.relabel(|k| {
            let mut out = k.to_vec();
            out[left] = k[right];
            out[right] = g.conj(k[left], k[right]);
            out
        });
        Ok(())
    }

    /// Inverse of [`exchange`](Self::exchange): `|a⟩|b⟩ ↦ |a b a⁻¹⟩|a⟩`.
    pub fn exchange_inverse(&mut self, left: usize, right: usize) -> Result<()> {
        self.check(left)?;
        self.check(right)?;
        if left == right {
            return Err(Error::Domain("exchange needs two pairs".into()));
        }
        let g = self.group.clone();
        self.relabel(|k| {
            let mut out = k.to_vec();
            out[left] = g.conj(k[right], g.inv(k[left]));
            out[right] = k[left];
            out
        });
        Ok(())
    }

    /// Marginal distribution of the flux on pair `i`.
    pub fn flux_distribution(&self, i: usize) -> Result<BTreeMap<usize, f64>> {
        self.check(i)?;
        let mut d = BTreeMap::new();
        for (k, a) in &self.amps {
            *d.entry(k[i]).or_insert(0.0) += a.norm_sqr();
        }
        Ok(d)
    }

    /// Projective flux measurement of pair `i`.
    pub fn measure_flux<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> Result<usize> {
        let dist = self.flux_distribution(i)?;
        let total: f64 = dist.values().sum();
        let mut r = rng.gen::<f64>() * total;
        let mut outcome = *dist.keys().next_back().expect("state is nonzero");
        for (&u, &p) in &dist {
            if r < p {
                outcome = u;
                break;
            }
            r -= p;
        }
        self.amps.retain(|k, _| k[i] == outcome);
        self.prune_and_normalize()?;
        Ok(outcome)
    }

    /// Probability of `+` when pair `i` is projected onto
    /// `|±⟩ = (|u₀⟩ ± |u₁⟩)/√2` with `u₁ = v⁻¹ u₀ v`.
    pub fn charge_plus_probability(&self, i: usize, u0: usize, v: usize) -> Result<f64> {
        let (plus, _) = self.charge_split(i, u0, v)?;
        Ok(plus.values().map(|a| a.norm_sqr()).sum())
    }

    fn charge_split(&self, i: usize, u0: usize, v: usize) -> Result<(BTreeMap<Vec<usize>, C64>, BTreeMap<Vec<usize>, C64>)> {
        self.check(i)?;
        let u1 = self.group.conj(u0, v);
        if u1 == u0 {
            return Err(Error::Unsupported(format!("{} commutes with {}: no two-state subspace", self.group.label(v), self.group.label(u0))));
        }
        if let Some((k, _)) = self.amps.iter().find(|(k, _)| k[i] != u0 && k[i] != u1) {
            return Err(Error::Unsupported(format!(
                "pair {i} has flux {} outside {{{}, {}}}",
                self.group.label(k[i]),
                self.group.label(u0),
                self.group.label(u1)
            )));
        }
        let (mut plus, mut minus) = (BTreeMap::new(), BTreeMap::new());
        let zero = C64::new(0.0, 0.0);
        let mut rests: Vec<Vec<usize>> = self.amps.keys().map(|k| k.clone()).collect();
        for r in rests.iter_mut() {
            r[i] = u0;
        }
        rests.sort_unstable();
        rests.dedup();
        for k0 in rests {
            let mut k1 = k0.clone();
            k1[i] = u1;
            let (a, b) = (self.amplitude(&k0), self.amplitude(&k1));
            let (p, m) = ((a + b) / 2.0, (a - b) / 2.0);
            if p != zero {
                plus.insert(k0.clone(), p);
                plus.insert(k1.clone(), p);
            }
            if m != zero {
                minus.insert(k0, m);
                minus.insert(k1, -m);
            }
        }
        Ok((plus, minus))
    }

    /// Ideal interferometric charge measurement in the two-state subspace spanned
    /// by `u₀` and `u₁ = v⁻¹ u₀ v`: `+` is the trivial Aharonov-Bohm phase.
    pub fn measure_charge_pm<R: Rng + ?Sized>(&mut self, i: usize, u0: usize, v: usize, rng: &mut R) -> Result<ChargeSign> {
        let (plus, minus) = self.charge_split(i, u0, v)?;
        let p: f64 = plus.values().map(|a| a.norm_sqr()).sum();
        let (sign, amps) = if rng.gen::<f64>() < p { (ChargeSign::Plus, plus) } else { (ChargeSign::Minus, minus) };
        self.amps = amps;
        self.prune_and_normalize()?;
        Ok(sign)
    }

    /// Every flux in the support, by conjugacy class, per pair.
    pub fn class_profile(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.pairs];
        for k in self.amps.keys() {
            for (i, &u) in k.iter().enumerate() {
                out[i].push(self.group.class_of(u));
            }
        }
        for v in out.iter_mut() {
            v.sort_unstable();
            v.dedup();
        }
        out
    }
}

impl fmt::Display for FluxRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in &self.amps {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let labels: Vec<&str> = k.iter().map(|&u| self.group.label(u)).collect();
            write!(f, "({:.4}{:+.4}i)|{}⟩", a.re, a.im, labels.join(","))?;
        }
        Ok(())
    }
}

/// Outcome of the A5 NOT demonstration.
#[derive(Clone, Debug)]
pub struct NotDemo {
    pub u0: String,
    pub u1: String,
    pub v: String,
    /// `|u₀⟩ → |u₁⟩` and `|u₁⟩ → |u₀⟩`.
    pub basis_swapped: bool,
    /// `α|u₀⟩ + β|u₁⟩ → α|u₁⟩ + β|u₀⟩`.
    pub superposition_flipped: bool,
    /// Two applications give the identity.
    pub involution: bool,
    pub trace: Vec<String>,
}

impl NotDemo {
    pub fn passed(&self) -> bool {
        self.basis_swapped && self.superposition_flipped && self.involution
    }
}

/// Pull a computational pair through a `v = (14)(35)` pair in A5, with computational
/// fluxes `u₀ = (125)` and `u₁ = (234)`.
pub fn a5_not_demo() -> Result<NotDemo> {
    let g = Arc::new(FiniteGroup::a5());
    let (u0, u1, v) = (g.element("(125)")?, g.element("(234)")?, g.element("(14)(35)")?);
    let mut trace = Vec::new();
    let not = |reg: &mut FluxRegister| reg.pull_through(0, 1);
    let mut swapped = true;
    for (from, to) in [(u0, u1), (u1, u0)] {
        let mut r = FluxRegister::basis(g.clone(), &[from, v])?;
        let before = r.to_string();
        not(&mut r)?;
        trace.push(format!("{before} -> {r}"));
        swapped &= (r.amplitude(&[to, v]) - C64::new(1.0, 0.0)).norm() < 1e-12;
    }
    let (alpha, beta) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
    let mut r = FluxRegister::from_amplitudes(g.clone(), 2, [(vec![u0, v], alpha), (vec![u1, v], beta)])?;
    let before = r.to_string();
    not(&mut r)?;
    trace.push(format!("{before} -> {r}"));
    let expect = FluxRegister::from_amplitudes(g.clone(), 2, [(vec![u1, v], alpha), (vec![u0, v], beta)])?;
    let flipped = (r.overlap(&expect) - 1.0).abs() < 1e-12 && (r.amplitude(&[u1, v]) - alpha).norm() < 1e-12;
    not(&mut r)?;
    trace.push(format!("again -> {r}"));
    let start = FluxRegister::from_amplitudes(g.clone(), 2, [(vec![u0, v], alpha), (vec![u1, v], beta)])?;
    let involution = (r.amplitude(&[u0, v]) - start.amplitude(&[u0, v])).norm() < 1e-12
        && (r.amplitude(&[u1, v]) - start.amplitude(&[u1, v])).norm() < 1e-12;
    Ok(NotDemo {
        u0: g.label(u0).to_string(),
        u1: g.label(u1).to_string(),
        v: g.label(v).to_string(),
        basis_swapped: swapped,
        superposition_flipped: flipped,
        involution,
        trace,
    })
}
