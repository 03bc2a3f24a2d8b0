//! Todd-Coxeter coset enumeration, quotient-triviality certificates, and
//! Reidemeister-Schreier subgroup presentations.
//!
//! The enumerator is HLT style: relator tracing with immediate deductions,
//! no lookahead, first-undefined definition order. The budget counts every
//! coset ever defined, so exceeding it is an inconclusive outcome rather
//! than a statement about the group.

use std::collections::VecDeque;

use serde_json::{json, Value};

use crate::presentations::{Letter, Presentation, PresentationError, Word};
use crate::zlinalg::betti1;

/// A closed coset table: a transitive permutation action of the generators
/// in which every relator traces to the identity and the enumerated
/// subgroup stabilizes coset `0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CosetTable {
    generator_names: Vec<String>,
    num_cosets: usize,
    /// `action[g][c]` is the image of coset `c` under generator `g`.
    action: Vec<Vec<usize>>,
    /// `inverse_action[g][c]` is the preimage of `c` under generator `g`.
    inverse_action: Vec<Vec<usize>>,
}

/// Outcome of an enumeration run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Enumeration {
    Closed {
        table: CosetTable,
        cosets_defined: usize,
    },
    /// The budget of defined cosets was exhausted before the table closed.
    ExceededBudget { cosets_defined: usize },
}

impl Enumeration {
    pub fn closed(&self) -> Option<&CosetTable> {
        match self {
            Enumeration::Closed { table, .. } => Some(table),
            Enumeration::ExceededBudget { .. } => None,
        }
    }

    pub fn cosets_defined(&self) -> usize {
        match self {
            Enumeration::Closed { cosets_defined, .. } => *cosets_defined,
            Enumeration::ExceededBudget { cosets_defined } => *cosets_defined,
        }
    }
}

/// Result of a quotient-triviality certificate check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TrivialityCheck {
    /// The quotient by the normal closure of the killed words is provably
    /// trivial; this certifies `nrk(G) <= |killed|`.
    CertifiedTrivial { cosets_defined: usize },
    Inconclusive { cosets_defined: usize },
}

impl TrivialityCheck {
    pub fn is_certified(&self) -> bool {
        matches!(self, TrivialityCheck::CertifiedTrivial { .. })
    }
}

impl CosetTable {
    pub fn num_cosets(&self) -> usize {
        self.num_cosets
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Builds a table directly from a transitive permutation action.
    /// The enumerated subgroup is the stabilizer of point `0`.
    pub fn from_action(generator_names: Vec<String>, action: Vec<Vec<usize>>) -> Self {
        assert_eq!(generator_names.len(), action.len());
        let num_cosets = action.first().map_or(1, |p| p.len());
        let inverse_action = action.iter().map(|p| invert_permutation(p)).collect();
        CosetTable {
            generator_names,
            num_cosets,
            action,
            inverse_action,
        }
    }

    /// Image of a coset under a word.
    pub fn trace(&self, start: usize, w: &Word) -> usize {
        let mut c = start;
        for l in w.letters() {
            c = if l.inverse {
                self.inverse_action[l.gen][c]
            } else {
                self.action[l.gen][c]
            };
        }
        c
    }

    /// Checks the closed-table invariants against a presentation.
    pub fn validate(&self, p: &Presentation, subgroup_gens: &[Word]) -> bool {
        let m = self.num_cosets;
        for g in 0..self.action.len() {
            let mut seen = vec![false; m];
            for c in 0..m {
                let img = self.action[g][c];
                if img >= m || seen[img] {
                    return false;
                }
                seen[img] = true;
                if self.inverse_action[g][img] != c {
                    return false;
                }
            }
        }
        for r in p.relators() {
            for c in 0..m {
                if self.trace(c, r) != c {
                    return false;
                }
            }
        }
        subgroup_gens.iter().all(|w| self.trace(0, w) == 0)
    }

    /// JSON form `{"index": m, "action": {gen: [images 1..m]}}`, 1-based.
    pub fn to_json(&self) -> Value {
        let mut action = serde_json::Map::new();
        for (g, name) in self.generator_names.iter().enumerate() {
            let images: Vec<Value> = self.action[g].iter().map(|&c| json!(c + 1)).collect();
            action.insert(name.clone(), Value::Array(images));
        }
        json!({ "index": self.num_cosets, "action": Value::Object(action) })
    }
}

fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &img) in p.iter().enumerate() {
        inv[img] = i;
    }
    inv
}

const UNDEFINED: usize = usize::MAX;

struct Enumerator {
    ncols: usize,
    /// Flat table, `ncols` entries per coset; column `2g` is generator `g`,
    /// column `2g+1` its inverse.
    table: Vec<usize>,
    /// Union-find over cosets; the smaller representative survives a merge.
    parent: Vec<usize>,
    total_defined: usize,
    max_cosets: usize,
}

struct OutOfBudget;

fn col_of(l: Letter) -> usize {
    2 * l.gen + usize::from(l.inverse)
}

fn inv_col(col: usize) -> usize {
    col ^ 1
}

impl Enumerator {
    fn new(ngens: usize, max_cosets: usize) -> Self {
        let ncols = 2 * ngens;
        Enumerator {
            ncols,
            table: vec![UNDEFINED; ncols],
            parent: vec![0],
            total_defined: 1,
            max_cosets,
        }
    }

    fn num_rows(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, coset: usize, col: usize) -> usize {
        self.table[coset * self.ncols + col]
    }

    fn set(&mut self, coset: usize, col: usize, value: usize) {
        self.table[coset * self.ncols + col] = value;
    }

    fn rep(&mut self, mut k: usize) -> usize {
        while self.parent[k] != k {
            self.parent[k] = self.parent[self.parent[k]];
            k = self.parent[k];
        }
        k
    }

    fn is_live(&self, k: usize) -> bool {
        self.parent[k] == k
    }

    fn define(&mut self, coset: usize, col: usize) -> Result<usize, OutOfBudget> {
        if self.total_defined >= self.max_cosets {
            return Err(OutOfBudget);
        }
        self.total_defined += 1;
        let new = self.num_rows();
        self.table.extend(std::iter::repeat_n(UNDEFINED, self.ncols));
        self.parent.push(new);
        self.set(coset, col, new);
        self.set(new, inv_col(col), coset);
        Ok(new)
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut VecDeque<usize>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a != b {
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.parent[drop] = keep;
            queue.push_back(drop);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = VecDeque::new();
        self.merge(a, b, &mut queue);
        while let Some(dead) = queue.pop_front() {
            for col in 0..self.ncols {
                let target = self.get(dead, col);
                if target == UNDEFINED {
                    continue;
                }
                // Remove the mirror edge so it is processed only once.
                self.set(target, inv_col(col), UNDEFINED);
                let mu = self.rep(dead);
                let nu = self.rep(target);
                let at_mu = self.get(mu, col);
                if at_mu != UNDEFINED {
                    self.merge(nu, at_mu, &mut queue);
                } else {
                    let at_nu = self.get(nu, inv_col(col));
                    if at_nu != UNDEFINED {
                        self.merge(mu, at_nu, &mut queue);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, inv_col(col), mu);
                    }
                }
            }
        }
    }

    /// HLT scan of a word from a coset, filling gaps with new cosets.
    fn scan_and_fill(&mut self, start: usize, word: &[usize]) -> Result<(), OutOfBudget> {
        let start = self.rep(start);
        loop {
            let mut f = start;
            let mut i = 0;
            while i < word.len() && self.get(f, word[i]) != UNDEFINED {
                f = self.get(f, word[i]);
                i += 1;
            }
            if i == word.len() {
                if f != start {
                    self.coincidence(f, start);
                }
                return Ok(());
            }
            let mut b = start;
            let mut j = word.len() - 1;
            while j > i && self.get(b, inv_col(word[j])) != UNDEFINED {
                b = self.get(b, inv_col(word[j]));
                j -= 1;
            }
            if j == i {
                if self.get(b, inv_col(word[j])) != UNDEFINED {
                    // Backward scan would pass the forward position.
                    let b2 = self.get(b, inv_col(word[j]));
                    self.coincidence(f, b2);
                    return Ok(());
                }
                // Deduction closes the scan.
                self.set(f, word[i], b);
                self.set(b, inv_col(word[i]), f);
                return Ok(());
            }
            // Gap of length > 1: define the next coset and rescan.
            self.define(f, word[i])?;
        }
    }
}

fn word_cols(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|&l| col_of(l)).collect()
}

/// Enumerates the cosets of the subgroup generated by `subgroup_gens`.
///
/// Deterministic for a fixed presentation: definitions happen in
/// first-undefined order while scanning relators.
pub fn todd_coxeter(p: &Presentation, subgroup_gens: &[Word], max_cosets: usize) -> Enumeration {
    assert!(max_cosets >= 1, "max_cosets must be at least 1");
    for w in subgroup_gens {
        assert_eq!(w.rank(), p.rank(), "alphabet-size mismatch");
    }
    let relators: Vec<Vec<usize>> = p.relators().iter().map(word_cols).collect();
    let subgens: Vec<Vec<usize>> = subgroup_gens
        .iter()
        .filter(|w| !w.is_identity())
        .map(word_cols)
        .collect();

    let mut e = Enumerator::new(p.rank(), max_cosets);
    for w in &subgens {
        if e.scan_and_fill(0, w).is_err() {
            return Enumeration::ExceededBudget {
                cosets_defined: e.total_defined,
            };
        }
    }
    let mut alpha = 0;
    while alpha < e.num_rows() {
        if e.is_live(alpha) {
            for r in &relators {
                if !e.is_live(alpha) {
                    break;
                }
                if e.scan_and_fill(alpha, r).is_err() {
                    return Enumeration::ExceededBudget {
                        cosets_defined: e.total_defined,
                    };
                }
            }
            if e.is_live(alpha) {
                for col in 0..e.ncols {
                    if e.get(alpha, col) == UNDEFINED && e.define(alpha, col).is_err() {
                        return Enumeration::ExceededBudget {
                            cosets_defined: e.total_defined,
                        };
                    }
                }
            }
        }
        alpha += 1;
    }

    // Compact live cosets, renumbering by old index order.
    let live: Vec<usize> = (0..e.num_rows()).filter(|&c| e.is_live(c)).collect();
    let mut new_index = vec![UNDEFINED; e.num_rows()];
    for (idx, &c) in live.iter().enumerate() {
        new_index[c] = idx;
    }
    let n = p.rank();
    let mut action = vec![vec![0usize; live.len()]; n];
    for (idx, &c) in live.iter().enumerate() {
        for (g, col_action) in action.iter_mut().enumerate() {
            let raw = e.get(c, 2 * g);
            debug_assert_ne!(raw, UNDEFINED, "closed table has no gaps");
            let img = e.rep(raw);
            col_action[idx] = new_index[img];
        }
    }
    let table = CosetTable::from_action(p.generator_names().to_vec(), action);
    debug_assert!(table.validate(p, subgroup_gens));
    Enumeration::Closed {
        table,
        cosets_defined: e.total_defined,
    }
}

/// Certifies triviality of `G / <<killed>>` by enumerating the quotient
/// presentation over the trivial subgroup. Certification proves
/// `nrk(G) <= |killed|`; running out of budget proves nothing.
pub fn trivial_quotient_check(
    p: &Presentation,
    killed: &[Word],
    max_cosets: usize,
) -> TrivialityCheck {
    for w in killed {
        assert_eq!(w.rank(), p.rank(), "alphabet-size mismatch");
    }
    let mut relators = p.relators().to_vec();
    relators.extend(killed.iter().filter(|w| !w.is_identity()).cloned());
    let quotient = match Presentation::new(p.generator_names().to_vec(), relators) {
        Ok(q) => q,
        // Cyclic reduction preserves nontriviality of nonempty reduced
        // words, so added relators never collapse.
        Err(PresentationError::EmptyRelator { .. }) => unreachable!(),
        Err(e) => panic!("invalid quotient presentation: {e}"),
    };
    match todd_coxeter(&quotient, &[], max_cosets) {
        Enumeration::Closed {
            table,
            cosets_defined,
        } if table.num_cosets() == 1 => TrivialityCheck::CertifiedTrivial { cosets_defined },
        Enumeration::Closed { cosets_defined, .. } => {
            TrivialityCheck::Inconclusive { cosets_defined }
        }
        Enumeration::ExceededBudget { cosets_defined } => {
            TrivialityCheck::Inconclusive { cosets_defined }
        }
    }
}

/// Rewrites a presentation of the subgroup realized by a closed table:
/// Schreier generators over a breadth-first minimal-length transversal,
/// relators rewritten from every coset. The only simplification applied
/// afterwards is elimination of generators killed by length-1 relators.
pub fn reidemeister_schreier(p: &Presentation, t: &CosetTable) -> Presentation {
    let m = t.num_cosets();
    let n = p.rank();

    // Breadth-first spanning tree; `tree_positive[c][g]` marks the positive
    // edge (c,g) as a tree edge traversed in either direction.
    let mut tree_positive = vec![vec![false; n]; m];
    let mut visited = vec![false; m];
    visited[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for g in 0..n {
            let fwd = t.action()[g][c];
            if !visited[fwd] {
                visited[fwd] = true;
                tree_positive[c][g] = true;
                queue.push_back(fwd);
            }
            let back = t.inverse_action[g][c];
            if !visited[back] {
                visited[back] = true;
                tree_positive[back][g] = true;
                queue.push_back(back);
            }
        }
    }
    debug_assert!(visited.iter().all(|&v| v), "coset action must be transitive");

    // Schreier generator indices for non-tree positive edges.
    let mut schreier_index = vec![vec![usize::MAX; n]; m];
    let mut count = 0;
    for (c, row) in schreier_index.iter_mut().enumerate() {
        for (g, slot) in row.iter_mut().enumerate() {
            if !tree_positive[c][g] {
                *slot = count;
                count += 1;
            }
        }
    }

    // Rewrite each relator from each coset.
    let mut relators: Vec<Word> = Vec::with_capacity(m * p.relators().len());
    for c in 0..m {
        for r in p.relators() {
            let mut letters: Vec<Letter> = Vec::new();
            let mut at = c;
            for &l in r.letters() {
                if l.inverse {
                    let prev = t.inverse_action[l.gen][at];
                    if !tree_positive[prev][l.gen] {
                        letters.push(Letter::new(schreier_index[prev][l.gen], true));
                    }
                    at = prev;
                } else {
                    if !tree_positive[at][l.gen] {
                        letters.push(Letter::new(schreier_index[at][l.gen], false));
                    }
                    at = t.action()[l.gen][at];
                }
            }
            debug_assert_eq!(at, c, "relator must trace back to its base coset");
            let w = Word::from_letters(count, letters).cyclically_reduced();
            if !w.is_identity() {
                relators.push(w);
            }
        }
    }

    // count = m(n-1) + 1 >= 1, so the generator list is never empty.
    let names: Vec<String> = (1..=count).map(|i| format!("s{i}")).collect();
    simplify_length_one(names, relators)
}

/// Removes generators forced trivial by length-1 relators, deleting their
/// occurrences elsewhere; repeats until stable.
fn simplify_length_one(mut names: Vec<String>, mut relators: Vec<Word>) -> Presentation {
    loop {
        let Some(kill) = relators
            .iter()
            .find(|r| r.len() == 1)
            .map(|r| r.letters()[0].gen)
        else {
            break;
        };
        if names.len() == 1 {
            // Group is trivial; keep a one-generator presentation.
            break;
        }
        names.remove(kill);
        let rank = names.len();
        relators = relators
            .iter()
            .filter_map(|r| {
                let letters = r.letters().iter().filter(|l| l.gen != kill).map(|l| {
                    Letter::new(if l.gen > kill { l.gen - 1 } else { l.gen }, l.inverse)
                });
                let w = Word::from_letters(rank, letters).cyclically_reduced();
                (!w.is_identity()).then_some(w)
            })
            .collect();
    }
    Presentation::new(names, relators).expect("rewritten presentation is valid")
}

/// First Betti number of the subgroup presented by a closed table.
pub fn subgroup_betti1(p: &Presentation, t: &CosetTable) -> usize {
    betti1(&reidemeister_schreier(p, t)).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{parse_presentation, parse_word};

    fn pres(text: &str) -> Presentation {
        parse_presentation(text).unwrap().into_presentation()
    }

    fn word(text: &str, p: &Presentation) -> Word {
        parse_word(text, p.generator_names()).unwrap()
    }

    #[test]
    fn cyclic_subgroup_index() {
        let p = pres("< x | x^6 >");
        let h = vec![word("x^2", &p)];
        let e = todd_coxeter(&p, &h, 100);
        let t = e.closed().expect("closes");
        assert_eq!(t.num_cosets(), 2);
    }

    #[test]
    fn pslz_with_extra_relator_collapses() {
        let p = pres("< a, b | a^2, b^3, a*b >");
        let e = todd_coxeter(&p, &[], 100);
        assert_eq!(e.closed().expect("closes").num_cosets(), 1);
    }

    #[test]
    fn infinite_group_exceeds_budget() {
        let p = pres("< a, b | a^2, b^3 >");
        let e = todd_coxeter(&p, &[], 10);
        assert!(matches!(e, Enumeration::ExceededBudget { .. }));
    }

    #[test]
    fn cyclic_orders_enumerate_exactly() {
        for n in 1..=50 {
            let p = pres(&format!("< x | x^{n} >"));
            let e = todd_coxeter(&p, &[], 200);
            assert_eq!(e.closed().expect("closes").num_cosets(), n);
        }
    }

    #[test]
    fn symmetric_group_from_coxeter_presentation() {
        // S3 = < s, t | s^2, t^2, (st)^3 >
        let p = pres("< s, t | s^2, t^2, (s*t)^3 >");
        let e = todd_coxeter(&p, &[], 100);
        assert_eq!(e.closed().expect("closes").num_cosets(), 6);
    }

    #[test]
    fn trivial_quotient_certificates() {
        let pslz = pres("< a, b | a^2, b^3 >");
        let c = trivial_quotient_check(&pslz, &[word("a*b", &pslz)], 200);
        assert!(c.is_certified());

        let f1 = Presentation::free(1);
        let c = trivial_quotient_check(&f1, &[], 500);
        assert!(!c.is_certified());
    }

    #[test]
    fn index_two_subgroup_of_f2_is_free_of_rank_3() {
        // Kernel of F2 -> Z/2 sending both generators to 1.
        let p = Presentation::free(2);
        let action = vec![vec![1, 0], vec![1, 0]];
        let t = CosetTable::from_action(p.generator_names().to_vec(), action);
        let s = reidemeister_schreier(&p, &t);
        assert_eq!(s.rank(), 3);
        assert!(s.relators().is_empty());
        assert_eq!(subgroup_betti1(&p, &t), 3);
    }

    #[test]
    fn index_one_recovers_presentation_up_to_renaming() {
        let p = pres("< a, b | a^2, b^3 >");
        let t = CosetTable::from_action(p.generator_names().to_vec(), vec![vec![0], vec![0]]);
        let s = reidemeister_schreier(&p, &t);
        assert_eq!(s.rank(), p.rank());
        let lens: Vec<usize> = s.relators().iter().map(|r| r.len()).collect();
        assert_eq!(lens, vec![2, 3]);
        assert_eq!(subgroup_betti1(&p, &t), betti1(&p).rank);
    }

    #[test]
    fn json_form_is_one_based() {
        let p = pres("< x | x^2 >");
        let t = todd_coxeter(&p, &[], 10);
        let v = t.closed().unwrap().to_json();
        assert_eq!(v["index"], 2);
        assert_eq!(v["action"]["x"][0], 2);
        assert_eq!(v["action"]["x"][1], 1);
    }
}
