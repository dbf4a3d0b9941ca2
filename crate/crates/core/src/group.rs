//! Finitely presented groups with normal forms from a terminating rewrite
//! system, plus word-metric balls and a bounded confluence check.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its formal inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub generator: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator: generator as u16, inverse }
    }

    /// Position in the letter alphabet `x < x⁻¹ < y < y⁻¹ < …`.
    pub fn rank(self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }

    pub fn inv(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Word = Vec<Letter>;

pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn invert_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// An element of a presented group, stored as its normal form.
///
/// Ordering is shortlex on the normal form, so the identity is least.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GroupElement(Word);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub inverse_name: String,
}

impl Generator {
    pub fn new(name: &str, inverse_name: &str) -> Self {
        Generator { name: name.to_string(), inverse_name: inverse_name.to_string() }
    }
}

/// Well-order used to certify that every rewrite rule terminates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionOrder {
    /// Length first, then lexicographic in the letter alphabet.
    #[default]
    Shortlex,
    /// Recursive wreath order in which earlier generators dominate later
    /// ones. Needed for collection-style rules such as `y x → x y z⁻¹`
    /// that lengthen words.
    Wreath,
}

impl ReductionOrder {
    pub fn compare(self, a: &[Letter], b: &[Letter], generator_count: usize) -> Ordering {
        match self {
            ReductionOrder::Shortlex => shortlex_cmp(a, b),
            ReductionOrder::Wreath => {
                let top = 2 * generator_count;
                wreath_cmp(a, b, top, generator_count)
            }
        }
    }
}

// Weight of a letter in the wreath order: x⁻¹ > x > y⁻¹ > y > …
fn wreath_weight(l: Letter, generator_count: usize) -> usize {
    2 * (generator_count - 1 - l.generator as usize) + l.inverse as usize
}

fn wreath_cmp(a: &[Letter], b: &[Letter], levels: usize, n: usize) -> Ordering {
    if levels == 0 {
        return Ordering::Equal;
    }
    let level = levels - 1;
    let count = |w: &[Letter]| w.iter().filter(|&&l| wreath_weight(l, n) == level).count();
    match count(a).cmp(&count(b)) {
        Ordering::Equal => {}
        other => return other,
    }
    let split = |w: &[Letter]| -> Vec<Vec<Letter>> {
        w.split(|&l| wreath_weight(l, n) == level).map(|s| s.to_vec()).collect()
    };
    for (pa, pb) in split(a).iter().zip(split(b).iter()) {
        match wreath_cmp(pa, pb, level, n) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

/// A finitely presented group together with a rewrite system whose
/// irreducible words are the normal forms.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    name: String,
    generators: Vec<Generator>,
    relators: Vec<Word>,
    rules: Vec<RewriteRule>,
    order: ReductionOrder,
    step_budget: usize,
    rules_by_last: HashMap<Letter, Vec<usize>>,
}

pub const DEFAULT_STEP_BUDGET: usize = 100_000;

impl GroupPresentation {
    /// Builds and validates a presentation. Relators and rule sides are
    /// given as word strings over the generator names.
    pub fn new(
        name: &str,
        generators: Vec<Generator>,
        relators: &[&str],
        rules: &[(&str, &str)],
        order: ReductionOrder,
    ) -> Result<Self> {
        let mut p = GroupPresentation {
            name: name.to_string(),
            generators,
            relators: Vec::new(),
            rules: Vec::new(),
            order,
            step_budget: DEFAULT_STEP_BUDGET,
            rules_by_last: HashMap::new(),
        };
        p.check_generators()?;
        for r in relators {
            let w = p.parse_word(r)?;
            p.relators.push(w);
        }
        for (l, r) in rules {
            let lhs = p.parse_word(l)?;
            let rhs = p.parse_word(r)?;
            p.rules.push(RewriteRule { lhs, rhs });
        }
        p.validate()?;
        p.index_rules();
        Ok(p)
    }

    /// The trivial group: no generators, no relators.
    pub fn trivial() -> Self {
        GroupPresentation {
            name: "trivial".to_string(),
            generators: Vec::new(),
            relators: Vec::new(),
            rules: Vec::new(),
            order: ReductionOrder::Shortlex,
            step_budget: DEFAULT_STEP_BUDGET,
            rules_by_last: HashMap::new(),
        }
    }

    pub fn with_step_budget(mut self, budget: usize) -> Self {
        self.step_budget = budget;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn order(&self) -> ReductionOrder {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// All letters `x, x⁻¹, y, y⁻¹, …` in alphabet order.
    pub fn alphabet(&self) -> Vec<Letter> {
        (0..self.generators.len())
            .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
            .collect()
    }

    fn check_generators(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for g in &self.generators {
            if g.name.is_empty() || g.inverse_name.is_empty() {
                return Err(self.invalid("generator names must be nonempty"));
            }
            if g.name == g.inverse_name {
                return Err(self.invalid(&format!("generator `{}` is its own inverse name", g.name)));
            }
            for s in [&g.name, &g.inverse_name] {
                if s.chars().any(|c| c.is_whitespace() || c == '^') {
                    return Err(self.invalid(&format!("symbol `{s}` contains a reserved character")));
                }
                if !seen.insert(s.clone()) {
                    return Err(self.invalid(&format!("duplicate symbol `{s}`")));
                }
            }
        }
        if self.generators.len() > u16::MAX as usize {
            return Err(self.invalid("too many generators"));
        }
        Ok(())
    }

    fn invalid(&self, reason: &str) -> Error {
        Error::InvalidPresentation { name: self.name.clone(), reason: reason.to_string() }
    }

    fn validate(&self) -> Result<()> {
        let n = self.generators.len();
        for (i, rule) in self.rules.iter().enumerate() {
            if rule.lhs.is_empty() {
                return Err(self.invalid(&format!("rule {i} has an empty left-hand side")));
            }
            if self.order.compare(&rule.rhs, &rule.lhs, n) != Ordering::Less {
                return Err(self.invalid(&format!(
                    "rule {} → {} does not decrease in {:?} order",
                    self.format_word(&rule.lhs),
                    self.format_word(&rule.rhs),
                    self.order
                )));
            }
        }
        for r in &self.relators {
            if !is_cyclically_reduced(r) {
                return Err(self.invalid(&format!(
                    "relator `{}` is not cyclically reduced",
                    self.format_word(r)
                )));
            }
        }
        Ok(())
    }

    fn index_rules(&mut self) {
        self.rules_by_last.clear();
        for (i, r) in self.rules.iter().enumerate() {
            let last = *r.lhs.last().expect("validated nonempty lhs");
            self.rules_by_last.entry(last).or_default().push(i);
        }
    }

    /// Parses a word. Tokens may be separated by whitespace; without
    /// whitespace the longest matching symbol is taken greedily. A token may
    /// carry an integer exponent, as in `x^-1` or `y^3`.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let malformed = |reason: &str| Error::MalformedWord { word: s.to_string(), reason: reason.to_string() };
        let mut symbols: Vec<(&str, Letter)> = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            symbols.push((&g.name, Letter::new(i, false)));
            symbols.push((&g.inverse_name, Letter::new(i, true)));
        }
        symbols.sort_by(|a, b| b.0.len().cmp(&a.0.len()));

        let mut out = Vec::new();
        for token in s.split_whitespace() {
            let mut rest = token;
            while !rest.is_empty() {
                let (sym, letter) = symbols
                    .iter()
                    .find(|(name, _)| rest.starts_with(name))
                    .ok_or_else(|| malformed(&format!("unknown symbol at `{rest}`")))?;
                rest = &rest[sym.len()..];
                let mut exponent: i64 = 1;
                if let Some(after) = rest.strip_prefix('^') {
                    let digits: usize = after
                        .char_indices()
                        .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
                        .map(|(_, c)| c.len_utf8())
                        .sum();
                    exponent = after[..digits].parse().map_err(|_| malformed("bad exponent"))?;
                    rest = &after[digits..];
                }
                let l = if exponent < 0 { letter.inv() } else { *letter };
                for _ in 0..exponent.unsigned_abs() {
                    out.push(l);
                }
            }
        }
        Ok(out)
    }

    pub fn letter_name(&self, l: Letter) -> &str {
        let g = &self.generators[l.generator as usize];
        if l.inverse {
            &g.inverse_name
        } else {
            &g.name
        }
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        let multi = self.generators.iter().any(|g| g.name.chars().count() > 1 || g.inverse_name.chars().count() > 1);
        let parts: Vec<&str> = w.iter().map(|&l| self.letter_name(l)).collect();
        parts.join(if multi { " " } else { "" })
    }

    pub fn format(&self, g: &GroupElement) -> String {
        self.format_word(&g.0)
    }

    fn find_suffix_rule(&self, out: &[Letter]) -> Option<&RewriteRule> {
        let last = out.last()?;
        self.rules_by_last.get(last)?.iter().map(|&i| &self.rules[i]).find(|r| out.ends_with(&r.lhs))
    }

    // `prefix` must already be irreducible.
    fn reduce_from(&self, prefix: Word, rest: &[Letter]) -> Result<GroupElement> {
        let mut out = prefix;
        let mut input: Vec<Letter> = rest.iter().rev().copied().collect();
        let mut steps = 0usize;
        while let Some(l) = input.pop() {
            out.push(l);
            if let Some(rule) = self.find_suffix_rule(&out) {
                steps += 1;
                if steps > self.step_budget {
                    return Err(Error::NonTermination {
                        word: self.format_word(rest),
                        budget: self.step_budget,
                    });
                }
                out.truncate(out.len() - rule.lhs.len());
                input.extend(rule.rhs.iter().rev());
            }
        }
        Ok(GroupElement(out))
    }

    /// Normal form of `w`.
    pub fn reduce_word(&self, w: &[Letter]) -> Result<GroupElement> {
        self.reduce_from(Vec::new(), w)
    }

    /// Parses and reduces a word string.
    pub fn element(&self, s: &str) -> Result<GroupElement> {
        let w = self.parse_word(s)?;
        self.reduce_word(&w)
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.reduce_from(g.0.clone(), &h.0)
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.reduce_word(&invert_word(&g.0))
    }

    pub fn is_irreducible(&self, w: &[Letter]) -> bool {
        (1..=w.len()).all(|end| self.find_suffix_rule(&w[..end]).is_none())
    }

    /// Elements of word length at most `radius`, sorted shortlex. Fails once
    /// more than `cap` elements have been found.
    pub fn ball_enumerate(&self, radius: usize, cap: usize) -> Result<Ball> {
        let alphabet = self.alphabet();
        let mut dist: HashMap<GroupElement, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(GroupElement::identity(), 0);
        queue.push_back(GroupElement::identity());
        while let Some(g) = queue.pop_front() {
            let d = dist[&g];
            if d == radius {
                continue;
            }
            for &a in &alphabet {
                let h = self.reduce_from(g.0.clone(), &[a])?;
                if !dist.contains_key(&h) {
                    dist.insert(h.clone(), d + 1);
                    if dist.len() > cap {
                        return Err(Error::ResourceLimit(format!(
                            "ball of radius {radius} in `{}` exceeds {cap} elements",
                            self.name
                        )));
                    }
                    queue.push_back(h);
                }
            }
        }
        let mut elements: Vec<GroupElement> = dist.keys().cloned().collect();
        elements.sort();
        Ok(Ball { radius, elements, dist })
    }

    /// Longest relator, used for the default confluence bound.
    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    pub fn default_confluence_bound(&self) -> usize {
        let lhs = self.rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0);
        (2 * self.max_relator_len()).max(2 * lhs)
    }

    /// Checks that every word of length at most `bound` has a single normal
    /// form across all reduction paths. Small alphabets are checked
    /// exhaustively; otherwise only overlap words of the rule set (which is
    /// where local confluence can fail) are examined.
    pub fn verify_confluence(&self, bound: usize) -> ConfluenceReport {
        const EXHAUSTIVE_LIMIT: usize = 300_000;
        let k = 2 * self.generators.len();
        let mut total = 0usize;
        let mut pow = 1usize;
        for _ in 0..=bound {
            total = total.saturating_add(pow);
            pow = pow.saturating_mul(k);
        }
        let mut memo: HashMap<Word, Rc<BTreeSet<Word>>> = HashMap::new();
        let mut report = ConfluenceReport {
            length_bound: bound,
            mode: ConfluenceMode::Exhaustive,
            words_checked: 0,
            violations: Vec::new(),
            budget_exhausted: false,
        };
        let words: Vec<Word> = if total <= EXHAUSTIVE_LIMIT {
            all_words(&self.alphabet(), bound)
        } else {
            report.mode = ConfluenceMode::CriticalPairs;
            self.overlap_words(bound)
        };
        for w in words {
            report.words_checked += 1;
            match self.normal_forms(&w, &mut memo, 0) {
                Some(nfs) if nfs.len() > 1 => {
                    if report.violations.len() < 32 {
                        report.violations.push(ConfluenceViolation {
                            word: self.format_word(&w),
                            normal_forms: nfs.iter().map(|n| self.format_word(n)).collect(),
                        });
                    }
                }
                Some(_) => {}
                None => report.budget_exhausted = true,
            }
        }
        report
    }

    fn overlap_words(&self, bound: usize) -> Vec<Word> {
        let mut out = BTreeSet::new();
        for a in &self.rules {
            for b in &self.rules {
                let (l1, l2) = (&a.lhs, &b.lhs);
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] == l2[..k] {
                        let mut w = l1.clone();
                        w.extend_from_slice(&l2[k..]);
                        if w.len() <= bound {
                            out.insert(w);
                        }
                    }
                }
                if !std::ptr::eq(a, b) && l2.len() <= l1.len() && l1.windows(l2.len()).any(|s| s == &l2[..]) && l1.len() <= bound {
                    out.insert(l1.clone());
                }
            }
        }
        let mut v: Vec<Word> = out.into_iter().collect();
        v.sort_by(|a, b| shortlex_cmp(a, b));
        v
    }

    fn one_step(&self, w: &[Letter]) -> Vec<Word> {
        let mut out = Vec::new();
        for r in &self.rules {
            if r.lhs.len() > w.len() {
                continue;
            }
            for i in 0..=w.len() - r.lhs.len() {
                if w[i..i + r.lhs.len()] == r.lhs[..] {
                    let mut s = w[..i].to_vec();
                    s.extend_from_slice(&r.rhs);
                    s.extend_from_slice(&w[i + r.lhs.len()..]);
                    out.push(s);
                }
            }
        }
        out
    }

    // Set of normal forms reachable from `w` along any reduction path.
    fn normal_forms(&self, w: &[Letter], memo: &mut HashMap<Word, Rc<BTreeSet<Word>>>, depth: usize) -> Option<Rc<BTreeSet<Word>>> {
        if let Some(s) = memo.get(w) {
            return Some(s.clone());
        }
        if depth > 10_000 {
            return None;
        }
        let next = self.one_step(w);
        let set = if next.is_empty() {
            let mut s = BTreeSet::new();
            s.insert(w.to_vec());
            s
        } else {
            let mut s = BTreeSet::new();
            for n in next {
                s.extend(self.normal_forms(&n, memo, depth + 1)?.iter().cloned());
            }
            s
        };
        let rc = Rc::new(set);
        memo.insert(w.to_vec(), rc.clone());
        Some(rc)
    }
}

fn all_words(alphabet: &[Letter], bound: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for w in &frontier {
            for &a in alphabet {
                let mut v: Word = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn is_cyclically_reduced(w: &[Letter]) -> bool {
    if w.windows(2).any(|p| p[0] == p[1].inv()) {
        return false;
    }
    match (w.first(), w.last()) {
        (Some(&a), Some(&b)) if w.len() > 1 => a != b.inv(),
        _ => true,
    }
}

/// Ball in the word metric.
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    /// Sorted shortlex.
    pub elements: Vec<GroupElement>,
    pub dist: HashMap<GroupElement, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.dist.contains_key(g)
    }

    pub fn word_length(&self, g: &GroupElement) -> Option<usize> {
        self.dist.get(g).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfluenceMode {
    Exhaustive,
    CriticalPairs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfluenceViolation {
    pub word: String,
    pub normal_forms: Vec<String>,
}

/// Result of [`GroupPresentation::verify_confluence`]. Confluence is only
/// certified for words up to `length_bound`.
#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub length_bound: usize,
    pub mode: ConfluenceMode,
    pub words_checked: usize,
    pub violations: Vec<ConfluenceViolation>,
    pub budget_exhausted: bool,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.violations.is_empty() && !self.budget_exhausted
    }
}

impl fmt::Display for ConfluenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} words of length <= {} checked ({:?}): {} violation(s)",
            self.words_checked,
            self.length_bound,
            self.mode,
            self.violations.len()
        )
    }
}
