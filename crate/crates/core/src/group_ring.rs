//! Sparse group-ring arithmetic `K[G]` over a prime field.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::hash::{BuildHasher, DefaultHasher, Hash, Hasher};
use std::io;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldError, PrimeField, Scalar};
use crate::group::{GrigElement, GroupElement, IntElement, ParseGrigError, XorElement};

#[derive(Debug, Error)]
pub enum GroupRingError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cache {path}: {reason}")]
    Cache { path: String, reason: String },
    #[error("cache io: {0}")]
    Io(#[from] io::Error),
}

/// Group elements that can be read back from their canonical form.
pub trait ParseCanonical: GroupElement {
    fn parse_canonical(s: &str) -> Option<Self>;
}

impl ParseCanonical for GrigElement {
    fn parse_canonical(s: &str) -> Option<Self> {
        GrigElement::parse_canonical(s).ok()
    }
}

impl ParseCanonical for IntElement {
    fn parse_canonical(s: &str) -> Option<Self> {
        s.parse().ok().map(IntElement)
    }
}

impl ParseCanonical for XorElement {
    fn parse_canonical(s: &str) -> Option<Self> {
        let inner = s.strip_prefix('{')?.strip_suffix('}')?;
        if inner.is_empty() {
            return Some(XorElement::identity());
        }
        let bits: Option<Vec<usize>> = inner.split(',').map(|b| b.parse().ok()).collect();
        let bits = bits?;
        let x = XorElement::from_bits(bits.iter().copied());
        (x.canonical() == s).then_some(x)
    }
}

/// Outer-loop work above which products are split across threads.
const PARALLEL_WORK: usize = 1 << 14;

/// A finitely supported element of `K[G]`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElem<G: GroupElement> {
    field: PrimeField,
    terms: HashMap<G, u32>,
}

impl<G: GroupElement> GroupRingElem<G> {
    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            terms: HashMap::new(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::monomial(field, G::identity(), 1)
    }

    pub fn monomial(field: PrimeField, g: G, c: i64) -> Self {
        Self::from_terms(field, [(g, c)])
    }

    /// Sums the given terms; repeated group elements accumulate.
    pub fn from_terms<I: IntoIterator<Item = (G, i64)>>(field: PrimeField, terms: I) -> Self {
        let mut out = Self::zero(field);
        for (g, c) in terms {
            out.accumulate(g, field.reduce(c));
        }
        out
    }

    fn accumulate(&mut self, g: G, c: u32) {
        accumulate(&mut self.terms, self.field, g, c);
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&G, u32)> {
        self.terms.iter().map(|(g, &c)| (g, c))
    }

    pub fn coefficient_at(&self, g: &G) -> Scalar {
        self.field
            .scalar(self.terms.get(g).copied().unwrap_or(0) as i64)
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check(other)?;
        let mut out = self.clone();
        for (g, &c) in &other.terms {
            out.accumulate(g.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Scalar) -> Result<Self, GroupRingError> {
        if s.modulus() != self.field.modulus() {
            return Err(FieldError::ModulusMismatch(s.modulus(), self.field.modulus()).into());
        }
        if s.is_zero() {
            return Ok(Self::zero(self.field));
        }
        let f = self.field;
        Ok(Self {
            field: f,
            terms: self
                .terms
                .iter()
                .map(|(g, &c)| (g.clone(), f.mul(c, s.value())))
                .collect(),
        })
    }

    /// Convolution product `Σ u(g) v(h) · gh`.
    pub fn mul(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check(other)?;
        let f = self.field;
        let left: Vec<(&G, u32)> = self.terms().collect();
        let right: Vec<(&G, u32)> = other.terms().collect();
        // The smaller support goes on the outside.
        let outer_is_left = left.len() <= right.len();
        let (outer, inner) = if outer_is_left {
            (&left, &right)
        } else {
            (&right, &left)
        };
        let product = |o: &(&G, u32), i: &(&G, u32)| {
            let g = if outer_is_left {
                o.0.mul(i.0)
            } else {
                i.0.mul(o.0)
            };
            (g, f.mul(o.1, i.1))
        };
        let terms = if outer.len() * inner.len() < PARALLEL_WORK || inner.len() < 64 {
            let mut acc = HashMap::with_capacity(outer.len() * inner.len());
            for o in outer {
                for i in inner {
                    let (g, c) = product(o, i);
                    accumulate(&mut acc, f, g, c);
                }
            }
            acc
        } else {
            // Split the larger side into chunks; each worker keeps a private map.
            let chunk = (inner.len() / (4 * rayon::current_num_threads())).max(256);
            inner
                .par_chunks(chunk)
                .map(|part| {
                    let mut acc = HashMap::with_capacity(part.len() * outer.len());
                    for o in outer {
                        for i in part {
                            let (g, c) = product(o, i);
                            accumulate(&mut acc, f, g, c);
                        }
                    }
                    acc
                })
                .reduce(HashMap::new, |mut a, b| {
                    let (small, mut big) = if a.len() < b.len() {
                        (a, b)
                    } else {
                        (b, std::mem::take(&mut a))
                    };
                    for (g, c) in small {
                        accumulate(&mut big, f, g, c);
                    }
                    big
                })
        };
        Ok(Self { field: f, terms })
    }

    pub fn pow(&self, e: u32) -> Result<Self, GroupRingError> {
        let mut acc = Self::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Terms as `(canonical form, coefficient)`, sorted by the canonical form.
    pub fn sorted_terms(&self) -> Vec<(String, u32)> {
        let mut v: Vec<(String, u32)> = self
            .terms
            .iter()
            .map(|(g, &c)| (g.canonical(), c))
            .collect();
        v.sort_unstable();
        v
    }

    /// Order-independent hash of the whole element.
    fn fingerprint(&self) -> u64 {
        let mut sum = 0u64;
        for (g, c) in &self.terms {
            let mut h = DefaultHasher::new();
            g.hash(&mut h);
            c.hash(&mut h);
            sum = sum.wrapping_add(h.finish());
        }
        sum
    }
}

fn accumulate<G: GroupElement, S: BuildHasher>(
    map: &mut HashMap<G, u32, S>,
    f: PrimeField,
    g: G,
    c: u32,
) {
    if c == 0 {
        return;
    }
    use std::collections::hash_map::Entry;
    match map.entry(g) {
        Entry::Occupied(mut e) => {
            let v = f.add(*e.get(), c);
            if v == 0 {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

impl<G: ParseCanonical> GroupRingElem<G> {
    pub fn from_sorted_terms(field: PrimeField, rows: &[(String, u32)]) -> Option<Self> {
        let mut out = Self::zero(field);
        for (s, c) in rows {
            if *c == 0 || *c >= field.modulus() {
                return None;
            }
            let g = G::parse_canonical(s)?;
            if out.terms.insert(g, *c).is_some() {
                return None;
            }
        }
        Some(out)
    }
}

/// Least `n < m ≤ bound` with `p^n = p^m`.
pub fn power_collision<G: GroupElement>(
    p: &GroupRingElem<G>,
    bound: u32,
) -> Result<Option<(u32, u32)>, GroupRingError> {
    let mut seen: HashMap<u64, Vec<u32>> = HashMap::new();
    let mut powers = vec![GroupRingElem::one(p.field)];
    seen.entry(powers[0].fingerprint()).or_default().push(0);
    for m in 1..=bound {
        let next = powers[m as usize - 1].mul(p)?;
        let fp = next.fingerprint();
        if let Some(cands) = seen.get(&fp) {
            if let Some(&n) = cands.iter().find(|&&n| powers[n as usize] == next) {
                return Ok(Some((n, m)));
            }
        }
        seen.entry(fp).or_default().push(m);
        powers.push(next);
    }
    Ok(None)
}

/// Powers `p^0, p^1, …` of a fixed element, optionally persisted.
///
/// File layout: a header line `# grigring v1 q=<q> p=<definition>`, then per
/// power a line `## pow <i>` followed by `element<TAB>coefficient` rows in
/// lexicographic order of the element's canonical form.
#[derive(Debug, Clone)]
pub struct PowerCache<G: GroupElement> {
    pub definition: String,
    base: GroupRingElem<G>,
    powers: Vec<GroupRingElem<G>>,
}

impl<G: ParseCanonical> PowerCache<G> {
    pub fn new(base: GroupRingElem<G>, definition: &str) -> Self {
        let one = GroupRingElem::one(base.field);
        Self {
            definition: definition.to_string(),
            base,
            powers: vec![one],
        }
    }

    pub fn header(&self) -> String {
        format!(
            "# grigring v1 q={} p={}",
            self.base.field.modulus(),
            self.definition
        )
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn power(&self, i: usize) -> Option<&GroupRingElem<G>> {
        self.powers.get(i)
    }

    /// Computes powers up to and including `i_max`.
    pub fn extend_to(&mut self, i_max: usize) -> Result<(), GroupRingError> {
        while self.powers.len() <= i_max {
            let next = self
                .powers
                .last()
                .expect("p^0 always present")
                .mul(&self.base)?;
            self.powers.push(next);
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (i, p) in self.powers.iter().enumerate() {
            let _ = writeln!(out, "## pow {i}");
            for (g, c) in p.sorted_terms() {
                let _ = writeln!(out, "{g}\t{c}");
            }
        }
        out
    }

    /// Reads a cache body. The header must match `base` and `definition`;
    /// blocks must be numbered consecutively from zero with sorted rows, and
    /// the first two blocks must equal `1` and `base`.
    pub fn parse(
        text: &str,
        base: GroupRingElem<G>,
        definition: &str,
        path: &str,
    ) -> Result<Self, GroupRingError> {
        let bad = |reason: String| GroupRingError::Cache {
            path: path.to_string(),
            reason,
        };
        let mut cache = Self::new(base, definition);
        let field = cache.base.field;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        if !header.starts_with("# grigring v1 ") {
            return Err(bad(format!("unsupported header {header:?}")));
        }
        if header != cache.header() {
            return Err(bad(format!(
                "header {header:?} does not match {:?}",
                cache.header()
            )));
        }
        if !text.ends_with('\n') {
            return Err(bad("truncated final line".into()));
        }
        let mut blocks: Vec<Vec<(String, u32)>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if let Some(rest) = line.strip_prefix("## pow ") {
                let i: usize = rest
                    .parse()
                    .map_err(|_| bad(format!("line {}: bad power index", lineno + 2)))?;
                if i != blocks.len() {
                    return Err(bad(format!(
                        "line {}: expected power {}",
                        lineno + 2,
                        blocks.len()
                    )));
                }
                blocks.push(Vec::new());
                continue;
            }
            let block = blocks
                .last_mut()
                .ok_or_else(|| bad("row before first block".into()))?;
            let (g, c) = line
                .split_once('\t')
                .ok_or_else(|| bad(format!("line {}: missing tab", lineno + 2)))?;
            let c: u32 = c
                .parse()
                .map_err(|_| bad(format!("line {}: bad coefficient", lineno + 2)))?;
            if let Some((prev, _)) = block.last() {
                if prev.as_str() >= g {
                    return Err(bad(format!("line {}: rows not sorted", lineno + 2)));
                }
            }
            block.push((g.to_string(), c));
        }
        if blocks.is_empty() {
            return Err(bad("no power blocks".into()));
        }
        cache.powers.clear();
        for (i, rows) in blocks.iter().enumerate() {
            let elem = GroupRingElem::from_sorted_terms(field, rows)
                .ok_or_else(|| bad(format!("power {i}: unparsable element or coefficient")))?;
            cache.powers.push(elem);
        }
        if cache.powers[0] != GroupRingElem::one(field) {
            return Err(bad("power 0 is not the identity".into()));
        }
        if cache.powers.len() > 1 && cache.powers[1] != cache.base {
            return Err(bad("power 1 does not match the definition".into()));
        }
        Ok(cache)
    }

    pub fn load(
        path: &Path,
        base: GroupRingElem<G>,
        definition: &str,
    ) -> Result<Self, GroupRingError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, base, definition, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<(), GroupRingError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.serialize())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Support sizes `|supp p^i|` for `i = 0..=i_max`, reusing and updating the
/// cache file when one is given.
pub fn support_growth<G: ParseCanonical>(
    p: &GroupRingElem<G>,
    definition: &str,
    i_max: usize,
    cache: Option<&Path>,
) -> Result<Vec<usize>, GroupRingError> {
    let mut pc = match cache {
        Some(path) if path.exists() => PowerCache::load(path, p.clone(), definition)?,
        _ => PowerCache::new(p.clone(), definition),
    };
    let before = pc.len();
    pc.extend_to(i_max)?;
    if let Some(path) = cache {
        if pc.len() > before || !path.exists() {
            pc.save(path)?;
        }
    }
    Ok((0..=i_max).map(|i| pc.powers[i].support_len()).collect())
}

/// `ada + dad + c`.
pub fn grigorchuk_p(field: PrimeField) -> GroupRingElem<GrigElement> {
    grigorchuk_sum(field, &["ada", "dad", "c"]).expect("fixed words parse")
}

/// Sum of the given generator words, each with coefficient one.
pub fn grigorchuk_sum(
    field: PrimeField,
    words: &[&str],
) -> Result<GroupRingElem<GrigElement>, ParseGrigError> {
    let terms: Result<Vec<_>, _> = words
        .iter()
        .map(|w| GrigElement::parse_word(w).map(|g| (g, 1)))
        .collect();
    Ok(GroupRingElem::from_terms(field, terms?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn g(w: &str) -> GrigElement {
        GrigElement::parse_word(w).unwrap()
    }

    fn elem(q: u32, terms: &[(&str, i64)]) -> GroupRingElem<GrigElement> {
        GroupRingElem::from_terms(gf(q), terms.iter().map(|(w, c)| (g(w), *c)))
    }

    #[test]
    fn addition_and_scaling() {
        let u = elem(2, &[("a", 1), ("b", 1)]);
        assert_eq!(u.add(&GroupRingElem::zero(gf(2))).unwrap(), u);
        assert!(u.add(&u).unwrap().is_zero());
        let v = elem(3, &[("a", 1), ("b", 1)]);
        assert_eq!(
            v.scale(gf(3).scalar(2)).unwrap(),
            elem(3, &[("a", 2), ("b", 2)])
        );
        assert!(u.add(&v).is_err());
        assert!(u.scale(gf(3).scalar(1)).is_err());
    }

    #[test]
    fn products() {
        let u = elem(2, &[("a", 1), ("b", 1)]);
        assert_eq!(u.mul(&u).unwrap(), elem(2, &[("ab", 1), ("ba", 1)]));
        assert_eq!(u.mul(&GroupRingElem::one(gf(2))).unwrap(), u);
        let v = elem(3, &[("a", 1), ("b", 1)]);
        assert_eq!(
            v.mul(&v).unwrap(),
            elem(3, &[("", 2), ("ab", 1), ("ba", 1)])
        );
    }

    #[test]
    fn coefficients() {
        let p = grigorchuk_p(gf(2));
        assert_eq!(
            p.pow(0).unwrap().coefficient_at(&GrigElement::ONE).value(),
            1
        );
        assert_eq!(p.support_len(), 3);
        assert_eq!(p.coefficient_at(&g("ab")).value(), 0);
        assert_eq!(p.coefficient_at(&g("ada")).value(), 1);
    }

    #[test]
    fn collisions() {
        let one = GroupRingElem::<GrigElement>::one(gf(2));
        assert_eq!(power_collision(&one, 5).unwrap(), Some((0, 1)));
        assert_eq!(
            power_collision(&elem(2, &[("a", 1)]), 5).unwrap(),
            Some((0, 2))
        );
        assert_eq!(power_collision(&elem(2, &[("a", 1)]), 1).unwrap(), None);
        // (ad)^4 = 1
        assert_eq!(
            power_collision(&elem(2, &[("ad", 1)]), 8).unwrap(),
            Some((0, 4))
        );
        // 2 has order 2 in GF(3)^×
        assert_eq!(
            power_collision(&elem(3, &[("", 2)]), 5).unwrap(),
            Some((0, 2))
        );
        // idempotent-free but nilpotent: (1 + a)^2 = 0 in characteristic two
        assert_eq!(
            power_collision(&elem(2, &[("", 1), ("a", 1)]), 5).unwrap(),
            Some((2, 3))
        );
    }

    #[test]
    fn support_growth_small() {
        let p = grigorchuk_p(gf(2));
        let sizes = support_growth(&p, "ada,dad,c", 4, None).unwrap();
        assert_eq!(sizes[0], 1);
        assert_eq!(sizes[1], 3);
        // oracle: explicit powers
        for (i, s) in sizes.iter().enumerate() {
            assert_eq!(*s, p.pow(i as u32).unwrap().support_len());
        }
    }

    #[test]
    fn cache_roundtrip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.cache");
        let p = grigorchuk_p(gf(2));
        let first = support_growth(&p, "ada,dad,c", 3, Some(&path)).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# grigring v1 q=2 p=ada,dad,c\n## pow 0\n1\t1\n## pow 1\n"));
        let reparsed = PowerCache::parse(&text, p.clone(), "ada,dad,c", "x").unwrap();
        assert_eq!(reparsed.serialize(), text);
        let more = support_growth(&p, "ada,dad,c", 6, Some(&path)).unwrap();
        assert_eq!(&more[..4], &first[..]);
        let fresh = support_growth(&p, "ada,dad,c", 6, None).unwrap();
        assert_eq!(more, fresh);
    }

    #[test]
    fn cache_corruption_is_reported() {
        let p = grigorchuk_p(gf(2));
        let good = {
            let mut c = PowerCache::new(p.clone(), "ada,dad,c");
            c.extend_to(2).unwrap();
            c.serialize()
        };
        let cases = [
            good.replace("v1", "v2"),
            good.replace("q=2", "q=3"),
            good.replace("## pow 1", "## pow 7"),
            good.replacen("\t1\n", "\t5\n", 1),
            good.replacen("\t1\n", " 1\n", 1),
            good.replacen("(s", "(x", 1),
            good.trim_end().to_string(),
            String::new(),
        ];
        for bad in cases {
            let r = PowerCache::parse(&bad, p.clone(), "ada,dad,c", "x");
            assert!(matches!(r, Err(GroupRingError::Cache { .. })), "{bad:?}");
        }
    }

    #[test]
    fn integer_group_ring_is_polynomial_convolution() {
        let f = gf(5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a: Vec<u32> = (0..rng.gen_range(0..6))
                .map(|_| rng.gen_range(0..5))
                .collect();
            let b: Vec<u32> = (0..rng.gen_range(0..6))
                .map(|_| rng.gen_range(0..5))
                .collect();
            let (sa, sb) = (rng.gen_range(-3i64..3), rng.gen_range(-3i64..3));
            let to_ring = |v: &[u32], s: i64| {
                GroupRingElem::from_terms(
                    f,
                    v.iter()
                        .enumerate()
                        .map(|(i, &c)| (IntElement(i as i64 + s), c as i64)),
                )
            };
            let mut conv = vec![0u32; (a.len() + b.len()).saturating_sub(1)];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    conv[i + j] = f.add(conv[i + j], f.mul(x, y));
                }
            }
            let expected = to_ring(&conv, sa + sb);
            assert_eq!(to_ring(&a, sa).mul(&to_ring(&b, sb)).unwrap(), expected);
        }
    }

    #[test]
    fn parallel_product_matches_sequential() {
        let f = gf(3);
        let big =
            GroupRingElem::from_terms(f, (0..5000).map(|i| (IntElement(i * 7 % 1013), (i % 3))));
        let small = GroupRingElem::from_terms(f, (0..40).map(|i| (IntElement(i * i), 1 + (i % 2))));
        let par = big.mul(&small).unwrap();
        let mut seq = GroupRingElem::zero(f);
        for (g, c) in small.terms() {
            for (h, d) in big.terms() {
                seq.accumulate(h.mul(g), f.mul(c, d));
            }
        }
        assert_eq!(par, seq);
    }

    fn word() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 0..=4)
            .prop_map(|v| v.into_iter().collect())
    }

    fn small_elem() -> impl Strategy<Value = Vec<(String, i64)>> {
        prop::collection::vec((word(), 1i64..3), 0..=3)
    }

    proptest! {
        #[test]
        fn ring_axioms(x in small_elem(), y in small_elem(), z in small_elem()) {
            let mk = |t: &[(String, i64)]| GroupRingElem::from_terms(gf(3), t.iter().map(|(w, c)| (g(w), *c)));
            let (x, y, z) = (mk(&x), mk(&y), mk(&z));
            prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
            prop_assert_eq!(
                x.mul(&y.add(&z).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
            );
            prop_assert_eq!(
                x.add(&y).unwrap().mul(&z).unwrap(),
                x.mul(&z).unwrap().add(&y.mul(&z).unwrap()).unwrap()
            );
        }

        #[test]
        fn xor_canonical_roundtrip(bits in prop::collection::vec(0usize..200, 0..10)) {
            let x = XorElement::from_bits(bits);
            prop_assert_eq!(<XorElement as ParseCanonical>::parse_canonical(&x.canonical()), Some(x));
        }
    }
}
