use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::model::FiniteSymmetryModel;
use super::perm::Permutation;
use crate::error::{Error, Result};
use crate::report::{Subject, Verdict, VerificationReport};

/// Upper bound on enumerated words; deeper layers are reported as truncated.
pub const MAX_WORDS: usize = 2_000_000;

/// One factor of a formal product: element `element` (an id in the
/// canonical order of `K^subgroup`) of subgroup `subgroup`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub subgroup: usize,
    pub element: usize,
}

/// A formal product of subgroup elements, reduced within subgroups.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Merges adjacent letters from the same subgroup and drops identities.
    pub fn reduced(m: &FiniteSymmetryModel, letters: &[Letter]) -> Result<Self> {
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        for &l in letters {
            let k = letter_perm(m, l)?;
            match out.last() {
                Some(prev) if prev.subgroup == l.subgroup => {
                    let group = m.subgroup(l.subgroup);
                    let product = group.element(prev.element).expect("valid letter").compose(k);
                    let id = group.id_of(&product).expect("subgroup is closed");
                    out.pop();
                    if id != 0 {
                        out.push(Letter { subgroup: l.subgroup, element: id });
                    }
                }
                _ => {
                    if l.element != 0 {
                        out.push(l);
                    }
                }
            }
        }
        Ok(Self { letters: out })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, m: &FiniteSymmetryModel, other: &Self) -> Result<Self> {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::reduced(m, &letters)
    }

    pub fn to_json(&self, m: &FiniteSymmetryModel) -> Value {
        Value::Array(
            self.letters
                .iter()
                .map(|l| {
                    json!({
                        "subgroup": m.label(l.subgroup),
                        "element": m.subgroup(l.subgroup).element(l.element),
                    })
                })
                .collect(),
        )
    }
}

fn letter_perm(m: &FiniteSymmetryModel, l: Letter) -> Result<&Permutation> {
    if l.subgroup >= m.variable_count() {
        return Err(Error::InvalidWord(format!("unknown subgroup index {}", l.subgroup)));
    }
    m.subgroup(l.subgroup).element(l.element).ok_or_else(|| {
        Error::InvalidWord(format!("subgroup {} has no element {}", m.label(l.subgroup), l.element))
    })
}

/// `k_0a · k^a · k_a0` for a single letter.
fn letter_image(m: &FiniteSymmetryModel, l: Letter) -> Result<Permutation> {
    Ok(m.conjugate_to_distinguished(l.subgroup, letter_perm(m, l)?))
}

fn word_image_unchecked(m: &FiniteSymmetryModel, w: &GroupWord) -> Result<(Permutation, Permutation)> {
    let mut k = Permutation::identity(m.phi_size());
    let mut k0 = k.clone();
    for &l in w.letters() {
        k = k.compose(letter_perm(m, l)?);
        k0 = k0.compose(&letter_image(m, l)?);
    }
    Ok((k, k0))
}

/// `(product of the letters, product of k_0a · k^a · k_a0)`; the second
/// component must lie in `K⁰`.
pub fn word_image(m: &FiniteSymmetryModel, w: &GroupWord) -> Result<(Permutation, Permutation)> {
    let (k, k0) = word_image_unchecked(m, w)?;
    if !m.subgroup(0).contains(&k0) {
        return Err(Error::InvalidWord(format!("image {k0} lies outside the distinguished subgroup")));
    }
    Ok((k, k0))
}

/// All letters `(a, id ≠ 0)` in enumeration order.
fn alphabet(m: &FiniteSymmetryModel) -> Vec<Letter> {
    (0..m.variable_count())
        .flat_map(|a| (1..m.subgroup(a).order()).map(move |e| Letter { subgroup: a, element: e }))
        .collect()
}

pub fn random_word<R: Rng + ?Sized>(m: &FiniteSymmetryModel, max_len: usize, rng: &mut R) -> GroupWord {
    let letters = alphabet(m);
    if letters.is_empty() {
        return GroupWord::empty();
    }
    let len = rng.random_range(0..=max_len);
    let raw: Vec<Letter> = (0..len).map(|_| letters[rng.random_range(0..letters.len())]).collect();
    GroupWord::reduced(m, &raw).expect("letters come from the model")
}

#[derive(Clone, Debug)]
struct Node {
    parent: u32,
    letter: u32,
    k: u32,
    k0: u32,
}

/// Reduced words up to a length, in order of length and then letter order.
pub struct WordEnumeration {
    alphabet: Vec<Letter>,
    nodes: Vec<Node>,
    /// Distinct `k0` images per group element, first word for each.
    fibers: HashMap<u32, BTreeMap<u32, u32>>,
    k_images: Vec<Permutation>,
    k_index: HashMap<Permutation, u32>,
    k0_images: Vec<Permutation>,
    k0_index: HashMap<Permutation, u32>,
    pub max_len: usize,
    pub reached_len: usize,
    pub truncated: bool,
}

fn intern(p: Permutation, list: &mut Vec<Permutation>, index: &mut HashMap<Permutation, u32>) -> u32 {
    if let Some(&i) = index.get(&p) {
        return i;
    }
    let i = list.len() as u32;
    index.insert(p.clone(), i);
    list.push(p);
    i
}

impl WordEnumeration {
    pub fn run(m: &FiniteSymmetryModel, max_len: usize) -> Result<Self> {
        let alphabet = alphabet(m);
        let images = alphabet
            .iter()
            .map(|&l| Ok((letter_perm(m, l)?.clone(), letter_image(m, l)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut e = Self {
            alphabet,
            nodes: Vec::new(),
            fibers: HashMap::new(),
            k_images: Vec::new(),
            k_index: HashMap::new(),
            k0_images: Vec::new(),
            k0_index: HashMap::new(),
            max_len,
            reached_len: 0,
            truncated: false,
        };
        let id = Permutation::identity(m.phi_size());
        let k = intern(id.clone(), &mut e.k_images, &mut e.k_index);
        let k0 = intern(id, &mut e.k0_images, &mut e.k0_index);
        e.nodes.push(Node { parent: u32::MAX, letter: u32::MAX, k, k0 });
        e.fibers.entry(k).or_default().insert(k0, 0);

        let mut layer = 0..1usize;
        for len in 1..=max_len {
            let start = e.nodes.len();
            for parent in layer.clone() {
                let last = e.nodes[parent].letter;
                for (li, &l) in e.alphabet.iter().enumerate() {
                    if last != u32::MAX && e.alphabet[last as usize].subgroup == l.subgroup {
                        continue;
                    }
                    if e.nodes.len() >= MAX_WORDS {
                        e.truncated = true;
                        return Ok(e);
                    }
                    let (lk, lk0) = &images[li];
                    let k = e.k_images[e.nodes[parent].k as usize].compose(lk);
                    let k0 = e.k0_images[e.nodes[parent].k0 as usize].compose(lk0);
                    let k = intern(k, &mut e.k_images, &mut e.k_index);
                    let k0 = intern(k0, &mut e.k0_images, &mut e.k0_index);
                    let node = e.nodes.len() as u32;
                    e.nodes.push(Node { parent: parent as u32, letter: li as u32, k, k0 });
                    e.fibers.entry(k).or_default().entry(k0).or_insert(node);
                }
            }
            if e.nodes.len() == start {
                break;
            }
            e.reached_len = len;
            layer = start..e.nodes.len();
        }
        Ok(e)
    }

    pub fn word_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn word(&self, node: u32) -> GroupWord {
        let mut letters = Vec::new();
        let mut i = node;
        while i != 0 {
            let n = &self.nodes[i as usize];
            letters.push(self.alphabet[n.letter as usize]);
            i = n.parent;
        }
        letters.reverse();
        GroupWord { letters }
    }

    pub fn image(&self, node: u32) -> (&Permutation, &Permutation) {
        let n = &self.nodes[node as usize];
        (&self.k_images[n.k as usize], &self.k0_images[n.k0 as usize])
    }

    /// Words whose element is `k`, one per distinct image, in enumeration order.
    pub fn fiber(&self, k: &Permutation) -> Vec<u32> {
        let Some(&kid) = self.k_index.get(k) else { return Vec::new() };
        let mut nodes: Vec<u32> = self.fibers[&kid].values().copied().collect();
        nodes.sort_unstable();
        nodes
    }

    pub fn distinct_elements(&self) -> usize {
        self.fibers.len()
    }

    pub fn multivalued_elements(&self) -> usize {
        self.fibers.values().filter(|f| f.len() > 1).count()
    }

    /// Nonempty words whose image is the identity, in enumeration order.
    pub fn trivial_image_words(&self) -> impl Iterator<Item = u32> + '_ {
        let id = self.k0_index.iter().find(|(p, _)| p.is_identity()).map(|(_, &i)| i);
        (1..self.nodes.len() as u32).filter(move |&i| Some(self.nodes[i as usize].k0) == id)
    }

    pub fn images_outside(&self, m: &FiniteSymmetryModel) -> usize {
        self.k0_images.iter().filter(|p| !m.subgroup(0).contains(p)).count()
    }
}

/// How `k_0a` is represented by words.
#[derive(Clone, Debug)]
pub enum TransferWords {
    /// Two words for `k_0a` with different images; the canonical pair.
    Multivalued { first: GroupWord, second: GroupWord, first_image: Permutation, second_image: Permutation },
    /// Every word found for `k_0a` has the same image.
    SingleValued { word: GroupWord, image: Permutation },
    /// `k_0a` lies in the generated group but no word reaches it at this depth.
    NotReached,
    /// `k_0a` is not a product of subgroup elements.
    NotInGroup,
}

impl TransferWords {
    pub fn status(&self) -> &'static str {
        match self {
            Self::Multivalued { .. } => "multivalued",
            Self::SingleValued { .. } => "single_valued_at_depth",
            Self::NotReached => "not_reached",
            Self::NotInGroup => "not_in_generated_group",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MultivaluednessSummary {
    pub max_len: usize,
    pub words: usize,
    pub distinct_elements: usize,
    pub multivalued_elements: usize,
    pub truncated: bool,
}

pub struct Multivaluedness {
    pub enumeration: WordEnumeration,
    /// Indexed by variable; entry 0 is unused.
    pub transfers: Vec<Option<TransferWords>>,
    /// Every letter image equals its letter, so `V` coincides with `U`.
    pub conjugation_trivial: bool,
}

/// Breadth-first enumeration of reduced words, grouped by the element of
/// `K` they multiply out to.
pub fn detect_multivaluedness(m: &FiniteSymmetryModel, max_len: usize) -> Result<Multivaluedness> {
    if max_len == 0 {
        return Err(Error::InvalidWord("max_len must be at least 1".into()));
    }
    let enumeration = WordEnumeration::run(m, max_len)?;
    let mut transfers = vec![None];
    for a in 1..m.variable_count() {
        let k = m.transfer(0, a).expect("model has transfers to the distinguished variable");
        let status = if !m.generated_group().contains(&k) {
            TransferWords::NotInGroup
        } else {
            let fiber = enumeration.fiber(&k);
            match fiber.as_slice() {
                [] => TransferWords::NotReached,
                [only] => TransferWords::SingleValued {
                    word: enumeration.word(*only),
                    image: enumeration.image(*only).1.clone(),
                },
                [first, second, ..] => TransferWords::Multivalued {
                    first: enumeration.word(*first),
                    second: enumeration.word(*second),
                    first_image: enumeration.image(*first).1.clone(),
                    second_image: enumeration.image(*second).1.clone(),
                },
            }
        };
        transfers.push(Some(status));
    }
    let conjugation_trivial = (0..m.variable_count())
        .all(|a| m.generators(a).iter().all(|k| &m.conjugate_to_distinguished(a, k) == k));
    Ok(Multivaluedness { enumeration, transfers, conjugation_trivial })
}

impl Multivaluedness {
    pub fn summary(&self) -> MultivaluednessSummary {
        MultivaluednessSummary {
            max_len: self.enumeration.max_len,
            words: self.enumeration.word_count(),
            distinct_elements: self.enumeration.distinct_elements(),
            multivalued_elements: self.enumeration.multivalued_elements(),
            truncated: self.enumeration.truncated,
        }
    }

    pub fn report(&self, m: &FiniteSymmetryModel) -> VerificationReport {
        let mut b = VerificationReport::builder(Subject::Assumption3b);
        let summary = self.summary();
        let mut per_transfer = Vec::new();
        let mut all_multivalued = true;
        let mut any_fail = false;
        for (a, status) in self.transfers.iter().enumerate().skip(1) {
            let status = status.as_ref().expect("filled for a > 0");
            let mut entry = json!({ "pair": m.pair_name(0, a), "status": status.status() });
            match status {
                TransferWords::Multivalued { first, second, first_image, second_image } => {
                    entry["first"] = first.to_json(m);
                    entry["second"] = second.to_json(m);
                    entry["first_image"] = json!(first_image);
                    entry["second_image"] = json!(second_image);
                }
                TransferWords::SingleValued { word, image } => {
                    all_multivalued = false;
                    entry["word"] = word.to_json(m);
                    entry["image"] = json!(image);
                    if self.conjugation_trivial {
                        any_fail = true;
                        b.witness(entry.clone());
                    }
                }
                TransferWords::NotReached => all_multivalued = false,
                TransferWords::NotInGroup => {
                    all_multivalued = false;
                    any_fail = true;
                    b.witness(entry.clone());
                }
            }
            per_transfer.push(entry);
        }
        if m.variable_count() == 1 {
            all_multivalued = false;
            any_fail = true;
            b.witness(json!({ "reason": "only the distinguished variable; V coincides with U" }));
        }
        b.metric("max_len", summary.max_len as f64)
            .metric("words", summary.words as f64)
            .metric("distinct_elements", summary.distinct_elements as f64)
            .metric("multivalued_elements", summary.multivalued_elements as f64)
            .metric("multivalued", f64::from(u8::from(summary.multivalued_elements > 0)))
            .metric("conjugation_trivial", f64::from(u8::from(self.conjugation_trivial)))
            .details(json!({ "transfers": per_transfer, "truncated": summary.truncated }));
        if self.conjugation_trivial {
            b.note("every conjugated generator equals itself, so all words for an element share one image");
        }
        let verdict = if any_fail {
            Verdict::Fail
        } else if all_multivalued {
            Verdict::Pass
        } else {
            b.note(format!("undetermined at depth {}", summary.max_len));
            Verdict::Undetermined
        };
        b.finish(verdict)
    }
}

/// Homomorphism and kernel checks for the map from words to `K⁰`.
pub fn verify_word_homomorphism<R: Rng + ?Sized>(
    m: &FiniteSymmetryModel,
    mv: &Multivaluedness,
    pairs: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Prop3);
    let mut failures = 0usize;
    for _ in 0..pairs {
        let w1 = random_word(m, 4, rng);
        let w2 = random_word(m, 4, rng);
        let (k1, i1) = word_image_unchecked(m, &w1)?;
        let (k2, i2) = word_image_unchecked(m, &w2)?;
        let (k12, i12) = word_image_unchecked(m, &w1.concat(m, &w2)?)?;
        if k12 != k1.compose(&k2) || i12 != i1.compose(&i2) {
            failures += 1;
            b.witness(json!({ "check": "multiplicativity", "first": w1.to_json(m), "second": w2.to_json(m) }));
        }
    }

    let outside = mv.enumeration.images_outside(m);
    if outside > 0 {
        b.witness(json!({ "check": "image_outside_distinguished_subgroup", "count": outside }));
    }

    let mut kernel_violations = 0usize;
    let mut nontrivial_element = 0usize;
    for node in mv.enumeration.trivial_image_words() {
        kernel_violations += 1;
        let (k, _) = mv.enumeration.image(node);
        if !k.is_identity() {
            nontrivial_element += 1;
        }
        if kernel_violations <= 5 {
            b.witness(json!({
                "check": "nontrivial_word_with_trivial_image",
                "word": mv.enumeration.word(node).to_json(m),
                "element": k,
                "element_is_identity": k.is_identity(),
            }));
        }
    }

    b.metric("random_pairs", pairs as f64)
        .metric("multiplicativity_failures", failures as f64)
        .metric("images_outside_distinguished_subgroup", outside as f64)
        .metric("words_checked", mv.enumeration.word_count() as f64)
        .metric("kernel_violations", kernel_violations as f64)
        .metric("kernel_violations_with_nontrivial_element", nontrivial_element as f64);
    let verdict = crate::report::verdict_from_witnesses(&b);
    Ok(b.finish(verdict))
}
