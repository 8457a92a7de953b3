//! Finite permutation groups: element enumeration, subgroup conjugacy
//! classes, Weyl groups and double cosets.
//!
//! Subgroups are handled as sorted lists of element ids relative to the
//! parent group's canonical element order (identity is always id 0).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::error::GroupError;
use crate::perm::Perm;

pub type ElemId = u16;

/// Default bound on the group order during element enumeration.
pub const ORDER_BOUND: usize = 10_000;
/// Bound on the group order for subgroup-class enumeration. Covers every
/// group this engine targets (the largest is A5, order 60).
pub const SUBGROUP_ENUM_BOUND: usize = 120;

pub struct PermGroup {
    name: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, ElemId>,
    mult: Vec<ElemId>,
    inv: Vec<ElemId>,
    /// One generator word per element (apply left to right).
    words: Vec<Vec<u16>>,
    elem_classes: OnceLock<ElemClasses>,
    subgroup_data: OnceLock<SubgroupTable>,
}

pub struct ElemClasses {
    pub classes: Vec<Vec<ElemId>>,
    pub class_of: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConjugationWitness {
    pub source_class: usize,
    pub target_class: usize,
    pub conjugator: Perm,
}

pub struct WeylData {
    /// N_G(H)/H as permutations of the right cosets of H in N_G(H).
    pub group: PermGroup,
    /// Sorted element ids of the normalizer.
    pub normalizer: Vec<ElemId>,
    /// For each normalizer element (parallel to `normalizer`), the index of
    /// its image in `group.elements()`.
    pub weyl_index: Vec<u16>,
}

pub struct SubgroupClass {
    pub class_id: usize,
    /// Representative, minimal in its class by element-id list.
    pub rep: Vec<ElemId>,
    pub rep_index: usize,
    pub class_size: usize,
    pub order: usize,
    pub weyl: WeylData,
}

pub struct SubgroupTable {
    /// All subgroups, sorted by (order, element list).
    pub subgroups: Vec<Vec<ElemId>>,
    pub index: HashMap<Vec<ElemId>, usize>,
    pub classes: Vec<SubgroupClass>,
    /// For each subgroup (parallel to `subgroups`): its class id and a
    /// witness w with rep^w = subgroup.
    pub class_of: Vec<(usize, ElemId)>,
    /// chosen[low][high]: the minimal subgroup of class `low` contained in
    /// the representative of class `high`, if any. This fixes the one
    /// embedding per class pair that coefficient-system tables refer to.
    chosen: Vec<Vec<Option<usize>>>,
}

impl SubgroupTable {
    pub fn chosen_embedding(&self, low: usize, high: usize) -> Option<usize> {
        self.chosen[low][high]
    }
}

#[derive(Clone, Debug)]
pub struct DoubleCoset {
    pub rep: ElemId,
    /// H ∩ gKg⁻¹ for the representative g, as sorted element ids.
    pub intersection: Vec<ElemId>,
}

impl PermGroup {
    pub fn from_generators(
        name: impl Into<String>,
        degree: usize,
        generators: Vec<Perm>,
        order_bound: usize,
    ) -> Result<Self, GroupError> {
        let name = name.into();
        for g in &generators {
            if g.degree() != degree {
                return Err(GroupError::BadGroupSpec {
                    spec: name,
                    reason: "generator degree mismatch".into(),
                });
            }
        }
        // Breadth-first closure, recording a generator word per element.
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut words: HashMap<Perm, Vec<u16>> = HashMap::new();
        words.insert(id, Vec::new());
        let mut frontier = 0;
        while frontier < elements.len() {
            let e = elements[frontier].clone();
            frontier += 1;
            for (gi, g) in generators.iter().enumerate() {
                let f = e.then(g);
                if !words.contains_key(&f) {
                    if elements.len() >= order_bound {
                        return Err(GroupError::GroupTooLarge {
                            bound: order_bound,
                            context: format!("enumerating elements of {name}"),
                        });
                    }
                    let mut w = words[&e].clone();
                    w.push(gi as u16);
                    words.insert(f.clone(), w);
                    elements.push(f);
                }
            }
        }
        elements.sort_unstable();
        let n = elements.len();
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elements.iter().enumerate() {
            index.insert(e.clone(), i as ElemId);
        }
        let mut mult = vec![0 as ElemId; n * n];
        for a in 0..n {
            for b in 0..n {
                mult[a * n + b] = index[&elements[a].then(&elements[b])];
            }
        }
        let mut inv = vec![0 as ElemId; n];
        for a in 0..n {
            inv[a] = index[&elements[a].inverse()];
        }
        let word_list = elements.iter().map(|e| words[e].clone()).collect();
        Ok(PermGroup {
            name,
            degree,
            generators,
            elements,
            index,
            mult,
            inv,
            words: word_list,
            elem_classes: OnceLock::new(),
            subgroup_data: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn elem(&self, id: ElemId) -> &Perm {
        &self.elements[id as usize]
    }

    pub fn id_of(&self, p: &Perm) -> Option<ElemId> {
        self.index.get(p).copied()
    }

    /// Generator word of an element, applied left to right.
    pub fn word_of(&self, id: ElemId) -> &[u16] {
        &self.words[id as usize]
    }

    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mult[a as usize * self.elements.len() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inv[a as usize]
    }

    /// x^g = g⁻¹·x·g.
    #[inline]
    pub fn conj(&self, x: ElemId, g: ElemId) -> ElemId {
        self.mul(self.mul(self.inv(g), x), g)
    }

    /// S^g, sorted.
    pub fn conj_set(&self, s: &[ElemId], g: ElemId) -> Vec<ElemId> {
        let mut out: Vec<ElemId> = s.iter().map(|&x| self.conj(x, g)).collect();
        out.sort_unstable();
        out
    }

    pub fn elem_order(&self, id: ElemId) -> usize {
        self.elements[id as usize].order()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n as ElemId).all(|a| (0..n as ElemId).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn elem_conjugacy_classes(&self) -> &ElemClasses {
        self.elem_classes.get_or_init(|| {
            let n = self.order();
            let mut class_of = vec![u16::MAX; n];
            let mut classes: Vec<Vec<ElemId>> = Vec::new();
            for x in 0..n as ElemId {
                if class_of[x as usize] != u16::MAX {
                    continue;
                }
                let mut members: BTreeSet<ElemId> = BTreeSet::new();
                for g in 0..n as ElemId {
                    members.insert(self.conj(x, g));
                }
                let members: Vec<ElemId> = members.into_iter().collect();
                for &m in &members {
                    class_of[m as usize] = classes.len() as u16;
                }
                classes.push(members);
            }
            // Canonical order: by (element order, cycle type, minimal member).
            let mut order: Vec<usize> = (0..classes.len()).collect();
            order.sort_by_key(|&i| {
                let m = classes[i][0];
                (self.elem_order(m), self.elem(m).cycle_type(), classes[i][0])
            });
            let mut new_classes = Vec::with_capacity(classes.len());
            for (new_id, &old) in order.iter().enumerate() {
                for &m in &classes[old] {
                    class_of[m as usize] = new_id as u16;
                }
                new_classes.push(classes[old].clone());
            }
            ElemClasses {
                classes: new_classes,
                class_of,
            }
        })
    }

    /// Closure of a seed set of element ids into a subgroup.
    pub fn closure(&self, seed: &[ElemId]) -> Vec<ElemId> {
        let mut set: BTreeSet<ElemId> = seed.iter().copied().collect();
        set.insert(0); // identity
        let mut work: Vec<ElemId> = set.iter().copied().collect();
        while let Some(a) = work.pop() {
            let snapshot: Vec<ElemId> = set.iter().copied().collect();
            for &b in &snapshot {
                for &c in &[self.mul(a, b), self.mul(b, a)] {
                    if set.insert(c) {
                        work.push(c);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_subgroup_set(&self, elems: &[ElemId]) -> bool {
        let set: BTreeSet<ElemId> = elems.iter().copied().collect();
        if !set.contains(&0) || set.iter().any(|&a| a as usize >= self.order()) {
            return false;
        }
        set.iter()
            .all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    pub fn subgroup_data(&self) -> Result<&SubgroupTable, GroupError> {
        if self.order() > SUBGROUP_ENUM_BOUND {
            return Err(GroupError::GroupTooLarge {
                bound: SUBGROUP_ENUM_BOUND,
                context: format!("enumerating subgroups of {}", self.name),
            });
        }
        Ok(self
            .subgroup_data
            .get_or_init(|| self.build_subgroup_table()))
    }

    /// One class per conjugacy class of subgroups, sorted by
    /// (order, canonical key); deterministic across runs.
    pub fn subgroup_classes(&self) -> Result<&[SubgroupClass], GroupError> {
        Ok(&self.subgroup_data()?.classes)
    }

    /// N_G(H)/H for the representative of a subgroup class, as a faithful
    /// permutation group on its cosets.
    pub fn weyl_group(&self, class: usize) -> Result<&PermGroup, GroupError> {
        Ok(&self.subgroup_data()?.classes[class].weyl.group)
    }

    fn build_subgroup_table(&self) -> SubgroupTable {
        let n = self.order() as ElemId;
        // Cyclic seeding followed by one-element extensions to a fixpoint.
        let mut known: BTreeSet<Vec<ElemId>> = BTreeSet::new();
        known.insert(vec![0]);
        let mut queue: Vec<Vec<ElemId>> = vec![vec![0]];
        for e in 1..n {
            let c = self.closure(&[e]);
            if known.insert(c.clone()) {
                queue.push(c);
            }
        }
        while let Some(sub) = queue.pop() {
            if sub.len() == n as usize {
                continue;
            }
            for e in 1..n {
                if sub.binary_search(&e).is_ok() {
                    continue;
                }
                let mut seed = sub.clone();
                seed.push(e);
                let c = self.closure(&seed);
                if known.insert(c.clone()) {
                    queue.push(c);
                }
            }
        }
        let mut subgroups: Vec<Vec<ElemId>> = known.into_iter().collect();
        subgroups.sort_by_key(|s| (s.len(), s.clone()));
        let index: HashMap<Vec<ElemId>, usize> = subgroups
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        // Bucket into conjugacy classes; the class representative is the
        // minimal member, witnesses satisfy rep^w = member.
        let mut class_of: Vec<Option<(usize, ElemId)>> = vec![None; subgroups.len()];
        let mut raw_classes: Vec<(usize, Vec<(usize, ElemId)>)> = Vec::new();
        for i in 0..subgroups.len() {
            if class_of[i].is_some() {
                continue;
            }
            let mut orbit: BTreeMap<usize, ElemId> = BTreeMap::new();
            for g in 0..n {
                let t = self.conj_set(&subgroups[i], g);
                let ti = index[&t];
                orbit.entry(ti).or_insert(g);
            }
            // `orbit` maps member -> g with (subgroups[i])^g = member; rebase
            // onto the minimal member as representative.
            let (&rep, &g_rep) = orbit.iter().next().unwrap();
            let members: Vec<(usize, ElemId)> = orbit
                .iter()
                .map(|(&m, &g)| (m, self.mul(self.inv(g_rep), g)))
                .collect();
            let class_tmp_id = raw_classes.len();
            for &(m, w) in &members {
                class_of[m] = Some((class_tmp_id, w));
            }
            raw_classes.push((rep, members));
        }

        // Canonical class order: (order, cycle-type multiset, rep elements).
        let mut order_idx: Vec<usize> = (0..raw_classes.len()).collect();
        order_idx.sort_by_key(|&ci| {
            let rep = raw_classes[ci].0;
            let mut types: Vec<Vec<u16>> = subgroups[rep]
                .iter()
                .map(|&e| self.elem(e).cycle_type())
                .collect();
            types.sort();
            (subgroups[rep].len(), types, subgroups[rep].clone())
        });
        let mut remap = vec![0usize; raw_classes.len()];
        for (new_id, &old) in order_idx.iter().enumerate() {
            remap[old] = new_id;
        }
        let class_of: Vec<(usize, ElemId)> = class_of
            .into_iter()
            .map(|o| {
                let (c, w) = o.unwrap();
                (remap[c], w)
            })
            .collect();
        let mut classes = Vec::with_capacity(raw_classes.len());
        for &old in &order_idx {
            let (rep_index, ref members) = raw_classes[old];
            let rep = subgroups[rep_index].clone();
            let weyl = self.build_weyl(&rep);
            classes.push(SubgroupClass {
                class_id: classes.len(),
                order: rep.len(),
                class_size: members.len(),
                rep,
                rep_index,
                weyl,
            });
        }
        let n_classes = classes.len();
        let mut chosen = vec![vec![None; n_classes]; n_classes];
        for (si, sub) in subgroups.iter().enumerate() {
            let (low, _) = class_of[si];
            for high in 0..n_classes {
                if chosen[low][high].is_some() {
                    continue;
                }
                let rep = &classes[high].rep;
                if sub.iter().all(|e| rep.binary_search(e).is_ok()) {
                    // Subgroups are scanned in canonical order, so the first
                    // hit is the minimal member.
                    chosen[low][high] = Some(si);
                }
            }
        }
        SubgroupTable {
            subgroups,
            index,
            classes,
            class_of,
            chosen,
        }
    }

    fn build_weyl(&self, h: &[ElemId]) -> WeylData {
        let n = self.order() as ElemId;
        let h_set: BTreeSet<ElemId> = h.iter().copied().collect();
        let mut normalizer: Vec<ElemId> = Vec::new();
        for g in 0..n {
            if self.conj_set(h, g) == *h {
                normalizer.push(g);
            }
        }
        // Right cosets Hx of H in N, ordered by minimal element.
        let mut coset_of_elem: HashMap<ElemId, usize> = HashMap::new();
        let mut cosets: Vec<Vec<ElemId>> = Vec::new();
        for &x in &normalizer {
            if coset_of_elem.contains_key(&x) {
                continue;
            }
            let mut coset: Vec<ElemId> = h_set.iter().map(|&hh| self.mul(hh, x)).collect();
            coset.sort_unstable();
            for &m in &coset {
                coset_of_elem.insert(m, cosets.len());
            }
            cosets.push(coset);
        }
        let mut coset_order: Vec<usize> = (0..cosets.len()).collect();
        coset_order.sort_by_key(|&i| cosets[i][0]);
        let mut coset_rank = vec![0usize; cosets.len()];
        for (rank, &i) in coset_order.iter().enumerate() {
            coset_rank[i] = rank;
        }
        let deg = cosets.len();
        let perm_of = |gid: ElemId| -> Perm {
            let mut images = vec![0u16; deg];
            for (i, &old) in coset_order.iter().enumerate() {
                let moved = self.mul(cosets[old][0], gid);
                images[i] = coset_rank[coset_of_elem[&moved]] as u16;
            }
            Perm::from_images(images).expect("coset action is a permutation")
        };
        let gens: Vec<Perm> = {
            let mut seen = BTreeSet::new();
            normalizer
                .iter()
                .map(|&g| perm_of(g))
                .filter(|p| seen.insert(p.clone()))
                .collect()
        };
        let group = PermGroup::from_generators("W", deg, gens, ORDER_BOUND)
            .expect("Weyl group enumeration cannot exceed the parent bound");
        let weyl_index = normalizer
            .iter()
            .map(|&g| group.id_of(&perm_of(g)).expect("closed"))
            .collect();
        WeylData {
            group,
            normalizer,
            weyl_index,
        }
    }

    /// Class id and witness (rep^w = S) of an actual subgroup.
    pub fn class_and_witness(&self, s: &[ElemId]) -> Result<(usize, ElemId), GroupError> {
        let data = self.subgroup_data()?;
        let idx = data.index.get(s).ok_or(GroupError::NotASubgroup)?;
        Ok(data.class_of[*idx])
    }

    /// The Weyl-element index of a normalizer element n of class `c`'s
    /// representative.
    pub fn weyl_index_of(&self, class: usize, n: ElemId) -> Option<usize> {
        let data = self.subgroup_data.get()?;
        let weyl = &data.classes[class].weyl;
        let pos = weyl.normalizer.binary_search(&n).ok()?;
        Some(weyl.weyl_index[pos] as usize)
    }

    pub fn double_cosets(&self, h: &[ElemId], k: &[ElemId]) -> Vec<DoubleCoset> {
        let n = self.order();
        let mut visited = vec![false; n];
        let mut out = Vec::new();
        for g in 0..n as ElemId {
            if visited[g as usize] {
                continue;
            }
            // Orbit of g under (h, k) -> h·g·k.
            let mut stack = vec![g];
            visited[g as usize] = true;
            while let Some(x) = stack.pop() {
                for &hh in h {
                    let y = self.mul(hh, x);
                    if !visited[y as usize] {
                        visited[y as usize] = true;
                        stack.push(y);
                    }
                }
                for &kk in k {
                    let y = self.mul(x, kk);
                    if !visited[y as usize] {
                        visited[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            let ginv = self.inv(g);
            let conj_k: BTreeSet<ElemId> = k
                .iter()
                .map(|&kk| self.mul(self.mul(g, kk), ginv))
                .collect();
            let intersection = h.iter().copied().filter(|e| conj_k.contains(e)).collect();
            out.push(DoubleCoset {
                rep: g,
                intersection,
            });
        }
        out
    }

    pub fn is_conjugate_subgroups(
        &self,
        s: &[ElemId],
        t: &[ElemId],
    ) -> Result<Option<ConjugationWitness>, GroupError> {
        if !self.is_subgroup_set(s) || !self.is_subgroup_set(t) {
            return Err(GroupError::NotASubgroup);
        }
        let (cs, _) = self.class_and_witness(s)?;
        let (ct, _) = self.class_and_witness(t)?;
        if cs != ct {
            return Ok(None);
        }
        for g in 0..self.order() as ElemId {
            if self.conj_set(s, g) == *t {
                return Ok(Some(ConjugationWitness {
                    source_class: cs,
                    target_class: ct,
                    conjugator: self.elem(g).clone(),
                }));
            }
        }
        Ok(None)
    }

    /// Conjugacy classes, under H-conjugation, of the subgroups contained in
    /// H (given as sorted element ids). Returns for each class the member
    /// subgroup indices (into `subgroup_data().subgroups`) with the minimal
    /// member first, plus a lookup from subgroup index to class position.
    pub fn subgroup_classes_within(
        &self,
        h: &[ElemId],
    ) -> Result<(Vec<Vec<usize>>, HashMap<usize, usize>), GroupError> {
        self.subgroup_orbits(h, h)
    }

    /// Orbits of the subgroups contained in `container` under conjugation
    /// by `acting` (which must normalize `container`).
    pub fn subgroup_orbits(
        &self,
        container: &[ElemId],
        acting: &[ElemId],
    ) -> Result<(Vec<Vec<usize>>, HashMap<usize, usize>), GroupError> {
        let data = self.subgroup_data()?;
        let h_set: BTreeSet<ElemId> = container.iter().copied().collect();
        let inside: Vec<usize> = data
            .subgroups
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().all(|e| h_set.contains(e)))
            .map(|(i, _)| i)
            .collect();
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in &inside {
            if class_of.contains_key(&i) {
                continue;
            }
            let mut members: BTreeSet<usize> = BTreeSet::new();
            for &g in acting {
                let t = self.conj_set(&data.subgroups[i], g);
                members.insert(data.index[&t]);
            }
            let members: Vec<usize> = members.into_iter().collect();
            for &m in &members {
                class_of.insert(m, classes.len());
            }
            classes.push(members);
        }
        // Canonical order by the representative (minimal member), which is
        // consistent with the global subgroup order.
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by_key(|&ci| {
            let rep = classes[ci][0];
            (data.subgroups[rep].len(), data.subgroups[rep].clone())
        });
        let mut remap = vec![0usize; classes.len()];
        for (new_id, &old) in order.iter().enumerate() {
            remap[old] = new_id;
        }
        for v in class_of.values_mut() {
            *v = remap[*v];
        }
        let classes = order.into_iter().map(|old| classes[old].clone()).collect();
        Ok((classes, class_of))
    }

    /// Short structural name used in reports (C_n, V4, S3, ...).
    pub fn structure_name_of(&self, elems: &[ElemId]) -> String {
        let order = elems.len();
        if order == 1 {
            return "e".to_string();
        }
        let orders: Vec<usize> = elems.iter().map(|&e| self.elem_order(e)).collect();
        let max_order = *orders.iter().max().unwrap();
        if max_order == order {
            return format!("C{order}");
        }
        let set: BTreeSet<ElemId> = elems.iter().copied().collect();
        let abelian = elems
            .iter()
            .all(|&a| elems.iter().all(|&b| self.mul(a, b) == self.mul(b, a)));
        let _ = &set;
        let involutions = orders.iter().filter(|&&o| o == 2).count();
        match (order, abelian) {
            (4, true) => "V4".to_string(),
            (6, false) => "S3".to_string(),
            (8, false) if involutions == 5 => "D4".to_string(),
            (8, false) if involutions == 1 => "Q8".to_string(),
            (10, false) => "D5".to_string(),
            (12, false) if max_order == 3 => "A4".to_string(),
            (12, false) if involutions == 7 => "D6".to_string(),
            (60, false) if max_order == 5 => "A5".to_string(),
            (_, false) if order == 2 * max_order && involutions > 2 => {
                format!("D{max_order}")
            }
            (_, true) => format!("Ab{order}"),
            _ => format!("G{order}"),
        }
    }

    pub fn class_name(&self, class: usize) -> String {
        match self.subgroup_data() {
            Ok(data) => self.structure_name_of(&data.classes[class].rep),
            Err(_) => format!("class{class}"),
        }
    }
}

/// Parses the CLI group grammar:
/// `S3 | A4 | A5 | D5 | Cn:k | C<k> | perm:deg=<m>;gens=<cycles>,...`.
pub fn parse_group_spec(spec: &str) -> Result<PermGroup, GroupError> {
    let bad = |reason: &str| GroupError::BadGroupSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = spec.trim();
    match trimmed {
        "S3" => {
            return PermGroup::from_generators(
                "S3",
                3,
                vec![
                    Perm::parse_cycles("(0 1)", 3)?,
                    Perm::parse_cycles("(0 1 2)", 3)?,
                ],
                ORDER_BOUND,
            )
        }
        "A4" => {
            return PermGroup::from_generators(
                "A4",
                4,
                vec![
                    Perm::parse_cycles("(0 1 2)", 4)?,
                    Perm::parse_cycles("(0 1)(2 3)", 4)?,
                ],
                ORDER_BOUND,
            )
        }
        "A5" => {
            return PermGroup::from_generators(
                "A5",
                5,
                vec![
                    Perm::parse_cycles("(0 1 2 3 4)", 5)?,
                    Perm::parse_cycles("(0 1 2)", 5)?,
                ],
                ORDER_BOUND,
            )
        }
        "D5" => {
            return PermGroup::from_generators(
                "D5",
                5,
                vec![
                    Perm::parse_cycles("(0 1 2 3 4)", 5)?,
                    Perm::parse_cycles("(1 4)(2 3)", 5)?,
                ],
                ORDER_BOUND,
            )
        }
        _ => {}
    }
    if let Some(k) = trimmed
        .strip_prefix("Cn:")
        .or_else(|| trimmed.strip_prefix('C'))
    {
        let k: usize = k.parse().map_err(|_| bad("bad cyclic order"))?;
        if k == 0 || k > ORDER_BOUND {
            return Err(bad("cyclic order out of range"));
        }
        let gens = if k == 1 {
            Vec::new()
        } else {
            let mut images: Vec<u16> = (0..k as u16).collect();
            images.rotate_left(1);
            vec![Perm::from_images(images)?]
        };
        return PermGroup::from_generators(format!("C{k}"), k.max(1), gens, ORDER_BOUND);
    }
    if let Some(rest) = trimmed.strip_prefix("perm:") {
        let mut degree: Option<usize> = None;
        let mut gens_text: Option<&str> = None;
        for part in rest.split(';') {
            if let Some(d) = part.strip_prefix("deg=") {
                degree = Some(d.parse().map_err(|_| bad("bad degree"))?);
            } else if let Some(g) = part.strip_prefix("gens=") {
                gens_text = Some(g);
            } else if !part.trim().is_empty() {
                return Err(bad("unknown perm: field"));
            }
        }
        let degree = degree.ok_or_else(|| bad("missing deg="))?;
        let gens_text = gens_text.ok_or_else(|| bad("missing gens="))?;
        if degree == 0 || degree > u16::MAX as usize {
            return Err(bad("degree out of range"));
        }
        // Generators are comma-separated at paren depth 0.
        let mut gens = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        let bytes = gens_text.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth = depth.saturating_sub(1),
                b',' if depth == 0 => {
                    gens.push(&gens_text[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        gens.push(&gens_text[start..]);
        let gens = gens
            .into_iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| Perm::parse_cycles(s, degree))
            .collect::<Result<Vec<_>, _>>()?;
        return PermGroup::from_generators(trimmed, degree, gens, ORDER_BOUND);
    }
    Err(bad("unrecognized group spec"))
}
