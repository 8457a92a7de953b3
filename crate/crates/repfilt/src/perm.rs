//! Permutations of `{0, .., degree-1}` in image-vector form.
//!
//! Composition is written left to right: `a.then(b)` applies `a` first.
//! Conjugation follows the right-action convention `x^g = g⁻¹ x g`, so that
//! `(x^g)^h = x^(g·h)` with `g·h = g.then(h)`.

use std::fmt;

use crate::error::GroupError;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<u16>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u16).collect(),
        }
    }

    /// Builds a permutation from its image vector, checking bijectivity.
    pub fn from_images(images: Vec<u16>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if (i as usize) >= n || seen[i as usize] {
                return Err(GroupError::InvalidPermutation {
                    images: images.clone(),
                });
            }
            seen[i as usize] = true;
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: u16) -> u16 {
        self.images[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u16 == j)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u16; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u16;
        }
        Perm { images }
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    /// Multiplicative order.
    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.then(self);
            k += 1;
        }
        k
    }

    /// Cycle lengths including fixed points, sorted descending.
    /// Invariant under relabelling of the domain.
    pub fn cycle_type(&self) -> Vec<u16> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u16;
            let mut x = start as u16;
            loop {
                seen[x as usize] = true;
                len += 1;
                x = self.apply(x);
                if x as usize == start {
                    break;
                }
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    pub fn cycles(&self) -> Vec<Vec<u16>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n as u16 {
            if seen[start as usize] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x as usize] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            if cycle.len() > 1 {
                cycles.push(cycle);
            }
        }
        cycles
    }

    /// Parses cycle notation like `(0 1 2)(3 4)`, with points separated by
    /// spaces or commas. The empty string and `()` denote the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, GroupError> {
        let mut perm = Perm::identity(degree);
        let bad = |msg: &str| GroupError::BadGroupSpec {
            spec: text.to_string(),
            reason: msg.to_string(),
        };
        let mut rest = text.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(bad("expected '('"));
            }
            let close = rest.find(')').ok_or_else(|| bad("missing ')'"))?;
            let inner = &rest[1..close];
            let points: Vec<u16> = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u16>().map_err(|_| bad("bad point")))
                .collect::<Result<_, _>>()?;
            for &p in &points {
                if p as usize >= degree {
                    return Err(bad("point out of range"));
                }
            }
            if points.len() > 1 {
                let mut uniq = points.clone();
                uniq.sort_unstable();
                uniq.dedup();
                if uniq.len() != points.len() {
                    return Err(bad("repeated point in cycle"));
                }
                let mut cycle = Perm::identity(degree);
                for w in points.windows(2) {
                    cycle.images[w[0] as usize] = w[1];
                }
                cycle.images[points[points.len() - 1] as usize] = points[0];
                perm = perm.then(&cycle);
            }
            rest = rest[close + 1..].trim_start();
        }
        Ok(perm)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
